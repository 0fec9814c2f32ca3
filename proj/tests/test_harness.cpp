#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "anc/harness.hpp"
#include "anc/kernels.hpp"
#include "test_util.hpp"

using namespace anc;

namespace {

Plant stock_plant() {
    return make_plant(generate_synthetic_path(512, 64, 0.985, 101, PathLabel::primary),
                      generate_synthetic_path(256, 16, 0.5, 102, PathLabel::secondary),
                      std::nullopt, 16000.0);
}

}  // namespace

TEST_CASE("noise reduction: equal signals give exactly zero dB everywhere") {
    Xoshiro256 rng(51);
    const Signal d{testutil::random_vector(40000, rng), 16000.0};
    const NrSeries series = noise_reduction_level(d, d, 0.5);
    REQUIRE(series.values_db.size() == 5);  // final partial window dropped
    for (double v : series.values_db) CHECK(v == 0.0);
}

TEST_CASE("noise reduction: 20 dB worked example and sentinel rules") {
    std::vector<double> d(4, 0.0), e(4, 0.0);
    d[0] = 10.0;  // window energy 100
    e[0] = 1.0;   // window energy 1
    const NrSeries series = noise_reduction_level({d, 4.0}, {e, 4.0}, 1.0);
    REQUIRE(series.values_db.size() == 1);
    CHECK(series.values_db[0] == 20.0);

    const NrSeries capped = noise_reduction_level({d, 4.0}, {std::vector<double>(4, 0.0), 4.0}, 1.0);
    CHECK(capped.values_db[0] == 200.0);

    const NrSeries silent =
        noise_reduction_level({std::vector<double>(4, 0.0), 4.0}, {e, 4.0}, 1.0);
    CHECK(silent.values_db[0] == 0.0);
}

TEST_CASE("noise reduction matches a brute-force windowing oracle") {
    Xoshiro256 rng(52);
    const std::size_t n = 10240;
    const Signal d{testutil::random_vector(n, rng), 16000.0};
    const Signal e{testutil::random_vector(n, rng, 0.3), 16000.0};
    const double window_seconds = 0.1;  // 1600 samples
    const NrSeries series = noise_reduction_level(d, e, window_seconds);

    const std::size_t window = 1600;
    REQUIRE(series.values_db.size() == n / window);
    for (std::size_t k = 0; k < series.values_db.size(); ++k) {
        double sd = 0.0, se = 0.0;
        for (std::size_t i = k * window; i < (k + 1) * window; ++i) {
            sd += d.samples[i] * d.samples[i];
            se += e.samples[i] * e.samples[i];
        }
        CHECK(std::abs(series.values_db[k] - 10.0 * std::log10(sd / se)) < 1e-10);
    }
}

TEST_CASE("noise reduction input validation") {
    const Signal a{std::vector<double>(8, 1.0), 16000.0};
    const Signal b{std::vector<double>(4, 1.0), 16000.0};
    const Signal c{std::vector<double>(8, 1.0), 8000.0};
    CHECK_THROWS_AS(noise_reduction_level(a, b, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(noise_reduction_level(a, c, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(noise_reduction_level(a, a, 0.0), std::invalid_argument);

    // shorter than one window: no full windows, empty series
    const NrSeries empty = noise_reduction_level(a, a, 1.0);
    CHECK(empty.values_db.empty());
}

TEST_CASE("split_dataset: temporal split and partition property") {
    Xoshiro256 rng(53);
    const Signal s{testutil::random_vector(10, rng), 16000.0};
    const auto [train, test] = split_dataset({s}, 0.7);
    REQUIRE(train.size() == 1);
    CHECK(train[0].size() == 7);
    CHECK(test[0].size() == 3);

    std::vector<double> joined = train[0].samples;
    joined.insert(joined.end(), test[0].samples.begin(), test[0].samples.end());
    CHECK(joined == s.samples);

    const Signal two{{1.0, 2.0}, 16000.0};
    const auto [t2, e2] = split_dataset({two}, 0.5);
    CHECK(t2[0].size() == 1);
    CHECK(e2[0].size() == 1);

    CHECK_THROWS_AS(split_dataset({Signal{{1.0}, 16000.0}}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(split_dataset({s}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(split_dataset({s}, 1.0), std::invalid_argument);
}

TEST_CASE("broadband dataset: one unit-RMS signal per band, deterministic") {
    const std::vector<Band> bands = {{600.0, 1800.0}, {1500.0, 4000.0},
                                     {3500.0, 5000.0}, {4400.0, 6000.0}};
    const auto signals = broadband_dataset(16000.0, bands, 2.048, 61);
    REQUIRE(signals.size() == 4);
    for (const Signal& s : signals) {
        CHECK(testutil::rel_err(rms(s.samples), 1.0) < 1e-6);
        CHECK(s.sample_rate_hz == 16000.0);
    }
    const auto again = broadband_dataset(16000.0, bands, 2.048, 61);
    for (std::size_t i = 0; i < 4; ++i) CHECK(signals[i].samples == again[i].samples);
}

TEST_CASE("broadband dataset: out-of-band power stays below one percent") {
    const std::vector<Band> bands = {{600.0, 1800.0}, {1500.0, 4000.0},
                                     {3500.0, 5000.0}, {4400.0, 6000.0}};
    // 32768 samples at 16 kHz, a power of two for the FFT oracle
    const auto signals = broadband_dataset(16000.0, bands, 2.048, 62);
    for (std::size_t b = 0; b < bands.size(); ++b) {
        const std::size_t n = signals[b].size();
        REQUIRE((n & (n - 1)) == 0);
        std::vector<std::complex<double>> spectrum(signals[b].samples.begin(),
                                                   signals[b].samples.end());
        testutil::fft_radix2(spectrum);

        double total = 0.0, outside = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double freq =
                16000.0 * static_cast<double>(std::min(k, n - k)) / static_cast<double>(n);
            const double power = std::norm(spectrum[k]);
            total += power;
            if (freq < bands[b].low_hz || freq > bands[b].high_hz) outside += power;
        }
        CHECK(outside / total < 0.01);
    }
}

TEST_CASE("compare: the zero step size scores exactly zero dB in every window") {
    const Plant plant = stock_plant();
    Xoshiro256 rng(54);
    const Signal test{testutil::random_vector(32000, rng), 16000.0};
    const ComparisonReport report =
        compare_strategies(plant, test, {{"off", FixedStep{0.0}}}, 64);
    REQUIRE(report.strategies.size() == 1);
    CHECK_FALSE(report.strategies[0].diverged);
    REQUIRE(report.strategies[0].nr.values_db.size() == 4);
    for (double v : report.strategies[0].nr.values_db) CHECK(v == 0.0);
}

TEST_CASE("compare: duplicated strategies report identical series") {
    const Plant plant = stock_plant();
    Xoshiro256 rng(55);
    const Signal test{testutil::random_vector(24000, rng), 16000.0};
    const ComparisonReport report = compare_strategies(
        plant, test, {{"a", FixedStep{5e-5}}, {"b", FixedStep{5e-5}}}, 128);
    REQUIRE(report.strategies.size() == 2);
    CHECK(report.strategies[0].nr.values_db == report.strategies[1].nr.values_db);
}

TEST_CASE("every strategy in a comparison sees the identical disturbance") {
    const Plant plant = stock_plant();
    Xoshiro256 rng(56);
    const Signal test{testutil::random_vector(8000, rng), 16000.0};
    const RunTrace a = run_fxlms(plant, test, FixedStep{0.0}, 64);
    const RunTrace b = run_fxlms(plant, test, NormalizedStep{0.01, 1e-6}, 64);
    CHECK(a.disturbance.samples == b.disturbance.samples);
}

TEST_CASE("compare flags a diverging strategy instead of failing") {
    const Plant plant = stock_plant();
    Xoshiro256 rng(57);
    const Signal test{testutil::random_vector(24000, rng), 16000.0};
    const ComparisonReport report = compare_strategies(
        plant, test, {{"sane", FixedStep{0.0}}, {"wild", FixedStep{10.0}}}, 64);
    CHECK_FALSE(report.strategies[0].diverged);
    CHECK(report.strategies[1].diverged);
    CHECK(report.strategies[1].divergence_index > 0);
}

TEST_CASE("converged runs do not blow up late") {
    const Plant plant = stock_plant();
    const auto bands = broadband_dataset(
        16000.0, {{600.0, 1800.0}, {1500.0, 4000.0}}, 3.0, 63);
    for (const Signal& band : bands) {
        const ComparisonReport report =
            compare_strategies(plant, band, {{"slow", FixedStep{5e-5}}}, 512);
        const auto& nr = report.strategies[0].nr.values_db;
        REQUIRE(nr.size() >= 2);
        CHECK(nr.back() >= nr.front() - 0.5);
    }
}

TEST_CASE("robustness sweep: zero amount reproduces the unperturbed comparison") {
    const Plant plant = stock_plant();
    Xoshiro256 rng(58);
    const Signal test{testutil::random_vector(24000, rng), 16000.0};
    const NamedStrategy strategy{"probe", FixedStep{5e-5}};

    const auto reports = robustness_sweep(plant, test, strategy, {0.0, 0.1, 0.2}, 71, 128);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].perturb_amount == 0.0);

    const ComparisonReport base = compare_strategies(plant, test, {strategy}, 128);
    CHECK(reports[0].strategies[0].nr.values_db == base.strategies[0].nr.values_db);

    const auto again = robustness_sweep(plant, test, strategy, {0.0, 0.1, 0.2}, 71, 128);
    for (std::size_t i = 0; i < reports.size(); ++i)
        CHECK(reports[i].strategies[0].nr.values_db == again[i].strategies[0].nr.values_db);
}
