#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "anc/kernels.hpp"
#include "anc/plant.hpp"
#include "test_util.hpp"

using namespace anc;

namespace {

Plant test_plant(std::vector<double> primary, std::vector<double> secondary,
                 double rate = 16000.0) {
    return make_plant(ImpulseResponse{std::move(primary), PathLabel::primary},
                      ImpulseResponse{std::move(secondary), PathLabel::secondary},
                      std::nullopt, rate);
}

double l2(const std::vector<double>& v) {
    return std::sqrt(kernels::sum_sq(v.data(), v.size()));
}

}  // namespace

TEST_CASE("estimate defaults to a copy of the true secondary path") {
    const Plant plant = test_plant({1.0, 0.5}, {0.2, 0.8, 0.1});
    CHECK(plant.secondary_estimate.taps == plant.secondary.taps);
    CHECK(plant.secondary_estimate.label == PathLabel::secondary_estimate);
}

TEST_CASE("disturbance: zero input and identity path") {
    const Plant plant = test_plant({1.0}, {1.0});
    const Signal zeros{std::vector<double>(32, 0.0), 16000.0};
    for (double v : disturbance(plant, zeros).samples) CHECK(v == 0.0);

    Xoshiro256 rng(3);
    const Signal x{testutil::random_vector(64, rng), 16000.0};
    CHECK(disturbance(plant, x).samples == x.samples);
}

TEST_CASE("disturbance and filtered reference match the convolution oracle") {
    Xoshiro256 rng(4);
    const auto p = testutil::random_vector(8, rng);
    const auto s = testutil::random_vector(5, rng);
    const Plant plant = test_plant(p, s);
    const Signal x{testutil::random_vector(64, rng), 16000.0};

    const auto want_d = testutil::convolve_oracle(x.samples, p);
    const auto got_d = disturbance(plant, x).samples;
    const auto want_xp = testutil::convolve_oracle(x.samples, s);
    const auto got_xp = filtered_reference(plant, x).samples;
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(got_d[i] - want_d[i]) <= 1e-12 * std::max(1.0, std::abs(want_d[i])));
        CHECK(std::abs(got_xp[i] - want_xp[i]) <= 1e-12 * std::max(1.0, std::abs(want_xp[i])));
    }
}

TEST_CASE("filtered reference uses the estimate, not the true path") {
    Plant plant = make_plant(ImpulseResponse{{1.0}, PathLabel::primary},
                             ImpulseResponse{{0.0, 1.0}, PathLabel::secondary},
                             ImpulseResponse{{1.0}, PathLabel::secondary_estimate}, 16000.0);
    Xoshiro256 rng(5);
    const Signal x{testutil::random_vector(16, rng), 16000.0};
    CHECK(filtered_reference(plant, x).samples == x.samples);
}

TEST_CASE("an impulse exposes the estimate taps, truncated to the input length") {
    Xoshiro256 rng(8);
    const auto taps = testutil::random_vector(24, rng);
    const Plant plant = test_plant({1.0}, taps);
    Signal impulse{std::vector<double>(16, 0.0), 16000.0};
    impulse.samples[0] = 1.0;

    const Signal xp = filtered_reference(plant, impulse);
    for (std::size_t i = 0; i < impulse.size(); ++i) CHECK(xp.samples[i] == taps[i]);
}

TEST_CASE("sample-rate mismatch is rejected") {
    const Plant plant = test_plant({1.0}, {1.0});
    const Signal wrong{{1.0, 2.0}, 8000.0};
    CHECK_THROWS_AS(disturbance(plant, wrong), std::invalid_argument);
    CHECK_THROWS_AS(filtered_reference(plant, wrong), std::invalid_argument);
}

TEST_CASE("both operations are linear in the input") {
    Xoshiro256 rng(6);
    const Plant plant = test_plant(testutil::random_vector(12, rng),
                                   testutil::random_vector(6, rng));
    const auto a = testutil::random_vector(48, rng);
    const auto b = testutil::random_vector(48, rng);
    std::vector<double> sum(48);
    for (std::size_t i = 0; i < 48; ++i) sum[i] = a[i] + b[i];

    const auto d_sum = disturbance(plant, {sum, 16000.0}).samples;
    const auto d_a = disturbance(plant, {a, 16000.0}).samples;
    const auto d_b = disturbance(plant, {b, 16000.0}).samples;
    for (std::size_t i = 0; i < 48; ++i)
        CHECK(std::abs(d_sum[i] - (d_a[i] + d_b[i])) <=
              1e-12 * std::max(1.0, std::abs(d_sum[i])));
}

TEST_CASE("perturb_secondary: zero amount returns the plant unchanged") {
    const Plant plant = test_plant({1.0, 0.2}, {0.1, 0.9, 0.3});
    const Plant out = perturb_secondary(plant, 0.0, 42);
    CHECK(out.secondary.taps == plant.secondary.taps);
    CHECK(out.secondary_estimate.taps == plant.secondary_estimate.taps);
}

TEST_CASE("perturb_secondary: exact relative norm, estimate untouched, input const") {
    Xoshiro256 rng(7);
    const Plant plant = test_plant(testutil::random_vector(32, rng),
                                   testutil::random_vector(24, rng));
    const std::vector<double> original = plant.secondary.taps;

    for (double amount : {0.1, 0.2, 0.3}) {
        const Plant out = perturb_secondary(plant, amount, 42);
        std::vector<double> delta(original.size());
        for (std::size_t i = 0; i < delta.size(); ++i)
            delta[i] = out.secondary.taps[i] - original[i];
        CHECK(testutil::rel_err(l2(delta) / l2(original), amount) < 1e-12);
        CHECK(out.secondary_estimate.taps == plant.secondary_estimate.taps);
    }
    CHECK(plant.secondary.taps == original);

    const Plant a = perturb_secondary(plant, 0.3, 42);
    const Plant b = perturb_secondary(plant, 0.3, 42);
    CHECK(a.secondary.taps == b.secondary.taps);

    CHECK_THROWS_AS(perturb_secondary(plant, -0.1, 42), std::invalid_argument);
}
