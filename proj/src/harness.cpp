#include "anc/harness.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

#include "anc/kernels.hpp"
#include "anc/rng.hpp"

namespace anc {

std::optional<double> first_window_db(const NrSeries& series) {
    if (series.values_db.empty()) return std::nullopt;
    return series.values_db.front();
}

std::optional<double> final_window_db(const NrSeries& series) {
    if (series.values_db.empty()) return std::nullopt;
    return series.values_db.back();
}

NrSeries noise_reduction_level(const Signal& d, const Signal& e, double window_seconds) {
    if (d.size() != e.size())
        throw std::invalid_argument("noise_reduction_level: signal lengths must match");
    if (d.sample_rate_hz != e.sample_rate_hz)
        throw std::invalid_argument("noise_reduction_level: sample-rate mismatch");
    if (!(window_seconds > 0.0))
        throw std::invalid_argument("noise_reduction_level: window must be positive");
    const auto window = static_cast<std::size_t>(window_seconds * d.sample_rate_hz);
    if (window < 1)
        throw std::invalid_argument("noise_reduction_level: window shorter than one sample");

    NrSeries series;
    series.window_seconds = window_seconds;
    const std::size_t count = d.size() / window;
    series.values_db.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double sd = kernels::sum_sq(d.samples.data() + k * window, window);
        const double se = kernels::sum_sq(e.samples.data() + k * window, window);
        double db = 0.0;
        if (sd == 0.0) {
            db = 0.0;
        } else if (se == 0.0) {
            db = 200.0;  // silence floor: cap the +inf sentinel
        } else {
            db = 10.0 * std::log10(sd / se);
        }
        series.values_db.push_back(db);
    }
    return series;
}

std::pair<std::vector<Signal>, std::vector<Signal>> split_dataset(
    const std::vector<Signal>& signals, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split_dataset: fraction must be in (0, 1)");

    std::vector<Signal> train, test;
    train.reserve(signals.size());
    test.reserve(signals.size());
    for (const Signal& s : signals) {
        const auto cut = static_cast<std::size_t>(
            std::floor(train_fraction * static_cast<double>(s.size())));
        if (cut == 0 || cut == s.size())
            throw std::invalid_argument("split_dataset: signal too short to split");
        train.push_back(Signal{{s.samples.begin(), s.samples.begin() + cut},
                               s.sample_rate_hz});
        test.push_back(Signal{{s.samples.begin() + cut, s.samples.end()},
                              s.sample_rate_hz});
    }
    return {std::move(train), std::move(test)};
}

std::vector<Signal> broadband_dataset(double sample_rate_hz, const std::vector<Band>& bands,
                                      double duration_seconds, std::uint64_t seed,
                                      std::size_t filter_taps) {
    if (bands.empty()) throw std::invalid_argument("broadband_dataset: no bands given");
    if (!(duration_seconds > 0.0))
        throw std::invalid_argument("broadband_dataset: duration must be positive");
    const auto length = static_cast<std::size_t>(duration_seconds * sample_rate_hz);
    if (length < 1) throw std::invalid_argument("broadband_dataset: duration too short");

    // Hamming transition half-width is about 1.65 * fs / taps; insetting the
    // cutoffs by a bit more keeps the nominal band edges in the stopband.
    const double inset_hz = 2.0 * sample_rate_hz / static_cast<double>(filter_taps);

    Xoshiro256 seeder(seed);
    std::vector<Signal> out;
    out.reserve(bands.size());
    for (const Band& band : bands) {
        if (!(band.high_hz - band.low_hz > 2.0 * inset_hz))
            throw std::invalid_argument("broadband_dataset: band narrower than the filter transition");
        const ImpulseResponse bp = design_bandpass_fir(
            band.low_hz + inset_hz, band.high_hz - inset_hz, sample_rate_hz, filter_taps);
        Signal s = convolve(generate_white_noise(length, sample_rate_hz, seeder.next_u64()), bp);
        const double scale = 1.0 / rms(s.samples);
        for (double& v : s.samples) v *= scale;
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

StrategyOutcome run_one(const Plant& plant, const Signal& test_signal,
                        const NamedStrategy& strategy, std::size_t num_taps,
                        double window_seconds) {
    StrategyOutcome outcome;
    outcome.name = strategy.name;
    try {
        const RunTrace trace = run_fxlms(plant, test_signal, strategy.strategy, num_taps);
        outcome.nr = noise_reduction_level(trace.disturbance, trace.error, window_seconds);
    } catch (const DivergenceError& diverged) {
        outcome.diverged = true;
        outcome.divergence_index = diverged.sample_index();
        const RunTrace& partial = diverged.partial_trace();
        if (!partial.error.samples.empty()) {
            outcome.nr = noise_reduction_level(partial.disturbance, partial.error,
                                               window_seconds);
        } else {
            outcome.nr.window_seconds = window_seconds;
        }
    }
    return outcome;
}

}  // namespace

ComparisonReport compare_strategies(const Plant& plant, const Signal& test_signal,
                                    const std::vector<NamedStrategy>& strategies,
                                    std::size_t num_taps, double window_seconds) {
    if (strategies.empty())
        throw std::invalid_argument("compare_strategies: no strategies given");

    ComparisonReport report;
    report.sample_rate_hz = plant.sample_rate_hz;
    report.num_taps = num_taps;
    report.window_seconds = window_seconds;

    // Each run owns its state; the join below restores input order.
    std::vector<std::future<StrategyOutcome>> pending;
    pending.reserve(strategies.size());
    for (const NamedStrategy& strategy : strategies) {
        pending.push_back(std::async(std::launch::async, run_one, std::cref(plant),
                                     std::cref(test_signal), std::cref(strategy),
                                     num_taps, window_seconds));
    }
    report.strategies.reserve(strategies.size());
    for (auto& f : pending) report.strategies.push_back(f.get());
    return report;
}

std::vector<ComparisonReport> robustness_sweep(const Plant& plant, const Signal& test_signal,
                                               const NamedStrategy& strategy,
                                               const std::vector<double>& amounts,
                                               std::uint64_t seed, std::size_t num_taps,
                                               double window_seconds) {
    std::vector<ComparisonReport> reports;
    reports.reserve(amounts.size());
    // The same seed for every amount: one perturbation direction, scaled.
    for (double amount : amounts) {
        const Plant varied = perturb_secondary(plant, amount, seed);
        ComparisonReport report =
            compare_strategies(varied, test_signal, {strategy}, num_taps, window_seconds);
        report.perturb_amount = amount;
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace anc
