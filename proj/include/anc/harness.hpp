#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anc/fxlms.hpp"
#include "anc/plant.hpp"
#include "anc/signal.hpp"

namespace anc {

/// Windowed noise-reduction series. Positive dB means reduction.
struct NrSeries {
    double window_seconds = 0.5;
    std::vector<double> values_db;
};

std::optional<double> first_window_db(const NrSeries& series);
std::optional<double> final_window_db(const NrSeries& series);

/// Attenuation per consecutive full window: 10 log10(sum d^2 / sum e^2).
/// A window with zero error energy but nonzero disturbance reports the
/// 200 dB cap; a window with zero disturbance energy reports 0 dB. The final
/// partial window is dropped.
NrSeries noise_reduction_level(const Signal& d, const Signal& e, double window_seconds);

/// Per-signal temporal split: the first floor(fraction * length) samples of
/// each signal go to train, the rest to test, so every noise type appears in
/// both partitions.
std::pair<std::vector<Signal>, std::vector<Signal>> split_dataset(
    const std::vector<Signal>& signals, double train_fraction);

struct Band {
    double low_hz = 0.0;
    double high_hz = 0.0;
};

/// One unit-RMS signal per band: white noise shaped by a bandpass FIR. The
/// filter cutoffs are inset from the nominal edges by the transition
/// half-width so leakage outside the nominal band stays in the stopband.
std::vector<Signal> broadband_dataset(double sample_rate_hz, const std::vector<Band>& bands,
                                      double duration_seconds, std::uint64_t seed,
                                      std::size_t filter_taps = 255);

struct NamedStrategy {
    std::string name;
    StepSizeStrategy strategy;
};

/// Result of one strategy inside a comparison; a diverged run keeps whatever
/// full windows completed before the flag.
struct StrategyOutcome {
    std::string name;
    NrSeries nr;
    bool diverged = false;
    std::size_t divergence_index = 0;
};

struct ComparisonReport {
    std::vector<StrategyOutcome> strategies;
    double sample_rate_hz = 0.0;
    std::size_t num_taps = 0;
    double window_seconds = 0.5;
    double perturb_amount = 0.0;
};

/// Runs every strategy on the identical (reference, disturbance) pair and
/// reports windowed noise reduction per strategy. Divergence is flagged per
/// strategy, never fatal. Strategy runs execute concurrently; the report
/// order matches the input order.
ComparisonReport compare_strategies(const Plant& plant, const Signal& test_signal,
                                    const std::vector<NamedStrategy>& strategies,
                                    std::size_t num_taps, double window_seconds = 0.5);

/// For each perturbation amount: perturb the true secondary path (estimate
/// kept at the original) and rerun the comparison with the given strategy.
std::vector<ComparisonReport> robustness_sweep(const Plant& plant, const Signal& test_signal,
                                               const NamedStrategy& strategy,
                                               const std::vector<double>& amounts,
                                               std::uint64_t seed, std::size_t num_taps,
                                               double window_seconds = 0.5);

}  // namespace anc
