#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <variant>

#include "anc/plant.hpp"
#include "anc/signal.hpp"

namespace anc {

/// Adaptive control filter state. Taps start at zero and the length is fixed
/// for the life of a run.
struct ControlFilter {
    std::vector<double> taps;

    explicit ControlFilter(std::size_t num_taps) : taps(num_taps, 0.0) {}
    std::size_t size() const { return taps.size(); }
};

/// Constant step size.
struct FixedStep {
    double mu = 0.0;
};

/// Constant step size 1 / (P L): reciprocal of filtered-reference power times
/// the secondary-path delay, with the power estimated over the whole run's
/// filtered reference before the loop starts.
struct TheoreticalStep {
    std::size_t delay_samples = 1;  // >= 1
};

/// Per-sample step size mu_bar / (epsilon + ||filtered-reference line||^2).
struct NormalizedStep {
    double mu_bar = 0.5;
    double epsilon = 1e-6;
};

// Extension seam: additional strategies plug in as new alternatives here and
// in the per-sample step dispatch of run_fxlms.
using StepSizeStrategy = std::variant<FixedStep, TheoreticalStep, NormalizedStep>;

/// Signals recorded by one control run. All traces share length and rate.
struct RunTrace {
    Signal error;
    Signal disturbance;
    Signal control_output;
    std::vector<double> final_filter;
};

/// The error signal left the finite/bounded region; carries the sample index
/// where it happened and everything recorded up to that point.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t sample_index, RunTrace partial)
        : std::runtime_error("fxlms diverged at sample " + std::to_string(sample_index)),
          sample_index_(sample_index),
          partial_(std::move(partial)) {}

    std::size_t sample_index() const { return sample_index_; }
    const RunTrace& partial_trace() const { return partial_; }

private:
    std::size_t sample_index_;
    RunTrace partial_;
};

/// Inner product of the filter taps with a newest-first reference window.
double control_output(const ControlFilter& filter, std::span<const double> x_newest_first);

/// In-place LMS update: taps(i) += mu * e * xprime(i), with the filtered
/// reference window ordered newest-first.
void fxlms_update(ControlFilter& filter, double mu, double e,
                  std::span<const double> xprime_newest_first);

/// 1 / (P L) for P the mean squared filtered-reference sample. Rejects
/// all-zero input (zero power) and delay < 1.
double theoretical_step_size(const Signal& xprime, std::size_t delay_samples);

/// Index of the largest-magnitude tap (ties to the smallest index), floored
/// at 1 so the theoretical step size never divides by zero.
std::size_t secondary_delay_estimate(const ImpulseResponse& s_hat);

/// Streaming feedforward control loop: disturbance through the primary path,
/// control output through the true secondary path, adaptation driven by the
/// reference filtered through the secondary-path estimate.
RunTrace run_fxlms(const Plant& plant, const Signal& x, const StepSizeStrategy& strategy,
                   std::size_t num_taps);

}  // namespace anc
