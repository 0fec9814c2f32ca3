#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "anc/plant.hpp"
#include "anc/signal.hpp"

namespace anc {

/// One Monte Carlo training sample: a reference segment, the matching
/// disturbance segment, and the reference filtered through the secondary-path
/// estimate. All three have exactly the control-filter length.
struct Task {
    std::vector<double> x;
    std::vector<double> d;
    std::vector<double> xprime;

    std::size_t size() const { return x.size(); }
};

/// How the step-size sensitivity d(w)/d(mu) is propagated while unrolling.
///
/// first_order accumulates sensitivity(t+1) = sensitivity(t) + e(t) u(t),
/// treating the recorded errors as independent of mu. That is exact at
/// mu = 0 and first-order accurate for small mu. exact keeps the full chain
/// rule, sensitivity(t+1) += (e(t) - mu * u(t).sensitivity(t)) u(t), and is
/// the validation reference for the default mode.
enum class GradientMode { first_order, exact };

struct TrainerConfig {
    std::size_t epochs = 2000;     // task count K
    double forgetting = 0.5;       // in (0, 1)
    double learning_rate = 1e-9;   // in (0, 1)
    double mu_init = 0.0;
    double mu_min = 0.0;
    double mu_max = 1.0;
    std::size_t num_taps = 512;
    std::uint64_t seed = 0;
    GradientMode gradient_mode = GradientMode::first_order;
};

struct TrainerResult {
    double mu_final = 0.0;
    std::vector<double> mu_curve;    // length epochs + 1, mu_curve[0] == mu_init
    std::vector<double> loss_curve;  // length epochs
};

struct UnrollResult {
    double loss = 0.0;
    double grad = 0.0;
};

/// Per-step internals exposed for the sensitivity-recursion checks:
/// errors[t] = e(t) and sensitivity[t] = d(w)/d(mu) after step t.
struct UnrollTrace {
    std::vector<double> errors;
    std::vector<std::vector<double>> sensitivity;
};

/// Control-filter input at unroll step t: the reversed prefix
/// [xprime(t), ..., xprime(0)] padded with zeros to the filter length. This
/// reproduces the startup state of a delay line that was empty at t = 0.
std::vector<double> input_vector(std::span<const double> xprime, std::size_t t);

/// Builds a task from equal-length reference and disturbance segments; the
/// filtered reference is the causal convolution of the segment with s_hat.
Task make_task(std::span<const double> x_segment, std::span<const double> d_segment,
               const ImpulseResponse& s_hat);

/// Unrolls the LMS loop over one task at the given step size and returns the
/// forgetting-weighted squared-error loss together with its derivative with
/// respect to the step size. lambda must be in (0, 1]; lambda == 1 disables
/// forgetting. Cost is O(N^2).
UnrollResult unroll_task(const Task& task, double mu, double lambda,
                         GradientMode mode = GradientMode::first_order,
                         UnrollTrace* trace = nullptr);

/// One projected gradient-descent step on the step size:
/// clamp(mu - alpha/2 * grad, mu_min, mu_max).
double sgd_step(double mu, double grad, double alpha, double mu_min, double mu_max);

/// A (reference, disturbance) recording pair the trainer samples tasks from.
using NoisePair = std::pair<Signal, Signal>;

/// Monte Carlo training loop: per epoch, draw a pair and a start offset
/// uniformly, slice a task, unroll it at the current step size, and descend.
/// Fully deterministic for a fixed config seed.
TrainerResult train(const std::vector<NoisePair>& dataset, const Plant& plant,
                    const TrainerConfig& config);

/// Mean unrolled loss over a fixed sample of tasks, evaluated at each step
/// size in mu_values. The same tasks are reused across the grid.
std::vector<std::pair<double, double>> loss_scan(const std::vector<NoisePair>& dataset,
                                                 const Plant& plant,
                                                 std::span<const double> mu_values,
                                                 double lambda, std::size_t num_taps,
                                                 std::size_t tasks_per_point,
                                                 std::uint64_t seed);

/// True when the series descends to a single minimum and ascends after it,
/// up to a relative tolerance on plateau noise.
bool is_unimodal(std::span<const double> values, double rel_tol = 1e-12);

}  // namespace anc
