#include "anc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "anc/errors.hpp"
#include "anc/kernels.hpp"
#include "anc/rng.hpp"

namespace anc {

std::vector<double> input_vector(std::span<const double> xprime, std::size_t t) {
    const std::size_t n = xprime.size();
    if (t >= n) throw std::invalid_argument("input_vector: t out of range");
    std::vector<double> u(n, 0.0);
    for (std::size_t j = 0; j <= t; ++j) u[j] = xprime[t - j];
    return u;
}

Task make_task(std::span<const double> x_segment, std::span<const double> d_segment,
               const ImpulseResponse& s_hat) {
    if (x_segment.size() != d_segment.size())
        throw std::invalid_argument("make_task: segment lengths must match");
    if (x_segment.empty()) throw std::invalid_argument("make_task: empty segments");

    Task task;
    task.x.assign(x_segment.begin(), x_segment.end());
    task.d.assign(d_segment.begin(), d_segment.end());
    task.xprime.resize(x_segment.size());
    convolve_into(x_segment, s_hat.taps, task.xprime);
    return task;
}

UnrollResult unroll_task(const Task& task, double mu, double lambda, GradientMode mode,
                         UnrollTrace* trace) {
    const std::size_t n = task.size();
    if (n == 0 || task.d.size() != n || task.xprime.size() != n)
        throw std::invalid_argument("unroll_task: task segments must be equal, non-empty");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("unroll_task: lambda must be in (0, 1]");
    if (!std::isfinite(mu)) throw std::invalid_argument("unroll_task: mu must be finite");

    // The step-t input vector is the reversed prefix of the filtered
    // reference padded with zeros. Reversing once lets every step use the
    // contiguous slice rev[n-1-t .. n-1] of length t+1, so the whole unroll
    // runs on dot/axpy kernels.
    std::vector<double> rev(n);
    for (std::size_t i = 0; i < n; ++i) rev[i] = task.xprime[n - 1 - i];

    // weights[t] = lambda^(n-1-t), built from the back so lambda = 0.5 and
    // lambda = 1 stay exact.
    std::vector<double> weights(n);
    weights[n - 1] = 1.0;
    for (std::size_t t = n - 1; t-- > 0;) weights[t] = weights[t + 1] * lambda;

    std::vector<double> w(n, 0.0);
    std::vector<double> sensitivity(n, 0.0);
    double loss = 0.0;
    double grad = 0.0;

    if (trace) {
        trace->errors.clear();
        trace->sensitivity.clear();
        trace->errors.reserve(n);
        trace->sensitivity.reserve(n);
    }

    for (std::size_t t = 0; t < n; ++t) {
        const double* u = rev.data() + (n - 1 - t);
        const std::size_t len = t + 1;

        const double e = task.d[t] - kernels::dot(u, w.data(), len);
        if (!std::isfinite(e))
            throw NumericError(t, "unroll_task: non-finite error at step " + std::to_string(t));

        loss += weights[t] * (e * e);

        const double u_dot_sens = kernels::dot(u, sensitivity.data(), len);
        if (t >= 1) grad += -2.0 * weights[t] * e * u_dot_sens;

        const double sens_coeff =
            (mode == GradientMode::exact) ? (e - mu * u_dot_sens) : e;
        kernels::axpy(sens_coeff, u, sensitivity.data(), len);
        kernels::axpy(mu * e, u, w.data(), len);

        if (trace) {
            trace->errors.push_back(e);
            trace->sensitivity.push_back(sensitivity);
        }
    }

    if (!std::isfinite(loss) || !std::isfinite(grad))
        throw NumericError(n - 1, "unroll_task: non-finite loss or gradient");
    return {loss, grad};
}

double sgd_step(double mu, double grad, double alpha, double mu_min, double mu_max) {
    if (!std::isfinite(mu) || !std::isfinite(grad) || !std::isfinite(alpha))
        throw std::invalid_argument("sgd_step: arguments must be finite");
    if (!(mu_min <= mu_max))
        throw std::invalid_argument("sgd_step: mu_min must be <= mu_max");
    return std::clamp(mu - 0.5 * alpha * grad, mu_min, mu_max);
}

namespace {

void validate_train_inputs(const std::vector<NoisePair>& dataset, const Plant& plant,
                           const TrainerConfig& config) {
    if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (!(config.forgetting > 0.0 && config.forgetting < 1.0))
        throw std::invalid_argument("train: forgetting factor must be in (0, 1)");
    if (!(config.learning_rate > 0.0 && config.learning_rate < 1.0))
        throw std::invalid_argument("train: learning rate must be in (0, 1)");
    if (!(0.0 <= config.mu_min && config.mu_min <= config.mu_init &&
          config.mu_init <= config.mu_max))
        throw std::invalid_argument("train: need 0 <= mu_min <= mu_init <= mu_max");
    if (config.num_taps < 1) throw std::invalid_argument("train: num_taps must be >= 1");
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
    for (const auto& [x, d] : dataset) {
        if (x.size() != d.size())
            throw std::invalid_argument("train: pair signals must have equal length");
        if (x.size() < config.num_taps)
            throw std::invalid_argument("train: dataset signal shorter than num_taps");
        if (x.sample_rate_hz != plant.sample_rate_hz ||
            d.sample_rate_hz != plant.sample_rate_hz)
            throw std::invalid_argument("train: sample-rate mismatch with plant");
    }
}

}  // namespace

TrainerResult train(const std::vector<NoisePair>& dataset, const Plant& plant,
                    const TrainerConfig& config) {
    validate_train_inputs(dataset, plant, config);

    Xoshiro256 rng(config.seed);
    const std::size_t n = config.num_taps;

    TrainerResult result;
    result.mu_curve.reserve(config.epochs + 1);
    result.loss_curve.reserve(config.epochs);

    double mu = config.mu_init;
    result.mu_curve.push_back(mu);

    for (std::size_t k = 0; k < config.epochs; ++k) {
        const auto& [xs, ds] = dataset[rng.next_below(dataset.size())];
        const std::size_t offset = rng.next_below(xs.size() - n + 1);

        const Task task = make_task(std::span(xs.samples).subspan(offset, n),
                                    std::span(ds.samples).subspan(offset, n),
                                    plant.secondary_estimate);
        const UnrollResult step = unroll_task(task, mu, config.forgetting,
                                              config.gradient_mode);
        mu = sgd_step(mu, step.grad, config.learning_rate, config.mu_min, config.mu_max);

        result.mu_curve.push_back(mu);
        result.loss_curve.push_back(step.loss);
    }

    result.mu_final = mu;
    return result;
}

std::vector<std::pair<double, double>> loss_scan(const std::vector<NoisePair>& dataset,
                                                 const Plant& plant,
                                                 std::span<const double> mu_values,
                                                 double lambda, std::size_t num_taps,
                                                 std::size_t tasks_per_point,
                                                 std::uint64_t seed) {
    if (mu_values.empty()) throw std::invalid_argument("loss_scan: empty mu grid");
    if (tasks_per_point < 1)
        throw std::invalid_argument("loss_scan: need at least one task per point");
    if (num_taps < 1) throw std::invalid_argument("loss_scan: num_taps must be >= 1");
    if (dataset.empty()) throw std::invalid_argument("loss_scan: dataset is empty");
    for (const auto& [x, d] : dataset) {
        if (x.size() != d.size() || x.size() < num_taps)
            throw std::invalid_argument("loss_scan: dataset signal shorter than num_taps");
    }

    // One fixed task sample shared by every grid point, so the scan compares
    // step sizes on identical data.
    Xoshiro256 rng(seed);
    std::vector<Task> tasks;
    tasks.reserve(tasks_per_point);
    for (std::size_t i = 0; i < tasks_per_point; ++i) {
        const auto& [xs, ds] = dataset[rng.next_below(dataset.size())];
        const std::size_t offset = rng.next_below(xs.size() - num_taps + 1);
        tasks.push_back(make_task(std::span(xs.samples).subspan(offset, num_taps),
                                  std::span(ds.samples).subspan(offset, num_taps),
                                  plant.secondary_estimate));
    }

    std::vector<std::pair<double, double>> scan;
    scan.reserve(mu_values.size());
    for (double mu : mu_values) {
        double total = 0.0;
        for (const Task& task : tasks) total += unroll_task(task, mu, lambda).loss;
        scan.emplace_back(mu, total / static_cast<double>(tasks.size()));
    }
    return scan;
}

bool is_unimodal(std::span<const double> values, double rel_tol) {
    if (values.size() < 3) return true;
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    const double tol = rel_tol * scale;

    // Once the series has turned upward it may not turn back down.
    bool ascending = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double diff = values[i] - values[i - 1];
        if (diff > tol) ascending = true;
        else if (diff < -tol && ascending) return false;
    }
    return true;
}

}  // namespace anc
