#include "anc/fxlms.hpp"

#include <algorithm>
#include <cmath>

#include "anc/errors.hpp"
#include "anc/kernels.hpp"

namespace anc {

namespace {

// Mirrored circular buffer: each sample is written twice so the window at
// data() is always contiguous and ordered newest-first.
class DelayLine {
public:
    explicit DelayLine(std::size_t n) : buf_(2 * n, 0.0), n_(n), head_(0) {}

    void push(double v) {
        head_ = (head_ == 0) ? n_ - 1 : head_ - 1;
        buf_[head_] = v;
        buf_[head_ + n_] = v;
    }

    const double* data() const { return buf_.data() + head_; }
    std::size_t size() const { return n_; }

private:
    std::vector<double> buf_;
    std::size_t n_;
    std::size_t head_;
};

RunTrace make_trace(std::vector<double> err, std::vector<double> dist,
                    std::vector<double> yout, std::vector<double> filter, double rate) {
    RunTrace t;
    t.error = Signal{std::move(err), rate};
    t.disturbance = Signal{std::move(dist), rate};
    t.control_output = Signal{std::move(yout), rate};
    t.final_filter = std::move(filter);
    return t;
}

}  // namespace

double control_output(const ControlFilter& filter, std::span<const double> x_newest_first) {
    if (x_newest_first.size() != filter.size())
        throw std::invalid_argument("control_output: window length must match filter length");
    return kernels::dot(filter.taps.data(), x_newest_first.data(), filter.size());
}

void fxlms_update(ControlFilter& filter, double mu, double e,
                  std::span<const double> xprime_newest_first) {
    if (xprime_newest_first.size() != filter.size())
        throw std::invalid_argument("fxlms_update: window length must match filter length");
    if (!std::isfinite(e)) throw NumericError(0, "fxlms_update: non-finite error sample");
    for (double v : xprime_newest_first)
        if (!std::isfinite(v)) throw NumericError(0, "fxlms_update: non-finite reference window");
    kernels::axpy(mu * e, xprime_newest_first.data(), filter.taps.data(), filter.size());
}

double theoretical_step_size(const Signal& xprime, std::size_t delay_samples) {
    if (xprime.samples.empty())
        throw std::invalid_argument("theoretical_step_size: empty filtered reference");
    if (delay_samples < 1)
        throw std::invalid_argument("theoretical_step_size: delay must be >= 1");
    const double power = mean_power(xprime.samples);
    if (power == 0.0)
        throw std::invalid_argument("theoretical_step_size: filtered reference has zero power");
    return 1.0 / (power * static_cast<double>(delay_samples));
}

std::size_t secondary_delay_estimate(const ImpulseResponse& s_hat) {
    if (s_hat.taps.empty())
        throw std::invalid_argument("secondary_delay_estimate: empty taps");
    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t i = 0; i < s_hat.taps.size(); ++i) {
        const double mag = std::abs(s_hat.taps[i]);
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag == 0.0)
        throw std::invalid_argument("secondary_delay_estimate: all-zero taps");
    return std::max<std::size_t>(best, 1);
}

RunTrace run_fxlms(const Plant& plant, const Signal& x, const StepSizeStrategy& strategy,
                   std::size_t num_taps) {
    if (x.samples.empty()) throw std::invalid_argument("run_fxlms: empty input signal");
    if (num_taps < 1) throw std::invalid_argument("run_fxlms: filter length must be >= 1");
    if (x.sample_rate_hz != plant.sample_rate_hz)
        throw std::invalid_argument("run_fxlms: sample-rate mismatch");

    Signal d = disturbance(plant, x);
    const Signal xp = filtered_reference(plant, x);
    const std::size_t total = x.size();

    // Resolve the per-sample step-size rule up front.
    double fixed_mu = 0.0;
    bool per_sample_normalized = false;
    double norm_mu_bar = 0.0;
    double norm_epsilon = 0.0;
    if (const auto* f = std::get_if<FixedStep>(&strategy)) {
        if (!std::isfinite(f->mu) || f->mu < 0.0)
            throw std::invalid_argument("run_fxlms: fixed step size must be finite and >= 0");
        fixed_mu = f->mu;
    } else if (const auto* t = std::get_if<TheoreticalStep>(&strategy)) {
        if (t->delay_samples < 1)
            throw std::invalid_argument("run_fxlms: theoretical delay must be >= 1");
        const double power = mean_power(xp.samples);
        // Zero reference power means the loop never adapts anyway; pinning
        // the step to zero keeps the zero-input run well-defined.
        fixed_mu = (power == 0.0)
                       ? 0.0
                       : 1.0 / (power * static_cast<double>(t->delay_samples));
    } else {
        const auto& n = std::get<NormalizedStep>(strategy);
        if (!(n.mu_bar > 0.0) || !(n.epsilon > 0.0))
            throw std::invalid_argument("run_fxlms: normalized parameters must be positive");
        per_sample_normalized = true;
        norm_mu_bar = n.mu_bar;
        norm_epsilon = n.epsilon;
    }

    double max_abs_d = 0.0;
    for (double v : d.samples) max_abs_d = std::max(max_abs_d, std::abs(v));
    const double guard = 1e6 * (1.0 + max_abs_d);

    DelayLine x_line(num_taps);
    DelayLine xp_line(num_taps);
    DelayLine y_line(plant.secondary.size());
    ControlFilter w(num_taps);

    std::vector<double> err, yout;
    err.reserve(total);
    yout.reserve(total);

    for (std::size_t n = 0; n < total; ++n) {
        x_line.push(x.samples[n]);
        xp_line.push(xp.samples[n]);

        const double y = kernels::dot(w.taps.data(), x_line.data(), num_taps);
        y_line.push(y);
        const double anti_noise =
            kernels::dot(plant.secondary.taps.data(), y_line.data(), plant.secondary.size());
        const double e = d.samples[n] - anti_noise;

        if (!std::isfinite(e) || std::abs(e) > guard) {
            std::vector<double> d_partial(d.samples.begin(), d.samples.begin() + n);
            throw DivergenceError(
                n, make_trace(std::move(err), std::move(d_partial), std::move(yout),
                              std::move(w.taps), x.sample_rate_hz));
        }

        double mu = fixed_mu;
        if (per_sample_normalized) {
            mu = norm_mu_bar / (norm_epsilon + kernels::sum_sq(xp_line.data(), num_taps));
        }
        kernels::axpy(mu * e, xp_line.data(), w.taps.data(), num_taps);

        err.push_back(e);
        yout.push_back(y);
    }

    return make_trace(std::move(err), std::move(d.samples), std::move(yout),
                      std::move(w.taps), x.sample_rate_hz);
}

}  // namespace anc
