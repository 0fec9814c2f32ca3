#include "anc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "anc/kernels.hpp"
#include "anc/rng.hpp"

namespace anc {

const char* to_string(PathLabel label) {
    switch (label) {
        case PathLabel::primary: return "primary";
        case PathLabel::secondary: return "secondary";
        case PathLabel::secondary_estimate: return "secondary_estimate";
        case PathLabel::control: return "control";
        case PathLabel::filter: return "filter";
    }
    return "unknown";
}

PathLabel parse_path_label(const std::string& text) {
    for (PathLabel l : {PathLabel::primary, PathLabel::secondary,
                        PathLabel::secondary_estimate, PathLabel::control,
                        PathLabel::filter}) {
        if (text == to_string(l)) return l;
    }
    throw std::invalid_argument("unknown path label: " + text);
}

void convolve_into(std::span<const double> input, std::span<const double> taps,
                   std::span<double> out) {
    if (input.empty()) throw std::invalid_argument("convolve: empty input");
    if (taps.empty()) throw std::invalid_argument("convolve: empty taps");
    if (out.size() != input.size())
        throw std::invalid_argument("convolve: output length must match input");

    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t n = input.size();
    const std::size_t m = std::min(taps.size(), n);
    // Tap-major accumulation: out[i..n) += taps[i] * input[0..n-i). Same
    // causal zero-state result as the per-output sum, reordered for the
    // axpy kernel.
    for (std::size_t i = 0; i < m; ++i) {
        kernels::axpy(taps[i], input.data(), out.data() + i, n - i);
    }
}

Signal convolve(const Signal& input, const ImpulseResponse& h) {
    Signal out;
    out.sample_rate_hz = input.sample_rate_hz;
    out.samples.resize(input.size());
    convolve_into(input.samples, h.taps, out.samples);
    return out;
}

ImpulseResponse design_bandpass_fir(double low_hz, double high_hz,
                                    double sample_rate_hz, std::size_t num_taps) {
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("design_bandpass_fir: sample rate must be positive");
    if (!(0.0 < low_hz && low_hz < high_hz && high_hz < sample_rate_hz / 2.0))
        throw std::invalid_argument(
            "design_bandpass_fir: band edges must satisfy 0 < low < high < Nyquist");
    if (num_taps < 31 || num_taps % 2 == 0)
        throw std::invalid_argument("design_bandpass_fir: num_taps must be odd and >= 31");

    const double f1 = low_hz / sample_rate_hz;
    const double f2 = high_hz / sample_rate_hz;
    const std::size_t mid = (num_taps - 1) / 2;
    const double two_pi = 2.0 * std::numbers::pi;

    ImpulseResponse h;
    h.label = PathLabel::filter;
    h.taps.assign(num_taps, 0.0);
    h.taps[mid] = 2.0 * (f2 - f1);  // Hamming center weight is exactly 1

    // Compute one half and mirror it so symmetry is exact in floating point.
    for (std::size_t k = 1; k <= mid; ++k) {
        const double kk = static_cast<double>(k);
        const double sinc = (std::sin(two_pi * f2 * kk) - std::sin(two_pi * f1 * kk)) /
                            (std::numbers::pi * kk);
        const double window =
            0.54 - 0.46 * std::cos(two_pi * static_cast<double>(mid - k) /
                                   static_cast<double>(num_taps - 1));
        const double tap = sinc * window;
        h.taps[mid - k] = tap;
        h.taps[mid + k] = tap;
    }
    return h;
}

Signal generate_white_noise(std::size_t length, double sample_rate_hz,
                            std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("generate_white_noise: length must be > 0");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("generate_white_noise: sample rate must be positive");

    Signal s;
    s.sample_rate_hz = sample_rate_hz;
    s.samples.resize(length);
    Xoshiro256 rng(seed);
    for (double& v : s.samples) v = rng.next_gaussian();
    return s;
}

ImpulseResponse generate_synthetic_path(std::size_t length, std::size_t delay_samples,
                                        double decay, std::uint64_t seed,
                                        PathLabel label) {
    if (delay_samples >= length)
        throw std::invalid_argument("generate_synthetic_path: delay must be < length");
    if (!(decay > 0.0 && decay < 1.0))
        throw std::invalid_argument("generate_synthetic_path: decay must be in (0, 1)");

    ImpulseResponse h;
    h.label = label;
    h.taps.assign(length, 0.0);
    h.taps[delay_samples] = 1.0;

    // Tail values stay strictly below the decay envelope, so the unit tap at
    // the delay is always the unique peak and no renormalization is needed.
    Xoshiro256 rng(seed);
    double envelope = 1.0;
    for (std::size_t i = delay_samples + 1; i < length; ++i) {
        envelope *= decay;
        h.taps[i] = 0.999 * envelope * rng.next_symmetric();
    }
    return h;
}

double mean_power(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    return kernels::sum_sq(samples.data(), samples.size()) /
           static_cast<double>(samples.size());
}

double rms(std::span<const double> samples) { return std::sqrt(mean_power(samples)); }

}  // namespace anc
