#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace anc {

/// A sampled waveform. Samples are dimensionless amplitudes.
struct Signal {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

enum class PathLabel { primary, secondary, secondary_estimate, control, filter };

const char* to_string(PathLabel label);
PathLabel parse_path_label(const std::string& text);

/// FIR tap vector; models the acoustic paths and the control filter.
struct ImpulseResponse {
    std::vector<double> taps;
    PathLabel label = PathLabel::filter;

    std::size_t size() const { return taps.size(); }
};

/// Causal convolution truncated to the input length:
///   out(n) = sum_i taps(i) * input(n - i), with input(m) = 0 for m < 0.
/// Sample rate is preserved. Both operands must be non-empty.
Signal convolve(const Signal& input, const ImpulseResponse& h);

/// Same operation on raw spans; out.size() must equal input.size().
void convolve_into(std::span<const double> input, std::span<const double> taps,
                   std::span<double> out);

/// Linear-phase bandpass FIR: difference of two windowed-sinc lowpass
/// prototypes under a Hamming window. num_taps must be odd and >= 31; the
/// band must satisfy 0 < low_hz < high_hz < sample_rate_hz / 2. Taps are
/// exactly symmetric about the center tap.
ImpulseResponse design_bandpass_fir(double low_hz, double high_hz,
                                    double sample_rate_hz, std::size_t num_taps);

/// Zero-mean unit-variance noise, bit-deterministic for a fixed seed.
Signal generate_white_noise(std::size_t length, double sample_rate_hz,
                            std::uint64_t seed);

/// Synthetic acoustic path: delay_samples leading zeros, a unit tap at the
/// delay, then a seeded noise tail enveloped by decay^(i - delay_samples).
/// The peak magnitude tap is always at delay_samples and equals 1.
/// Requires delay_samples < length and decay in (0, 1).
ImpulseResponse generate_synthetic_path(std::size_t length, std::size_t delay_samples,
                                        double decay, std::uint64_t seed,
                                        PathLabel label = PathLabel::filter);

double rms(std::span<const double> samples);
double mean_power(std::span<const double> samples);

}  // namespace anc
