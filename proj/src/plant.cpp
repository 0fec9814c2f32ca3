#include "anc/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "anc/kernels.hpp"
#include "anc/rng.hpp"

namespace anc {

namespace {

void require_rate_match(const Plant& plant, const Signal& x, const char* op) {
    if (x.sample_rate_hz != plant.sample_rate_hz)
        throw std::invalid_argument(std::string(op) + ": sample-rate mismatch");
}

}  // namespace

Plant make_plant(ImpulseResponse primary, ImpulseResponse secondary,
                 std::optional<ImpulseResponse> secondary_estimate,
                 double sample_rate_hz) {
    if (primary.taps.empty() || secondary.taps.empty())
        throw std::invalid_argument("make_plant: paths must be non-empty");
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("make_plant: sample rate must be positive");

    Plant plant;
    plant.primary = std::move(primary);
    plant.primary.label = PathLabel::primary;
    plant.secondary = std::move(secondary);
    plant.secondary.label = PathLabel::secondary;
    if (secondary_estimate) {
        if (secondary_estimate->taps.empty())
            throw std::invalid_argument("make_plant: estimate must be non-empty");
        plant.secondary_estimate = std::move(*secondary_estimate);
    } else {
        plant.secondary_estimate = plant.secondary;
    }
    plant.secondary_estimate.label = PathLabel::secondary_estimate;
    plant.sample_rate_hz = sample_rate_hz;
    return plant;
}

Signal disturbance(const Plant& plant, const Signal& x) {
    require_rate_match(plant, x, "disturbance");
    return convolve(x, plant.primary);
}

Signal filtered_reference(const Plant& plant, const Signal& x) {
    require_rate_match(plant, x, "filtered_reference");
    return convolve(x, plant.secondary_estimate);
}

Plant perturb_secondary(const Plant& plant, double relative_amount, std::uint64_t seed) {
    if (relative_amount < 0.0)
        throw std::invalid_argument("perturb_secondary: amount must be >= 0");

    Plant out = plant;
    if (relative_amount == 0.0) return out;

    const auto& s = plant.secondary.taps;
    const double norm_s = std::sqrt(kernels::sum_sq(s.data(), s.size()));
    if (norm_s == 0.0)
        throw std::invalid_argument("perturb_secondary: secondary path is all zeros");

    Xoshiro256 rng(seed);
    std::vector<double> delta(s.size());
    for (double& v : delta) v = rng.next_gaussian();
    const double norm_d = std::sqrt(kernels::sum_sq(delta.data(), delta.size()));

    const double scale = relative_amount * norm_s / norm_d;
    for (std::size_t i = 0; i < s.size(); ++i)
        out.secondary.taps[i] = s[i] + scale * delta[i];
    return out;
}

}  // namespace anc
