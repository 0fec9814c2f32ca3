#pragma once

#include <cstdint>
#include <optional>

#include "anc/signal.hpp"

namespace anc {

/// The simulated acoustic environment: primary path (noise source to error
/// microphone), true secondary path (loudspeaker to error microphone), and
/// the secondary-path estimate used by the adaptation. Immutable after
/// construction; freely shareable across threads.
struct Plant {
    ImpulseResponse primary;
    ImpulseResponse secondary;
    ImpulseResponse secondary_estimate;
    double sample_rate_hz = 0.0;
};

/// Validates and assembles a plant. When no estimate is given it defaults to
/// a copy of the true secondary path (the matched-model setting).
Plant make_plant(ImpulseResponse primary, ImpulseResponse secondary,
                 std::optional<ImpulseResponse> secondary_estimate,
                 double sample_rate_hz);

/// Disturbance at the error microphone: x filtered through the primary path.
Signal disturbance(const Plant& plant, const Signal& x);

/// Reference filtered through the secondary-path *estimate*; this is the
/// signal that drives the adaptation, not the true path.
Signal filtered_reference(const Plant& plant, const Signal& x);

/// Returns a plant whose true secondary path is s + delta, where delta is
/// seeded zero-mean noise scaled so ||delta|| / ||s|| equals relative_amount
/// exactly. The estimate keeps the original unperturbed path; the mismatch
/// is the point of the robustness experiments.
Plant perturb_secondary(const Plant& plant, double relative_amount, std::uint64_t seed);

}  // namespace anc
