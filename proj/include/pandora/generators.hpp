#pragma once

#include <cstddef>
#include <cstdint>

#include "pandora/instance.hpp"
#include "pandora/rng.hpp"

namespace pandora {

/// Random general instances: values k/d with d in {1, 2, 3, 4} and
/// k <= max_value * d, probabilities with a common denominator <= 64, costs
/// with denominators <= 16 (about one box in ten is free).
struct GeneratorOptions {
    std::size_t min_boxes = 1;
    std::size_t max_boxes = 6;
    std::size_t max_support = 4;
    long max_value = 8;
};

PnoiInstance random_instance(SplitMix64& rng, const GeneratorOptions& opt = {});

/// Supports within {0, 1}.
PnoiInstance random_01_instance(SplitMix64& rng, std::size_t min_boxes, std::size_t max_boxes);

/// Instances satisfying every LCLRS3 condition.
PnoiInstance random_lclrs3_instance(SplitMix64& rng, std::size_t min_boxes, std::size_t max_boxes);

/// General instances where some boxes carry a rare atom far above the rest
/// (up to about 100 times the typical payoff), so that large values exist
/// for any epsilon in [1/10, 1/2].
PnoiInstance random_large_value_instance(SplitMix64& rng, std::size_t min_boxes, std::size_t max_boxes);

/// Instance for case `index` of a reproducible suite: the stream is seeded
/// from (seed, index) only.
SplitMix64 case_rng(std::uint64_t seed, std::uint64_t index);

}  // namespace pandora
