#pragma once

#include <span>
#include <vector>

#include "pandora/instance.hpp"

namespace pandora {

/// Reservation value of a box: the unique tau with E[(v - tau)_+] = cost.
/// For cost 0 the solution set is [v_max, inf) and v_max is returned.
/// Throws InvalidInstance for an empty support.
Scalar compute_index(const PnoiBox& box);

std::vector<Scalar> compute_indices(const PnoiInstance& inst);

/// Law of min(v, tau), equal clipped values merged.
DiscreteDistribution kappa_distribution(const PnoiBox& box);
DiscreteDistribution kappa_distribution(const PnoiBox& box, const Scalar& tau);

std::vector<DiscreteDistribution> kappa_distributions(const PnoiInstance& inst);

/// E[max(outside, max_j X_j)] for independent X_j, by multiplying CDFs over
/// the merged support.
Scalar expected_max_with(std::span<const DiscreteDistribution> dists, const Scalar& outside);

/// Same, restricted to the distributions selected by `subset`.
Scalar expected_max_with(std::span<const DiscreteDistribution> dists, BoxSet subset, const Scalar& outside);

/// Expected payoff of the index policy: E[max(0, max_i kappa_i)].
Scalar max_kappa_expectation(const PnoiInstance& inst);

}  // namespace pandora
