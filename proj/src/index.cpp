#include "pandora/index.hpp"

#include <algorithm>

#include "pandora/error.hpp"

namespace pandora {

Scalar compute_index(const PnoiBox& box) {
    const auto& atoms = box.dist.atoms;
    if (atoms.empty()) throw InvalidInstance("compute_index: empty support");
    if (box.cost == 0) return atoms.back().value;

    // On [v_{j-1}, v_j] the surplus is A_j - B_j * tau with
    // A_j = sum_{l>=j} p_l v_l and B_j = sum_{l>=j} p_l.
    Scalar a = 0;
    Scalar b = 0;
    for (std::size_t j = atoms.size(); j-- > 0;) {
        a += atoms[j].prob * atoms[j].value;
        b += atoms[j].prob;
        if (j == 0) break;
        Scalar at_lower = a - b * atoms[j - 1].value;
        if (box.cost <= at_lower) return (a - box.cost) / b;
    }
    // Below the smallest value the surplus is E[v] - tau.
    return a / b - box.cost / b;
}

std::vector<Scalar> compute_indices(const PnoiInstance& inst) {
    std::vector<Scalar> out;
    out.reserve(inst.size());
    for (const auto& b : inst.boxes) out.push_back(compute_index(b));
    return out;
}

DiscreteDistribution kappa_distribution(const PnoiBox& box, const Scalar& tau) {
    std::vector<Atom> clipped;
    clipped.reserve(box.dist.size());
    for (const auto& a : box.dist.atoms) clipped.push_back({min(a.value, tau), a.prob});
    return DiscreteDistribution::canonical(std::move(clipped));
}

DiscreteDistribution kappa_distribution(const PnoiBox& box) {
    return kappa_distribution(box, compute_index(box));
}

std::vector<DiscreteDistribution> kappa_distributions(const PnoiInstance& inst) {
    std::vector<DiscreteDistribution> out;
    out.reserve(inst.size());
    for (const auto& b : inst.boxes) out.push_back(kappa_distribution(b));
    return out;
}

Scalar expected_max_with(std::span<const DiscreteDistribution> dists, BoxSet subset, const Scalar& outside) {
    std::vector<const DiscreteDistribution*> chosen;
    std::vector<Scalar> points;
    for (std::size_t j = 0; j < dists.size(); ++j) {
        if (!contains(subset, j)) continue;
        chosen.push_back(&dists[j]);
        for (const auto& a : dists[j].atoms) {
            if (a.value > outside) points.push_back(a.value);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    // cursor[j] walks atoms of chosen[j]; below[j] = Pr[X_j <= current point].
    std::vector<std::size_t> cursor(chosen.size(), 0);
    std::vector<Scalar> below(chosen.size(), Scalar(0));
    auto advance = [&](const Scalar& x) {
        Scalar cdf = 1;
        for (std::size_t j = 0; j < chosen.size(); ++j) {
            const auto& atoms = chosen[j]->atoms;
            while (cursor[j] < atoms.size() && atoms[cursor[j]].value <= x) {
                below[j] += atoms[cursor[j]].prob;
                ++cursor[j];
            }
            cdf *= below[j];
        }
        return cdf;
    };

    Scalar prev = advance(outside);
    Scalar result = outside * prev;
    for (const auto& x : points) {
        Scalar cdf = advance(x);
        result += x * (cdf - prev);
        prev = cdf;
    }
    return result;
}

Scalar expected_max_with(std::span<const DiscreteDistribution> dists, const Scalar& outside) {
    return expected_max_with(dists, full_set(dists.size()), outside);
}

Scalar max_kappa_expectation(const PnoiInstance& inst) {
    require_valid(inst);
    auto kappas = kappa_distributions(inst);
    return expected_max_with(kappas, Scalar(0));
}

}  // namespace pandora
