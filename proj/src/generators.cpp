#include "pandora/generators.hpp"

#include <algorithm>
#include <set>

namespace pandora {

namespace {

// k positive probabilities with a common denominator d <= 64.
std::vector<Scalar> random_probabilities(SplitMix64& rng, std::size_t k) {
    const long d = rng.between(static_cast<long>(k), 64);
    std::set<long> cuts;
    while (cuts.size() + 1 < k) cuts.insert(rng.between(1, d - 1));
    std::vector<Scalar> out;
    long prev = 0;
    for (long c : cuts) {
        out.emplace_back(c - prev, d);
        prev = c;
    }
    out.emplace_back(d - prev, d);
    for (auto& p : out) p.canonicalize();
    return out;
}

Scalar random_cost(SplitMix64& rng, const Scalar& scale) {
    if (rng.below(10) == 0) return 0;
    const long den = rng.between(1, 16);
    Scalar c = Scalar(rng.between(1, den), den) * scale;
    c.canonicalize();
    return c;
}

std::size_t random_count(SplitMix64& rng, std::size_t lo, std::size_t hi) {
    return static_cast<std::size_t>(rng.between(static_cast<long>(lo), static_cast<long>(hi)));
}

}  // namespace

SplitMix64 case_rng(std::uint64_t seed, std::uint64_t index) { return SplitMix64(mix64(seed) ^ mix64(index + kGolden)); }

PnoiInstance random_instance(SplitMix64& rng, const GeneratorOptions& opt) {
    PnoiInstance inst;
    const std::size_t n = random_count(rng, opt.min_boxes, opt.max_boxes);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = random_count(rng, 1, opt.max_support);
        const long den = rng.between(1, 4);
        std::set<long> nums;
        while (nums.size() < k) nums.insert(rng.between(0, opt.max_value * den));
        auto probs = random_probabilities(rng, k);
        std::vector<Atom> atoms;
        std::size_t j = 0;
        for (long num : nums) {
            Scalar v(num, den);
            v.canonicalize();
            atoms.push_back({v, probs[j++]});
        }
        auto dist = DiscreteDistribution{std::move(atoms)};
        // Costs up to the mean keep a mix of positive and negative indices.
        Scalar scale = max(expected_value(dist), Scalar(1, 4));
        inst.boxes.push_back({random_cost(rng, scale), std::move(dist)});
    }
    return inst;
}

PnoiInstance random_01_instance(SplitMix64& rng, std::size_t min_boxes, std::size_t max_boxes) {
    PnoiInstance inst;
    const std::size_t n = random_count(rng, min_boxes, max_boxes);
    for (std::size_t i = 0; i < n; ++i) {
        const long d = rng.between(1, 64);
        const long a = rng.between(0, d);
        Scalar p(a, d);
        p.canonicalize();
        std::vector<Atom> atoms;
        if (p < 1) atoms.push_back({Scalar(0), 1 - p});
        if (p > 0) atoms.push_back({Scalar(1), p});
        inst.boxes.push_back({random_cost(rng, Scalar(3, 4)), DiscreteDistribution{std::move(atoms)}});
    }
    return inst;
}

PnoiInstance random_lclrs3_instance(SplitMix64& rng, std::size_t min_boxes, std::size_t max_boxes) {
    PnoiInstance inst;
    const std::size_t n = random_count(rng, min_boxes, max_boxes);
    for (std::size_t i = 0; i < n; ++i) {
        // E[v] = (2a + b) / (2d) < 1/2 and c = p * u with 0 < u <= 1/2.
        const long d = rng.between(4, 64);
        const long a = rng.between(1, (d - 1) / 2);
        const long b = rng.between(0, d - 1 - 2 * a);
        Scalar p(a, d), q(b, d);
        p.canonicalize();
        q.canonicalize();
        Scalar r = 1 - p - q;
        Scalar u(rng.between(1, 8), 16);
        u.canonicalize();
        std::vector<Atom> atoms;
        if (r > 0) atoms.push_back({Scalar(0), r});
        if (q > 0) atoms.push_back({Scalar(1, 2), q});
        atoms.push_back({Scalar(1), p});
        inst.boxes.push_back({p * u, DiscreteDistribution{std::move(atoms)}});
    }
    return inst;
}

PnoiInstance random_large_value_instance(SplitMix64& rng, std::size_t min_boxes, std::size_t max_boxes) {
    GeneratorOptions opt;
    opt.min_boxes = min_boxes;
    opt.max_boxes = max_boxes;
    opt.max_support = 3;
    opt.max_value = 4;
    PnoiInstance inst = random_instance(rng, opt);
    bool any = false;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        if (any && rng.below(2) == 0) continue;
        any = true;
        auto& box = inst.boxes[i];
        // Move a small slice of the lowest atom's mass to a jackpot value.
        Scalar slice(1, rng.between(16, 64));
        auto& low = box.dist.atoms.front();
        if (low.prob <= slice) slice = low.prob / 2;
        low.prob -= slice;
        box.dist.atoms.push_back({Scalar(rng.between(20, 400)), slice});
        box.dist = DiscreteDistribution::canonical(std::move(box.dist.atoms));
        std::vector<Atom> kept;
        for (auto& a : box.dist.atoms) {
            if (a.prob > 0) kept.push_back(a);
        }
        box.dist.atoms = std::move(kept);
    }
    return inst;
}

}  // namespace pandora
