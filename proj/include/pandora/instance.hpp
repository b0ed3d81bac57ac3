#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pandora/scalar.hpp"

namespace pandora {

struct Atom {
    Scalar value;
    Scalar prob;

    bool operator==(const Atom&) const = default;
};

/// Finite distribution over non-negative values. Canonical form: atoms sorted
/// strictly increasing by value, every probability positive, total mass 1.
/// Distributions read from files are kept as given until validated, so that
/// validate_instance can report what is wrong with them.
struct DiscreteDistribution {
    std::vector<Atom> atoms;

    /// Sorts by value and merges equal values. Does not check the mass.
    static DiscreteDistribution canonical(std::vector<Atom> atoms);
    static DiscreteDistribution point(const Scalar& value);

    std::size_t size() const { return atoms.size(); }
    const Scalar& max_value() const { return atoms.back().value; }
    const Scalar& min_value() const { return atoms.front().value; }

    bool operator==(const DiscreteDistribution&) const = default;
};

struct PnoiBox {
    Scalar cost;
    DiscreteDistribution dist;

    bool operator==(const PnoiBox&) const = default;
};

struct PnoiInstance {
    std::vector<PnoiBox> boxes;

    std::size_t size() const { return boxes.size(); }
    const PnoiBox& operator[](std::size_t i) const { return boxes[i]; }

    bool operator==(const PnoiInstance&) const = default;
};

/// Subsets of boxes are bitmasks over 0-based box positions.
using BoxSet = std::uint64_t;

inline BoxSet full_set(std::size_t n) { return n >= 64 ? ~BoxSet{0} : (BoxSet{1} << n) - 1; }
inline bool contains(BoxSet s, std::size_t i) { return (s >> i) & 1U; }

struct Violation {
    int box;  // 1-based; 0 for instance-level problems
    std::string reason;

    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_instance(const PnoiInstance& inst);
std::vector<Violation> validate_distribution(const DiscreteDistribution& dist, int box = 0);

/// Throws InvalidInstance listing every violation.
void require_valid(const PnoiInstance& inst);

Scalar expected_value(const DiscreteDistribution& dist);

/// Largest support value over all boxes.
Scalar max_support_value(const PnoiInstance& inst);

}  // namespace pandora
