#pragma once

#include "pandora/scalar.hpp"

namespace pandora {

/// Closed rational interval [lo, hi] known to contain some real quantity.
struct Interval {
    Scalar lo;
    Scalar hi;

    Scalar width() const { return hi - lo; }
    bool contains(const Scalar& x) const { return lo <= x && x <= hi; }
    /// max(|lo|, |hi|)
    Scalar magnitude() const;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator*(const Scalar& k, const Interval& a);
Interval operator-(const Scalar& k, const Interval& a);

/// Enclosure of e^x of width at most `width` (> 0). Taylor series with a
/// Lagrange remainder bound, after halving the argument into [-1/2, 1/2].
Interval exp_interval(const Scalar& x, const Scalar& width = pow2(-64));

/// Rounds the interval outward to multiples of 2^-bits.
Interval round_outward(const Interval& a, long bits);

}  // namespace pandora
