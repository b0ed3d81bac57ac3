#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pandora {

// Exact rational. mpq_class results of arithmetic are always canonical
// (reduced, positive denominator).
using Scalar = mpq_class;

/// Parses "n", "-n" or "n/d". Throws ParseError on anything else or d == 0.
Scalar parse_scalar(std::string_view text);

/// Canonical "n/d" form, or "n" when the denominator is 1.
std::string to_string(const Scalar& x);

/// Decimal rendering for humans, `digits` significant digits.
std::string to_decimal(const Scalar& x, int digits = 12);

double to_double(const Scalar& x);

/// 2^k for any integer k.
Scalar pow2(long k);

/// floor(x / step) * step, for step > 0.
Scalar floor_to_grid(const Scalar& x, const Scalar& step);

inline const Scalar& max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
inline const Scalar& min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }

}  // namespace pandora
