#include "pandora/interval.hpp"

#include <algorithm>
#include <array>

#include "pandora/error.hpp"

namespace pandora {

namespace {

Scalar abs(const Scalar& x) { return x < 0 ? Scalar(-x) : x; }

Scalar round_to_bits(const Scalar& x, long bits, bool up) {
    Scalar scaled = x * pow2(bits);
    mpz_class q;
    if (up) {
        mpz_cdiv_q(q.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    } else {
        mpz_fdiv_q(q.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    }
    return Scalar(q) * pow2(-bits);
}

// Enclosure of e^x for |x| <= 1/2 with remainder at most tol.
Interval exp_small(const Scalar& x, const Scalar& tol) {
    const Scalar ax = abs(x);
    Scalar term = 1;
    Scalar sum = 1;
    Scalar fact = 1;
    Scalar power = 1;
    for (long k = 1;; ++k) {
        // |R_{k-1}| <= |x|^k e^{|x|} / k!  and  e^{1/2} < 2.
        power *= ax;
        fact *= k;
        Scalar remainder = 2 * power / fact;
        if (remainder <= tol) return Interval{sum - remainder, sum + remainder};
        term *= x;
        term /= k;
        sum += term;
    }
}

}  // namespace

Scalar Interval::magnitude() const { return max(abs(lo), abs(hi)); }

Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
    std::array<Scalar, 4> p{a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    auto [mn, mx] = std::minmax_element(p.begin(), p.end());
    return {*mn, *mx};
}

Interval operator*(const Scalar& k, const Interval& a) {
    if (k >= 0) return {k * a.lo, k * a.hi};
    return {k * a.hi, k * a.lo};
}

Interval operator-(const Scalar& k, const Interval& a) { return {k - a.hi, k - a.lo}; }

Interval round_outward(const Interval& a, long bits) {
    return {round_to_bits(a.lo, bits, false), round_to_bits(a.hi, bits, true)};
}

Interval exp_interval(const Scalar& x, const Scalar& width) {
    if (width <= 0) throw DomainError("exp_interval: width must be positive");
    if (x == 0) return {Scalar(1), Scalar(1)};

    long halvings = 0;
    Scalar reduced = x;
    while (abs(reduced) > Scalar(1, 2)) {
        reduced /= 2;
        ++halvings;
    }
    // Each squaring roughly doubles the relative width; start tight enough
    // that the final width fits, and tighten further if it does not.
    Scalar tol = width / (pow2(2 * halvings + 4) * (abs(x) + 1));
    for (;;) {
        Interval e = exp_small(reduced, tol);
        long bits = 8;
        while (pow2(-bits) > tol) ++bits;
        e = round_outward(e, bits + 2);
        for (long s = 0; s < halvings; ++s) {
            e = Interval{e.lo * e.lo, e.hi * e.hi};
            e = round_outward(e, bits + 2);
        }
        if (e.width() <= width) return e;
        tol /= 16;
    }
}

}  // namespace pandora
