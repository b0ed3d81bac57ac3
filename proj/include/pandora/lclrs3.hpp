#pragma once

#include <cstddef>
#include <vector>

#include "pandora/instance.hpp"
#include "pandora/interval.hpp"

namespace pandora {

/// Per-box parameters of an instance supported on {0, 1/2, 1}: masses p at 1,
/// q at 1/2, r at 0.
struct Lclrs3Box {
    Scalar p, q, r, c, tau;
};

struct Lclrs3Instance {
    PnoiInstance base;
    std::vector<Lclrs3Box> boxes;

    std::size_t size() const { return boxes.size(); }
};

/// Checks: support in {0, 1/2, 1} with mass at 1; cost > 0; E[v] < 1/2;
/// index >= 1/2. Empty result means the instance qualifies.
std::vector<Violation> lclrs3_violations(const PnoiInstance& inst);
bool is_lclrs3(const PnoiInstance& inst);

/// Throws InvalidInstance when the instance does not qualify.
Lclrs3Instance as_lclrs3(const PnoiInstance& inst);

/// g(i, T) = E[(max_{j in T} kappa_j - tau_i)_+], 0 for empty T.
/// Throws DomainError when i is in T.
Scalar g_value(const Lclrs3Instance& inst, std::size_t i, BoxSet T);

/// Boxes after position `pos` of sigma whose index exceeds that of sigma[pos].
BoxSet later_higher(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma, std::size_t pos);

/// Throws DomainError unless sigma is a permutation of 0..n-1.
void require_permutation(const std::vector<std::size_t>& sigma, std::size_t n);

/// Payoff of the normal policy with ordering sigma: a 1 is taken at once, a
/// 1/2 hands over to the index policy on the unopened boxes with outside
/// option 1/2, and after n-1 zeros the last box is taken unopened.
Scalar evaluate_normal_policy(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma);

/// sum_i p_i g(i, T_sigma(i)) prod_{boxes before i} r.
Scalar loss(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma);

/// c_last * prod_{all but last} r - Loss(sigma).
Scalar utility(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma);

struct PermutationSearch {
    std::vector<std::size_t> sigma;
    Scalar value;
};

inline constexpr std::size_t kDefaultPermutationLimit = 8;

/// Best normal policy by exhaustion; lexicographically first among equals.
PermutationSearch best_permutation(const Lclrs3Instance& inst, std::size_t limit = kDefaultPermutationLimit);

struct CertifiedValue {
    Scalar value;
    Scalar bound;  // |value - exact| <= bound
};

/// Rational t with |t - 2 e^{y/2}| <= err, for 0 <= y <= 1.
Scalar rational_exp_half(const Scalar& y, const Scalar& err);
CertifiedValue certified_exp_half(const Scalar& y, const Scalar& err);

struct ReductionOutput {
    Lclrs3Instance instance;  // n + 2 boxes; the last two are the special ones
    std::vector<long long> source;
    Scalar gamma;
    Scalar delta;
    Scalar y;
    Scalar t;
    Scalar t_error_bound;
    Scalar tau_H;
    Scalar tau_L;

    std::size_t n() const { return source.size(); }
};

/// Builds the LCLRS3 instance for the Partition input S (1 <= s_i <= 2^n).
/// Throws DomainError for out-of-range input and ConstructionError if the
/// result fails any of its own invariants.
ReductionOutput reduce_partition(const std::vector<long long>& S);

/// Checks everything reduce_partition promises about its output. Returns the
/// list of failures (empty when fine).
std::vector<std::string> check_reduction(const ReductionOutput& red);

struct PartitionVerdict {
    bool yes;
    std::vector<std::size_t> sigma;  // optimal normal ordering
    BoxSet before;                   // source boxes ordered before box n+1
    BoxSet after;
};

inline constexpr std::size_t kDefaultPartitionLimit = 3;

/// Reads the Partition answer off the optimal ordering: yes iff the source
/// boxes before and after box n+1 carry equal p-mass. Throws SizeError when
/// n exceeds `max_n`.
PartitionVerdict partition_answer(const ReductionOutput& red, std::size_t max_n = kDefaultPartitionLimit);

struct ReductionConstants {
    Scalar k1, k2, C;
};

ReductionConstants reduction_constants(const ReductionOutput& red);

struct ReductionDiagnostics {
    Scalar k1, k2, C;
    Scalar x, y, z;
    Scalar loss;
    Scalar scaled_loss;  // (Loss - C) / k1
    Interval h;          // encloses h(x)
    Scalar residual;     // upper bound on |scaled_loss - h(x)|
    /// C with the sign of its (1/2) k2 sum p_i^2 term flipped. The constant
    /// as printed leaves a sigma-independent offset of about 2 sum p_i^2 in
    /// the residual; this one removes it.
    Scalar corrected_C;
    Scalar corrected_residual;  // same bound with corrected_C
};

/// h(x) = e^{-2x} (1 - ratio * e^{-y+x}), enclosed to within `width`.
Interval h_interval(const Scalar& ratio, const Scalar& y, const Scalar& x, const Scalar& width = pow2(-64));

/// h''(x) = 4 e^{-2x} - ratio * e^{-y} e^{-x}.
Interval h_second_derivative(const Scalar& ratio, const Scalar& y, const Scalar& x,
                             const Scalar& width = pow2(-64));

ReductionDiagnostics h_diagnostics(const ReductionOutput& red, const std::vector<std::size_t>& sigma,
                                   const Scalar& width = pow2(-64));

/// sum_i p_i prod_{j<i} r_j.
Scalar scheduling_sum(const std::vector<Scalar>& p, const std::vector<Scalar>& r);

}  // namespace pandora
