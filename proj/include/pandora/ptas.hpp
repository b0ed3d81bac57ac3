#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pandora/exact.hpp"
#include "pandora/instance.hpp"

namespace pandora {

struct Theta {
    Scalar value;
    Scalar alg_payoff;  // half_approx of the instance
    Scalar epsilon;
};

/// theta = 2 * half_approx / epsilon, for 0 < epsilon <= 1/2.
Theta choose_theta(const PnoiInstance& inst, const Scalar& epsilon);

/// Grid step theta * epsilon^2 used for small values.
Scalar small_grid_step(const Theta& theta);

/// Rounds every support value down to the grid and merges collisions. Costs
/// are kept. A zero step (theta = 0) leaves the instance unchanged.
PnoiInstance s_discretize(const PnoiInstance& inst, const Theta& theta);

/// F(S, v) = sum_{i in S} E[(kappa_i - v)_+]
Scalar f_value(const PnoiInstance& inst, BoxSet S, const Scalar& v);

/// W(S, v) = E[(max_{i in S} kappa_i - v)_+]
Scalar w_value(const PnoiInstance& inst, BoxSet S, const Scalar& v);

/// theta = points[0] < ... < points.back() = MaxV, or just [theta] when no
/// support value exceeds theta.
struct LargePoints {
    std::vector<Scalar> points;
    Scalar epsilon;
    Scalar budget;  // every gap drops F([n], .) by less than this

    const Scalar& theta() const { return points.front(); }
    const Scalar& max_value() const { return points.back(); }
    std::size_t size() const { return points.size(); }
};

/// Splits the drop of F([n], .) between theta and MaxV into equal steps
/// smaller than epsilon * alg_payoff and places a point where each step ends.
LargePoints large_points(const PnoiInstance& inst, const Theta& theta);

/// D^L: identity below theta, else the smallest point >= x. Throws
/// DomainError for x > MaxV.
Scalar dl_round(const LargePoints& points, const Scalar& x);

/// The SSDP view with rounded state transitions and raw marginal payoffs.
struct LpnoiInstance {
    PnoiInstance base;
    LargePoints points;
    /// Set when `base` is the small-value discretization of a raw instance
    /// with this grid step; lifting then rounds raw values down first.
    std::optional<Scalar> grid_step;
    /// Sorted reachable states: 0, the rounded support values, the points.
    std::vector<Scalar> states;

    /// f^L(I, open i) when box i shows v.
    Scalar next_state(const Scalar& I, const Scalar& v) const;
    /// G^L(I, open i) when box i shows v.
    Scalar open_payoff(const Scalar& I, std::size_t i, const Scalar& v) const;
};

LpnoiInstance build_lpnoi(const PnoiInstance& inst, const LargePoints& points,
                          std::optional<Scalar> grid_step = std::nullopt);

/// Action per (unopened set, state). Quit stands for the end action.
class SsdpPolicy {
public:
    SsdpPolicy() = default;
    SsdpPolicy(std::size_t boxes, std::vector<Scalar> states);

    std::size_t box_count() const { return boxes_; }
    const std::vector<Scalar>& states() const { return states_; }

    /// Throws DomainError for a state outside the state set.
    std::size_t state_index(const Scalar& state) const;
    Action action(BoxSet unopened, const Scalar& state) const;
    void set(BoxSet unopened, std::size_t state, Action a);

    struct Entry {
        BoxSet unopened;
        Scalar state;
        Action action;
    };
    std::vector<Entry> entries() const;

private:
    std::size_t boxes_ = 0;
    std::vector<Scalar> states_;
    std::vector<Action> actions_;
};

struct SsdpSolution {
    Scalar value;
    SsdpPolicy policy;
};

/// V(S, I) = max{0, max_i E[v_i] - I, max_i E[max(I, v_i) - I - c_i + V(S - i, f^L(I, v_i))]}
/// with end < take-unopened < open and lowest box first on ties.
SsdpSolution solve_ssdp_exact(const LpnoiInstance& lp, std::size_t limit = kDefaultDpLimit);

/// Expected total marginal payoff of `pol` run on the L-PNOI instance.
Scalar evaluate_ssdp_policy(const LpnoiInstance& lp, const SsdpPolicy& pol);

/// Quasi-index policy at large state v over S: opens, in `order` (default
/// ascending box), every box of S with positive expected marginal payoff,
/// stopping as soon as the state moves above v. Throws DomainError unless v
/// is one of the large points.
Scalar quasi_index_value(const LpnoiInstance& lp, BoxSet S, const Scalar& v,
                         const std::vector<std::size_t>& order = {});

/// Exact payoff on `inst` of running `pol` on rounded observations. `inst`
/// is lp.base, or the raw instance whose small-value discretization is
/// lp.base. Throws DomainError if the policy is asked about an unknown state.
Scalar lift_policy(const LpnoiInstance& lp, const SsdpPolicy& pol, const PnoiInstance& inst);

struct PtasResult {
    Theta theta;
    PnoiInstance discretized;
    LpnoiInstance lp;
    Scalar opt_L;
    SsdpPolicy policy;
    Scalar payoff;  // lifted policy on the input instance
};

/// choose_theta, s_discretize, large_points, build_lpnoi, solve_ssdp_exact,
/// lift_policy.
PtasResult ptas_pipeline(const PnoiInstance& inst, const Scalar& epsilon, std::size_t limit = kDefaultDpLimit);

}  // namespace pandora
