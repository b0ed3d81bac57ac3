#include "pandora/ptas.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <tuple>

#include "pandora/error.hpp"
#include "pandora/index.hpp"
#include "pandora/parallel.hpp"
#include "pandora/policies.hpp"

namespace pandora {

Theta choose_theta(const PnoiInstance& inst, const Scalar& epsilon) {
    if (epsilon <= 0 || epsilon > Scalar(1, 2)) throw DomainError("epsilon must lie in (0, 1/2]");
    Scalar alg = half_approx(inst);
    return {2 * alg / epsilon, alg, epsilon};
}

Scalar small_grid_step(const Theta& theta) { return theta.value * theta.epsilon * theta.epsilon; }

PnoiInstance s_discretize(const PnoiInstance& inst, const Theta& theta) {
    const Scalar step = small_grid_step(theta);
    if (step <= 0) return inst;
    PnoiInstance out;
    for (const auto& b : inst.boxes) {
        std::vector<Atom> atoms;
        for (const auto& a : b.dist.atoms) atoms.push_back({floor_to_grid(a.value, step), a.prob});
        out.boxes.push_back({b.cost, DiscreteDistribution::canonical(std::move(atoms))});
    }
    return out;
}

namespace {

Scalar f_from_kappas(const std::vector<DiscreteDistribution>& kappas, BoxSet S, const Scalar& v) {
    Scalar total = 0;
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        if (!contains(S, i)) continue;
        for (const auto& a : kappas[i].atoms) {
            if (a.value > v) total += a.prob * (a.value - v);
        }
    }
    return total;
}

void require_subset(BoxSet S, std::size_t n) {
    if (S > full_set(n)) throw DomainError("subset refers to boxes beyond the instance");
}

}  // namespace

Scalar f_value(const PnoiInstance& inst, BoxSet S, const Scalar& v) {
    require_valid(inst);
    require_subset(S, inst.size());
    return f_from_kappas(kappa_distributions(inst), S, v);
}

Scalar w_value(const PnoiInstance& inst, BoxSet S, const Scalar& v) {
    require_valid(inst);
    require_subset(S, inst.size());
    auto kappas = kappa_distributions(inst);
    return expected_max_with(kappas, S, v) - v;
}

LargePoints large_points(const PnoiInstance& inst, const Theta& theta) {
    require_valid(inst);
    const Scalar budget = theta.epsilon * theta.alg_payoff;
    const Scalar max_v = max_support_value(inst);
    LargePoints out{{theta.value}, theta.epsilon, budget};
    if (max_v <= theta.value) return out;

    const auto kappas = kappa_distributions(inst);
    const BoxSet all = full_set(inst.size());
    const Scalar top = f_from_kappas(kappas, all, theta.value);
    if (top > 0) {
        // F is linear between consecutive kappa support values.
        std::vector<Scalar> breaks{theta.value};
        for (const auto& k : kappas) {
            for (const auto& a : k.atoms) {
                if (a.value > theta.value) breaks.push_back(a.value);
            }
        }
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        std::vector<Scalar> f_at;
        for (const auto& b : breaks) f_at.push_back(f_from_kappas(kappas, all, b));

        mpz_class steps_z;
        Scalar ratio = top / budget;
        mpz_fdiv_q(steps_z.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
        const long steps = steps_z.get_si() + 1;
        const Scalar drop = top / steps;
        std::size_t seg = 0;
        for (long k = 1; k < steps; ++k) {
            const Scalar level = top - drop * k;
            while (!(f_at[seg] > level && f_at[seg + 1] <= level)) ++seg;
            const Scalar& a = breaks[seg];
            const Scalar& b = breaks[seg + 1];
            out.points.push_back(a + (f_at[seg] - level) * (b - a) / (f_at[seg] - f_at[seg + 1]));
        }
    }
    out.points.push_back(max_v);
    return out;
}

Scalar dl_round(const LargePoints& points, const Scalar& x) {
    if (x > points.max_value()) {
        throw DomainError("D^L: " + to_string(x) + " exceeds MaxV " + to_string(points.max_value()));
    }
    if (x < points.theta()) return x;
    return *std::lower_bound(points.points.begin(), points.points.end(), x);
}

Scalar LpnoiInstance::next_state(const Scalar& I, const Scalar& v) const { return dl_round(points, max(I, v)); }

Scalar LpnoiInstance::open_payoff(const Scalar& I, std::size_t i, const Scalar& v) const {
    return max(I, v) - I - base[i].cost;
}

LpnoiInstance build_lpnoi(const PnoiInstance& inst, const LargePoints& points, std::optional<Scalar> grid_step) {
    require_valid(inst);
    if (max_support_value(inst) > points.max_value()) {
        throw DomainError("instance has values above the last discretization point");
    }
    LpnoiInstance lp{inst, points, std::move(grid_step), {Scalar(0)}};
    for (const auto& b : inst.boxes) {
        for (const auto& a : b.dist.atoms) lp.states.push_back(dl_round(points, a.value));
    }
    for (const auto& p : points.points) lp.states.push_back(p);
    std::sort(lp.states.begin(), lp.states.end());
    lp.states.erase(std::unique(lp.states.begin(), lp.states.end()), lp.states.end());
    return lp;
}

SsdpPolicy::SsdpPolicy(std::size_t boxes, std::vector<Scalar> states)
    : boxes_(boxes), states_(std::move(states)), actions_((std::size_t{1} << boxes) * states_.size()) {}

std::size_t SsdpPolicy::state_index(const Scalar& state) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), state);
    if (it == states_.end() || *it != state) throw DomainError("policy has no state " + to_string(state));
    return static_cast<std::size_t>(it - states_.begin());
}

Action SsdpPolicy::action(BoxSet unopened, const Scalar& state) const {
    if (unopened > full_set(boxes_)) throw DomainError("policy: unknown box set");
    return actions_[unopened * states_.size() + state_index(state)];
}

void SsdpPolicy::set(BoxSet unopened, std::size_t state, Action a) { actions_[unopened * states_.size() + state] = a; }

std::vector<SsdpPolicy::Entry> SsdpPolicy::entries() const {
    std::vector<Entry> out;
    for (BoxSet mask = 0; mask <= full_set(boxes_); ++mask) {
        for (std::size_t k = 0; k < states_.size(); ++k) {
            out.push_back({mask, states_[k], actions_[mask * states_.size() + k]});
        }
    }
    return out;
}

SsdpSolution solve_ssdp_exact(const LpnoiInstance& lp, std::size_t limit) {
    const std::size_t n = lp.base.size();
    if (n > limit) {
        throw SizeError("instance has " + std::to_string(n) + " boxes; the SSDP solver is limited to " +
                        std::to_string(limit));
    }
    const auto& states = lp.states;
    const std::size_t K = states.size();
    SsdpPolicy policy(n, states);
    std::vector<Scalar> value((std::size_t{1} << n) * K);
    std::vector<Scalar> means;
    for (const auto& b : lp.base.boxes) means.push_back(expected_value(b.dist));

    // successor[i][k][a]: state index after box i shows atom a in state k
    std::vector<std::vector<std::vector<std::size_t>>> successor(n, std::vector<std::vector<std::size_t>>(K));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            for (const auto& a : lp.base[i].dist.atoms) {
                successor[i][k].push_back(policy.state_index(lp.next_state(states[k], a.value)));
            }
        }
    }

    std::vector<std::vector<BoxSet>> layers(n + 1);
    for (BoxSet mask = 0; mask <= full_set(n); ++mask) layers[std::popcount(mask)].push_back(mask);
    for (const auto& layer : layers) {
        parallel_for(layer.size(), [&](std::size_t idx) {
            const BoxSet mask = layer[idx];
            for (std::size_t k = 0; k < K; ++k) {
                const Scalar& I = states[k];
                Scalar best = 0;
                Action act{ActionKind::Quit, 0};
                for (std::size_t i = 0; i < n; ++i) {
                    if (contains(mask, i) && means[i] - I > best) {
                        best = means[i] - I;
                        act = {ActionKind::TakeUnopened, i};
                    }
                }
                for (std::size_t i = 0; i < n; ++i) {
                    if (!contains(mask, i)) continue;
                    const BoxSet rest = mask & ~(BoxSet{1} << i);
                    Scalar v = 0;
                    const auto& atoms = lp.base[i].dist.atoms;
                    for (std::size_t a = 0; a < atoms.size(); ++a) {
                        v += atoms[a].prob * (lp.open_payoff(I, i, atoms[a].value) + value[rest * K + successor[i][k][a]]);
                    }
                    if (v > best) {
                        best = std::move(v);
                        act = {ActionKind::Open, i};
                    }
                }
                value[mask * K + k] = std::move(best);
                policy.set(mask, k, act);
            }
        });
    }
    Scalar root = value[full_set(n) * K + policy.state_index(Scalar(0))];
    return {std::move(root), std::move(policy)};
}

namespace {

void check_action(const Action& a, BoxSet unopened, std::size_t n) {
    if (a.kind == ActionKind::Quit) return;
    if (a.box >= n || !contains(unopened, a.box)) {
        throw DomainError("policy uses box " + std::to_string(a.box + 1) + " which is not available");
    }
}

}  // namespace

Scalar evaluate_ssdp_policy(const LpnoiInstance& lp, const SsdpPolicy& pol) {
    const std::size_t n = lp.base.size();
    std::map<std::pair<BoxSet, Scalar>, Scalar> memo;
    auto rec = [&](auto& self, BoxSet mask, const Scalar& I) -> Scalar {
        auto key = std::make_pair(mask, I);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const Action a = pol.action(mask, I);
        check_action(a, mask, n);
        Scalar v = 0;
        if (a.kind == ActionKind::TakeUnopened) {
            v = expected_value(lp.base[a.box].dist) - I;
        } else if (a.kind == ActionKind::Open) {
            const BoxSet rest = mask & ~(BoxSet{1} << a.box);
            for (const auto& at : lp.base[a.box].dist.atoms) {
                v += at.prob * (lp.open_payoff(I, a.box, at.value) + self(self, rest, lp.next_state(I, at.value)));
            }
        }
        memo.emplace(key, v);
        return v;
    };
    return rec(rec, full_set(n), Scalar(0));
}

Scalar quasi_index_value(const LpnoiInstance& lp, BoxSet S, const Scalar& v, const std::vector<std::size_t>& order) {
    const auto& pts = lp.points.points;
    if (!std::binary_search(pts.begin(), pts.end(), v)) {
        throw DomainError("quasi-index policy needs a large discretization point, got " + to_string(v));
    }
    const std::size_t n = lp.base.size();
    require_subset(S, n);
    std::vector<std::size_t> seq;
    if (order.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (contains(S, i)) seq.push_back(i);
        }
    } else {
        BoxSet seen = 0;
        for (auto i : order) {
            if (i >= n || !contains(S, i) || contains(seen, i)) throw DomainError("order must list the boxes of S once");
            seen |= BoxSet{1} << i;
        }
        if (seen != S) throw DomainError("order must list the boxes of S once");
        seq = order;
    }

    Scalar total = 0;
    Scalar stay = 1;  // probability the state is still v
    for (auto i : seq) {
        Scalar gain = 0;
        Scalar stays = 0;
        for (const auto& a : lp.base[i].dist.atoms) {
            gain += a.prob * lp.open_payoff(v, i, a.value);
            if (lp.next_state(v, a.value) == v) stays += a.prob;
        }
        if (gain <= 0) continue;
        total += stay * gain;
        stay *= stays;
    }
    return total;
}

Scalar lift_policy(const LpnoiInstance& lp, const SsdpPolicy& pol, const PnoiInstance& inst) {
    require_valid(inst);
    const std::size_t n = lp.base.size();
    if (inst.size() != n) throw DomainError("lift: instance size differs from the L-PNOI base");
    bool via_grid = false;
    if (!(inst == lp.base)) {
        if (!lp.grid_step) throw DomainError("lift: instance is not the L-PNOI base");
        PnoiInstance rounded;
        for (const auto& b : inst.boxes) {
            std::vector<Atom> atoms;
            for (const auto& a : b.dist.atoms) atoms.push_back({floor_to_grid(a.value, *lp.grid_step), a.prob});
            rounded.boxes.push_back({b.cost, DiscreteDistribution::canonical(std::move(atoms))});
        }
        if (!(rounded == lp.base)) throw DomainError("lift: instance does not discretize to the L-PNOI base");
        via_grid = true;
    }

    std::vector<Scalar> means;
    for (const auto& b : inst.boxes) means.push_back(expected_value(b.dist));
    std::map<std::tuple<BoxSet, Scalar, Scalar>, Scalar> memo;
    // I: state the policy sees; best: largest raw value actually revealed.
    auto rec = [&](auto& self, BoxSet mask, const Scalar& I, const Scalar& best) -> Scalar {
        auto key = std::make_tuple(mask, I, best);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const Action a = pol.action(mask, I);
        check_action(a, mask, n);
        Scalar v;
        switch (a.kind) {
            case ActionKind::Quit:
                v = best;
                break;
            case ActionKind::TakeUnopened:
                v = means[a.box];
                break;
            case ActionKind::Open: {
                const BoxSet rest = mask & ~(BoxSet{1} << a.box);
                v = -inst[a.box].cost;
                for (const auto& at : inst[a.box].dist.atoms) {
                    const Scalar seen = via_grid ? floor_to_grid(at.value, *lp.grid_step) : at.value;
                    v += at.prob * self(self, rest, lp.next_state(I, seen), max(best, at.value));
                }
                break;
            }
        }
        memo.emplace(key, v);
        return v;
    };
    return rec(rec, full_set(n), Scalar(0), Scalar(0));
}

PtasResult ptas_pipeline(const PnoiInstance& inst, const Scalar& epsilon, std::size_t limit) {
    require_valid(inst);
    if (inst.size() > limit) {
        throw SizeError("instance has " + std::to_string(inst.size()) + " boxes; the pipeline is limited to " +
                        std::to_string(limit));
    }
    PtasResult r;
    r.theta = choose_theta(inst, epsilon);
    r.discretized = s_discretize(inst, r.theta);
    const Scalar step = small_grid_step(r.theta);
    auto points = large_points(r.discretized, r.theta);
    r.lp = build_lpnoi(r.discretized, points, step > 0 ? std::optional<Scalar>(step) : std::nullopt);
    auto sol = solve_ssdp_exact(r.lp, limit);
    r.opt_L = std::move(sol.value);
    r.policy = std::move(sol.policy);
    r.payoff = lift_policy(r.lp, r.policy, inst);
    return r;
}

}  // namespace pandora
