#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "pandora/cli.hpp"
#include "pandora/exact.hpp"
#include "pandora/generators.hpp"
#include "pandora/index.hpp"
#include "pandora/json_io.hpp"
#include "pandora/lclrs3.hpp"
#include "pandora/policies.hpp"
#include "pandora/ptas.hpp"

namespace pandora {

namespace {

class SuiteRun {
public:
    void check(const std::string& property, bool ok, const std::function<std::string()>& witness) {
        auto it = std::find_if(props_.begin(), props_.end(), [&](const Prop& p) { return p.name == property; });
        if (it == props_.end()) {
            props_.push_back({property, 0, std::nullopt});
            it = props_.end() - 1;
        }
        ++it->checked;
        if (!ok && !it->failure) it->failure = witness();
    }

    int report(const std::string& suite, std::ostream& out) const {
        int status = kExitOk;
        for (const auto& p : props_) {
            if (p.failure) {
                out << "FAIL " << suite << ": " << p.name << "\n  counterexample: " << *p.failure << "\n";
                status = kExitVerifyFailed;
            } else {
                out << "PASS " << suite << ": " << p.name << " (" << p.checked << " checks)\n";
            }
        }
        return status;
    }

private:
    struct Prop {
        std::string name;
        std::uint64_t checked;
        std::optional<std::string> failure;
    };
    std::vector<Prop> props_;
};

std::function<std::string()> show(const PnoiInstance& inst, std::uint64_t idx, const std::string& extra = "") {
    return [inst, idx, extra] {
        return "case " + std::to_string(idx) + (extra.empty() ? "" : " (" + extra + ")") + ": " +
               instance_to_json(inst).dump();
    };
}

const Scalar& epsilon_for(std::uint64_t idx) {
    static const std::vector<Scalar> eps{Scalar(1, 2), Scalar(1, 4), Scalar(1, 10)};
    return eps[idx % eps.size()];
}

void suite_index_identity(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    GeneratorOptions opt;
    opt.max_boxes = 8;
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        auto inst = random_instance(rng, opt);
        const Scalar mk = max_kappa_expectation(inst);
        run.check("classic optimum equals E[max kappa]", classic_optimal_value(inst) == mk, show(inst, k));
        bool index_ok = true;
        for (const auto& b : inst.boxes) {
            const Scalar tau = compute_index(b);
            Scalar surplus = 0;
            for (const auto& a : b.dist.atoms) {
                if (a.value > tau) surplus += a.prob * (a.value - tau);
            }
            index_ok = index_ok && surplus == b.cost;
        }
        run.check("index solves E[(v - tau)+] = c", index_ok, show(inst, k));
        const Scalar opt = optimal_value(inst).value;
        const Scalar half = half_approx(inst);
        run.check("optimum dominates classic optimum and every mean", opt >= mk && opt >= half, show(inst, k));
        run.check("optimum at most twice the half-approximation", opt <= 2 * half, show(inst, k));
    }
}

void suite_structure(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    GeneratorOptions opt;
    opt.max_boxes = 5;
    opt.max_support = 3;
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        auto inst = random_instance(rng, opt);
        auto best = best_structured_policy(inst);
        const Scalar dp = optimal_value(inst).value;
        run.check("best structured policy equals the optimum", best.value == dp, show(inst, k));
        run.check("returned structured policy evaluates to its value",
                  evaluate_structured_policy(inst, best.policy) == best.value, show(inst, k));
    }
}

void suite_normal(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        auto raw = random_lclrs3_instance(rng, 1, 5);
        auto inst = as_lclrs3(raw);
        auto best = best_permutation(inst);
        run.check("best normal policy equals the optimum", best.value == optimal_value(raw).value, show(raw, k));
        StructuredPolicy pol{best.sigma, std::vector<std::optional<Scalar>>(best.sigma.size() - 1, Scalar(1, 2))};
        run.check("normal policy agrees with its structured form", evaluate_structured_policy(raw, pol) == best.value,
                  show(raw, k));
    }
}

void suite_eq1(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        auto raw = random_lclrs3_instance(rng, 1, 5);
        auto inst = as_lclrs3(raw);
        const Scalar mk = max_kappa_expectation(raw);
        std::vector<std::size_t> sigma(inst.size());
        std::iota(sigma.begin(), sigma.end(), 0);
        bool identity = true, offset = true;
        std::optional<Scalar> gap;
        do {
            const Scalar normal = evaluate_normal_policy(inst, sigma);
            Scalar saved = inst.boxes[sigma.back()].c;
            for (std::size_t j = 0; j + 1 < sigma.size(); ++j) saved *= inst.boxes[sigma[j]].r;
            identity = identity && mk == normal + loss(inst, sigma) - saved;
            const Scalar d = normal - utility(inst, sigma);
            if (!gap) gap = d;
            offset = offset && d == *gap;
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        run.check("E[max kappa] = normal + Loss - c_last prod r, every ordering", identity, show(raw, k));
        run.check("payoff minus utility is the same for every ordering", offset, show(raw, k));
    }
}

bool subset_sum_split(const std::vector<long long>& S) {
    long long total = std::accumulate(S.begin(), S.end(), 0LL);
    if (total % 2) return false;
    for (unsigned m = 0; m < (1u << S.size()); ++m) {
        long long part = 0;
        for (std::size_t i = 0; i < S.size(); ++i) {
            if ((m >> i) & 1) part += S[i];
        }
        if (2 * part == total) return true;
    }
    return false;
}

void suite_reduction(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        const std::size_t n = static_cast<std::size_t>(rng.between(1, 3));
        std::vector<long long> S;
        for (std::size_t i = 0; i < n; ++i) S.push_back(rng.between(1, 1LL << n));
        std::string label = "S = {";
        for (std::size_t i = 0; i < n; ++i) label += (i ? "," : "") + std::to_string(S[i]);
        label += "}";
        auto red = reduce_partition(S);
        auto witness = [label] { return label; };
        run.check("reduction output satisfies its invariants", check_reduction(red).empty(), witness);
        auto c = reduction_constants(red);
        run.check("k2 / k1 = t", c.k2 / c.k1 == red.t, witness);
        auto verdict = partition_answer(red);
        run.check("optimal ordering ends with box n+2", verdict.sigma.back() == n + 1, witness);
        run.check("partition answer matches subset-sum search", verdict.yes == subset_sum_split(S), witness);
    }
}

void suite_sandwich(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        auto inst = random_large_value_instance(rng, 1, 6);
        const Scalar& eps = epsilon_for(k);
        auto theta = choose_theta(inst, eps);
        auto points = large_points(inst, theta);
        auto kappas = kappa_distributions(inst);
        std::vector<Scalar> vs{Scalar(0), theta.value};
        for (const auto& d : kappas) {
            for (const auto& a : d.atoms) vs.push_back(a.value);
        }
        for (const auto& p : points.points) vs.push_back(p);
        bool upper = true, lower = true;
        for (BoxSet S = 1; S <= full_set(inst.size()); ++S) {
            for (const auto& v : vs) {
                const Scalar F = f_value(inst, S, v);
                const Scalar W = w_value(inst, S, v);
                upper = upper && F >= W;
                if (v >= theta.value) lower = lower && W >= (1 - eps) * F;
            }
        }
        const std::string e = "epsilon " + to_string(eps);
        run.check("F >= W at every v", upper, show(inst, k, e));
        run.check("W >= (1 - eps) F at every v >= theta", lower, show(inst, k, e));
        bool gaps = true;
        for (std::size_t j = 0; j + 1 < points.size(); ++j) {
            gaps = gaps && f_value(inst, full_set(inst.size()), points.points[j]) -
                                   f_value(inst, full_set(inst.size()), points.points[j + 1]) <
                               points.budget;
        }
        run.check("consecutive large points drop F by less than eps * alg", gaps, show(inst, k, e));
    }
}

// L-PNOI whose rounding is the identity, i.e. the plain PNOI process.
LpnoiInstance identity_lpnoi(const PnoiInstance& inst, std::optional<Scalar> grid) {
    LargePoints pts{{max_support_value(inst)}, Scalar(1), Scalar(0)};
    return build_lpnoi(inst, pts, std::move(grid));
}

void suite_discretization(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        auto inst = random_instance(rng);
        const Scalar& eps = epsilon_for(k);
        const std::string e = "epsilon " + to_string(eps);
        auto theta = choose_theta(inst, eps);
        const Scalar opt = optimal_value(inst).value;
        run.check("OPT / eps <= theta <= 2 OPT / eps", opt / eps <= theta.value && theta.value <= 2 * opt / eps,
                  show(inst, k, e));
        auto disc = s_discretize(inst, theta);
        const Scalar opt_s = optimal_value(disc).value;
        run.check("OPT(B^S) <= OPT", opt_s <= opt, show(inst, k, e));
        run.check("OPT(B^S) >= (1 - 3 eps) OPT", opt_s >= (1 - 3 * eps) * opt, show(inst, k, e));
        const Scalar step = small_grid_step(theta);
        auto lp = identity_lpnoi(disc, step > 0 ? std::optional<Scalar>(step) : std::nullopt);
        auto sol = solve_ssdp_exact(lp);
        run.check("SSDP optimum of B^S equals its PNOI optimum", sol.value == opt_s, show(inst, k, e));
        run.check("optimal policy of B^S earns at least as much on B", lift_policy(lp, sol.policy, inst) >= opt_s,
                  show(inst, k, e));
    }
}

SsdpPolicy random_policy(const LpnoiInstance& lp, SplitMix64& rng) {
    const std::size_t n = lp.base.size();
    SsdpPolicy pol(n, lp.states);
    for (BoxSet mask = 0; mask <= full_set(n); ++mask) {
        for (std::size_t s = 0; s < lp.states.size(); ++s) {
            std::vector<Action> options{{ActionKind::Quit, 0}};
            for (std::size_t i = 0; i < n; ++i) {
                if (!contains(mask, i)) continue;
                options.push_back({ActionKind::TakeUnopened, i});
                options.push_back({ActionKind::Open, i});
                options.push_back({ActionKind::Open, i});
            }
            pol.set(mask, s, options[rng.below(options.size())]);
        }
    }
    return pol;
}

void suite_lift(SuiteRun& run, std::uint64_t seed, std::uint64_t cases) {
    for (std::uint64_t k = 0; k < cases; ++k) {
        auto rng = case_rng(seed, k);
        auto inst = random_large_value_instance(rng, 1, 6);
        const Scalar& eps = epsilon_for(k);
        const std::string e = "epsilon " + to_string(eps);
        auto theta = choose_theta(inst, eps);
        auto lp = build_lpnoi(inst, large_points(inst, theta));
        auto sol = solve_ssdp_exact(lp);
        run.check("lifted optimal L-PNOI policy earns at least OPT^L",
                  lift_policy(lp, sol.policy, inst) >= evaluate_ssdp_policy(lp, sol.policy), show(inst, k, e));
        auto pol = random_policy(lp, rng);
        run.check("lifted random policy earns at least its L-PNOI value",
                  lift_policy(lp, pol, inst) >= evaluate_ssdp_policy(lp, pol), show(inst, k, e));
        const Scalar opt = optimal_value(inst).value;
        run.check("OPT >= OPT^L >= (1 - 5 eps) OPT", opt >= sol.value && sol.value >= (1 - 5 * eps) * opt,
                  show(inst, k, e));
        bool monotone = true;
        for (const auto& I : lp.states) {
            for (const auto& b : inst.boxes) {
                for (const auto& a : b.dist.atoms) {
                    const Scalar next = lp.next_state(I, a.value);
                    monotone = monotone && next >= I && next >= a.value;
                }
            }
        }
        run.check("state transitions never decrease and round up", monotone, show(inst, k, e));
        bool nonneg = true;
        for (const auto& entry : sol.policy.entries()) {
            const auto& a = entry.action;
            Scalar gain = 0;
            if (a.kind == ActionKind::TakeUnopened) gain = expected_value(inst[a.box].dist) - entry.state;
            if (a.kind == ActionKind::Open) {
                for (const auto& at : inst[a.box].dist.atoms) gain += at.prob * lp.open_payoff(entry.state, a.box, at.value);
            }
            nonneg = nonneg && gain >= 0;
        }
        run.check("optimal L-PNOI policy takes no negative-marginal action", nonneg, show(inst, k, e));
        auto r = ptas_pipeline(inst, eps);
        run.check("pipeline payoff within [(1 - 5 eps) OPT, OPT]", r.payoff <= opt && r.payoff >= (1 - 5 * eps) * opt,
                  show(inst, k, e));
    }
}

using SuiteFn = void (*)(SuiteRun&, std::uint64_t, std::uint64_t);

const std::map<std::string, SuiteFn>& suite_table() {
    static const std::map<std::string, SuiteFn> table{
        {"index-identity", suite_index_identity}, {"structure", suite_structure},
        {"normal", suite_normal},                 {"eq1", suite_eq1},
        {"reduction", suite_reduction},           {"sandwich", suite_sandwich},
        {"discretization", suite_discretization}, {"lift", suite_lift},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"index-identity", "structure", "normal",         "eq1",
                                                "reduction",      "sandwich",  "discretization", "lift"};
    return names;
}

int run_verify_suite(const std::string& suite, std::uint64_t seed, std::uint64_t cases, std::ostream& out) {
    auto it = suite_table().find(suite);
    if (it == suite_table().end()) throw std::invalid_argument("unknown suite '" + suite + "'");
    SuiteRun run;
    it->second(run, seed, cases);
    return run.report(suite, out);
}

}  // namespace pandora
