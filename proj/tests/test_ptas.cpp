#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pandora/error.hpp"
#include "pandora/exact.hpp"
#include "pandora/generators.hpp"
#include "pandora/json_io.hpp"
#include "pandora/policies.hpp"
#include "pandora/ptas.hpp"

using namespace pandora;

namespace {

PnoiInstance single(const char* cost, std::vector<std::pair<long, Scalar>> atoms) {
    PnoiBox b;
    b.cost = parse_scalar(cost);
    for (auto& [v, p] : atoms) b.dist.atoms.push_back({Scalar(v), p});
    return PnoiInstance{{b}};
}

std::vector<Scalar> scalars(std::initializer_list<const char*> xs) {
    std::vector<Scalar> out;
    for (auto x : xs) out.push_back(parse_scalar(x));
    return out;
}

// Expected value of the best state-independent plan by enumeration: F by
// definition.
Scalar f_enumerated(const PnoiInstance& inst, BoxSet S, const Scalar& v) {
    Scalar total = 0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        if (!contains(S, i)) continue;
        for (const auto& a : kappa_distribution(inst[i]).atoms) {
            if (a.value > v) total += a.prob * (a.value - v);
        }
    }
    return total;
}

}  // namespace

TEST(Ptas, ThetaAndGrid) {
    auto inst = load_instance(PANDORA_FIXTURES "/two_box.json");
    auto th = choose_theta(inst, Scalar(1, 4));
    EXPECT_EQ(th.alg_payoff, Scalar(9, 16));
    EXPECT_EQ(th.value, Scalar(9, 2));
    EXPECT_EQ(small_grid_step(th), Scalar(9, 32));
    EXPECT_THROW(choose_theta(inst, Scalar(0)), DomainError);
    EXPECT_THROW(choose_theta(inst, Scalar(3, 4)), DomainError);
    auto disc = s_discretize(inst, th);
    // 1 floors to 27/32 on the 9/32 grid.
    EXPECT_EQ(disc[0].dist.atoms[1].value, Scalar(27, 32));
    EXPECT_EQ(disc[0].cost, inst[0].cost);
}

TEST(Ptas, LargePointsHandComputed) {
    // One free box uniform on {10, 20, 30}; F drops from 10 at theta = 10 to
    // 0 at 30, in six steps of 5/3 (budget 2).
    auto inst = single("0", {{10, Scalar(1, 3)}, {20, Scalar(1, 3)}, {30, Scalar(1, 3)}});
    Theta th{Scalar(10), Scalar(4), Scalar(1, 2)};
    auto lp = large_points(inst, th);
    EXPECT_EQ(lp.points, scalars({"10", "25/2", "15", "35/2", "20", "25", "30"}));
    EXPECT_EQ(lp.budget, Scalar(2));
    EXPECT_EQ(dl_round(lp, Scalar(9)), Scalar(9));
    EXPECT_EQ(dl_round(lp, Scalar(10)), Scalar(10));
    EXPECT_EQ(dl_round(lp, Scalar(21)), Scalar(25));
    EXPECT_THROW(dl_round(lp, Scalar(31)), DomainError);
    // Nothing above theta: only theta itself.
    Theta high{Scalar(40), Scalar(4), Scalar(1, 2)};
    EXPECT_EQ(large_points(inst, high).points, scalars({"40"}));
    // tau = 10: no kappa mass above theta, F is flat up to MaxV.
    auto flat = single("45", {{0, Scalar(1, 2)}, {100, Scalar(1, 2)}});
    EXPECT_EQ(compute_index(flat[0]), Scalar(10));
    EXPECT_EQ(large_points(flat, th).points, scalars({"10", "100"}));
}

TEST(Ptas, FAndWMatchDefinitions) {
    for (std::uint64_t k = 0; k < 60; ++k) {
        auto rng = case_rng(51, k);
        GeneratorOptions o;
        o.max_boxes = 4;
        auto inst = random_instance(rng, o);
        std::vector<Scalar> taus;
        for (const auto& b : inst.boxes) taus.push_back(compute_index(b));
        const BoxSet S = 1 + rng.below(full_set(inst.size()));
        const Scalar v = oracle::frac(static_cast<long>(rng.below(33)), 4);
        Scalar w = 0;
        oracle::for_each_outcome(inst, [&](const std::vector<Scalar>& x, const Scalar& p) {
            Scalar m = v;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (contains(S, i)) m = max(m, min(x[i], taus[i]));
            }
            w += p * (m - v);
        });
        ASSERT_EQ(w_value(inst, S, v), w) << k;
        ASSERT_EQ(f_value(inst, S, v), f_enumerated(inst, S, v)) << k;
    }
}

TEST(Ptas, LargePointGapsAndCount) {
    for (std::uint64_t k = 0; k < 100; ++k) {
        auto rng = case_rng(52, k);
        auto inst = random_large_value_instance(rng, 1, 6);
        for (const Scalar& eps : {Scalar(1, 2), Scalar(1, 4), Scalar(1, 10)}) {
            auto th = choose_theta(inst, eps);
            auto lp = large_points(inst, th);
            ASSERT_EQ(lp.theta(), th.value);
            ASSERT_EQ(lp.budget, eps * th.alg_payoff);
            ASSERT_TRUE(std::is_sorted(lp.points.begin(), lp.points.end()));
            ASSERT_EQ(std::adjacent_find(lp.points.begin(), lp.points.end()), lp.points.end());
            if (max_support_value(inst) > th.value) ASSERT_EQ(lp.max_value(), max_support_value(inst));
            const Scalar inv = 1 / (eps * (1 - eps));
            const mpz_class m_bound = inv.get_num() / inv.get_den() + 2;
            ASSERT_LE(lp.size(), m_bound.get_ui()) << k;
            const BoxSet all = full_set(inst.size());
            for (std::size_t j = 0; j + 1 < lp.size(); ++j) {
                ASSERT_LT(f_value(inst, all, lp.points[j]) - f_value(inst, all, lp.points[j + 1]), lp.budget);
            }
        }
    }
}

TEST(Ptas, IdentityRoundingReproducesPnoi) {
    for (std::uint64_t k = 0; k < 60; ++k) {
        auto rng = case_rng(53, k);
        GeneratorOptions o;
        o.max_boxes = 5;
        auto inst = random_instance(rng, o);
        LargePoints pts{{max_support_value(inst)}, Scalar(1), Scalar(0)};
        auto lp = build_lpnoi(inst, pts);
        auto sol = solve_ssdp_exact(lp);
        const Scalar opt = optimal_value(inst).value;
        ASSERT_EQ(sol.value, opt) << k;
        ASSERT_EQ(evaluate_ssdp_policy(lp, sol.policy), opt);
        ASSERT_EQ(lift_policy(lp, sol.policy, inst), opt);
    }
}

TEST(Ptas, LiftNeverLoses) {
    for (std::uint64_t k = 0; k < 60; ++k) {
        auto rng = case_rng(54, k);
        auto inst = random_large_value_instance(rng, 1, 5);
        const Scalar eps = k % 2 ? Scalar(1, 4) : Scalar(1, 2);
        auto lp = build_lpnoi(inst, large_points(inst, choose_theta(inst, eps)));
        auto sol = solve_ssdp_exact(lp);
        ASSERT_EQ(evaluate_ssdp_policy(lp, sol.policy), sol.value);
        ASSERT_GE(lift_policy(lp, sol.policy, inst), sol.value) << instance_to_json(inst).dump();
        ASSERT_LE(sol.value, optimal_value(inst).value);
        PnoiInstance other = inst;
        other.boxes[0].cost += 1;
        EXPECT_THROW(lift_policy(lp, sol.policy, other), DomainError);
    }
}

TEST(Ptas, QuasiIndexSandwich) {
    for (std::uint64_t k = 0; k < 60; ++k) {
        auto rng = case_rng(55, k);
        auto inst = random_large_value_instance(rng, 1, 4);
        const Scalar eps = k % 2 ? Scalar(1, 4) : Scalar(1, 2);
        auto th = choose_theta(inst, eps);
        auto lp = build_lpnoi(inst, large_points(inst, th));
        for (const auto& v : lp.points.points) {
            for (BoxSet S = 1; S <= full_set(inst.size()); ++S) {
                std::vector<std::size_t> order;
                for (std::size_t i = 0; i < inst.size(); ++i) {
                    if (contains(S, i)) order.push_back(i);
                }
                do {
                    const Scalar q = quasi_index_value(lp, S, v, order);
                    ASSERT_LE(q, w_value(inst, S, v)) << k;
                    ASSERT_GE(q, (1 - eps) * f_value(inst, S, v)) << k;
                } while (std::next_permutation(order.begin(), order.end()));
            }
        }
    }
}

TEST(Ptas, QuasiIndexDependsOnOrder) {
    // Two free jackpot boxes: which one is opened first matters once the
    // first jackpot moves the state past v.
    PnoiInstance inst;
    inst.boxes.push_back({Scalar(0), DiscreteDistribution{{{Scalar(0), Scalar(99, 100)}, {Scalar(1000), Scalar(1, 100)}}}});
    inst.boxes.push_back({Scalar(0), DiscreteDistribution{{{Scalar(0), Scalar(99, 100)}, {Scalar(2000), Scalar(1, 100)}}}});
    auto th = choose_theta(inst, Scalar(1, 2));
    auto lp = build_lpnoi(inst, large_points(inst, th));
    const Scalar v = lp.points.theta();
    EXPECT_NE(quasi_index_value(lp, 3, v, {0, 1}), quasi_index_value(lp, 3, v, {1, 0}));
    EXPECT_THROW(quasi_index_value(lp, 3, v, {0}), DomainError);
    EXPECT_THROW(quasi_index_value(lp, 3, v + 1, {0, 1}), DomainError);
}

TEST(Ptas, PipelineOnFixtureAndRandom) {
    auto inst = load_instance(PANDORA_FIXTURES "/two_box.json");
    auto r = ptas_pipeline(inst, Scalar(1, 4));
    EXPECT_EQ(r.payoff, Scalar(5, 8));
    for (std::uint64_t k = 0; k < 40; ++k) {
        auto rng = case_rng(56, k);
        auto raw = random_large_value_instance(rng, 1, 5);
        const Scalar opt = optimal_value(raw).value;
        for (const Scalar& eps : {Scalar(1, 4), Scalar(1, 10)}) {
            auto res = ptas_pipeline(raw, eps);
            ASSERT_LE(res.payoff, opt);
            ASSERT_GE(res.payoff, (1 - 5 * eps) * opt) << k;
            ASSERT_GE(res.payoff, res.opt_L);
        }
    }
}

TEST(Ptas, PolicyJsonShape) {
    auto inst = load_instance(PANDORA_FIXTURES "/two_box.json");
    auto r = ptas_pipeline(inst, Scalar(1, 2));
    auto j = ssdp_policy_to_json(r.policy);
    ASSERT_TRUE(j.is_array());
    ASSERT_FALSE(j.empty());
    for (const auto& e : j) {
        EXPECT_TRUE(e.contains("unopened") && e.contains("state") && e.contains("action"));
        EXPECT_TRUE(e["state"].is_string());
    }
    EXPECT_EQ(j[0]["action"], "end");
}

TEST(Ptas, QuasiIndexSingleBox) {
    // tau = 28; at v = 10 the box pays E[(v - 10)+] - 1 = 9, at v = MaxV nothing qualifies.
    auto inst = single("1", {{0, Scalar(1, 2)}, {30, Scalar(1, 2)}});
    Theta th{Scalar(10), Scalar(4), Scalar(1, 2)};
    auto lp = build_lpnoi(inst, large_points(inst, th));
    EXPECT_EQ(quasi_index_value(lp, 1, Scalar(10)), Scalar(9));
    EXPECT_EQ(quasi_index_value(lp, 1, Scalar(30)), Scalar(0));
}
