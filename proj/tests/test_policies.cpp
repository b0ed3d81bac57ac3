#include <cmath>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pandora/error.hpp"
#include "pandora/exact.hpp"
#include "pandora/generators.hpp"
#include "pandora/json_io.hpp"
#include "pandora/parallel.hpp"
#include "pandora/policies.hpp"

using namespace pandora;

namespace {

PnoiInstance two_box() { return load_instance(PANDORA_FIXTURES "/two_box.json"); }

}  // namespace

TEST(IndexPolicy, TracesAreConsistent) {
    auto rng = case_rng(31, 0);
    auto inst = random_instance(rng);
    auto taus = compute_indices(inst);
    auto traces = run_index_policy(inst, {7, 500});
    ASSERT_EQ(traces.size(), 500u);
    EXPECT_TRUE(check_non_exposed(traces, inst));
    for (const auto& t : traces) {
        Scalar paid = 0, best = 0;
        bool took = false;
        for (const auto& s : t.steps) {
            ASSERT_FALSE(took);
            if (s.kind == StepKind::Open) {
                ASSERT_GT(taus[s.box], best);
                paid += inst[s.box].cost;
                best = max(best, *s.revealed);
            } else {
                ASSERT_EQ(s.kind, StepKind::Take);
                took = true;
            }
            ASSERT_EQ(s.running_cost, paid);
        }
        ASSERT_EQ(t.payoff, best - paid);
    }
}

TEST(IndexPolicy, MeanNearExactPayoff) {
    for (std::uint64_t k = 0; k < 5; ++k) {
        auto rng = case_rng(32, k);
        auto inst = random_instance(rng);
        auto s = index_policy_summary(inst, {k, 40000});
        const double exact = to_double(max_kappa_expectation(inst));
        EXPECT_LE(std::fabs(to_double(s.mean) - exact), 5 * s.std_error + 1e-12) << k;
    }
}

TEST(IndexPolicy, DeterministicAcrossThreads) {
    auto rng = case_rng(33, 0);
    auto inst = random_instance(rng);
    set_thread_count(1);
    auto a = run_index_policy(inst, {3, 3000});
    auto sa = summary_csv_row(index_policy_summary(inst, {3, 9000}));
    set_thread_count(4);
    auto b = run_index_policy(inst, {3, 3000});
    auto sb = summary_csv_row(index_policy_summary(inst, {3, 9000}));
    set_thread_count(0);
    EXPECT_EQ(a, b);
    EXPECT_EQ(sa, sb);
    EXPECT_EQ(summarize(a, {3, 3000}).mean, index_policy_summary(inst, {3, 3000}).mean);
}

TEST(IndexPolicy, SamplerFrequencies) {
    PnoiInstance inst;
    inst.boxes.push_back({Scalar(0), DiscreteDistribution{{{Scalar(0), Scalar(1, 8)}, {Scalar(1), Scalar(3, 8)},
                                                           {Scalar(2), Scalar(1, 2)}}}});
    ValueSampler sampler(inst);
    std::array<int, 3> hits{};
    const int trials = 80000;
    for (int t = 0; t < trials; ++t) hits[sampler.sample(99, t, 0)]++;
    EXPECT_NEAR(hits[0] / double(trials), 0.125, 0.01);
    EXPECT_NEAR(hits[1] / double(trials), 0.375, 0.01);
    EXPECT_NEAR(hits[2] / double(trials), 0.5, 0.01);
}

TEST(IndexPolicy, SummaryCsv) {
    EXPECT_EQ(summary_csv_header(), "policy,trials,seed,mean,stderr");
    SimulationSummary s{"index", 4, 2, Scalar(1, 2), 0.25};
    EXPECT_EQ(summary_csv_row(s), "index,4,2,1/2,0.25");
}

TEST(IndexPolicy, NonExposedRejectsForeignTraces) {
    auto inst = two_box();
    PolicyTrace bad{{{StepKind::Open, 5, Scalar(1), Scalar(1, 8)}}, Scalar(7, 8)};
    EXPECT_THROW(check_non_exposed({bad}, inst), DomainError);
    PolicyTrace odd{{{StepKind::Open, 0, Scalar(3), Scalar(1, 8)}}, Scalar(0)};
    EXPECT_THROW(check_non_exposed({odd}, inst), DomainError);
    // Box 1 shows 1 > tau = 3/4 and is left behind.
    PolicyTrace exposed{{{StepKind::Open, 0, Scalar(1), Scalar(1, 8)}, {StepKind::TakeUnopened, 1, std::nullopt, Scalar(1, 8)}},
                        Scalar(3, 8)};
    EXPECT_FALSE(check_non_exposed({exposed}, inst));
}

TEST(Support01, TwoBoxFixture) {
    auto r = support01_optimal(two_box());
    EXPECT_EQ(r.value, Scalar(5, 8));
    ASSERT_TRUE(r.commit.has_value());
    EXPECT_EQ(evaluate_commit_policy(two_box(), *r.commit), Scalar(5, 8));
}

TEST(Support01, MatchesHistoryOracle) {
    for (std::uint64_t k = 0; k < 150; ++k) {
        auto rng = case_rng(34, k);
        auto inst = random_01_instance(rng, 1, 6);
        auto r = support01_optimal(inst);
        ASSERT_EQ(r.value, oracle::history_optimum(inst)) << instance_to_json(inst).dump();
        for (std::size_t i = 0; i < inst.size(); ++i) {
            auto pol = make_commit_policy(inst, i);
            std::vector<std::size_t> sigma = pol.probe_order;
            sigma.push_back(pol.commit);
            std::vector<std::optional<Scalar>> th(pol.probe_order.size(), Scalar(1));
            ASSERT_EQ(evaluate_commit_policy(inst, pol), oracle::simulate_committing(inst, sigma, th)) << k;
        }
    }
}

TEST(Support01, RejectsOtherSupports) {
    PnoiInstance inst;
    inst.boxes.push_back({Scalar(0), DiscreteDistribution::point(Scalar(1, 2))});
    EXPECT_THROW(support01_optimal(inst), DomainError);
}

TEST(HalfApprox, WithinFactorTwo) {
    for (std::uint64_t k = 0; k < 200; ++k) {
        auto rng = case_rng(35, k);
        auto inst = random_instance(rng);
        const Scalar opt = optimal_value(inst).value;
        const Scalar h = half_approx(inst);
        ASSERT_LE(h, opt);
        ASSERT_GE(2 * h, opt) << k;
    }
}
