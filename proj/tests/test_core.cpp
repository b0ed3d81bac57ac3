#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pandora/error.hpp"
#include "pandora/generators.hpp"
#include "pandora/index.hpp"
#include "pandora/json_io.hpp"
#include "pandora/parallel.hpp"

using namespace pandora;

namespace {

PnoiInstance two_box() { return load_instance(PANDORA_FIXTURES "/two_box.json"); }

PnoiBox box(const char* cost, std::vector<std::pair<const char*, const char*>> atoms) {
    PnoiBox b;
    b.cost = parse_scalar(cost);
    for (auto [v, p] : atoms) b.dist.atoms.push_back({parse_scalar(v), parse_scalar(p)});
    return b;
}

}  // namespace

TEST(Scalar, ParseAndPrint) {
    EXPECT_EQ(to_string(parse_scalar("6/8")), "3/4");
    EXPECT_EQ(to_string(parse_scalar("-4/2")), "-2");
    EXPECT_EQ(to_string(parse_scalar("17")), "17");
    for (const char* bad : {"", "1/0", "1.5", "a", "1/", "/2", "1/2/3", " 1", "3/-6"}) {
        EXPECT_THROW(parse_scalar(bad), ParseError) << bad;
    }
}

TEST(Scalar, Helpers) {
    EXPECT_EQ(pow2(-3), Scalar(1, 8));
    EXPECT_EQ(pow2(10), Scalar(1024));
    EXPECT_EQ(floor_to_grid(Scalar(7, 3), Scalar(1, 2)), Scalar(2));
    EXPECT_EQ(floor_to_grid(Scalar(5, 2), Scalar(1, 2)), Scalar(5, 2));
    EXPECT_EQ(to_decimal(Scalar(1, 3), 4), "0.3333");
}

TEST(Instance, ValidationReportsBoxes) {
    PnoiInstance inst;
    inst.boxes.push_back(box("1/8", {{"0", "1/2"}, {"1", "1/2"}}));
    inst.boxes.push_back(box("-1", {{"0", "1/2"}, {"1", "1/3"}}));
    inst.boxes.push_back(box("0", {{"-1", "1"}}));
    auto v = validate_instance(inst);
    ASSERT_GE(v.size(), 3u);
    std::set<int> boxes;
    for (const auto& x : v) boxes.insert(x.box);
    EXPECT_EQ(boxes, (std::set<int>{2, 3}));
    EXPECT_THROW(require_valid(inst), InvalidInstance);
    EXPECT_TRUE(validate_instance(two_box()).empty());
}

TEST(Instance, CanonicalMergesAndSorts) {
    auto d = DiscreteDistribution::canonical({{Scalar(2), Scalar(1, 4)}, {Scalar(1), Scalar(1, 4)}, {Scalar(2), Scalar(1, 2)}});
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.atoms[0], (Atom{Scalar(1), Scalar(1, 4)}));
    EXPECT_EQ(d.atoms[1], (Atom{Scalar(2), Scalar(3, 4)}));
}

TEST(Json, RoundTripFixturesAndRandom) {
    auto inst = two_box();
    EXPECT_EQ(instance_from_json(instance_to_json(inst)), inst);
    for (std::uint64_t k = 0; k < 200; ++k) {
        auto rng = case_rng(11, k);
        auto r = random_instance(rng);
        ASSERT_EQ(instance_from_json(Json::parse(instance_to_json(r).dump())), r) << k;
    }
}

TEST(Json, ParseErrorsNameTheBox) {
    auto bad = Json::parse(R"({"boxes":[{"cost":"1","support":[["0","1"]]},{"cost":"x","support":[["0","1"]]}]})");
    try {
        instance_from_json(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("box 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(instance_from_json(Json::parse(R"({"boxes": 3})")), ParseError);
}

TEST(Index, HandComputed) {
    // E[(v - tau)+] = 1/8 with v uniform on {0, 1}: (1 - tau)/2 = 1/8.
    EXPECT_EQ(compute_index(two_box()[0]), Scalar(3, 4));
    // Cost 0 gives the largest support value.
    EXPECT_EQ(compute_index(box("0", {{"1", "1/2"}, {"5", "1/2"}})), Scalar(5));
    // Cost above E[v]: tau is negative, E[v - tau] = c.
    EXPECT_EQ(compute_index(box("3", {{"1", "1/2"}, {"3", "1/2"}})), Scalar(-1));
    // Crosses a breakpoint: tau in (1, 3): (3 - tau)/2 = 1/2.
    EXPECT_EQ(compute_index(box("1/2", {{"1", "1/2"}, {"3", "1/2"}})), Scalar(2));
    EXPECT_EQ(max_kappa_expectation(two_box()), Scalar(9, 16));
}

TEST(Index, KappaLawAndMaxMatchEnumeration) {
    for (std::uint64_t k = 0; k < 300; ++k) {
        auto rng = case_rng(5, k);
        auto inst = random_instance(rng);
        for (const auto& b : inst.boxes) {
            const Scalar tau = compute_index(b);
            Scalar surplus = 0, mass = 0;
            for (const auto& a : b.dist.atoms) {
                if (a.value > tau) surplus += a.prob * (a.value - tau);
            }
            ASSERT_EQ(surplus, b.cost) << k;
            auto kd = kappa_distribution(b);
            for (const auto& a : kd.atoms) {
                mass += a.prob;
                ASSERT_LE(a.value, tau);
            }
            ASSERT_EQ(mass, 1);
        }
        ASSERT_EQ(max_kappa_expectation(inst), oracle::enumerated_max_kappa(inst)) << k;
    }
}

TEST(Index, ExpectedMaxWithOutsideOption) {
    for (std::uint64_t k = 0; k < 100; ++k) {
        auto rng = case_rng(6, k);
        auto inst = random_instance(rng);
        std::vector<DiscreteDistribution> dists;
        for (const auto& b : inst.boxes) dists.push_back(b.dist);
        const Scalar outside = oracle::frac(static_cast<long>(rng.below(9)), 2);
        const BoxSet subset = rng.below(full_set(inst.size()) + 1);
        Scalar expect = 0;
        oracle::for_each_outcome(inst, [&](const std::vector<Scalar>& v, const Scalar& p) {
            Scalar m = outside;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (contains(subset, i)) m = max(m, v[i]);
            }
            expect += p * m;
        });
        ASSERT_EQ(expected_max_with(dists, subset, outside), expect) << k;
    }
}

TEST(Parallel, ForCoversEveryIndexAndRethrows) {
    set_thread_count(4);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 1000);
    EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                     if (i == 7) throw std::runtime_error("x");
                 }),
                 std::runtime_error);
    set_thread_count(0);
}
