#include <catch_amalgamated.hpp>

#include <numbers>

#include "cidbench/pareto.hpp"
#include "cidbench/problems.hpp"

using namespace cidbench;

namespace {

// Area of the intersection of two discs of radius r whose centers are d apart.
double lens_area(double r, double d) {
    if (d >= 2.0 * r) return 0.0;
    return 2.0 * r * r * std::acos(d / (2.0 * r)) - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
}

const OracleVariant kVariants[] = {OracleVariant::Large, OracleVariant::Medium, OracleVariant::Small};

} // namespace

TEST_CASE("two_ball fitness values") {
    const TwoBallParams p;
    const auto problem = build_two_ball(p, OracleVariant::Large);
    CHECK(problem.objective_count == 2);

    const auto at_c1 = problem.evaluate_fitness(std::vector{0.4, 0.5});
    CHECK(at_c1[0] == 0.0);
    CHECK(at_c1[1] == Catch::Approx(0.2));

    TwoBallParams unit_apart;
    unit_apart.c1 = {0.0, 0.5};
    unit_apart.c2 = {1.0, 0.5};
    const auto mid = build_two_ball(unit_apart, OracleVariant::Large).evaluate_fitness(std::vector{0.5, 0.5});
    CHECK(mid[0] == Catch::Approx(0.5));
    CHECK(mid[1] == Catch::Approx(0.5));

    CHECK_THROWS_AS(build_two_ball(p, OracleVariant::Custom, {0.0, 0.3}), ContractViolation);
    TwoBallParams same;
    same.c2 = same.c1;
    CHECK_THROWS_AS(build_two_ball(same, OracleVariant::Large), ContractViolation);
}

TEST_CASE("two_ball lens area matches the closed form") {
    const auto &entry = problem_entry("two_ball");
    const double expected = lens_area(0.3, 0.2);
    const double estimate = doi_volume_estimate(entry, OracleVariant::Large, 512);
    CHECK(std::abs(estimate - expected) / expected < 0.02);
}

TEST_CASE("two_ball segment between the centers is Pareto optimal") {
    const auto problem = build_two_ball(TwoBallParams{}, OracleVariant::Large);
    SeededRng rng(1);
    const auto sample = uniform_sample(problem.space, 10000, rng).points;
    std::vector<FitnessVector> fs;
    for (const auto &x : sample) fs.push_back(problem.evaluate_fitness(x));
    for (int i = 0; i < 100; ++i) {
        const double t = i / 99.0;
        const auto f = problem.evaluate_fitness(std::vector{0.4 + 0.2 * t, 0.5});
        for (const auto &g : fs) REQUIRE_FALSE(dominates(g, f));
    }
}

TEST_CASE("an empty failure region estimates to zero") {
    const auto &entry = problem_entry("two_ball");
    const Json params{{"thresholds", {0.05, 0.05}}};
    CHECK(doi_volume_estimate(entry, OracleVariant::Custom, 64, params) == 0.0);
}

TEST_CASE("two_region fitness and graded margins") {
    const TwoRegionParams p;
    const auto large = build_two_region(p, OracleVariant::Large);
    const auto medium = build_two_region(p, OracleVariant::Medium);
    const auto small = build_two_region(p, OracleVariant::Small);

    const std::vector inside{0.2, 0.2};
    CHECK(large.evaluate_fitness(inside)[0] == 0.0);
    CHECK(large.fails(inside));
    CHECK(medium.fails(inside));
    CHECK(small.fails(inside));

    const std::vector near{0.33, 0.2}; // 0.03 right of box A
    CHECK(large.evaluate_fitness(near)[0] == Catch::Approx(0.03));
    CHECK(large.fails(near));
    CHECK_FALSE(medium.fails(near));
    CHECK_FALSE(small.fails(near));

    TwoRegionParams overlapping;
    overlapping.b = Box2{{0.2, 0.2}, {0.5, 0.5}};
    CHECK_THROWS_AS(build_two_region(overlapping, OracleVariant::Large), ContractViolation);
}

TEST_CASE("two_region failing fraction matches the inflated box areas") {
    const TwoRegionParams p;
    const auto &entry = problem_entry("two_region");
    for (auto v : kVariants) {
        const double margin = p.margins.at(v)[0];
        const double expected = inflated_box_area(p.a, margin) + inflated_box_area(p.b, margin);
        const double estimate = doi_volume_estimate(entry, v, 100);
        INFO(to_string(v) << " expected " << expected << " estimate " << estimate);
        CHECK(std::abs(estimate - expected) / expected < 0.02);
    }
}

TEST_CASE("avp_analog fitness values") {
    const auto f0 = avp_analog_fitness(std::vector{0.7, 0.3, 0.0});
    CHECK(f0[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(f0[1] == Catch::Approx(-0.7));
    for (auto v : kVariants) CHECK(build_avp_analog(v).fails(std::vector{0.7, 0.3, 0.0}));

    const auto f1 = avp_analog_fitness(std::vector{0.0, 0.0, 0.0});
    CHECK(f1[0] == Catch::Approx(0.761577).epsilon(1e-6));
    CHECK(f1[1] == 0.0);
    for (auto v : kVariants) CHECK_FALSE(build_avp_analog(v).fails(std::vector{0.0, 0.0, 0.0}));
}

TEST_CASE("variant failure regions nest: Small within Medium within Large") {
    for (const auto &entry : problem_catalog()) {
        const double large = doi_volume_estimate(entry, OracleVariant::Large, entry.dims == 3 ? 25 : 100);
        const double medium = doi_volume_estimate(entry, OracleVariant::Medium, entry.dims == 3 ? 25 : 100);
        const double small = doi_volume_estimate(entry, OracleVariant::Small, entry.dims == 3 ? 25 : 100);
        INFO(entry.name << " " << large << " " << medium << " " << small);
        CHECK(small <= medium);
        CHECK(medium <= large);
        CHECK(small < large);

        SeededRng rng(3);
        const auto in_large = entry.doi_membership({}, OracleVariant::Large);
        const auto in_medium = entry.doi_membership({}, OracleVariant::Medium);
        const auto in_small = entry.doi_membership({}, OracleVariant::Small);
        for (const auto &x : uniform_sample(SearchSpace::unit(entry.dims), 10000, rng).points) {
            if (in_small(x)) REQUIRE(in_medium(x));
            if (in_medium(x)) REQUIRE(in_large(x));
        }
    }
}

TEST_CASE("closed-form membership agrees with the oracle on the fitness") {
    for (const auto &entry : problem_catalog()) {
        for (auto v : kVariants) {
            const auto problem = entry.build({}, v);
            const auto member = entry.doi_membership({}, v);
            SeededRng rng(17);
            for (const auto &x : uniform_sample(problem.space, 10000, rng).points) {
                const auto f = problem.evaluate_fitness(x);
                REQUIRE(std::isfinite(f[0]));
                REQUIRE(std::isfinite(f[1]));
                REQUIRE(member(x) == oracle_eval(problem.oracle, f));
            }
        }
    }
}

TEST_CASE("catalog lookup and parameter validation") {
    CHECK(find_problem("two_ball") != nullptr);
    CHECK(find_problem("nope") == nullptr);
    CHECK_THROWS_AS(problem_entry("nope"), ContractViolation);
    CHECK_THROWS_AS(problem_entry("two_ball").build(Json{{"colour", 1}}, OracleVariant::Large), ContractViolation);
    CHECK_THROWS_AS(problem_entry("avp_analog").build({}, OracleVariant::Custom), ContractViolation);
    const auto custom = problem_entry("avp_analog").build(Json{{"thresholds", {0.3, -0.2}}}, OracleVariant::Custom);
    CHECK(custom.oracle.clauses.size() == 2);
    CHECK(custom.oracle.clauses[1].threshold == -0.2);
}
