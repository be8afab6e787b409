#include <catch_amalgamated.hpp>

#include "cidbench/cid.hpp"
#include "cidbench/problems.hpp"
#include "cidbench/refset.hpp"

using namespace cidbench;

namespace {

// Naive double loop with the distance written out term by term.
double naive_cid(const std::vector<TestInput> &a, const std::vector<TestInput> &z, double p, double q) {
    double sum = 0.0;
    for (const auto &zp : z) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto &ap : a) {
            double acc = 0.0;
            for (std::size_t k = 0; k < zp.size(); ++k) acc += std::pow(std::abs(zp[k] - ap[k]), p);
            best = std::min(best, std::pow(acc, 1.0 / p));
        }
        sum += std::pow(best, q);
    }
    return std::pow(sum, 1.0 / q) / static_cast<double>(z.size());
}

std::vector<TestInput> random_points(SeededRng &rng, std::size_t count, std::size_t dims, double lo = 0.0,
                                     double hi = 1.0) {
    std::vector<TestInput> out(count, TestInput(dims));
    for (auto &x : out)
        for (auto &v : x) v = rng.uniform(lo, hi);
    return out;
}

RunHistory history_from_flags(const std::vector<bool> &failed) {
    RunHistory h;
    for (std::size_t i = 0; i < failed.size(); ++i) {
        Evaluation e;
        e.index = i;
        e.input = {static_cast<double>(i), 0.0};
        e.failed = failed[i];
        h.evaluations.push_back(e);
    }
    return h;
}

} // namespace

TEST_CASE("cid hand-computed values") {
    CHECK(cid({{0, 0}}, {{0, 0}, {1, 1}}) == Catch::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK(cid({{1, 0}}, {{0, 0}, {3, 4}}) == Catch::Approx((1.0 + std::sqrt(20.0)) / 2.0).epsilon(1e-12));
    CHECK(cid({{1, 0}}, {{0, 0}, {3, 4}}, {2.0, 2.0}) == Catch::Approx(std::sqrt(21.0) / 2.0).epsilon(1e-12));
    CHECK(cid({{1, 0}}, {{0, 0}, {3, 4}}) == Catch::Approx(2.736068).margin(1e-6));
    CHECK(cid({{1, 0}}, {{0, 0}, {3, 4}}, {2.0, 2.0}) == Catch::Approx(2.291288).margin(1e-6));
    // p = 1: distances 1 and 2 + 4 = 6
    CHECK(cid({{1, 0}}, {{0, 0}, {3, 4}}, {1.0, 1.0}) == Catch::Approx(3.5));
}

TEST_CASE("cid is zero exactly when every reference point is covered") {
    const std::vector<TestInput> z{{0.1, 0.2}, {0.5, 0.5}, {0.9, 0.3}};
    auto a = z;
    a.push_back({0.7, 0.7});
    CHECK(cid(a, z) == 0.0);
    a[1][0] += 1e-6;
    CHECK(cid(a, z) > 0.0);
}

TEST_CASE("cid rejects empty sets with distinct messages") {
    const std::vector<TestInput> some{{0.0}};
    std::string empty_tests, empty_ref;
    try {
        cid({}, some);
    } catch (const ContractViolation &e) {
        empty_tests = e.what();
    }
    try {
        cid(some, {});
    } catch (const ContractViolation &e) {
        empty_ref = e.what();
    }
    CHECK_FALSE(empty_tests.empty());
    CHECK_FALSE(empty_ref.empty());
    CHECK(empty_tests != empty_ref);
    CHECK_THROWS_AS(cid(some, some, {0.5, 1.0}), ContractViolation);
    CHECK_THROWS_AS(cid(some, some, {2.0, 0.9}), ContractViolation);
}

TEST_CASE("cid equals the brute-force oracle") {
    SeededRng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t dims = 1 + rng.below(3);
        const auto a = random_points(rng, 1 + rng.below(100), dims, -2.0, 3.0);
        const auto z = random_points(rng, 1 + rng.below(100), dims, -2.0, 3.0);
        const double p = rng.coin() ? 1.0 : 2.0;
        const double q = rng.coin() ? 1.0 : 2.0;
        REQUIRE(std::abs(cid(a, z, {p, q}) - naive_cid(a, z, p, q)) <= 1e-9);
    }
}

TEST_CASE("cid properties hold on random instances") {
    SeededRng rng(78);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dims = 1 + rng.below(3);
        auto a = random_points(rng, 1 + rng.below(30), dims);
        const auto z = random_points(rng, 1 + rng.below(60), dims);
        const double base = cid(a, z);

        auto duplicated = a;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (rng.coin()) duplicated.push_back(a[i]);
        REQUIRE(cid(duplicated, z) == base);

        auto grown = a;
        grown.push_back(random_points(rng, 1, dims).front());
        REQUIRE(cid(grown, z) <= base);

        TestInput shift(dims);
        for (auto &s : shift) s = rng.uniform(-5.0, 5.0);
        auto moved_a = a;
        auto moved_z = z;
        for (auto &x : moved_a)
            for (std::size_t k = 0; k < dims; ++k) x[k] += shift[k];
        for (auto &x : moved_z)
            for (std::size_t k = 0; k < dims; ++k) x[k] += shift[k];
        REQUIRE(std::abs(cid(moved_a, moved_z) - base) <= 1e-9);
    }
}

TEST_CASE("incremental cid agrees with batch cid") {
    SeededRng rng(79);
    const auto z = random_points(rng, 200, 2);
    IncrementalCid inc(z, {});
    CHECK_FALSE(inc.value().has_value());
    std::vector<TestInput> a;
    for (int i = 0; i < 50; ++i) {
        a.push_back(random_points(rng, 1, 2).front());
        inc.add(a.back());
        REQUIRE(*inc.value() == Catch::Approx(cid(a, z)).epsilon(1e-12));
    }
}

TEST_CASE("convergence series checkpoints") {
    const std::vector<TestInput> z{{0.0, 0.0}, {5.0, 0.0}};
    SECTION("no failures gives undefined everywhere") {
        const auto s = convergence_series(history_from_flags(std::vector<bool>(250, false)), z, {}, 100);
        REQUIRE(s.checkpoints.size() == 3);
        CHECK(s.checkpoints[0].evaluations == 100);
        CHECK(s.checkpoints[2].evaluations == 250);
        for (const auto &c : s.checkpoints) {
            CHECK_FALSE(c.cid.has_value());
            CHECK(c.failures_so_far == 0);
        }
    }
    SECTION("failures only early keep cid constant") {
        std::vector<bool> flags(300, false);
        flags[3] = flags[10] = true;
        const auto s = convergence_series(history_from_flags(flags), z, {}, 100);
        REQUIRE(s.checkpoints.size() == 3);
        CHECK(s.checkpoints[0].cid == s.checkpoints[2].cid);
        CHECK(s.final().failures_so_far == 2);
        CHECK(*s.final().cid == Catch::Approx(cid({{3.0, 0.0}, {10.0, 0.0}}, z)));
    }
    SECTION("random histories give non-increasing cid") {
        SeededRng rng(80);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<bool> flags(500);
            for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = rng.uniform() < 0.05;
            auto h = history_from_flags(flags);
            for (auto &e : h.evaluations) e.input = {rng.uniform(0, 5), rng.uniform(0, 5)};
            const auto s = convergence_series(h, z, {}, 1 + rng.below(60));
            for (std::size_t i = 1; i < s.checkpoints.size(); ++i) {
                REQUIRE(s.checkpoints[i].evaluations > s.checkpoints[i - 1].evaluations);
                REQUIRE(s.checkpoints[i].failures_so_far >= s.checkpoints[i - 1].failures_so_far);
                if (s.checkpoints[i - 1].cid) REQUIRE(*s.checkpoints[i].cid <= *s.checkpoints[i - 1].cid);
            }
            REQUIRE(s.final().evaluations == 500);
        }
    }
    CHECK_THROWS_AS(convergence_series(history_from_flags({true}), z, {}, 0), ContractViolation);
}

TEST_CASE("first failure iteration and failure counts") {
    std::vector<bool> at0(80, false);
    at0[0] = true;
    CHECK(first_failure_iteration(history_from_flags(at0), 40) == 1);
    std::vector<bool> at41(80, false);
    at41[41] = true;
    CHECK(first_failure_iteration(history_from_flags(at41), 40) == 2);
    CHECK_FALSE(first_failure_iteration(history_from_flags(std::vector<bool>(80, false)), 40).has_value());

    CHECK(failure_count(RunHistory{}) == 0);
    CHECK(failure_count(history_from_flags(std::vector<bool>(10, true))) == 10);
    CHECK(failure_count(history_from_flags({true, false, true, true, false})) == 3);
    CHECK(failing_inputs(history_from_flags({false, true})) == std::vector<TestInput>{{1.0, 0.0}});
}

TEST_CASE("normalize_points rescales each axis") {
    const SearchSpace space({{0.0, 10.0}, {-1.0, 1.0}});
    const auto out = normalize_points({{5.0, 0.0}, {10.0, -1.0}}, space);
    CHECK(out[0] == TestInput{0.5, 0.5});
    CHECK(out[1] == TestInput{1.0, 0.0});
}

TEST_CASE("cid error shrinks with finer grid reference sets") {
    SeededRng rng(81);
    const auto a = random_points(rng, 20, 2);
    auto grid_z = [](std::size_t k) {
        return build_reference_set("two_ball", Json::object(), OracleVariant::Large, {"grid", {{"k", k}}}).points;
    };
    const double truth = cid(a, grid_z(512));
    std::vector<double> errors;
    for (std::size_t k : {16, 32, 64, 128}) errors.push_back(std::abs(cid(a, grid_z(k)) - truth));
    for (std::size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] < errors[i - 1]);
    CHECK(errors[2] <= 0.6 * errors[0]);
}
