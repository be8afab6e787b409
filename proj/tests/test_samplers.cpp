#include <catch_amalgamated.hpp>

#include <set>

#include "cidbench/samplers.hpp"

using namespace cidbench;

namespace {

bool all_in_bounds(const SearchSpace &space, const SampleBatch &b) {
    for (const auto &p : b.points) {
        if (!space.contains(p)) return false;
    }
    return true;
}

double min_pairwise(const std::vector<TestInput> &pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, euclidean_distance(pts[i], pts[j]));
    return best;
}

// Independent greedy maximin: recompute every min distance from scratch.
std::vector<TestInput> brute_force_maximin(const std::vector<TestInput> &pool, const TestInput &center, std::size_t n) {
    std::vector<TestInput> chosen;
    std::size_t first = 0;
    for (std::size_t i = 1; i < pool.size(); ++i)
        if (euclidean_distance(pool[i], center) < euclidean_distance(pool[first], center)) first = i;
    chosen.push_back(pool[first]);
    while (chosen.size() < n) {
        double best = -1.0;
        std::size_t pick = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto &c : chosen) d = std::min(d, euclidean_distance(pool[i], c));
            if (d > best) {
                best = d;
                pick = i;
            }
        }
        chosen.push_back(pool[pick]);
    }
    return chosen;
}

} // namespace

TEST_CASE("grid_sample includes both endpoints in row-major order") {
    const auto one = grid_sample(SearchSpace::unit(1), 3);
    REQUIRE(one.points.size() == 3);
    CHECK(one.points[0][0] == 0.0);
    CHECK(one.points[1][0] == 0.5);
    CHECK(one.points[2][0] == 1.0);

    CHECK(grid_sample(SearchSpace::unit(3), 25).points.size() == 15625);
    CHECK(grid_sample(SearchSpace::unit(3), 10).points.size() == 1000);
    CHECK(grid_sample(SearchSpace::unit(3), 20).points.size() == 8000);

    const auto two = grid_sample(SearchSpace::unit(2), 10);
    REQUIRE(two.points.size() == 100);
    CHECK(two.points[1][1] - two.points[0][1] == Catch::Approx(1.0 / 9.0));
    CHECK(two.points[10][0] == Catch::Approx(1.0 / 9.0));
    CHECK(min_pairwise(two.points) == Catch::Approx(1.0 / 9.0));

    CHECK_THROWS_AS(grid_sample(SearchSpace::unit(2), 1), ContractViolation);
}

TEST_CASE("lhs_sample puts exactly one point in every stratum of every axis") {
    const SearchSpace space({{0.0, 1.0}, {-2.0, 2.0}, {5.0, 6.0}});
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SeededRng rng(seed);
        const auto batch = lhs_sample(space, 40, rng);
        REQUIRE(all_in_bounds(space, batch));
        for (std::size_t d = 0; d < 3; ++d) {
            std::vector<int> bins(40, 0);
            for (const auto &p : batch.points) {
                const auto bin = static_cast<std::size_t>((p[d] - space[d].lo) / space[d].width() * 40.0);
                ++bins[std::min<std::size_t>(bin, 39)];
            }
            for (int count : bins) REQUIRE(count == 1);
        }
    }

    SeededRng rng(1);
    const auto four = lhs_sample(SearchSpace::unit(1), 4, rng);
    std::set<int> strata;
    for (const auto &p : four.points) strata.insert(static_cast<int>(p[0] * 4.0));
    CHECK(strata == std::set<int>{0, 1, 2, 3});

    const auto single = lhs_sample(SearchSpace::unit(2), 1, rng);
    CHECK(single.points.size() == 1);
    CHECK(SearchSpace::unit(2).contains(single.points[0]));
}

TEST_CASE("fps first point is the pool point nearest the center") {
    const auto pool = grid_sample(SearchSpace::unit(2), 11).points;
    const auto chosen = greedy_maximin(pool, {0.5, 0.5}, 2);
    CHECK(pool[chosen[0]] == TestInput{0.5, 0.5});
    // brute force over the 121-point pool: all four corners are sqrt(0.5) away;
    // the lowest index, (0,0), wins
    CHECK(pool[chosen[1]] == TestInput{0.0, 0.0});
}

TEST_CASE("fps matches the exhaustive greedy maximin oracle") {
    const SearchSpace space = SearchSpace::unit(2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SeededRng rng(seed);
        const std::size_t pool_size = 50 + 45 * seed;
        const std::size_t n = 1 + seed * 3;
        SeededRng pool_rng(seed);
        const auto pool = uniform_sample(space, pool_size, pool_rng).points;
        const auto batch = fps_sample(space, n, pool_size, rng);
        CHECK(batch.points == brute_force_maximin(pool, space.center(), n));
    }
}

TEST_CASE("fps default pool size") {
    CHECK(default_fps_pool_size(10) == 500);
    CHECK(default_fps_pool_size(1024) == 51200);
    CHECK(default_fps_pool_size(5000) == 100000);
    SeededRng rng(0);
    CHECK_THROWS_AS(fps_sample(SearchSpace::unit(2), 10, 5, rng), ContractViolation);
}

TEST_CASE("poisson disc keeps every pair at least r apart") {
    const SearchSpace space = SearchSpace::unit(2);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SeededRng rng(seed);
        const auto batch = poisson_disc_sample(space, 0.1, rng);
        REQUIRE(all_in_bounds(space, batch));
        REQUIRE(min_pairwise(batch.points) >= 0.1);
        // observed 58..72 points over these seeds; the frozen envelope is wider
        CHECK(batch.points.size() >= 30);
        CHECK(batch.points.size() <= 120);
    }
    SeededRng rng(3);
    const auto three_d = poisson_disc_sample(SearchSpace::unit(3), 0.15, rng);
    CHECK(min_pairwise(three_d.points) >= 0.15);
    CHECK(three_d.points.size() > 50);
}

TEST_CASE("poisson disc with r beyond the diagonal gives one point") {
    SeededRng rng(5);
    const auto batch = poisson_disc_sample(SearchSpace::unit(2), 2.0, rng);
    CHECK(batch.points.size() == 1);
    CHECK_THROWS_AS(poisson_disc_sample(SearchSpace::unit(2), 0.0, rng), ContractViolation);
    CHECK_THROWS_AS(poisson_disc_sample(SearchSpace::unit(2), 0.1, 0, rng), ContractViolation);
}

TEST_CASE("uniform_sample statistics and determinism") {
    SeededRng rng(9);
    const auto batch = uniform_sample(SearchSpace::unit(1), 1000, rng);
    double mean = 0.0;
    for (const auto &p : batch.points) mean += p[0];
    mean /= 1000.0;
    // 3 sigma of the mean of 1000 U(0,1) draws is about 0.027
    CHECK(std::abs(mean - 0.5) < 0.05);

    SeededRng a(4), b(4);
    CHECK(uniform_sample(SearchSpace::unit(3), 50, a).points == uniform_sample(SearchSpace::unit(3), 50, b).points);

    const SearchSpace thin({{0.0, 1.0}, {0.25, 0.25 + 1e-12}});
    const auto t = uniform_sample(thin, 100, rng);
    for (const auto &p : t.points) CHECK(p[1] == Catch::Approx(0.25).margin(1e-11));
}
