#include <catch_amalgamated.hpp>

#include <filesystem>

#include "cidbench/refset.hpp"

using namespace cidbench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name) {
    auto dir = fs::temp_directory_path() / ("cidbench-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("two_region grid reference set matches the analytic area") {
    const TwoRegionParams p;
    for (auto variant : {OracleVariant::Large, OracleVariant::Medium, OracleVariant::Small}) {
        const auto z = build_reference_set("two_region", Json::object(), variant, {"grid", {{"k", 100}}});
        const double margin = p.margins.at(variant).front();
        const double area = inflated_box_area(p.a, margin) + inflated_box_area(p.b, margin);
        const double fraction = static_cast<double>(z.points.size()) / 10000.0;
        INFO(to_string(variant) << " fraction " << fraction << " area " << area);
        CHECK(std::abs(fraction - area) <= 0.02 * area);
        CHECK(z.total_sampled == 10000);
        CHECK(z.max_adjacent_distance == Catch::Approx(std::sqrt(2.0) / 99.0));
    }
}

TEST_CASE("reference set points all fail and are distinct") {
    for (const auto &entry : problem_catalog()) {
        const auto problem = entry.build({}, OracleVariant::Medium);
        for (const std::string strategy : {"grid", "fps", "lhs", "uniform"}) {
            Json params = strategy == "grid" ? Json{{"k", entry.dims == 3 ? 20 : 64}} : Json{{"n", 800}, {"seed", 3}};
            const auto z = build_reference_set(entry.name, {}, OracleVariant::Medium, {strategy, params});
            std::set<TestInput> unique(z.points.begin(), z.points.end());
            REQUIRE(unique.size() == z.points.size());
            for (const auto &x : z.points) REQUIRE(problem.fails(x));
            const auto membership = entry.doi_membership({}, OracleVariant::Medium);
            for (const auto &x : z.points) REQUIRE(membership(x));
        }
    }
}

TEST_CASE("poisson reference set keeps the spacing") {
    const auto z = build_reference_set("two_ball", {}, OracleVariant::Large, {"poisson", {{"r", 0.02}, {"seed", 1}}});
    CHECK(z.points.size() > 100);
    CHECK(z.max_adjacent_distance >= 0.02);
}

TEST_CASE("an empty failure region is reported with the sampled count") {
    const Json tiny{{"thresholds", {1e-9, 1e-9}}};
    try {
        build_reference_set("two_ball", tiny, OracleVariant::Custom, {"grid", {{"k", 10}}});
        FAIL("expected EmptyReferenceSet");
    } catch (const EmptyReferenceSet &e) {
        CHECK(e.sampled() == 100);
        CHECK(std::string(e.what()).find("100") != std::string::npos);
    }
}

TEST_CASE("sampler specs are validated") {
    CHECK_THROWS_AS(build_reference_set("two_ball", {}, OracleVariant::Large, {"grid", {{"n", 10}}}),
                    ContractViolation);
    CHECK_THROWS_AS(build_reference_set("two_ball", {}, OracleVariant::Large, {"sobol", {{"n", 10}}}),
                    ContractViolation);
    CHECK_THROWS_AS(build_reference_set("nope", {}, OracleVariant::Large, {"grid", {{"k", 10}}}), ContractViolation);
}

TEST_CASE("identical requests are served from the cache byte for byte") {
    const auto dir = scratch_dir("cache");
    const SamplerSpec spec{"fps", {{"n", 300}, {"seed", 4}}};
    const auto first = build_reference_set("two_ball", {}, OracleVariant::Large, spec, dir);
    CHECK_FALSE(first.from_cache);
    std::vector<fs::path> files;
    for (const auto &f : fs::directory_iterator(dir)) files.push_back(f.path());
    REQUIRE(files.size() == 2);
    const auto csv = dir / ("refset-" + reference_cache_key("two_ball", {}, OracleVariant::Large, spec) + ".csv");
    const std::string before = read_file(csv);

    const auto second = build_reference_set("two_ball", {}, OracleVariant::Large, spec, dir);
    CHECK(second.from_cache);
    CHECK(read_file(csv) == before);
    CHECK(second.points == first.points);
    CHECK(second.content_hash == first.content_hash);
    CHECK(second.total_sampled == first.total_sampled);
    CHECK(second.max_adjacent_distance == first.max_adjacent_distance);

    const SamplerSpec other{"fps", {{"n", 300}, {"seed", 5}}};
    CHECK(reference_cache_key("two_ball", {}, OracleVariant::Large, other) !=
          reference_cache_key("two_ball", {}, OracleVariant::Large, spec));
    fs::remove_all(dir);
}

TEST_CASE("reference set files round trip with provenance") {
    const auto dir = scratch_dir("roundtrip");
    const auto z = build_reference_set("avp_analog", {}, OracleVariant::Small, {"grid", {{"k", 25}}});
    save_reference_set(z, dir / "z.csv");
    const auto back = load_reference_set(dir / "z.csv");
    CHECK(back.points == z.points);
    CHECK(back.content_hash == z.content_hash);
    CHECK(back.problem_name == "avp_analog");
    CHECK(back.oracle_label == "Small");
    CHECK(back.sampler_label == "grid");
    CHECK(back.total_sampled == 15625);
    const auto header = read_csv(dir / "z.csv").header;
    CHECK(header == std::vector<std::string>{"x1", "x2", "x3"});
    const auto sidecar = Json::parse(read_file(dir / "z.json"));
    for (const char *key : {"problem", "variant", "sampler", "params", "total_sampled", "r_star", "content_hash"})
        CHECK(sidecar.contains(key));
    fs::remove_all(dir);
}
