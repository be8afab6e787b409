#pragma once

// Closed-form test problems whose failure regions can be checked without
// search. Each problem offers Large/Medium/Small oracle variants with nested
// failure regions.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cidbench/core.hpp"
#include "cidbench/samplers.hpp"

namespace cidbench {

using Json = nlohmann::json;

/// Thresholds for the three graded variants, loosest first.
struct VariantThresholds {
    std::vector<double> large;
    std::vector<double> medium;
    std::vector<double> small;

    const std::vector<double> &at(OracleVariant v) const {
        switch (v) {
        case OracleVariant::Large:
            return large;
        case OracleVariant::Medium:
            return medium;
        case OracleVariant::Small:
            return small;
        case OracleVariant::Custom:
            break;
        }
        throw ContractViolation("no built-in thresholds for the Custom variant");
    }
};

inline OracleSpec make_oracle(const std::vector<double> &thresholds, OracleVariant variant) {
    OracleSpec o;
    o.variant = variant;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        o.clauses.push_back({i, thresholds[i]});
    }
    return o;
}

// ---------------------------------------------------------------------------
// two_ball: f = distances to two centers. The Pareto set is the segment
// between the centers; the failure region is the lens where both discs meet,
// a full-dimensional set that the Pareto set only cuts through.

struct TwoBallParams {
    std::array<double, 2> c1{0.4, 0.5};
    std::array<double, 2> c2{0.6, 0.5};
    VariantThresholds radii{{0.3, 0.3}, {0.2, 0.2}, {0.15, 0.15}};
};

inline FitnessVector two_ball_fitness(const TwoBallParams &p, std::span<const double> x) {
    return {std::hypot(x[0] - p.c1[0], x[1] - p.c1[1]), std::hypot(x[0] - p.c2[0], x[1] - p.c2[1])};
}

inline ProblemDefinition build_two_ball(const TwoBallParams &p, OracleVariant variant,
                                        const std::vector<double> &custom_radii = {}) {
    require(p.c1 != p.c2, "two_ball: centers must differ");
    const auto &radii = variant == OracleVariant::Custom ? custom_radii : p.radii.at(variant);
    require(radii.size() == 2, "two_ball: need two radii");
    require(radii[0] > 0.0 && radii[1] > 0.0, "two_ball: radii must be positive");
    return ProblemDefinition{"two_ball", SearchSpace::unit(2), 2,
                             [p](std::span<const double> x) { return two_ball_fitness(p, x); },
                             make_oracle(radii, variant)};
}

/// Open lens membership, stated geometrically.
inline bool two_ball_member(const TwoBallParams &p, const std::vector<double> &radii, std::span<const double> x) {
    const double d1 = (x[0] - p.c1[0]) * (x[0] - p.c1[0]) + (x[1] - p.c1[1]) * (x[1] - p.c1[1]);
    const double d2 = (x[0] - p.c2[0]) * (x[0] - p.c2[0]) + (x[1] - p.c2[1]) * (x[1] - p.c2[1]);
    return std::sqrt(d1) < radii[0] && std::sqrt(d2) < radii[1];
}

// ---------------------------------------------------------------------------
// two_region: two disjoint boxes; f1 = distance to the nearer box, f2 =
// distance to the first box's center. Variants widen the boxes by a margin.

struct Box2 {
    std::array<double, 2> lo;
    std::array<double, 2> hi;

    double distance(std::span<const double> x) const {
        const double dx = std::max({lo[0] - x[0], 0.0, x[0] - hi[0]});
        const double dy = std::max({lo[1] - x[1], 0.0, x[1] - hi[1]});
        return std::hypot(dx, dy);
    }
    bool contains(std::span<const double> x) const {
        return x[0] >= lo[0] && x[0] <= hi[0] && x[1] >= lo[1] && x[1] <= hi[1];
    }
    std::array<double, 2> center() const { return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])}; }
    bool overlaps(const Box2 &o) const {
        return lo[0] <= o.hi[0] && o.lo[0] <= hi[0] && lo[1] <= o.hi[1] && o.lo[1] <= hi[1];
    }
};

/// Margin standing for "inside a box": the oracle is strict, so a zero margin
/// would fail nothing.
inline constexpr double kInsideMargin = 1e-12;

struct TwoRegionParams {
    Box2 a{{0.1, 0.1}, {0.3, 0.3}};
    Box2 b{{0.6, 0.5}, {0.9, 0.8}};
    VariantThresholds margins{{0.05}, {0.02}, {kInsideMargin}};
};

inline FitnessVector two_region_fitness(const TwoRegionParams &p, std::span<const double> x) {
    const auto ca = p.a.center();
    return {std::min(p.a.distance(x), p.b.distance(x)), std::hypot(x[0] - ca[0], x[1] - ca[1])};
}

inline ProblemDefinition build_two_region(const TwoRegionParams &p, OracleVariant variant,
                                          const std::vector<double> &custom_margin = {}) {
    const auto unit = SearchSpace::unit(2);
    for (const Box2 *box : {&p.a, &p.b}) {
        require(box->lo[0] < box->hi[0] && box->lo[1] < box->hi[1], "two_region: empty box");
        require(unit.contains(box->lo) && unit.contains(box->hi), "two_region: boxes must lie inside the domain");
    }
    require(!p.a.overlaps(p.b), "two_region: boxes overlap");
    const auto &margin = variant == OracleVariant::Custom ? custom_margin : p.margins.at(variant);
    require(margin.size() == 1 && margin[0] > 0.0, "two_region: need one positive margin");
    OracleSpec oracle;
    oracle.variant = variant;
    oracle.clauses.push_back({0, margin[0]});
    return ProblemDefinition{"two_region", unit, 2,
                             [p](std::span<const double> x) { return two_region_fitness(p, x); }, oracle};
}

inline bool two_region_member(const TwoRegionParams &p, double margin, std::span<const double> x) {
    return p.a.distance(x) < margin || p.b.distance(x) < margin;
}

/// Closed-form area of box + rounded margin shell (w·h + 2m(w+h) + πm²).
inline double inflated_box_area(const Box2 &b, double m) {
    const double w = b.hi[0] - b.lo[0];
    const double h = b.hi[1] - b.lo[1];
    return w * h + 2.0 * m * (w + h) + std::numbers::pi * m * m;
}

// ---------------------------------------------------------------------------
// avp_analog: three inputs, two objectives, two-clause oracles. A desk-scale
// stand-in for a driving-scenario search space.

inline FitnessVector avp_analog_fitness(std::span<const double> x) {
    const double f1 = std::hypot(x[0] - 0.7, x[1] - 0.3) - 0.2 * std::sin(3.0 * std::numbers::pi * x[2]);
    const double f2 = -x[0] * (1.0 - 0.5 * x[2]);
    return {f1, f2};
}

inline const VariantThresholds &avp_analog_thresholds() {
    static const VariantThresholds t{{0.25, -0.4}, {0.18, -0.5}, {0.12, -0.55}};
    return t;
}

inline ProblemDefinition build_avp_analog(OracleVariant variant, const std::vector<double> &custom = {}) {
    const auto &t = variant == OracleVariant::Custom ? custom : avp_analog_thresholds().at(variant);
    require(t.size() == 2, "avp_analog: need two thresholds");
    return ProblemDefinition{"avp_analog", SearchSpace::unit(3), 2,
                             [](std::span<const double> x) { return avp_analog_fitness(x); },
                             make_oracle(t, variant)};
}

// ---------------------------------------------------------------------------
// Catalog: problems addressable by name, with JSON parameters.

struct ProblemCatalogEntry {
    std::string name;
    std::string description;
    std::size_t dims = 0;
    std::size_t objectives = 0;
    /// Oracle thresholds per built-in variant, for listing.
    std::function<VariantThresholds(const Json &params)> thresholds;
    std::function<ProblemDefinition(const Json &params, OracleVariant variant)> build;
    /// Closed-form failure-region test bound to (params, variant).
    std::function<std::function<bool(std::span<const double>)>(const Json &params, OracleVariant variant)>
        doi_membership;
};

namespace detail {

inline std::array<double, 2> json_point2(const Json &j, const char *field) {
    if (!j.is_array() || j.size() != 2) {
        throw ContractViolation(std::string("expected a 2-element array for ") + field);
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<double> custom_thresholds(const Json &params) {
    if (!params.contains("thresholds")) {
        throw ContractViolation("the Custom variant needs params.thresholds");
    }
    return params.at("thresholds").get<std::vector<double>>();
}

inline void reject_unknown(const Json &params, std::initializer_list<const char *> allowed) {
    if (params.is_null()) {
        return;
    }
    if (!params.is_object()) {
        throw ContractViolation("problem params must be an object");
    }
    for (const auto &[key, _] : params.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; })) {
            throw ContractViolation("unknown problem parameter '" + key + "'");
        }
    }
}

inline TwoBallParams two_ball_params(const Json &params) {
    reject_unknown(params, {"c1", "c2", "radii", "thresholds"});
    TwoBallParams p;
    if (params.is_null()) {
        return p;
    }
    if (params.contains("c1")) p.c1 = json_point2(params.at("c1"), "c1");
    if (params.contains("c2")) p.c2 = json_point2(params.at("c2"), "c2");
    if (params.contains("radii")) {
        const auto &r = params.at("radii");
        p.radii.large = r.at("Large").get<std::vector<double>>();
        p.radii.medium = r.at("Medium").get<std::vector<double>>();
        p.radii.small = r.at("Small").get<std::vector<double>>();
    }
    return p;
}

inline TwoRegionParams two_region_params(const Json &params) {
    reject_unknown(params, {"a", "b", "margins", "thresholds"});
    TwoRegionParams p;
    if (params.is_null()) {
        return p;
    }
    auto box = [](const Json &j) { return Box2{json_point2(j.at("lo"), "lo"), json_point2(j.at("hi"), "hi")}; };
    if (params.contains("a")) p.a = box(params.at("a"));
    if (params.contains("b")) p.b = box(params.at("b"));
    if (params.contains("margins")) {
        const auto &m = params.at("margins");
        p.margins = {{m.at("Large").get<double>()}, {m.at("Medium").get<double>()}, {m.at("Small").get<double>()}};
    }
    return p;
}

} // namespace detail

inline const std::vector<ProblemCatalogEntry> &problem_catalog() {
    static const std::vector<ProblemCatalogEntry> catalog = [] {
        std::vector<ProblemCatalogEntry> c;
        c.push_back({"two_ball", "distances to two centers; failure region is the lens of two discs", 2, 2,
                     [](const Json &params) { return detail::two_ball_params(params).radii; },
                     [](const Json &params, OracleVariant v) {
                         const auto p = detail::two_ball_params(params);
                         return build_two_ball(p, v,
                                               v == OracleVariant::Custom ? detail::custom_thresholds(params)
                                                                          : std::vector<double>{});
                     },
                     [](const Json &params, OracleVariant v) -> std::function<bool(std::span<const double>)> {
                         const auto p = detail::two_ball_params(params);
                         auto r = v == OracleVariant::Custom ? detail::custom_thresholds(params) : p.radii.at(v);
                         return [p, r](std::span<const double> x) { return two_ball_member(p, r, x); };
                     }});
        c.push_back({"two_region", "two disjoint boxes; variants widen them by a distance margin", 2, 2,
                     [](const Json &params) { return detail::two_region_params(params).margins; },
                     [](const Json &params, OracleVariant v) {
                         const auto p = detail::two_region_params(params);
                         return build_two_region(p, v,
                                                 v == OracleVariant::Custom ? detail::custom_thresholds(params)
                                                                            : std::vector<double>{});
                     },
                     [](const Json &params, OracleVariant v) -> std::function<bool(std::span<const double>)> {
                         const auto p = detail::two_region_params(params);
                         const auto m = v == OracleVariant::Custom ? detail::custom_thresholds(params) : p.margins.at(v);
                         return [p, margin = m.at(0)](std::span<const double> x) {
                             return two_region_member(p, margin, x);
                         };
                     }});
        c.push_back({"avp_analog", "3 inputs, 2 objectives, two-clause oracles; failures near the fitness optimum", 3,
                     2,
                     [](const Json &params) {
                         detail::reject_unknown(params, {"thresholds"});
                         return avp_analog_thresholds();
                     },
                     [](const Json &params, OracleVariant v) {
                         detail::reject_unknown(params, {"thresholds"});
                         return build_avp_analog(v, v == OracleVariant::Custom ? detail::custom_thresholds(params)
                                                                               : std::vector<double>{});
                     },
                     [](const Json &params, OracleVariant v) -> std::function<bool(std::span<const double>)> {
                         auto t =
                             v == OracleVariant::Custom ? detail::custom_thresholds(params) : avp_analog_thresholds().at(v);
                         require(t.size() == 2, "avp_analog: need two thresholds");
                         return [t](std::span<const double> x) {
                             const auto f = avp_analog_fitness(x);
                             return f[0] < t[0] && f[1] < t[1];
                         };
                     }});
        return c;
    }();
    return catalog;
}

inline const ProblemCatalogEntry *find_problem(const std::string &name) {
    for (const auto &e : problem_catalog()) {
        if (e.name == name) {
            return &e;
        }
    }
    return nullptr;
}

inline const ProblemCatalogEntry &problem_entry(const std::string &name) {
    if (const auto *e = find_problem(name)) {
        return *e;
    }
    throw ContractViolation("unknown problem '" + name + "'");
}

/// Fraction of the k^n grid that lies in the failure region.
inline double doi_volume_estimate(const ProblemCatalogEntry &entry, OracleVariant variant, std::size_t k,
                                  const Json &params = {}) {
    require(k >= 2, "doi_volume_estimate: need k >= 2");
    const auto grid = grid_sample(SearchSpace::unit(entry.dims), k);
    const auto member = entry.doi_membership(params, variant);
    std::size_t hits = 0;
    for (const auto &x : grid.points) {
        hits += member(x) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(grid.points.size());
}

} // namespace cidbench
