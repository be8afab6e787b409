#pragma once

// Reference sets: the failing points among a sample of the search space,
// standing in for the (unknown) failure region when computing CID. Built sets
// are persisted as CSV with a JSON provenance sidecar and cached by spec.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cidbench/core.hpp"
#include "cidbench/io.hpp"
#include "cidbench/problems.hpp"
#include "cidbench/rng.hpp"
#include "cidbench/samplers.hpp"

namespace cidbench {

/// No failing point was found, so CID is undefined for this problem/variant.
class EmptyReferenceSet : public std::runtime_error {
  public:
    explicit EmptyReferenceSet(std::size_t sampled)
        : std::runtime_error("reference set is empty: none of the " + std::to_string(sampled) +
                             " sampled points fails the oracle"),
          sampled_(sampled) {}

    std::size_t sampled() const { return sampled_; }

  private:
    std::size_t sampled_;
};

/// Which sampler builds the set and with what parameters. Recognized keys:
/// grid {k}; fps {n, pool, seed}; poisson {r, attempts, seed}; lhs {n, seed};
/// uniform {n, seed}.
struct SamplerSpec {
    std::string strategy = "grid";
    Json params = Json::object();
};

struct ReferenceSet {
    std::vector<TestInput> points;
    std::string problem_name;
    Json problem_params = Json::object();
    std::string oracle_label;
    std::string sampler_label;
    Json sampler_params = Json::object();
    std::size_t total_sampled = 0;
    /// Largest distance between adjacent sample points.
    double max_adjacent_distance = 0.0;
    std::string content_hash;
    bool from_cache = false;
};

namespace detail {

inline std::size_t json_count(const Json &params, const char *key, std::optional<std::size_t> fallback = {}) {
    if (params.contains(key)) {
        const auto &v = params.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ContractViolation(std::string("sampler parameter '") + key + "' must be a non-negative integer");
        }
        return v.get<std::size_t>();
    }
    if (!fallback) {
        throw ContractViolation(std::string("sampler parameter '") + key + "' is required");
    }
    return *fallback;
}

inline void check_sampler_keys(const SamplerSpec &spec, std::initializer_list<const char *> allowed) {
    for (const auto &[key, _] : spec.params.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; })) {
            throw ContractViolation("unknown parameter '" + key + "' for sampler '" + spec.strategy + "'");
        }
    }
}

/// Max over sample points of the distance to the nearest other point.
inline double max_nearest_neighbor_distance(const std::vector<TestInput> &points) {
    if (points.size() < 2) {
        return 0.0;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (i != j) {
                best = std::min(best, squared_distance(points[i], points[j]));
            }
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

} // namespace detail

/// Draw the sample described by `spec` over `space`; also returns R*.
inline std::pair<SampleBatch, double> draw_sample(const SearchSpace &space, const SamplerSpec &spec) {
    const auto seed = spec.params.value("seed", std::uint64_t{0});
    SeededRng rng(seed);
    if (spec.strategy == "grid") {
        detail::check_sampler_keys(spec, {"k"});
        const std::size_t k = detail::json_count(spec.params, "k");
        auto batch = grid_sample(space, k);
        double diag = 0.0;
        for (const auto &b : space.bounds()) {
            const double step = b.width() / static_cast<double>(k - 1);
            diag += step * step;
        }
        return {std::move(batch), std::sqrt(diag)};
    }
    SampleBatch batch;
    if (spec.strategy == "fps") {
        detail::check_sampler_keys(spec, {"n", "pool", "seed"});
        const std::size_t n = detail::json_count(spec.params, "n");
        batch = fps_sample(space, n, detail::json_count(spec.params, "pool", default_fps_pool_size(n)), rng);
    } else if (spec.strategy == "poisson") {
        detail::check_sampler_keys(spec, {"r", "attempts", "seed"});
        if (!spec.params.contains("r")) {
            throw ContractViolation("sampler parameter 'r' is required");
        }
        batch = poisson_disc_sample(space, spec.params.at("r").get<double>(),
                                    detail::json_count(spec.params, "attempts", 30), rng);
    } else if (spec.strategy == "lhs") {
        detail::check_sampler_keys(spec, {"n", "seed"});
        batch = lhs_sample(space, detail::json_count(spec.params, "n"), rng);
    } else if (spec.strategy == "uniform") {
        detail::check_sampler_keys(spec, {"n", "seed"});
        batch = uniform_sample(space, detail::json_count(spec.params, "n"), rng);
    } else {
        throw ContractViolation("unknown sampler strategy '" + spec.strategy + "'");
    }
    const double r_star = detail::max_nearest_neighbor_distance(batch.points);
    return {std::move(batch), r_star};
}

inline std::string reference_csv(const std::vector<TestInput> &points, std::size_t dims) {
    std::string out;
    for (std::size_t d = 0; d < dims; ++d) {
        out += (d ? ",x" : "x") + std::to_string(d + 1);
    }
    out += '\n';
    for (const auto &p : points) {
        for (std::size_t d = 0; d < p.size(); ++d) {
            if (d) out += ',';
            out += format_double(p[d]);
        }
        out += '\n';
    }
    return out;
}

inline Json reference_sidecar(const ReferenceSet &z) {
    return Json{{"problem", z.problem_name},
                {"problem_params", z.problem_params},
                {"variant", z.oracle_label},
                {"sampler", z.sampler_label},
                {"params", z.sampler_params},
                {"total_sampled", z.total_sampled},
                {"size", z.points.size()},
                {"r_star", z.max_adjacent_distance},
                {"content_hash", z.content_hash}};
}

/// Write `<stem>.csv` and `<stem>.json`.
inline void save_reference_set(const ReferenceSet &z, const std::filesystem::path &csv_path) {
    if (csv_path.has_parent_path()) {
        std::filesystem::create_directories(csv_path.parent_path());
    }
    const std::size_t dims = z.points.empty() ? 0 : z.points.front().size();
    write_file(csv_path, reference_csv(z.points, dims));
    auto sidecar = csv_path;
    sidecar.replace_extension(".json");
    write_file(sidecar, reference_sidecar(z).dump(2) + "\n");
}

/// Load a reference set CSV; provenance comes from the sidecar when present.
inline ReferenceSet load_reference_set(const std::filesystem::path &csv_path) {
    const std::string text = read_file(csv_path);
    const auto table = parse_csv(text);
    ReferenceSet z;
    for (std::size_t d = 0; d < table.header.size(); ++d) {
        if (table.header[d] != "x" + std::to_string(d + 1)) {
            throw IoError(csv_path.string() + ": reference set header must be x1,...,xn");
        }
    }
    for (const auto &row : table.rows) {
        TestInput x;
        for (const auto &cell : row) {
            x.push_back(parse_double(cell));
        }
        z.points.push_back(std::move(x));
    }
    z.content_hash = sha256_hex(text);
    auto sidecar = csv_path;
    sidecar.replace_extension(".json");
    if (std::filesystem::exists(sidecar)) {
        const auto j = Json::parse(read_file(sidecar));
        z.problem_name = j.value("problem", "");
        z.problem_params = j.value("problem_params", Json::object());
        z.oracle_label = j.value("variant", "");
        z.sampler_label = j.value("sampler", "");
        z.sampler_params = j.value("params", Json::object());
        z.total_sampled = j.value("total_sampled", std::size_t{0});
        z.max_adjacent_distance = j.value("r_star", 0.0);
    }
    return z;
}

/// Cache key covering everything that determines the set's content.
inline std::string reference_cache_key(const std::string &problem, const Json &problem_params, OracleVariant variant,
                                       const SamplerSpec &spec) {
    const Json key{{"problem", problem},
                   {"problem_params", problem_params.is_null() ? Json::object() : problem_params},
                   {"variant", to_string(variant)},
                   {"sampler", spec.strategy},
                   {"params", spec.params}};
    return sha256_hex(key.dump()).substr(0, 16);
}

/// Sample the space, keep the failing points (deduplicated, sampler order).
/// With a cache directory the result is persisted there and re-served on an
/// identical request.
inline ReferenceSet build_reference_set(const std::string &problem_name, const Json &problem_params,
                                        OracleVariant variant, const SamplerSpec &spec,
                                        const std::optional<std::filesystem::path> &cache_dir = std::nullopt) {
    const auto &entry = problem_entry(problem_name);
    std::optional<std::filesystem::path> cached;
    if (cache_dir) {
        cached = *cache_dir / ("refset-" + reference_cache_key(problem_name, problem_params, variant, spec) + ".csv");
        if (std::filesystem::exists(*cached)) {
            auto z = load_reference_set(*cached);
            if (z.points.empty()) {
                throw EmptyReferenceSet(z.total_sampled);
            }
            z.from_cache = true;
            return z;
        }
    }

    const auto problem = entry.build(problem_params, variant);
    auto [batch, r_star] = draw_sample(problem.space, spec);

    ReferenceSet z;
    z.problem_name = problem_name;
    z.problem_params = problem_params.is_null() ? Json::object() : problem_params;
    z.oracle_label = to_string(variant);
    z.sampler_label = spec.strategy;
    z.sampler_params = spec.params;
    z.total_sampled = batch.points.size();
    z.max_adjacent_distance = r_star;
    std::set<TestInput> seen;
    for (auto &x : batch.points) {
        if (problem.fails(x) && seen.insert(x).second) {
            z.points.push_back(std::move(x));
        }
    }
    if (z.points.empty()) {
        throw EmptyReferenceSet(z.total_sampled);
    }
    z.content_hash = sha256_hex(reference_csv(z.points, problem.space.dims()));
    if (cached) {
        save_reference_set(z, *cached);
    }
    return z;
}

} // namespace cidbench
