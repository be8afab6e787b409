#pragma once

// Experiment configuration: JSON schema, defaults, presets and validation.
//
// {
//   "problem":    {"name": "two_ball", "variant": "Large" | ["Large", "Small"], "params": {}},
//   "algorithms": [{"name": "nsga2d", "label": "nsga2d", "preset": "default", "overrides": {}}],
//   "budget": 2000, "repetitions": 10, "base_seed": 0,
//   "refset":  {"strategy": "grid", "params": {"k": 100}}  or  {"path": "z.csv"},
//   "cid":     {"p": 2, "q": 1, "interval": 100, "normalize": false},
//   "compare": {"test": "ranksum", "alpha": 0.05},
//   "output_dir": "results", "cache_dir": "cache", "workers": 0
// }

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cidbench/cid.hpp"
#include "cidbench/io.hpp"
#include "cidbench/nsga2.hpp"
#include "cidbench/omopso.hpp"
#include "cidbench/problems.hpp"
#include "cidbench/refset.hpp"
#include "cidbench/stats.hpp"

namespace cidbench {

/// A configuration problem, reported with the JSON path of the offending field.
class ConfigError : public ContractViolation {
  public:
    ConfigError(const std::string &field, const std::string &message)
        : ContractViolation(field + ": " + message), field_(field) {}

    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

enum class AlgorithmKind { RandomSearch, Nsga2, Nsga2D, Omopso };

inline const char *to_string(AlgorithmKind k) {
    switch (k) {
    case AlgorithmKind::RandomSearch:
        return "rs";
    case AlgorithmKind::Nsga2:
        return "nsga2";
    case AlgorithmKind::Nsga2D:
        return "nsga2d";
    case AlgorithmKind::Omopso:
        return "omopso";
    }
    return "?";
}

inline std::optional<AlgorithmKind> parse_algorithm(const std::string &s) {
    if (s == "rs") return AlgorithmKind::RandomSearch;
    if (s == "nsga2") return AlgorithmKind::Nsga2;
    if (s == "nsga2d") return AlgorithmKind::Nsga2D;
    if (s == "omopso") return AlgorithmKind::Omopso;
    return std::nullopt;
}

/// One algorithm entry with its parameters fully resolved.
struct AlgorithmSpec {
    AlgorithmKind kind = AlgorithmKind::RandomSearch;
    std::string label;
    std::string preset = "default";
    Json overrides = Json::object();
    std::size_t rs_batch = 40;
    NsgaDConfig nsga;  ///< `nsga.base` serves plain NSGA-II
    OmopsoConfig omopso;

    /// Evaluations per iteration, used for first-failure reporting.
    std::size_t batch_size() const {
        switch (kind) {
        case AlgorithmKind::RandomSearch:
            return rs_batch;
        case AlgorithmKind::Nsga2:
        case AlgorithmKind::Nsga2D:
            return nsga.base.population_size;
        case AlgorithmKind::Omopso:
            return omopso.swarm_size;
        }
        return 1;
    }

    Json resolved() const {
        Json j{{"name", to_string(kind)}, {"label", label}, {"preset", preset}};
        switch (kind) {
        case AlgorithmKind::RandomSearch:
            j["batch_size"] = rs_batch;
            break;
        case AlgorithmKind::Nsga2D:
            j["archive_threshold"] = nsga.archive_threshold;
            j["repopulation_fraction"] = nsga.repopulation_fraction;
            [[fallthrough]];
        case AlgorithmKind::Nsga2:
            j["population_size"] = nsga.base.population_size;
            j["crossover_rate"] = nsga.base.crossover_rate;
            j["mutation_rate"] = nsga.base.mutation_rate;
            j["sbx_eta"] = nsga.base.sbx_eta;
            j["pm_eta"] = nsga.base.pm_eta;
            break;
        case AlgorithmKind::Omopso:
            j["swarm_size"] = omopso.swarm_size;
            j["archive_size"] = omopso.effective_archive_size();
            j["w_min"] = omopso.w_min;
            j["w_max"] = omopso.w_max;
            j["mutation_rate"] = omopso.mutation_rate;
            j["c_min"] = omopso.c_min;
            j["c_max"] = omopso.c_max;
            j["perturbation"] = omopso.perturbation;
            break;
        }
        return j;
    }
};

struct RefsetSource {
    std::optional<SamplerSpec> sampler;
    std::optional<std::filesystem::path> path;
};

struct ExperimentConfig {
    std::string problem_name;
    Json problem_params = Json::object();
    std::vector<OracleVariant> variants;
    std::vector<AlgorithmSpec> algorithms;
    std::size_t budget = 0;
    std::size_t repetitions = 10;
    std::uint64_t base_seed = 0;
    RefsetSource refset;
    CidParams cid;
    std::size_t interval = 100;
    bool normalize = false;
    TestKind test = TestKind::RankSum;
    double alpha = 0.05;
    std::filesystem::path output_dir = "results";
    std::optional<std::filesystem::path> cache_dir;
    std::size_t workers = 0;  ///< 0 picks the hardware concurrency

    std::uint64_t seed_for(std::size_t repetition) const { return base_seed + repetition; }

    std::size_t effective_workers() const {
        if (workers > 0) return workers;
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }

    /// Everything that determines the results. Output location, cache and
    /// worker count are left out.
    Json canonical() const {
        Json variants_json = Json::array();
        for (auto v : variants) variants_json.push_back(to_string(v));
        Json algos = Json::array();
        for (const auto &a : algorithms) algos.push_back(a.resolved());
        Json refset_json;
        if (refset.path) {
            refset_json = {{"path", refset.path->generic_string()}};
        } else {
            refset_json = {{"strategy", refset.sampler->strategy}, {"params", refset.sampler->params}};
        }
        return Json{{"problem", {{"name", problem_name}, {"variants", variants_json}, {"params", problem_params}}},
                    {"algorithms", algos},
                    {"budget", budget},
                    {"repetitions", repetitions},
                    {"base_seed", base_seed},
                    {"refset", refset_json},
                    {"cid", {{"p", cid.p}, {"q", cid.q}, {"interval", interval}, {"normalize", normalize}}},
                    {"compare", {{"test", to_string(test)}, {"alpha", alpha}}}};
    }

    std::string hash() const { return sha256_hex(canonical().dump()); }
};

namespace detail {

inline void only_keys(const Json &j, const std::string &path, std::initializer_list<const char *> allowed) {
    if (!j.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
    for (const auto &[key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; })) {
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

inline std::string join_path(const std::string &parent, const std::string &key) {
    return parent.empty() ? key : parent + "." + key;
}

inline const Json &required(const Json &j, const std::string &parent, const char *key) {
    if (!j.contains(key)) {
        throw ConfigError(join_path(parent, key), "missing required field");
    }
    return j.at(key);
}

inline std::string as_string(const Json &j, const std::string &path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

inline double as_number(const Json &j, const std::string &path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

inline std::uint64_t as_count(const Json &j, const std::string &path) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

inline bool as_bool(const Json &j, const std::string &path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

inline bool valid_label(const std::string &s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

/// Named parameter sets. "avp" and "mnist" carry the case-study settings;
/// "synthetic" raises the repopulation fraction for the desk-scale problems.
inline void apply_preset(AlgorithmSpec &a, const std::string &preset, const std::string &path) {
    std::size_t size = 40;
    double threshold = 0.29;
    double fraction = 0.1;
    if (preset == "mnist") {
        size = 20;
        threshold = 1.77;
    } else if (preset == "synthetic") {
        fraction = 0.25;
    } else if (preset != "default" && preset != "avp") {
        throw ConfigError(path, "unknown preset '" + preset + "' (expected default, avp, mnist, synthetic)");
    }
    a.preset = preset;
    a.rs_batch = size;
    a.nsga.base.population_size = size;
    a.nsga.archive_threshold = threshold;
    a.nsga.repopulation_fraction = fraction;
    a.omopso.swarm_size = size;
}

inline void apply_overrides(AlgorithmSpec &a, const Json &o, const std::string &path) {
    auto num = [&](const char *key, double &target) {
        if (o.contains(key)) target = as_number(o.at(key), join_path(path, key));
    };
    auto count = [&](const char *key, std::size_t &target) {
        if (o.contains(key)) target = as_count(o.at(key), join_path(path, key));
    };
    switch (a.kind) {
    case AlgorithmKind::RandomSearch:
        only_keys(o, path, {"batch_size"});
        count("batch_size", a.rs_batch);
        if (a.rs_batch == 0) throw ConfigError(join_path(path, "batch_size"), "must be at least 1");
        break;
    case AlgorithmKind::Nsga2:
        only_keys(o, path, {"population_size", "crossover_rate", "mutation_rate", "sbx_eta", "pm_eta"});
        break;
    case AlgorithmKind::Nsga2D:
        only_keys(o, path,
                  {"population_size", "crossover_rate", "mutation_rate", "sbx_eta", "pm_eta", "archive_threshold",
                   "repopulation_fraction"});
        num("archive_threshold", a.nsga.archive_threshold);
        num("repopulation_fraction", a.nsga.repopulation_fraction);
        break;
    case AlgorithmKind::Omopso:
        only_keys(o, path,
                  {"swarm_size", "archive_size", "w_min", "w_max", "mutation_rate", "c_min", "c_max", "perturbation"});
        count("swarm_size", a.omopso.swarm_size);
        count("archive_size", a.omopso.archive_size);
        num("w_min", a.omopso.w_min);
        num("w_max", a.omopso.w_max);
        num("mutation_rate", a.omopso.mutation_rate);
        num("c_min", a.omopso.c_min);
        num("c_max", a.omopso.c_max);
        num("perturbation", a.omopso.perturbation);
        break;
    }
    if (a.kind == AlgorithmKind::Nsga2 || a.kind == AlgorithmKind::Nsga2D) {
        count("population_size", a.nsga.base.population_size);
        num("crossover_rate", a.nsga.base.crossover_rate);
        num("mutation_rate", a.nsga.base.mutation_rate);
        num("sbx_eta", a.nsga.base.sbx_eta);
        num("pm_eta", a.nsga.base.pm_eta);
    }
}

inline AlgorithmSpec parse_algorithm_entry(const Json &j, const std::string &path) {
    AlgorithmSpec a;
    Json entry = j.is_string() ? Json{{"name", j}} : j;
    only_keys(entry, path, {"name", "label", "preset", "overrides"});
    const std::string name = as_string(required(entry, path, "name"), path + ".name");
    const auto kind = parse_algorithm(name);
    if (!kind) {
        throw ConfigError(path + ".name", "unknown algorithm '" + name + "' (expected rs, nsga2, nsga2d, omopso)");
    }
    a.kind = *kind;
    a.label = entry.contains("label") ? as_string(entry.at("label"), path + ".label") : name;
    if (!valid_label(a.label)) {
        throw ConfigError(path + ".label", "labels may only use letters, digits, '_', '-' and '.'");
    }
    apply_preset(a, entry.contains("preset") ? as_string(entry.at("preset"), path + ".preset") : "default",
                 path + ".preset");
    if (entry.contains("overrides")) {
        a.overrides = entry.at("overrides");
        apply_overrides(a, a.overrides, path + ".overrides");
    }
    return a;
}

} // namespace detail

/// Validate `j` and fill in defaults.
inline ExperimentConfig parse_config(const Json &j) {
    using namespace detail;
    ExperimentConfig c;
    only_keys(j, "",
              {"problem", "algorithms", "budget", "repetitions", "base_seed", "refset", "cid", "compare", "output_dir",
               "cache_dir", "workers"});

    const Json &problem = required(j, "", "problem");
    only_keys(problem, "problem", {"name", "variant", "params"});
    c.problem_name = as_string(required(problem, "problem", "name"), "problem.name");
    const auto *entry = find_problem(c.problem_name);
    if (!entry) {
        std::string known;
        for (const auto &e : problem_catalog()) known += (known.empty() ? "" : ", ") + e.name;
        throw ConfigError("problem.name", "unknown problem '" + c.problem_name + "' (expected " + known + ")");
    }
    const Json &variant = required(problem, "problem", "variant");
    std::vector<std::pair<Json, std::string>> variant_items;
    if (variant.is_array()) {
        if (variant.empty()) throw ConfigError("problem.variant", "needs at least one variant");
        for (std::size_t i = 0; i < variant.size(); ++i)
            variant_items.emplace_back(variant[i], "problem.variant[" + std::to_string(i) + "]");
    } else {
        variant_items.emplace_back(variant, "problem.variant");
    }
    for (const auto &[item, path] : variant_items) {
        const auto name = as_string(item, path);
        const auto v = parse_variant(name);
        if (!v) throw ConfigError(path, "unknown variant '" + name + "' (expected Large, Medium, Small, Custom)");
        if (std::find(c.variants.begin(), c.variants.end(), *v) != c.variants.end()) {
            throw ConfigError(path, "variant '" + name + "' listed twice");
        }
        c.variants.push_back(*v);
    }
    if (problem.contains("params")) {
        c.problem_params = problem.at("params");
        if (!c.problem_params.is_object()) throw ConfigError("problem.params", "expected an object");
    }
    for (auto v : c.variants) {
        try {
            entry->build(c.problem_params, v);
        } catch (const ContractViolation &e) {
            throw ConfigError("problem.params", e.what());
        } catch (const Json::exception &e) {
            throw ConfigError("problem.params", e.what());
        }
    }

    const Json &algos = required(j, "", "algorithms");
    if (!algos.is_array() || algos.empty()) {
        throw ConfigError("algorithms", "expected a non-empty list");
    }
    for (std::size_t i = 0; i < algos.size(); ++i) {
        const std::string path = "algorithms[" + std::to_string(i) + "]";
        auto a = parse_algorithm_entry(algos[i], path);
        for (const auto &prev : c.algorithms) {
            if (prev.label == a.label) {
                throw ConfigError(path + ".label", "duplicate label '" + a.label + "'; give each entry its own label");
            }
        }
        c.algorithms.push_back(std::move(a));
    }

    c.budget = as_count(required(j, "", "budget"), "budget");
    if (c.budget == 0) throw ConfigError("budget", "must be at least 1");
    if (j.contains("repetitions")) c.repetitions = as_count(j.at("repetitions"), "repetitions");
    if (c.repetitions == 0) throw ConfigError("repetitions", "must be at least 1");
    if (j.contains("base_seed")) c.base_seed = as_count(j.at("base_seed"), "base_seed");
    if (j.contains("workers")) c.workers = as_count(j.at("workers"), "workers");

    for (std::size_t i = 0; i < c.algorithms.size(); ++i) {
        auto &a = c.algorithms[i];
        const std::string path = "algorithms[" + std::to_string(i) + "]";
        a.nsga.base.budget = c.budget;
        a.omopso.budget = c.budget;
        const std::size_t batch = a.batch_size();
        if (a.kind != AlgorithmKind::RandomSearch && c.budget < batch) {
            throw ConfigError("budget", std::to_string(c.budget) + " is smaller than the population of " + path +
                                            " (" + std::to_string(batch) + ")");
        }
        try {
            if (a.kind == AlgorithmKind::Nsga2) a.nsga.base.validate();
            if (a.kind == AlgorithmKind::Nsga2D) a.nsga.validate();
            if (a.kind == AlgorithmKind::Omopso) a.omopso.validate();
        } catch (const ContractViolation &e) {
            throw ConfigError(path + ".overrides", e.what());
        }
    }

    const Json &refset = required(j, "", "refset");
    if (refset.is_object() && refset.contains("path")) {
        only_keys(refset, "refset", {"path"});
        c.refset.path = std::filesystem::path(as_string(refset.at("path"), "refset.path"));
        if (c.variants.size() != 1) {
            throw ConfigError("refset.path", "a reference set file fits a single variant; list one variant");
        }
    } else {
        only_keys(refset, "refset", {"strategy", "params"});
        SamplerSpec spec;
        spec.strategy = as_string(required(refset, "refset", "strategy"), "refset.strategy");
        if (refset.contains("params")) spec.params = refset.at("params");
        if (!spec.params.is_object()) throw ConfigError("refset.params", "expected an object");
        const std::vector<std::string> strategies{"grid", "fps", "poisson", "lhs", "uniform"};
        if (std::find(strategies.begin(), strategies.end(), spec.strategy) == strategies.end()) {
            throw ConfigError("refset.strategy",
                              "unknown strategy '" + spec.strategy + "' (expected grid, fps, poisson, lhs, uniform)");
        }
        c.refset.sampler = spec;
    }

    if (j.contains("cid")) {
        const Json &cid = j.at("cid");
        only_keys(cid, "cid", {"p", "q", "interval", "normalize"});
        if (cid.contains("p")) c.cid.p = as_number(cid.at("p"), "cid.p");
        if (cid.contains("q")) c.cid.q = as_number(cid.at("q"), "cid.q");
        if (cid.contains("interval")) c.interval = as_count(cid.at("interval"), "cid.interval");
        if (cid.contains("normalize")) c.normalize = as_bool(cid.at("normalize"), "cid.normalize");
    }
    if (c.cid.p < 1.0) throw ConfigError("cid.p", "must be at least 1");
    if (c.cid.q < 1.0) throw ConfigError("cid.q", "must be at least 1");
    if (c.interval == 0) throw ConfigError("cid.interval", "must be at least 1");

    if (j.contains("compare")) {
        const Json &cmp = j.at("compare");
        only_keys(cmp, "compare", {"test", "alpha"});
        if (cmp.contains("test")) {
            const auto t = as_string(cmp.at("test"), "compare.test");
            if (t == "ranksum") {
                c.test = TestKind::RankSum;
            } else if (t == "signedrank") {
                c.test = TestKind::SignedRank;
            } else {
                throw ConfigError("compare.test", "expected ranksum or signedrank");
            }
        }
        if (cmp.contains("alpha")) c.alpha = as_number(cmp.at("alpha"), "compare.alpha");
    }
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("compare.alpha", "must be in (0,1)");

    if (j.contains("output_dir")) c.output_dir = as_string(j.at("output_dir"), "output_dir");
    if (j.contains("cache_dir")) c.cache_dir = std::filesystem::path(as_string(j.at("cache_dir"), "cache_dir"));
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path &path) {
    const std::string text = read_file(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

} // namespace cidbench
