#pragma once

// Seeded repetition orchestration, CSV persistence and pairwise comparison.

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cidbench/cid.hpp"
#include "cidbench/config.hpp"
#include "cidbench/io.hpp"
#include "cidbench/nsga2.hpp"
#include "cidbench/omopso.hpp"
#include "cidbench/random_search.hpp"
#include "cidbench/refset.hpp"
#include "cidbench/stats.hpp"

namespace cidbench {

inline RunHistory run_algorithm(const AlgorithmSpec &algo, const ProblemDefinition &problem, std::size_t budget,
                                std::uint64_t seed) {
    RunHistory h;
    switch (algo.kind) {
    case AlgorithmKind::RandomSearch:
        h = run_random_search(problem, budget, algo.rs_batch, seed);
        break;
    case AlgorithmKind::Nsga2: {
        auto c = algo.nsga.base;
        c.budget = budget;
        h = run_nsga2(problem, c, seed);
        break;
    }
    case AlgorithmKind::Nsga2D: {
        auto c = algo.nsga;
        c.base.budget = budget;
        h = run_nsga2d(problem, c, seed);
        break;
    }
    case AlgorithmKind::Omopso: {
        auto c = algo.omopso;
        c.budget = budget;
        h = run_omopso(problem, c, seed);
        break;
    }
    }
    h.algorithm_name = algo.label;
    return h;
}

struct RunRecord {
    std::string run_id;
    std::string algorithm;
    OracleVariant variant = OracleVariant::Large;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    RunHistory history;
    ConvergenceSeries series;
    std::size_t failures = 0;
    std::optional<std::size_t> first_failure;
};

struct SummaryRow {
    std::string algorithm;
    std::string variant;
    std::optional<double> cid_mean;
    std::optional<double> cid_std;
    double failures_mean = 0.0;
    std::optional<double> first_fail_mean;
};

struct StatRow {
    std::string pair;
    std::string variant;
    std::string test;
    std::optional<StatResult> result;  ///< empty when the pair was skipped
    std::string skip_reason;
};

/// Final-checkpoint CID per (variant, algorithm), indexed by repetition.
using FinalCidTable = std::map<std::pair<std::string, std::string>, std::vector<std::optional<double>>>;

struct ExperimentResult {
    std::filesystem::path output_dir;
    std::vector<RunRecord> runs;
    std::vector<SummaryRow> summary;
    std::vector<StatRow> stats;
    std::map<std::string, ReferenceSet> refsets;
    Json manifest;
};

inline std::string make_run_id(const std::string &label, OracleVariant v, std::size_t rep) {
    return label + "-" + to_string(v) + "-" + std::to_string(rep);
}

namespace detail {

inline std::string cell(const std::optional<double> &v) { return v ? format_double(*v) : std::string(); }

inline double mean_of(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1); zero for a single value.
inline double std_of(const std::vector<double> &v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline ReferenceSet obtain_reference_set(const ExperimentConfig &c, OracleVariant v, const ProblemDefinition &problem) {
    if (c.refset.path) {
        auto z = load_reference_set(*c.refset.path);
        if (z.points.empty()) {
            throw EmptyReferenceSet(z.total_sampled);
        }
        for (const auto &x : z.points) {
            if (x.size() != problem.space.dims()) {
                throw ConfigError("refset.path", "reference set dimension does not match problem '" + c.problem_name + "'");
            }
        }
        return z;
    }
    return build_reference_set(c.problem_name, c.problem_params, v, *c.refset.sampler, c.cache_dir);
}

} // namespace detail

/// Summary rows in (variant, algorithm) config order.
inline std::vector<SummaryRow> summarize(const ExperimentConfig &c, const std::vector<RunRecord> &runs) {
    std::vector<SummaryRow> rows;
    for (auto v : c.variants) {
        for (const auto &a : c.algorithms) {
            SummaryRow row{a.label, to_string(v), {}, {}, 0.0, {}};
            std::vector<double> cids, fails, firsts;
            bool undefined = false;
            for (const auto &r : runs) {
                if (r.variant != v || r.algorithm != a.label) continue;
                const auto &final_cid = r.series.final().cid;
                if (final_cid) {
                    cids.push_back(*final_cid);
                } else {
                    undefined = true;
                }
                fails.push_back(static_cast<double>(r.failures));
                if (r.first_failure) firsts.push_back(static_cast<double>(*r.first_failure));
            }
            if (!undefined && !cids.empty()) {
                row.cid_mean = detail::mean_of(cids);
                row.cid_std = detail::std_of(cids);
            }
            if (!fails.empty()) row.failures_mean = detail::mean_of(fails);
            if (!firsts.empty()) row.first_fail_mean = detail::mean_of(firsts);
            rows.push_back(row);
        }
    }
    return rows;
}

/// Every unordered algorithm pair per variant, compared on final CID.
/// Samples are paired by repetition index.
inline std::vector<StatRow> compare_final_cids(const FinalCidTable &table, const std::vector<std::string> &algorithms,
                                               const std::vector<std::string> &variants, TestKind test, double alpha) {
    require(algorithms.size() >= 2, "compare: need at least two algorithms");
    std::vector<StatRow> rows;
    for (const auto &v : variants) {
        for (std::size_t i = 0; i < algorithms.size(); ++i) {
            for (std::size_t k = i + 1; k < algorithms.size(); ++k) {
                const auto &a = algorithms[i];
                const auto &b = algorithms[k];
                StatRow row{a + " vs " + b, v, to_string(test), std::nullopt, {}};
                const auto ia = table.find({v, a});
                const auto ib = table.find({v, b});
                if (ia == table.end() || ib == table.end()) {
                    row.skip_reason = "missing runs";
                    rows.push_back(row);
                    continue;
                }
                if (ia->second.size() != ib->second.size()) {
                    throw ContractViolation("compare: " + a + " and " + b + " have different repetition counts");
                }
                std::vector<double> x, y;
                for (std::size_t r = 0; r < ia->second.size(); ++r) {
                    if (!ia->second[r]) {
                        row.skip_reason = "undefined CID in " + a;
                        break;
                    }
                    if (!ib->second[r]) {
                        row.skip_reason = "undefined CID in " + b;
                        break;
                    }
                    x.push_back(*ia->second[r]);
                    y.push_back(*ib->second[r]);
                }
                if (row.skip_reason.empty()) {
                    row.result = compare_samples(row.pair, x, y, test, alpha);
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline FinalCidTable final_cid_table(const std::vector<RunRecord> &runs) {
    FinalCidTable t;
    for (const auto &r : runs) {
        auto &slot = t[{to_string(r.variant), r.algorithm}];
        if (slot.size() <= r.repetition) slot.resize(r.repetition + 1);
        slot[r.repetition] = r.series.final().cid;
    }
    return t;
}

// ---- CSV rendering -------------------------------------------------------

inline std::string runs_csv(const std::vector<RunRecord> &runs, const std::string &problem, std::size_t dims,
                            std::size_t objectives, bool with_novelty) {
    std::string out = "run_id,algorithm,problem,variant,seed,eval_index,generation";
    for (std::size_t d = 0; d < dims; ++d) out += ",x" + std::to_string(d + 1);
    for (std::size_t m = 0; m < objectives; ++m) out += ",f" + std::to_string(m + 1);
    if (with_novelty) out += ",novelty";
    out += ",failed\n";
    for (const auto &r : runs) {
        const std::string prefix =
            r.run_id + "," + r.algorithm + "," + problem + "," + to_string(r.variant) + "," + std::to_string(r.seed) + ",";
        for (const auto &e : r.history.evaluations) {
            out += prefix;
            out += std::to_string(e.index);
            out += ',';
            out += std::to_string(e.generation);
            for (double x : e.input) {
                out += ',';
                out += format_double(x);
            }
            for (double f : e.fitness) {
                out += ',';
                out += format_double(f);
            }
            if (with_novelty) {
                out += ',';
                out += detail::cell(e.novelty);
            }
            out += e.failed ? ",1\n" : ",0\n";
        }
    }
    return out;
}

inline std::string cid_series_csv(const std::vector<RunRecord> &runs) {
    std::string out = "run_id,evaluations,failures_so_far,cid\n";
    for (const auto &r : runs) {
        for (const auto &cp : r.series.checkpoints) {
            out += r.run_id + "," + std::to_string(cp.evaluations) + "," + std::to_string(cp.failures_so_far) + "," +
                   detail::cell(cp.cid) + "\n";
        }
    }
    return out;
}

inline std::string summary_csv(const std::vector<SummaryRow> &rows) {
    std::string out = "algorithm,variant,cid_mean,cid_std,failures_mean,first_fail_mean\n";
    for (const auto &r : rows) {
        out += r.algorithm + "," + r.variant + "," + detail::cell(r.cid_mean) + "," + detail::cell(r.cid_std) + "," +
               format_double(r.failures_mean) + "," + detail::cell(r.first_fail_mean) + "\n";
    }
    return out;
}

/// Skipped pairs keep empty statistics, "skipped" as magnitude and the
/// reason in the significance column.
inline std::string stats_csv(const std::vector<StatRow> &rows) {
    std::string out = "pair,variant,test,p_value,a12,magnitude,significant\n";
    for (const auto &r : rows) {
        out += r.pair + "," + r.variant + "," + r.test + ",";
        if (r.result) {
            out += format_double(r.result->p_value) + "," + format_double(r.result->a12) + "," +
                   to_string(r.result->magnitude) + "," + (r.result->significant ? "true" : "false") + "\n";
        } else {
            out += ",,skipped," + r.skip_reason + "\n";
        }
    }
    return out;
}

// ---- orchestration -------------------------------------------------------

namespace detail {

/// Tracks files written by one experiment so a failed run can be undone.
class OutputTransaction {
  public:
    explicit OutputTransaction(std::filesystem::path dir) : dir_(std::move(dir)) {
        if (!std::filesystem::exists(dir_)) {
            std::filesystem::create_directories(dir_);
            created_dir_ = true;
        }
    }

    void write(const std::string &name, std::string_view content) {
        const auto path = dir_ / name;
        written_.push_back(path);
        write_file(path, content);
    }

    void commit() { committed_ = true; }

    ~OutputTransaction() {
        if (committed_) return;
        std::error_code ec;
        for (const auto &p : written_) std::filesystem::remove(p, ec);
        if (created_dir_ && std::filesystem::is_empty(dir_, ec)) std::filesystem::remove(dir_, ec);
    }

    OutputTransaction(const OutputTransaction &) = delete;
    OutputTransaction &operator=(const OutputTransaction &) = delete;

  private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
    bool created_dir_ = false;
    bool committed_ = false;
};

template <typename Job> void run_parallel(std::size_t count, std::size_t workers, Job job) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace detail

/// Execute every (variant, algorithm, repetition) run and write runs.csv,
/// cid_series.csv, summary.csv, stats.csv (two or more algorithms),
/// manifest.json and the reference sets into `config.output_dir`.
inline ExperimentResult run_experiment(const ExperimentConfig &config) {
    const auto &entry = problem_entry(config.problem_name);
    ExperimentResult result;
    result.output_dir = config.output_dir;

    std::map<std::string, ProblemDefinition> problems;
    std::map<std::string, std::vector<TestInput>> reference_points;
    for (auto v : config.variants) {
        const std::string name = to_string(v);
        problems.emplace(name, entry.build(config.problem_params, v));
        auto z = detail::obtain_reference_set(config, v, problems.at(name));
        reference_points[name] = config.normalize ? normalize_points(z.points, problems.at(name).space) : z.points;
        result.refsets.emplace(name, std::move(z));
    }

    for (auto v : config.variants) {
        for (const auto &a : config.algorithms) {
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
                RunRecord r;
                r.run_id = make_run_id(a.label, v, rep);
                r.algorithm = a.label;
                r.variant = v;
                r.repetition = rep;
                r.seed = config.seed_for(rep);
                result.runs.push_back(std::move(r));
            }
        }
    }

    std::map<std::string, const AlgorithmSpec *> by_label;
    for (const auto &a : config.algorithms) by_label[a.label] = &a;
    detail::run_parallel(result.runs.size(), config.effective_workers(), [&](std::size_t i) {
        auto &r = result.runs[i];
        const std::string variant = to_string(r.variant);
        const auto &problem = problems.at(variant);
        r.history = run_algorithm(*by_label.at(r.algorithm), problem, config.budget, r.seed);
        if (config.normalize) {
            RunHistory scaled = r.history;
            for (auto &e : scaled.evaluations) e.input = normalize_points({e.input}, problem.space).front();
            r.series = convergence_series(scaled, reference_points.at(variant), config.cid, config.interval);
        } else {
            r.series = convergence_series(r.history, reference_points.at(variant), config.cid, config.interval);
        }
        r.failures = failure_count(r.history);
        r.first_failure = first_failure_iteration(r.history, by_label.at(r.algorithm)->batch_size());
    });

    result.summary = summarize(config, result.runs);
    std::vector<std::string> labels, variants;
    for (const auto &a : config.algorithms) labels.push_back(a.label);
    for (auto v : config.variants) variants.push_back(to_string(v));
    if (labels.size() >= 2) {
        result.stats = compare_final_cids(final_cid_table(result.runs), labels, variants, config.test, config.alpha);
    }

    const bool with_novelty = std::any_of(config.algorithms.begin(), config.algorithms.end(),
                                          [](const AlgorithmSpec &a) { return a.kind == AlgorithmKind::Nsga2D; });

    Json refsets = Json::object();
    for (const auto &[name, z] : result.refsets) {
        refsets[name] = {{"file", "refset-" + name + ".csv"},
                         {"content_hash", z.content_hash},
                         {"size", z.points.size()},
                         {"total_sampled", z.total_sampled}};
    }
    Json runs = Json::array();
    for (const auto &r : result.runs) {
        runs.push_back({{"run_id", r.run_id},
                        {"algorithm", r.algorithm},
                        {"variant", to_string(r.variant)},
                        {"repetition", r.repetition},
                        {"seed", r.seed}});
    }
    Json batch = Json::object();
    for (const auto &a : config.algorithms) batch[a.label] = a.batch_size();
    result.manifest = Json{{"config_hash", config.hash()},
                           {"config", config.canonical()},
                           {"problem", config.problem_name},
                           {"dims", entry.dims},
                           {"objectives", entry.objectives},
                           {"algorithms", labels},
                           {"variants", variants},
                           {"repetitions", config.repetitions},
                           {"budget", config.budget},
                           {"batch_sizes", batch},
                           {"refsets", refsets},
                           {"runs", runs}};

    detail::OutputTransaction out(config.output_dir);
    for (const auto &[name, z] : result.refsets) {
        auto sidecar = reference_sidecar(z);
        out.write("refset-" + name + ".csv", reference_csv(z.points, entry.dims));
        out.write("refset-" + name + ".json", sidecar.dump(2) + "\n");
    }
    out.write("runs.csv", runs_csv(result.runs, config.problem_name, entry.dims, entry.objectives, with_novelty));
    out.write("cid_series.csv", cid_series_csv(result.runs));
    out.write("summary.csv", summary_csv(result.summary));
    if (!result.stats.empty()) {
        out.write("stats.csv", stats_csv(result.stats));
    } else {
        std::error_code ec;
        std::filesystem::remove(config.output_dir / "stats.csv", ec);
    }
    out.write("manifest.json", result.manifest.dump(2) + "\n");
    out.commit();
    return result;
}

// ---- reading results back ------------------------------------------------

inline Json read_manifest(const std::filesystem::path &dir) {
    const auto path = dir / "manifest.json";
    if (!std::filesystem::exists(path)) {
        throw IoError("missing input file: " + path.string());
    }
    return Json::parse(read_file(path));
}

inline CsvTable read_required_csv(const std::filesystem::path &path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("missing input file: " + path.string());
    }
    return read_csv(path);
}

/// Final CID per run rebuilt from cid_series.csv and the manifest.
inline FinalCidTable final_cid_table(const std::filesystem::path &dir) {
    const auto manifest = read_manifest(dir);
    const auto series = read_required_csv(dir / "cid_series.csv");
    const auto c_run = series.column("run_id");
    const auto c_cid = series.column("cid");
    std::map<std::string, std::optional<double>> last;
    for (const auto &row : series.rows) {
        last[row[c_run]] = row[c_cid].empty() ? std::nullopt : std::optional<double>(parse_double(row[c_cid]));
    }
    FinalCidTable t;
    for (const auto &run : manifest.at("runs")) {
        const auto id = run.at("run_id").get<std::string>();
        const auto it = last.find(id);
        if (it == last.end()) {
            throw IoError("cid_series.csv has no rows for run " + id);
        }
        auto &slot = t[{run.at("variant").get<std::string>(), run.at("algorithm").get<std::string>()}];
        const auto rep = run.at("repetition").get<std::size_t>();
        if (slot.size() <= rep) slot.resize(rep + 1);
        slot[rep] = it->second;
    }
    return t;
}

/// Recompute stats.csv for an existing output directory.
inline std::vector<StatRow> compare_directory(const std::filesystem::path &dir, TestKind test, double alpha) {
    const auto manifest = read_manifest(dir);
    const auto algorithms = manifest.at("algorithms").get<std::vector<std::string>>();
    if (algorithms.size() < 2) {
        throw ContractViolation("compare: " + dir.string() + " holds a single algorithm; nothing to compare");
    }
    auto rows = compare_final_cids(final_cid_table(dir), algorithms,
                                   manifest.at("variants").get<std::vector<std::string>>(), test, alpha);
    write_file(dir / "stats.csv", stats_csv(rows));
    return rows;
}

} // namespace cidbench
