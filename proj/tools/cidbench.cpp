#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cidbench/cid.hpp"
#include "cidbench/config.hpp"
#include "cidbench/experiment.hpp"
#include "cidbench/io.hpp"
#include "cidbench/problems.hpp"
#include "cidbench/refset.hpp"
#include "cidbench/report.hpp"

using namespace cidbench;

namespace {

constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

Json parse_json_arg(const std::string &text, const char *option) {
    try {
        return text.empty() ? Json::object() : Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ContractViolation(std::string(option) + ": invalid JSON: " + e.what());
    }
}

TestKind parse_test(const std::string &s) { return s == "signedrank" ? TestKind::SignedRank : TestKind::RankSum; }

int list_problems() {
    for (const auto &e : problem_catalog()) {
        std::cout << e.name << "  dims=" << e.dims << "  objectives=" << e.objectives << "\n  " << e.description
                  << "\n";
        const auto t = e.thresholds(Json::object());
        for (auto v : {OracleVariant::Large, OracleVariant::Medium, OracleVariant::Small}) {
            std::cout << "  " << to_string(v) << ":";
            for (double x : t.at(v)) std::cout << " " << format_double(x);
            std::cout << "\n";
        }
    }
    return 0;
}

int build_refset(const std::string &problem, const std::string &variant_name, const std::string &strategy,
                 const std::string &params, const std::string &problem_params, const std::string &out) {
    const auto variant = parse_variant(variant_name);
    if (!variant) throw ContractViolation("--variant: unknown variant '" + variant_name + "'");
    const auto z = build_reference_set(problem, parse_json_arg(problem_params, "--problem-params"), *variant,
                                       {strategy, parse_json_arg(params, "--params")});
    save_reference_set(z, out);
    std::cout << "reference set: " << z.points.size() << " failing of " << z.total_sampled << " sampled, R* "
              << format_double(z.max_adjacent_distance) << "\nwrote " << out << "\n";
    return 0;
}

int run_config(const std::string &config_path, const std::string &out, std::size_t workers) {
    auto config = load_config(config_path);
    if (!out.empty()) config.output_dir = out;
    if (workers > 0) config.workers = workers;
    const auto result = run_experiment(config);
    std::cout << "runs: " << result.runs.size() << "\n";
    for (const auto &row : result.summary) {
        std::cout << row.algorithm << " " << row.variant << " cid_mean "
                  << (row.cid_mean ? format_double(*row.cid_mean) : "undef") << " failures_mean "
                  << format_double(row.failures_mean) << "\n";
    }
    std::cout << "wrote " << config.output_dir.string() << "\n";
    return 0;
}

int compute_cid(const std::string &refset, const std::string &points, double p, double q) {
    const auto z = load_reference_set(refset);
    const auto table = read_csv(points);
    std::vector<TestInput> a;
    for (const auto &row : table.rows) {
        TestInput x;
        for (const auto &c : row) x.push_back(parse_double(c));
        a.push_back(std::move(x));
    }
    if (!z.points.empty() && !a.empty() && z.points.front().size() != a.front().size()) {
        throw ContractViolation("--points: dimension differs from the reference set");
    }
    std::cout << format_double(cid(a, z.points, {p, q})) << "\n";
    return 0;
}

int compare_dir(const std::string &in, const std::string &test, double alpha) {
    const auto rows = compare_directory(in, parse_test(test), alpha);
    std::cout << stats_csv(rows);
    return 0;
}

int write_report(const std::string &in, const std::string &out) {
    const auto md = emit_report(in);
    if (out.empty() || out == "-") {
        std::cout << md;
    } else {
        write_file(out, md);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Coverage Inverted Distance benchmark for search-based test generators"};
    app.require_subcommand(1);

    auto *problems = app.add_subcommand("problems", "Problem catalog");
    problems->require_subcommand(1);
    auto *list = problems->add_subcommand("list", "List problems with dimensions and oracle variants");

    std::string problem, variant = "Large", strategy = "grid", params, problem_params, out;
    auto *refset = app.add_subcommand("refset", "Build a reference set of failing inputs");
    refset->add_option("--problem", problem, "Problem name")->required();
    refset->add_option("--variant", variant, "Oracle variant: Large, Medium, Small, Custom")->capture_default_str();
    refset->add_option("--strategy", strategy, "Sampler: grid, fps, poisson, lhs, uniform")->capture_default_str();
    refset->add_option("--params", params, "Sampler parameters as JSON, e.g. '{\"k\": 100}'");
    refset->add_option("--problem-params", problem_params, "Problem parameters as JSON");
    refset->add_option("--out", out, "Output CSV path (a JSON sidecar is written next to it)")->required();

    std::string config_path, run_out;
    std::size_t workers = 0;
    auto *run = app.add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Output directory (overrides output_dir)");
    run->add_option("--workers", workers, "Concurrent runs (0: all cores)");

    std::string refset_path, points_path;
    double p = 2.0, q = 1.0;
    auto *cid_cmd = app.add_subcommand("cid", "CID of a test set against a reference set");
    cid_cmd->add_option("--refset", refset_path, "Reference set CSV")->required()->check(CLI::ExistingFile);
    cid_cmd->add_option("--points", points_path, "Test inputs CSV with header x1..xn")->required()->check(CLI::ExistingFile);
    cid_cmd->add_option("--p", p, "Distance norm order")->capture_default_str();
    cid_cmd->add_option("--q", q, "Aggregation order")->capture_default_str();

    std::string in_dir, test = "ranksum";
    double alpha = 0.05;
    auto *compare = app.add_subcommand("compare", "Pairwise statistics over an experiment directory");
    compare->add_option("--in", in_dir, "Experiment output directory")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--test", test, "ranksum or signedrank")
        ->check(CLI::IsMember({"ranksum", "signedrank"}))
        ->capture_default_str();
    compare->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();

    std::string report_in, report_out;
    auto *report = app.add_subcommand("report", "Markdown report over an experiment directory");
    report->add_option("--in", report_in, "Experiment output directory")->required()->check(CLI::ExistingDirectory);
    report->add_option("--out", report_out, "Markdown output path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kValidationError;
    }

    try {
        if (list->parsed()) return list_problems();
        if (refset->parsed()) return build_refset(problem, variant, strategy, params, problem_params, out);
        if (run->parsed()) return run_config(config_path, run_out, workers);
        if (cid_cmd->parsed()) return compute_cid(refset_path, points_path, p, q);
        if (compare->parsed()) return compare_dir(in_dir, test, alpha);
        if (report->parsed()) return write_report(report_in, report_out);
    } catch (const EmptyReferenceSet &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    } catch (const ContractViolation &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const Json::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
