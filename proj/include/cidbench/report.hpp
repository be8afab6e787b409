#pragma once

// Markdown report over an experiment output directory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cidbench/experiment.hpp"
#include "cidbench/io.hpp"

namespace cidbench {

namespace detail {

inline std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::optional<double> optional_cell(const std::string &s) {
    return s.empty() ? std::nullopt : std::optional<double>(parse_double(s));
}

inline std::string magnitude_letter(const std::string &m) {
    if (m == "large") return "L";
    if (m == "medium") return "M";
    if (m == "small") return "S";
    if (m == "negligible") return "N";
    return m;
}

} // namespace detail

/// Build the report from manifest.json, summary.csv, cid_series.csv and,
/// when present, stats.csv.
inline std::string emit_report(const std::filesystem::path &dir) {
    using detail::optional_cell;
    const auto manifest = read_manifest(dir);
    const auto summary = read_required_csv(dir / "summary.csv");
    const auto series = read_required_csv(dir / "cid_series.csv");
    const auto algorithms = manifest.at("algorithms").get<std::vector<std::string>>();
    const auto variants = manifest.at("variants").get<std::vector<std::string>>();

    struct Cell {
        std::optional<double> mean, std, first;
    };
    std::map<std::pair<std::string, std::string>, Cell> cells;
    for (const auto &row : summary.rows) {
        cells[{row[summary.column("algorithm")], row[summary.column("variant")]}] = {
            optional_cell(row[summary.column("cid_mean")]), optional_cell(row[summary.column("cid_std")]),
            optional_cell(row[summary.column("first_fail_mean")])};
    }

    std::string md = "# CID benchmark report\n\n";
    md += "Problem `" + manifest.at("problem").get<std::string>() + "`, budget " +
          std::to_string(manifest.at("budget").get<std::size_t>()) + " evaluations, " +
          std::to_string(manifest.at("repetitions").get<std::size_t>()) + " repetitions per algorithm.\n\n";

    md += "## Final CID (mean and standard deviation)\n\n| Algorithm |";
    for (const auto &v : variants) md += " " + v + " Avg | " + v + " Std |";
    md += "\n|---|";
    for (std::size_t i = 0; i < variants.size(); ++i) md += "---|---|";
    md += "\n";
    std::map<std::string, double> best;
    for (const auto &v : variants) {
        for (const auto &a : algorithms) {
            const auto &c = cells[{a, v}];
            if (c.mean && (!best.count(v) || *c.mean < best[v])) best[v] = *c.mean;
        }
    }
    for (const auto &a : algorithms) {
        md += "| " + a + " |";
        for (const auto &v : variants) {
            const auto &c = cells[{a, v}];
            if (!c.mean) {
                md += " undef | undef |";
                continue;
            }
            const std::string m = detail::sig(*c.mean);
            md += (best.count(v) && *c.mean == best[v]) ? " **" + m + "** |" : " " + m + " |";
            md += " " + detail::sig(c.std.value_or(0.0)) + " |";
        }
        md += "\n";
    }
    md += "\nLower is better; the best mean per variant is bold.\n\n";

    md += "## Statistical comparison\n\n";
    const auto stats_path = dir / "stats.csv";
    if (algorithms.size() < 2) {
        md += "Omitted: the experiment ran a single algorithm.\n\n";
    } else if (!std::filesystem::exists(stats_path)) {
        md += "Omitted: stats.csv is missing; run `cidbench compare` first.\n\n";
    } else {
        const auto stats = read_csv(stats_path);
        std::map<std::pair<std::string, std::string>, std::vector<std::string>> by_pair;
        std::vector<std::string> pairs;
        std::string test;
        for (const auto &row : stats.rows) {
            const auto &pair = row[stats.column("pair")];
            if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end()) pairs.push_back(pair);
            by_pair[{pair, row[stats.column("variant")]}] = row;
            test = row[stats.column("test")];
        }
        md += "Wilcoxon " + std::string(test == "signedrank" ? "signed-rank" : "rank-sum") +
              " test on final CID with Vargha-Delaney A12. Significant p-values are bold.\n\n| Pair | |";
        for (const auto &v : variants) md += " " + v + " |";
        md += "\n|---|---|";
        for (std::size_t i = 0; i < variants.size(); ++i) md += "---|";
        md += "\n";
        for (const auto &pair : pairs) {
            std::string p_line = "| " + pair + " | p_value |";
            std::string e_line = "| | effect_size |";
            for (const auto &v : variants) {
                const auto it = by_pair.find({pair, v});
                if (it == by_pair.end() || it->second[stats.column("p_value")].empty()) {
                    p_line += " skipped |";
                    e_line += " — |";
                    continue;
                }
                const auto &row = it->second;
                const std::string p = detail::fixed(parse_double(row[stats.column("p_value")]));
                p_line += row[stats.column("significant")] == "true" ? " **" + p + "** |" : " " + p + " |";
                e_line += " " + detail::fixed(parse_double(row[stats.column("a12")]), 2) + " (" +
                          detail::magnitude_letter(row[stats.column("magnitude")]) + ") |";
            }
            md += p_line + "\n" + e_line + "\n";
        }
        md += "\nEffect magnitude: L large, M medium, S small, N negligible.\n\n";
    }

    md += "## Mean iteration of the first failure\n\n| Algorithm |";
    for (const auto &v : variants) md += " " + v + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < variants.size(); ++i) md += "---|";
    md += "\n";
    for (const auto &a : algorithms) {
        md += "| " + a + " |";
        for (const auto &v : variants) {
            const auto &c = cells[{a, v}];
            md += c.first ? " " + detail::fixed(*c.first, 1) + " |" : " — |";
        }
        md += "\n";
    }
    md += "\n";

    md += "## CID over evaluations\n\nPer checkpoint: mean and standard deviation over the runs that had found a "
          "failure, and how many had.\n\n";
    std::map<std::string, std::pair<std::string, std::string>> run_owner;
    for (const auto &run : manifest.at("runs")) {
        run_owner[run.at("run_id").get<std::string>()] = {run.at("algorithm").get<std::string>(),
                                                           run.at("variant").get<std::string>()};
    }
    std::map<std::pair<std::string, std::string>, std::map<std::size_t, std::vector<std::optional<double>>>> points;
    for (const auto &row : series.rows) {
        const auto owner = run_owner.find(row[series.column("run_id")]);
        if (owner == run_owner.end()) continue;
        const auto evals = static_cast<std::size_t>(parse_double(row[series.column("evaluations")]));
        points[owner->second][evals].push_back(optional_cell(row[series.column("cid")]));
    }
    for (const auto &a : algorithms) {
        for (const auto &v : variants) {
            md += "### " + a + ", " + v + "\n\n| Evaluations | CID mean | CID std | Runs with failures |\n|---|---|---|---|\n";
            for (const auto &[evals, values] : points[{a, v}]) {
                std::vector<double> defined;
                for (const auto &x : values)
                    if (x) defined.push_back(*x);
                md += "| " + std::to_string(evals) + " | ";
                if (defined.empty()) {
                    md += "undef | undef |";
                } else {
                    md += detail::sig(detail::mean_of(defined)) + " | " + detail::sig(detail::std_of(defined)) + " |";
                }
                md += " " + std::to_string(defined.size()) + "/" + std::to_string(values.size()) + " |\n";
            }
            md += "\n";
        }
    }
    return md;
}

} // namespace cidbench
