#pragma once

// Coverage Inverted Distance and the per-run metrics derived from a history.
//
//   CID(A, Z) = (1/|Z|) * (sum_{z in Z} d_z^q)^(1/q)
//
// where d_z is the p-norm distance from reference point z to its nearest
// point in the test set A. Lower is better; 0 means every reference point is
// hit exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cidbench/core.hpp"

namespace cidbench {

struct CidParams {
    double p = 2.0;
    double q = 1.0;

    void validate() const {
        require(p >= 1.0, "cid: norm order p must be >= 1");
        require(q >= 1.0, "cid: aggregation order q must be >= 1");
    }
};

inline double p_norm_distance(std::span<const double> a, std::span<const double> b, double p) {
    if (p == 2.0) {
        return std::sqrt(squared_distance(a, b));
    }
    double s = 0.0;
    if (p == 1.0) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            s += std::abs(a[i] - b[i]);
        }
        return s;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::pow(std::abs(a[i] - b[i]), p);
    }
    return std::pow(s, 1.0 / p);
}

/// Aggregates nearest distances d_z into a CID value.
inline double aggregate_cid(std::span<const double> nearest, double q) {
    double s = 0.0;
    if (q == 1.0) {
        for (double d : nearest) {
            s += d;
        }
    } else {
        for (double d : nearest) {
            s += std::pow(d, q);
        }
        s = std::pow(s, 1.0 / q);
    }
    return s / static_cast<double>(nearest.size());
}

inline double cid(const std::vector<TestInput> &tests, const std::vector<TestInput> &reference,
                  const CidParams &params = {}) {
    require(!tests.empty(), "cid: the test set is empty");
    require(!reference.empty(), "cid: the reference set is empty");
    params.validate();
    std::vector<double> nearest(reference.size(), std::numeric_limits<double>::infinity());
    for (std::size_t z = 0; z < reference.size(); ++z) {
        for (const auto &a : tests) {
            nearest[z] = std::min(nearest[z], p_norm_distance(reference[z], a, params.p));
        }
    }
    return aggregate_cid(nearest, params.q);
}

/// CID maintained under insertion of test points: O(|Z|) per added point.
class IncrementalCid {
  public:
    IncrementalCid(const std::vector<TestInput> &reference, const CidParams &params)
        : reference_(&reference), params_(params),
          nearest_(reference.size(), std::numeric_limits<double>::infinity()) {
        require(!reference.empty(), "cid: the reference set is empty");
        params_.validate();
    }

    void add(std::span<const double> x) {
        for (std::size_t z = 0; z < nearest_.size(); ++z) {
            nearest_[z] = std::min(nearest_[z], p_norm_distance((*reference_)[z], x, params_.p));
        }
        ++count_;
    }

    std::size_t test_count() const { return count_; }

    /// Undefined (nullopt) until at least one test point was added.
    std::optional<double> value() const {
        if (count_ == 0) {
            return std::nullopt;
        }
        return aggregate_cid(nearest_, params_.q);
    }

  private:
    const std::vector<TestInput> *reference_;
    CidParams params_;
    std::vector<double> nearest_;
    std::size_t count_ = 0;
};

struct Checkpoint {
    std::size_t evaluations = 0;
    /// nullopt while no failure has been found (CID undefined).
    std::optional<double> cid;
    std::size_t failures_so_far = 0;
};

struct ConvergenceSeries {
    std::vector<Checkpoint> checkpoints;

    const Checkpoint &final() const { return checkpoints.back(); }
};

/// CID of all failures found so far, sampled every `interval` evaluations and
/// at the last evaluation.
inline ConvergenceSeries convergence_series(const RunHistory &history, const std::vector<TestInput> &reference,
                                            const CidParams &params, std::size_t interval) {
    require(interval >= 1, "convergence_series: need interval >= 1");
    IncrementalCid tracker(reference, params);
    ConvergenceSeries series;
    const std::size_t total = history.evaluations.size();
    for (std::size_t i = 0; i < total; ++i) {
        const auto &e = history.evaluations[i];
        if (e.failed) {
            tracker.add(e.input);
        }
        const std::size_t used = i + 1;
        if (used % interval == 0 || used == total) {
            series.checkpoints.push_back({used, tracker.value(), tracker.test_count()});
        }
    }
    return series;
}

/// 1-based batch number of the first failing evaluation, or nullopt.
inline std::optional<std::size_t> first_failure_iteration(const RunHistory &history, std::size_t batch_size) {
    require(batch_size >= 1, "first_failure_iteration: need batch_size >= 1");
    for (const auto &e : history.evaluations) {
        if (e.failed) {
            return e.index / batch_size + 1;
        }
    }
    return std::nullopt;
}

inline std::size_t failure_count(const RunHistory &history) {
    return static_cast<std::size_t>(std::count_if(history.evaluations.begin(), history.evaluations.end(),
                                                  [](const Evaluation &e) { return e.failed; }));
}

inline std::vector<TestInput> failing_inputs(const RunHistory &history) {
    std::vector<TestInput> out;
    for (const auto &e : history.evaluations) {
        if (e.failed) {
            out.push_back(e.input);
        }
    }
    return out;
}

/// Per-axis min-max scaling into [0,1].
inline std::vector<TestInput> normalize_points(const std::vector<TestInput> &points, const SearchSpace &space) {
    std::vector<TestInput> out = points;
    for (auto &x : out) {
        for (std::size_t d = 0; d < x.size(); ++d) {
            x[d] = (x[d] - space[d].lo) / space[d].width();
        }
    }
    return out;
}

} // namespace cidbench
