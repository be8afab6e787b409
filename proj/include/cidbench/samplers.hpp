#pragma once

// Point generators for reference sets (grid, furthest point, Poisson disc),
// population initialization (Latin hypercube) and random search (uniform).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "cidbench/core.hpp"
#include "cidbench/rng.hpp"

namespace cidbench {

struct SampleBatch {
    std::vector<TestInput> points;
    std::string strategy;
    /// Strategy parameters as recorded for provenance (name → value).
    std::map<std::string, double> parameters;
};

/// k points per axis including both endpoints, row-major (last axis fastest).
inline SampleBatch grid_sample(const SearchSpace &space, std::size_t k) {
    require(k >= 2, "grid_sample: need at least 2 samples per axis");
    const std::size_t n = space.dims();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        require(total <= std::numeric_limits<std::size_t>::max() / k, "grid_sample: grid too large");
        total *= k;
    }

    SampleBatch batch{{}, "grid", {{"k", static_cast<double>(k)}}};
    batch.points.reserve(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t c = 0; c < total; ++c) {
        TestInput x(n);
        for (std::size_t d = 0; d < n; ++d) {
            const auto &b = space[d];
            // endpoints exactly, no accumulated rounding
            x[d] = idx[d] + 1 == k ? b.hi : b.lo + b.width() * static_cast<double>(idx[d]) / static_cast<double>(k - 1);
        }
        batch.points.push_back(std::move(x));
        for (std::size_t d = n; d-- > 0;) {
            if (++idx[d] < k) {
                break;
            }
            idx[d] = 0;
        }
    }
    return batch;
}

inline SampleBatch uniform_sample(const SearchSpace &space, std::size_t n, SeededRng &rng) {
    require(n >= 1, "uniform_sample: need n >= 1");
    SampleBatch batch{{}, "uniform", {{"n", static_cast<double>(n)}}};
    batch.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        TestInput x(space.dims());
        for (std::size_t d = 0; d < space.dims(); ++d) {
            x[d] = rng.uniform(space[d].lo, space[d].hi);
        }
        batch.points.push_back(std::move(x));
    }
    return batch;
}

/// Latin hypercube: every axis split into n strata, each stratum hit once.
inline SampleBatch lhs_sample(const SearchSpace &space, std::size_t n, SeededRng &rng) {
    require(n >= 1, "lhs_sample: need n >= 1");
    const std::size_t dims = space.dims();
    SampleBatch batch{{}, "lhs", {{"n", static_cast<double>(n)}}};
    batch.points.assign(n, TestInput(dims));
    std::vector<std::size_t> perm(n);
    for (std::size_t d = 0; d < dims; ++d) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng.shuffle(perm.begin(), perm.end());
        const auto &b = space[d];
        const double stratum = b.width() / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = b.lo + (static_cast<double>(perm[i]) + rng.uniform()) * stratum;
            batch.points[i][d] = std::min(v, b.hi);
        }
    }
    return batch;
}

/// Default candidate pool for furthest point sampling: 50 per requested point,
/// capped at 100,000 (and never below the requested count).
inline std::size_t default_fps_pool_size(std::size_t n) {
    return std::max(n, std::min<std::size_t>(50 * n, 100000));
}

/// Greedy maximin selection over an explicit candidate pool. The first pick is
/// the candidate nearest to `center` (lowest index on ties); each later pick
/// maximizes the distance to its nearest already-selected point (lowest index
/// on ties).
inline std::vector<std::size_t> greedy_maximin(const std::vector<TestInput> &pool, const TestInput &center,
                                               std::size_t n) {
    require(n >= 1 && n <= pool.size(), "greedy_maximin: need 1 <= n <= pool size");
    std::vector<std::size_t> chosen;
    chosen.reserve(n);

    std::size_t first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double d = squared_distance(pool[i], center);
        if (d < best) {
            best = d;
            first = i;
        }
    }
    chosen.push_back(first);

    // squared distance from every candidate to the selected set
    std::vector<double> nearest(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        nearest[i] = squared_distance(pool[i], pool[first]);
    }
    while (chosen.size() < n) {
        std::size_t pick = 0;
        double far = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (nearest[i] > far) {
                far = nearest[i];
                pick = i;
            }
        }
        chosen.push_back(pick);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(pool[i], pool[pick]));
        }
    }
    return chosen;
}

inline SampleBatch fps_sample(const SearchSpace &space, std::size_t n, std::size_t candidate_pool_size,
                              SeededRng &rng) {
    require(n >= 1, "fps_sample: need n >= 1");
    require(candidate_pool_size >= n, "fps_sample: candidate pool smaller than n");
    auto pool = uniform_sample(space, candidate_pool_size, rng).points;
    const auto chosen = greedy_maximin(pool, space.center(), n);
    SampleBatch batch{{}, "fps", {{"n", static_cast<double>(n)}, {"pool", static_cast<double>(candidate_pool_size)}}};
    batch.points.reserve(n);
    for (std::size_t i : chosen) {
        batch.points.push_back(pool[i]);
    }
    return batch;
}

inline SampleBatch fps_sample(const SearchSpace &space, std::size_t n, SeededRng &rng) {
    return fps_sample(space, n, default_fps_pool_size(n), rng);
}

namespace detail {

/// Uniform point in the spherical shell r <= |v| < 2r around the origin.
inline std::vector<double> shell_offset(std::size_t dims, double r, SeededRng &rng) {
    std::vector<double> v(dims);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto &c : v) {
            c = rng.normal();
            norm += c * c;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    // radius drawn so that the shell is filled uniformly by volume
    const double lo = std::pow(r, static_cast<double>(dims));
    const double hi = std::pow(2.0 * r, static_cast<double>(dims));
    const double radius = std::pow(lo + (hi - lo) * rng.uniform(), 1.0 / static_cast<double>(dims));
    for (auto &c : v) {
        c *= radius / norm;
    }
    return v;
}

} // namespace detail

/// Bridson's Poisson disc sampling generalized to n dimensions. Every pair of
/// emitted points is at least `r` apart.
inline SampleBatch poisson_disc_sample(const SearchSpace &space, double r, std::size_t attempts_per_point,
                                       SeededRng &rng) {
    require(r > 0.0, "poisson_disc_sample: need r > 0");
    require(attempts_per_point >= 1, "poisson_disc_sample: need at least one attempt per point");
    const std::size_t dims = space.dims();
    const double r2 = r * r;

    SampleBatch batch{{}, "poisson", {{"r", r}, {"attempts", static_cast<double>(attempts_per_point)}}};
    auto &points = batch.points;

    // Background grid with cell side r/sqrt(n), so a cell holds at most one point
    // except on measure-zero boundaries.
    const double cell = r / std::sqrt(static_cast<double>(dims));
    std::vector<std::size_t> cells_per_axis(dims);
    double total_cells = 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
        cells_per_axis[d] = static_cast<std::size_t>(std::ceil(space[d].width() / cell)) + 1;
        total_cells *= static_cast<double>(cells_per_axis[d]);
    }
    const bool use_grid = total_cells <= 4.0e6;
    const auto reach = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(dims))));
    std::unordered_map<std::size_t, std::vector<std::size_t>> grid;

    auto cell_coords = [&](const TestInput &x) {
        std::vector<long> c(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            c[d] = static_cast<long>(std::floor((x[d] - space[d].lo) / cell));
        }
        return c;
    };
    auto cell_key = [&](const std::vector<long> &c) {
        std::size_t key = 0;
        for (std::size_t d = 0; d < dims; ++d) {
            key = key * cells_per_axis[d] + static_cast<std::size_t>(c[d]);
        }
        return key;
    };

    auto far_enough = [&](const TestInput &x) {
        if (!use_grid) {
            return std::all_of(points.begin(), points.end(),
                               [&](const TestInput &p) { return squared_distance(p, x) >= r2; });
        }
        const auto base = cell_coords(x);
        std::vector<long> offset(dims, -reach);
        std::vector<long> probe(dims);
        for (;;) {
            bool inside = true;
            for (std::size_t d = 0; d < dims; ++d) {
                probe[d] = base[d] + offset[d];
                if (probe[d] < 0 || probe[d] >= static_cast<long>(cells_per_axis[d])) {
                    inside = false;
                }
            }
            if (inside) {
                if (auto it = grid.find(cell_key(probe)); it != grid.end()) {
                    for (std::size_t i : it->second) {
                        if (squared_distance(points[i], x) < r2) {
                            return false;
                        }
                    }
                }
            }
            std::size_t d = 0;
            for (; d < dims; ++d) {
                if (++offset[d] <= reach) {
                    break;
                }
                offset[d] = -reach;
            }
            if (d == dims) {
                return true;
            }
        }
    };

    auto emit = [&](TestInput x) {
        if (use_grid) {
            grid[cell_key(cell_coords(x))].push_back(points.size());
        }
        points.push_back(std::move(x));
        return points.size() - 1;
    };

    std::vector<std::size_t> active;
    {
        TestInput first(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            first[d] = rng.uniform(space[d].lo, space[d].hi);
        }
        active.push_back(emit(std::move(first)));
    }

    while (!active.empty()) {
        const std::size_t slot = rng.below(active.size());
        const TestInput origin = points[active[slot]];
        bool placed = false;
        for (std::size_t attempt = 0; attempt < attempts_per_point; ++attempt) {
            const auto offset = detail::shell_offset(dims, r, rng);
            TestInput candidate(dims);
            for (std::size_t d = 0; d < dims; ++d) {
                candidate[d] = origin[d] + offset[d];
            }
            if (!space.contains(candidate) || !far_enough(candidate)) {
                continue;
            }
            active.push_back(emit(std::move(candidate)));
            placed = true;
            break;
        }
        if (!placed) {
            active[slot] = active.back();
            active.pop_back();
        }
    }
    return batch;
}

inline SampleBatch poisson_disc_sample(const SearchSpace &space, double r, SeededRng &rng) {
    return poisson_disc_sample(space, r, 30, rng);
}

} // namespace cidbench
