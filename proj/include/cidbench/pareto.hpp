#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "cidbench/core.hpp"

namespace cidbench {

using Front = std::vector<std::size_t>;

/// Deb's fast non-dominated sort. Fronts hold indices into `fitness`, each
/// front in ascending index order.
inline std::vector<Front> fast_nondominated_sort(const std::vector<FitnessVector> &fitness) {
    require(!fitness.empty(), "fast_nondominated_sort: empty population");
    const std::size_t n = fitness.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<Front> fronts(1);

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(fitness[p], fitness[q])) {
                dominated_by[p].push_back(q);
                ++domination_count[q];
            } else if (dominates(fitness[q], fitness[p])) {
                dominated_by[q].push_back(p);
                ++domination_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (domination_count[p] == 0) {
            fronts[0].push_back(p);
        }
    }
    for (std::size_t i = 0; !fronts[i].empty(); ++i) {
        Front next;
        for (std::size_t p : fronts[i]) {
            for (std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

/// Crowding distance of each member of one front. Boundary members of every
/// objective get +inf; fronts of one or two members are all +inf.
inline std::vector<double> crowding_distance(const std::vector<FitnessVector> &front) {
    require(!front.empty(), "crowding_distance: empty front");
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }

    const std::size_t m = front[0].size();
    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][obj] < front[b][obj]; });
        const double lo = front[order.front()][obj];
        const double hi = front[order.back()][obj];
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        const double range = hi - lo;
        if (range <= 0.0) {
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            distance[order[i]] += (front[order[i + 1]][obj] - front[order[i - 1]][obj]) / range;
        }
    }
    return distance;
}

/// Rank (front number) and crowding distance for every member of a population.
struct RankedPopulation {
    std::vector<Front> fronts;
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

inline RankedPopulation rank_population(const std::vector<FitnessVector> &fitness) {
    RankedPopulation r;
    r.fronts = fast_nondominated_sort(fitness);
    r.rank.assign(fitness.size(), 0);
    r.crowding.assign(fitness.size(), 0.0);
    for (std::size_t f = 0; f < r.fronts.size(); ++f) {
        std::vector<FitnessVector> members;
        members.reserve(r.fronts[f].size());
        for (std::size_t i : r.fronts[f]) {
            members.push_back(fitness[i]);
            r.rank[i] = f;
        }
        const auto cd = crowding_distance(members);
        for (std::size_t k = 0; k < cd.size(); ++k) {
            r.crowding[r.fronts[f][k]] = cd[k];
        }
    }
    return r;
}

} // namespace cidbench
