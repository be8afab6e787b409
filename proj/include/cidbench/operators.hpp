#pragma once

// Real-coded variation operators and PSO helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "cidbench/core.hpp"
#include "cidbench/rng.hpp"

namespace cidbench {

inline double clamp_to(double v, const Bounds &b) { return std::clamp(v, b.lo, b.hi); }

/// Simulated binary crossover (bounded form from Deb's NSGA-II reference code).
/// With probability 1 - rate the parents are returned unchanged; otherwise each
/// variable is recombined with probability 0.5.
inline std::pair<TestInput, TestInput> sbx_crossover(const SearchSpace &space, const TestInput &p1,
                                                     const TestInput &p2, double rate, double eta, SeededRng &rng) {
    require(p1.size() == p2.size() && p1.size() == space.dims(), "sbx_crossover: dimension mismatch");
    TestInput c1 = p1;
    TestInput c2 = p2;
    if (rng.uniform() >= rate) {
        return {std::move(c1), std::move(c2)};
    }
    for (std::size_t i = 0; i < p1.size(); ++i) {
        if (rng.uniform() > 0.5) {
            continue;
        }
        if (std::abs(p1[i] - p2[i]) <= 1e-14) {
            continue;
        }
        const Bounds &b = space[i];
        const double y1 = std::min(p1[i], p2[i]);
        const double y2 = std::max(p1[i], p2[i]);
        const double u = rng.uniform();

        auto betaq_for = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            if (u <= 1.0 / alpha) {
                return std::pow(u * alpha, 1.0 / (eta + 1.0));
            }
            return std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        };

        const double beta_lo = 1.0 + 2.0 * (y1 - b.lo) / (y2 - y1);
        const double beta_hi = 1.0 + 2.0 * (b.hi - y2) / (y2 - y1);
        double v1 = clamp_to(0.5 * ((y1 + y2) - betaq_for(beta_lo) * (y2 - y1)), b);
        double v2 = clamp_to(0.5 * ((y1 + y2) + betaq_for(beta_hi) * (y2 - y1)), b);
        if (rng.coin()) {
            std::swap(v1, v2);
        }
        c1[i] = v1;
        c2[i] = v2;
    }
    return {std::move(c1), std::move(c2)};
}

/// Bounded polynomial mutation; each variable mutates with probability `rate`.
inline TestInput polynomial_mutation(const SearchSpace &space, const TestInput &x, double rate, double eta,
                                     SeededRng &rng) {
    require(x.size() == space.dims(), "polynomial_mutation: dimension mismatch");
    TestInput y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (rng.uniform() >= rate) {
            continue;
        }
        const Bounds &b = space[i];
        const double width = b.width();
        const double delta1 = (y[i] - b.lo) / width;
        const double delta2 = (b.hi - y[i]) / width;
        const double u = rng.uniform();
        const double mut_pow = 1.0 / (eta + 1.0);
        double deltaq = 0.0;
        if (u < 0.5) {
            const double xy = 1.0 - delta1;
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta + 1.0);
            deltaq = std::pow(val, mut_pow) - 1.0;
        } else {
            const double xy = 1.0 - delta2;
            const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta + 1.0);
            deltaq = 1.0 - std::pow(val, mut_pow);
        }
        y[i] = clamp_to(y[i] + deltaq * width, b);
    }
    return y;
}

/// Mirror a particle back into [lo, hi], flipping its velocity once per
/// reflection. Repeats until the position is inside, so large overshoots fold
/// back correctly.
inline std::pair<double, double> reflect_boundary(double position, double velocity, double lo, double hi) {
    require(lo < hi, "reflect_boundary: need lo < hi");
    // a velocity this far outside the box just folds; bound the loop anyway
    for (int guard = 0; guard < 10000 && (position < lo || position > hi); ++guard) {
        position = position < lo ? 2.0 * lo - position : 2.0 * hi - position;
        velocity = -velocity;
    }
    return {std::clamp(position, lo, hi), velocity};
}

/// Linearly decreasing inertia weight.
inline double inertia_at(double t, double budget, double w_min, double w_max) {
    require(budget > 0.0 && t >= 0.0 && t <= budget, "inertia_at: need 0 <= t <= budget");
    return w_max - (w_max - w_min) * t / budget;
}

/// OMOPSO uniform turbulence: x += (u - 0.5) * perturbation * width.
inline void uniform_turbulence(const SearchSpace &space, TestInput &x, double rate, double perturbation,
                               SeededRng &rng) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (rng.uniform() < rate) {
            x[i] = clamp_to(x[i] + (rng.uniform() - 0.5) * perturbation * space[i].width(), space[i]);
        }
    }
}

/// OMOPSO non-uniform turbulence; the step shrinks as `progress` goes 0 → 1.
inline void nonuniform_turbulence(const SearchSpace &space, TestInput &x, double rate, double perturbation,
                                  double progress, SeededRng &rng) {
    auto delta = [&](double y) {
        const double r = rng.uniform();
        return y * (1.0 - std::pow(r, std::pow(1.0 - progress, perturbation)));
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (rng.uniform() < rate) {
            const Bounds &b = space[i];
            const double step = rng.uniform() < 0.5 ? delta(b.hi - x[i]) : delta(b.lo - x[i]);
            x[i] = clamp_to(x[i] + step, b);
        }
    }
}

} // namespace cidbench
