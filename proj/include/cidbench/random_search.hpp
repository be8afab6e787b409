#pragma once

#include <cstddef>

#include "cidbench/core.hpp"
#include "cidbench/rng.hpp"
#include "cidbench/samplers.hpp"

namespace cidbench {

/// Uniform random testing. `batch_size` only labels generations so that
/// iteration counts line up with population-based runs.
inline RunHistory run_random_search(const ProblemDefinition &problem, std::size_t budget, std::size_t batch_size,
                                    std::uint64_t seed) {
    require(budget >= 1, "run_random_search: need budget >= 1");
    require(batch_size >= 1, "run_random_search: need batch_size >= 1");
    RunHistory history = make_history("rs", problem, seed);
    history.evaluations.reserve(budget);
    Evaluator evaluator(problem, budget, history);
    SeededRng rng(seed);
    while (!evaluator.exhausted()) {
        const std::size_t n = std::min(batch_size, evaluator.remaining());
        const std::size_t generation = evaluator.used() / batch_size;
        for (auto &x : uniform_sample(problem.space, n, rng).points) {
            evaluator.evaluate(x, generation);
        }
    }
    return history;
}

} // namespace cidbench
