#pragma once

// NSGA-II and its diversified variant NSGA-II-D, which adds a novelty
// objective against an archive of failures and re-seeds the most dominated
// individuals with random samples every generation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "cidbench/core.hpp"
#include "cidbench/novelty.hpp"
#include "cidbench/operators.hpp"
#include "cidbench/pareto.hpp"
#include "cidbench/rng.hpp"
#include "cidbench/samplers.hpp"

namespace cidbench {

struct Nsga2Config {
    std::size_t population_size = 40;
    double crossover_rate = 0.6;
    double mutation_rate = 1.0 / 3.0;
    double sbx_eta = 15.0;
    double pm_eta = 20.0;
    std::size_t budget = 2000;

    void validate() const {
        require(population_size >= 4 && population_size % 2 == 0, "nsga2: population_size must be even and >= 4");
        require(crossover_rate >= 0.0 && crossover_rate <= 1.0, "nsga2: crossover_rate must be in [0,1]");
        require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "nsga2: mutation_rate must be in [0,1]");
        require(budget >= population_size, "nsga2: budget must cover the initial population");
    }
};

struct NsgaDConfig {
    Nsga2Config base;
    double archive_threshold = 0.29;
    double repopulation_fraction = 0.1;

    void validate() const {
        base.validate();
        require(archive_threshold > 0.0, "nsga2d: archive_threshold must be positive");
        require(repopulation_fraction > 0.0 && repopulation_fraction <= 0.5,
                "nsga2d: repopulation_fraction must be in (0, 0.5]");
    }

    std::size_t replaced_per_generation() const {
        return static_cast<std::size_t>(
            std::ceil(repopulation_fraction * static_cast<double>(base.population_size) - 1e-9));
    }
};

namespace detail {

struct Member {
    TestInput x;
    FitnessVector f;
};

class NsgaEngine {
  public:
    NsgaEngine(const ProblemDefinition &problem, const Nsga2Config &config, std::uint64_t seed,
               const NsgaDConfig *diversity)
        : problem_(problem), config_(config), rng_(seed), diversity_(diversity),
          history_(make_history(diversity ? "nsga2d" : "nsga2", problem, seed)),
          evaluator_(problem, config.budget, history_) {
        if (diversity_) {
            archive_.emplace(diversity_->archive_threshold);
        }
        history_.evaluations.reserve(config.budget);
    }

    RunHistory run(std::vector<TestInput> *final_population) {
        try {
            initialize();
            for (std::size_t generation = 1;; ++generation) {
                auto ranked = rank_population(sorting_objectives(population_));
                auto offspring = make_offspring(ranked, generation);
                std::vector<Member> combined = population_;
                combined.insert(combined.end(), offspring.begin(), offspring.end());
                population_ = environmental_selection(combined);
                if (diversity_) {
                    repopulate(generation);
                }
            }
        } catch (const BudgetExhausted &) {
        }
        if (final_population) {
            final_population->clear();
            for (const auto &m : population_) {
                final_population->push_back(m.x);
            }
        }
        return std::move(history_);
    }

  private:
    Member evaluate(TestInput x, std::size_t generation) {
        std::optional<double> novelty;
        if (archive_) {
            novelty = archive_->novelty_distance(x);
        }
        const Evaluation &e = evaluator_.evaluate(x, generation, novelty);
        Member m{e.input, e.fitness};
        if (archive_ && e.failed) {
            archive_->insert(m.x);
        }
        return m;
    }

    void initialize() {
        auto init = lhs_sample(problem_.space, config_.population_size, rng_).points;
        population_.reserve(config_.population_size);
        for (auto &x : init) {
            population_.push_back(evaluate(std::move(x), 0));
        }
    }

    /// Objectives used for ranking: the fitness, plus the negated novelty
    /// distance for NSGA-II-D. Novelty is capped at the box diagonal so an empty
    /// archive yields a finite (and maximal) value.
    std::vector<FitnessVector> sorting_objectives(const std::vector<Member> &members) const {
        std::vector<FitnessVector> out;
        out.reserve(members.size());
        const double cap = problem_.space.diagonal();
        for (const auto &m : members) {
            FitnessVector f = m.f;
            if (archive_) {
                f.push_back(-std::min(archive_->novelty_distance(m.x), cap));
            }
            out.push_back(std::move(f));
        }
        return out;
    }

    std::size_t tournament(const RankedPopulation &ranked) {
        const std::size_t a = rng_.below(population_.size());
        const std::size_t b = rng_.below(population_.size());
        if (ranked.rank[a] != ranked.rank[b]) {
            return ranked.rank[a] < ranked.rank[b] ? a : b;
        }
        return ranked.crowding[b] > ranked.crowding[a] ? b : a;
    }

    std::vector<Member> make_offspring(const RankedPopulation &ranked, std::size_t generation) {
        std::vector<Member> offspring;
        offspring.reserve(config_.population_size);
        while (offspring.size() < config_.population_size) {
            const auto &p1 = population_[tournament(ranked)].x;
            const auto &p2 = population_[tournament(ranked)].x;
            auto [c1, c2] = sbx_crossover(problem_.space, p1, p2, config_.crossover_rate, config_.sbx_eta, rng_);
            c1 = polynomial_mutation(problem_.space, c1, config_.mutation_rate, config_.pm_eta, rng_);
            c2 = polynomial_mutation(problem_.space, c2, config_.mutation_rate, config_.pm_eta, rng_);
            offspring.push_back(evaluate(std::move(c1), generation));
            offspring.push_back(evaluate(std::move(c2), generation));
        }
        return offspring;
    }

    /// (mu + lambda) truncation: whole fronts first, then the last front by
    /// descending crowding distance.
    std::vector<Member> environmental_selection(const std::vector<Member> &combined) const {
        const auto objectives = sorting_objectives(combined);
        const auto fronts = fast_nondominated_sort(objectives);
        std::vector<Member> next;
        next.reserve(config_.population_size);
        for (const auto &front : fronts) {
            if (next.size() + front.size() <= config_.population_size) {
                for (std::size_t i : front) {
                    next.push_back(combined[i]);
                }
                continue;
            }
            std::vector<FitnessVector> members;
            for (std::size_t i : front) {
                members.push_back(objectives[i]);
            }
            const auto cd = crowding_distance(members);
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
            for (std::size_t k = 0; next.size() < config_.population_size; ++k) {
                next.push_back(combined[front[order[k]]]);
            }
            break;
        }
        return next;
    }

    /// Replace the most dominated individuals (worst front first, lowest
    /// crowding first within a front) with fresh uniform samples.
    void repopulate(std::size_t generation) {
        const std::size_t count = std::min(diversity_->replaced_per_generation(), population_.size());
        const auto ranked = rank_population(sorting_objectives(population_));
        std::vector<std::size_t> victims;
        for (auto front = ranked.fronts.rbegin(); front != ranked.fronts.rend() && victims.size() < count; ++front) {
            std::vector<std::size_t> order = *front;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return ranked.crowding[a] < ranked.crowding[b]; });
            for (std::size_t i : order) {
                if (victims.size() == count) {
                    break;
                }
                victims.push_back(i);
            }
        }
        std::sort(victims.begin(), victims.end());
        for (std::size_t i : victims) {
            auto x = uniform_sample(problem_.space, 1, rng_).points.front();
            population_[i] = evaluate(std::move(x), generation);
        }
    }

    const ProblemDefinition &problem_;
    Nsga2Config config_;
    SeededRng rng_;
    const NsgaDConfig *diversity_;
    std::optional<NoveltyArchive> archive_;
    RunHistory history_;
    Evaluator evaluator_;
    std::vector<Member> population_;
};

} // namespace detail

/// `final_population`, when given, receives the last selected population.
inline RunHistory run_nsga2(const ProblemDefinition &problem, const Nsga2Config &config, std::uint64_t seed,
                            std::vector<TestInput> *final_population = nullptr) {
    config.validate();
    return detail::NsgaEngine(problem, config, seed, nullptr).run(final_population);
}

inline RunHistory run_nsga2d(const ProblemDefinition &problem, const NsgaDConfig &config, std::uint64_t seed,
                             std::vector<TestInput> *final_population = nullptr) {
    config.validate();
    return detail::NsgaEngine(problem, config.base, seed, &config).run(final_population);
}

} // namespace cidbench
