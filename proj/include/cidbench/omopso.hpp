#pragma once

// OMOPSO without epsilon-dominance: a multi-objective particle swarm with a
// crowding-distance leader archive, dynamic inertia, reflecting boundaries and
// uniform / non-uniform turbulence on fixed thirds of the swarm.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

#include "cidbench/core.hpp"
#include "cidbench/operators.hpp"
#include "cidbench/pareto.hpp"
#include "cidbench/rng.hpp"
#include "cidbench/samplers.hpp"

namespace cidbench {

struct OmopsoConfig {
    std::size_t swarm_size = 40;
    /// 0 means "same as swarm_size".
    std::size_t archive_size = 0;
    double w_min = 0.1;
    double w_max = 0.9;
    double mutation_rate = 1.0 / 3.0;
    double c_min = 1.5;
    double c_max = 2.0;
    /// Turbulence strength shared by both mutation kinds.
    double perturbation = 0.5;
    std::size_t budget = 2000;

    std::size_t effective_archive_size() const { return archive_size == 0 ? swarm_size : archive_size; }

    void validate() const {
        require(swarm_size >= 1, "omopso: swarm_size must be >= 1");
        require(effective_archive_size() >= 1, "omopso: archive_size must be >= 1");
        require(0.0 < w_min && w_min < w_max && w_max < 1.0, "omopso: need 0 < w_min < w_max < 1");
        require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "omopso: mutation_rate must be in [0,1]");
        require(c_min <= c_max, "omopso: need c_min <= c_max");
        require(budget >= swarm_size, "omopso: budget must cover the initial swarm");
    }
};

struct ArchiveMember {
    TestInput x;
    FitnessVector f;
};

/// Stepwise OMOPSO; `run_omopso` drives it to the end of the budget.
class Omopso {
  public:
    Omopso(const ProblemDefinition &problem, const OmopsoConfig &config, std::uint64_t seed)
        : problem_(problem), config_(config), rng_(seed), history_(make_history("omopso", problem, seed)),
          evaluator_(problem, config.budget, history_) {
        config_.validate();
        history_.evaluations.reserve(config.budget);
    }

    Omopso(const Omopso &) = delete;
    Omopso &operator=(const Omopso &) = delete;

    /// Evaluates the initial uniform swarm. Returns false once the budget is spent.
    bool initialize() {
        const std::size_t dims = problem_.space.dims();
        for (auto &x : uniform_sample(problem_.space, config_.swarm_size, rng_).points) {
            if (evaluator_.exhausted()) {
                return false;
            }
            const auto &e = evaluator_.evaluate(x, 0);
            Particle p{x, std::vector<double>(dims, 0.0), e.fitness, x, e.fitness};
            update_archive(p.x, p.f);
            swarm_.push_back(std::move(p));
        }
        return !evaluator_.exhausted();
    }

    /// One swarm update. Returns false once the budget is spent.
    bool step() {
        ++generation_;
        const std::size_t dims = problem_.space.dims();
        const std::size_t third = swarm_.size() / 3;

        for (std::size_t i = 0; i < swarm_.size(); ++i) {
            if (evaluator_.exhausted()) {
                return false;
            }
            Particle &p = swarm_[i];
            const TestInput leader = archive_[select_leader(crowding_distance(archive_fitness()))].x;
            const double w = inertia_at(static_cast<double>(evaluator_.used()), static_cast<double>(config_.budget),
                                        config_.w_min, config_.w_max);
            const double c1 = rng_.uniform(config_.c_min, config_.c_max);
            const double c2 = rng_.uniform(config_.c_min, config_.c_max);
            const double r1 = rng_.uniform();
            const double r2 = rng_.uniform();
            for (std::size_t d = 0; d < dims; ++d) {
                p.v[d] = w * p.v[d] + c1 * r1 * (p.best_x[d] - p.x[d]) + c2 * r2 * (leader[d] - p.x[d]);
                const auto [pos, vel] = reflect_boundary(p.x[d] + p.v[d], p.v[d], problem_.space[d].lo,
                                                         problem_.space[d].hi);
                p.x[d] = pos;
                p.v[d] = vel;
            }

            const double progress = static_cast<double>(evaluator_.used()) / static_cast<double>(config_.budget);
            if (i < third) {
                uniform_turbulence(problem_.space, p.x, config_.mutation_rate, config_.perturbation, rng_);
            } else if (i < 2 * third) {
                nonuniform_turbulence(problem_.space, p.x, config_.mutation_rate, config_.perturbation, progress,
                                      rng_);
            }

            p.f = evaluator_.evaluate(p.x, generation_).fitness;
            update_personal_best(p);
            update_archive(p.x, p.f);
        }
        return !evaluator_.exhausted();
    }

    const std::vector<ArchiveMember> &archive() const { return archive_; }

    std::vector<FitnessVector> archive_fitness() const {
        std::vector<FitnessVector> out;
        out.reserve(archive_.size());
        for (const auto &a : archive_) {
            out.push_back(a.f);
        }
        return out;
    }

    const RunHistory &history() const { return history_; }
    RunHistory take_history() { return std::move(history_); }

  private:
    struct Particle {
        TestInput x;
        std::vector<double> v;
        FitnessVector f;
        TestInput best_x;
        FitnessVector best_f;
    };

    std::size_t select_leader(const std::vector<double> &crowding) {
        const std::size_t a = rng_.below(archive_.size());
        const std::size_t b = rng_.below(archive_.size());
        return crowding[b] > crowding[a] ? b : a;
    }

    void update_personal_best(Particle &p) {
        if (dominates(p.f, p.best_f)) {
            p.best_x = p.x;
            p.best_f = p.f;
        } else if (!dominates(p.best_f, p.f) && rng_.coin()) {
            p.best_x = p.x;
            p.best_f = p.f;
        }
    }

    void update_archive(const TestInput &x, const FitnessVector &f) {
        for (const auto &a : archive_) {
            if (dominates(a.f, f) || a.f == f) {
                return;
            }
        }
        std::erase_if(archive_, [&](const ArchiveMember &a) { return dominates(f, a.f); });
        archive_.push_back({x, f});
        while (archive_.size() > config_.effective_archive_size()) {
            const auto cd = crowding_distance(archive_fitness());
            const auto worst = std::min_element(cd.begin(), cd.end()) - cd.begin();
            archive_.erase(archive_.begin() + worst);
        }
    }

    const ProblemDefinition &problem_;
    OmopsoConfig config_;
    SeededRng rng_;
    RunHistory history_;
    Evaluator evaluator_;
    std::vector<Particle> swarm_;
    std::vector<ArchiveMember> archive_;
    std::size_t generation_ = 0;
};

/// `on_step`, when set, sees the leader archive after initialization and
/// after every swarm update.
inline RunHistory run_omopso(const ProblemDefinition &problem, const OmopsoConfig &config, std::uint64_t seed,
                             const std::function<void(const Omopso &)> &on_step = {}) {
    Omopso swarm(problem, config, seed);
    bool more = swarm.initialize();
    if (on_step) on_step(swarm);
    while (more) {
        more = swarm.step();
        if (on_step) on_step(swarm);
    }
    return swarm.take_history();
}

} // namespace cidbench
