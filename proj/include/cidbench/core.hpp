#pragma once

// Problem model shared by every other part of the library: search spaces,
// fitness vectors, threshold oracles, Pareto dominance and the evaluation log.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cidbench {

/// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by Evaluator once the evaluation budget is used up. Run loops catch
/// it to stop cleanly.
class BudgetExhausted : public std::runtime_error {
  public:
    BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

inline void require(bool condition, const char *message) {
    if (!condition) {
        throw ContractViolation(message);
    }
}

using TestInput = std::vector<double>;
using FitnessVector = std::vector<double>;

struct Bounds {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }

    bool operator==(const Bounds &) const = default;
};

class SearchSpace {
  public:
    explicit SearchSpace(std::vector<Bounds> bounds) : bounds_(std::move(bounds)) {
        require(!bounds_.empty(), "search space needs at least one dimension");
        for (const auto &b : bounds_) {
            require(b.lo < b.hi, "search space bounds need lo < hi");
        }
    }

    /// The unit hypercube [0,1]^dims.
    static SearchSpace unit(std::size_t dims) {
        return SearchSpace(std::vector<Bounds>(dims, Bounds{0.0, 1.0}));
    }

    std::size_t dims() const { return bounds_.size(); }
    const Bounds &operator[](std::size_t i) const { return bounds_[i]; }
    const std::vector<Bounds> &bounds() const { return bounds_; }

    bool contains(std::span<const double> x) const {
        if (x.size() != bounds_.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] >= bounds_[i].lo && x[i] <= bounds_[i].hi)) {
                return false;
            }
        }
        return true;
    }

    TestInput center() const {
        TestInput c(dims());
        for (std::size_t i = 0; i < dims(); ++i) {
            c[i] = 0.5 * (bounds_[i].lo + bounds_[i].hi);
        }
        return c;
    }

    double diagonal() const;

    bool operator==(const SearchSpace &) const = default;

  private:
    std::vector<Bounds> bounds_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

inline double SearchSpace::diagonal() const {
    double s = 0.0;
    for (const auto &b : bounds_) {
        s += b.width() * b.width();
    }
    return std::sqrt(s);
}

/// Pareto dominance under minimization.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "dominates: fitness vectors differ in length");
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return false;
        }
        if (a[i] < b[i]) {
            strictly_better = true;
        }
    }
    return strictly_better;
}

enum class OracleVariant { Large, Medium, Small, Custom };

inline const char *to_string(OracleVariant v) {
    switch (v) {
    case OracleVariant::Large:
        return "Large";
    case OracleVariant::Medium:
        return "Medium";
    case OracleVariant::Small:
        return "Small";
    case OracleVariant::Custom:
        return "Custom";
    }
    return "?";
}

inline std::optional<OracleVariant> parse_variant(const std::string &s) {
    if (s == "Large") return OracleVariant::Large;
    if (s == "Medium") return OracleVariant::Medium;
    if (s == "Small") return OracleVariant::Small;
    if (s == "Custom") return OracleVariant::Custom;
    return std::nullopt;
}

/// One `f[objective] < threshold` comparison.
struct OracleClause {
    std::size_t objective = 0;
    double threshold = 0.0;
};

/// Conjunction of strict less-than clauses; true means the test failed.
struct OracleSpec {
    std::vector<OracleClause> clauses;
    OracleVariant variant = OracleVariant::Custom;
};

inline bool oracle_eval(const OracleSpec &oracle, std::span<const double> f) {
    require(!oracle.clauses.empty(), "oracle needs at least one clause");
    bool failed = true;
    for (const auto &c : oracle.clauses) {
        require(c.objective < f.size(), "oracle clause refers to a missing objective");
        failed = failed && (f[c.objective] < c.threshold);
    }
    return failed;
}

using FitnessFunction = std::function<FitnessVector(std::span<const double>)>;

/// A search space, a pure fitness function and the oracle deciding failure.
struct ProblemDefinition {
    std::string name;
    SearchSpace space;
    std::size_t objective_count = 0;
    FitnessFunction fitness;
    OracleSpec oracle;

    FitnessVector evaluate_fitness(std::span<const double> x) const {
        FitnessVector f = fitness(x);
        require(f.size() == objective_count, "fitness function returned the wrong objective count");
        return f;
    }

    bool fails(std::span<const double> x) const { return oracle_eval(oracle, evaluate_fitness(x)); }
};

struct Evaluation {
    std::size_t index = 0;
    TestInput input;
    FitnessVector fitness;
    bool failed = false;
    std::size_t generation = 0;
    /// Distance to the novelty archive at evaluation time (NSGA-II-D only).
    std::optional<double> novelty;
};

struct RunHistory {
    std::string algorithm_name;
    std::string problem_name;
    std::string oracle_label;
    std::uint64_t seed = 0;
    std::vector<Evaluation> evaluations;
};

/// Budgeted fitness evaluation that appends every call to a RunHistory.
class Evaluator {
  public:
    Evaluator(const ProblemDefinition &problem, std::size_t budget, RunHistory &history)
        : problem_(&problem), budget_(budget), history_(&history) {}

    std::size_t used() const { return history_->evaluations.size(); }
    std::size_t budget() const { return budget_; }
    std::size_t remaining() const { return budget_ - used(); }
    bool exhausted() const { return used() >= budget_; }
    const ProblemDefinition &problem() const { return *problem_; }

    const Evaluation &evaluate(const TestInput &x, std::size_t generation,
                               std::optional<double> novelty = std::nullopt) {
        require(problem_->space.contains(x), "evaluate: input outside the search space");
        if (exhausted()) {
            throw BudgetExhausted();
        }
        Evaluation e;
        e.index = used();
        e.input = x;
        e.fitness = problem_->evaluate_fitness(x);
        e.failed = oracle_eval(problem_->oracle, e.fitness);
        e.generation = generation;
        e.novelty = novelty;
        history_->evaluations.push_back(std::move(e));
        return history_->evaluations.back();
    }

  private:
    const ProblemDefinition *problem_;
    std::size_t budget_;
    RunHistory *history_;
};

inline RunHistory make_history(std::string algorithm, const ProblemDefinition &problem, std::uint64_t seed) {
    RunHistory h;
    h.algorithm_name = std::move(algorithm);
    h.problem_name = problem.name;
    h.oracle_label = to_string(problem.oracle.variant);
    h.seed = seed;
    return h;
}

} // namespace cidbench
