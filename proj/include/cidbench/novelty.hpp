#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "cidbench/core.hpp"

namespace cidbench {

/// Archive of previously found inputs. A candidate is admitted only when it is
/// farther than `threshold` from every member, and admission takes effect
/// immediately, so later candidates in the same batch see it.
class NoveltyArchive {
  public:
    explicit NoveltyArchive(double threshold) : threshold_(threshold) {
        require(threshold > 0.0, "NoveltyArchive: threshold must be positive");
    }

    double threshold() const { return threshold_; }
    const std::vector<TestInput> &members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    /// Distance to the nearest member; +inf for an empty archive.
    double novelty_distance(std::span<const double> candidate) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto &m : members_) {
            best = std::min(best, squared_distance(m, candidate));
        }
        return std::sqrt(best);
    }

    bool insert(const TestInput &candidate) {
        if (!members_.empty() && !(novelty_distance(candidate) > threshold_)) {
            return false;
        }
        members_.push_back(candidate);
        return true;
    }

  private:
    double threshold_;
    std::vector<TestInput> members_;
};

inline bool archive_insert(NoveltyArchive &archive, const TestInput &candidate) { return archive.insert(candidate); }

inline double novelty_distance(const NoveltyArchive &archive, std::span<const double> candidate) {
    return archive.novelty_distance(candidate);
}

} // namespace cidbench
