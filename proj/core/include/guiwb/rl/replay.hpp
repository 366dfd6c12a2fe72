#pragma once

#include <deque>
#include <limits>
#include <vector>

#include "guiwb/planner/policy.hpp"
#include "guiwb/rl/trajectory.hpp"

namespace guiwb::rl {

/// Per-step mean log-probability of the trajectory's actions under p, over
/// the steps that carry candidate features. 0 for a trajectory with none.
double mean_log_prob(const Trajectory& t, const planner::PolicyParams& p);

struct ReplayItem {
  Trajectory traj;
  double cachedMeanLogProb = 0.0;  // under the policy current at the last refresh
};

/// FIFO buffer of successful trajectories.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 2000) : capacity_(capacity) {}

  /// Admits Success trajectories only; returns whether t was stored.
  bool push(Trajectory t, const planner::PolicyParams& p);

  void refresh(const planner::PolicyParams& p);

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const std::deque<ReplayItem>& items() const noexcept { return items_; }

 private:
  std::size_t capacity_;
  std::deque<ReplayItem> items_;
};

struct ConfidenceBand {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// Stored trajectories whose mean log-prob under p lies in [lo, hi].
std::vector<Trajectory> replay_filter(const ReplayBuffer& buf, const planner::PolicyParams& p, ConfidenceBand band);

}  // namespace guiwb::rl
