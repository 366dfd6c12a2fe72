#include "guiwb/rl/replay.hpp"

namespace guiwb::rl {

double mean_log_prob(const Trajectory& t, const planner::PolicyParams& p) {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : t.steps) {
    if (s.features.empty()) continue;
    sum += planner::log_softmax(p, s.features)[s.chosen];
    ++n;
  }
  return n ? sum / n : 0.0;
}

bool ReplayBuffer::push(Trajectory t, const planner::PolicyParams& p) {
  if (t.outcome != sim::Outcome::Success || capacity_ == 0) return false;
  const double m = mean_log_prob(t, p);
  items_.push_back(ReplayItem{std::move(t), m});
  while (items_.size() > capacity_) items_.pop_front();
  return true;
}

void ReplayBuffer::refresh(const planner::PolicyParams& p) {
  for (auto& it : items_) it.cachedMeanLogProb = mean_log_prob(it.traj, p);
}

std::vector<Trajectory> replay_filter(const ReplayBuffer& buf, const planner::PolicyParams& p, ConfidenceBand band) {
  std::vector<Trajectory> out;
  for (const auto& it : buf.items()) {
    const double m = mean_log_prob(it.traj, p);
    if (m >= band.lo && m <= band.hi) out.push_back(it.traj);
  }
  return out;
}

}  // namespace guiwb::rl
