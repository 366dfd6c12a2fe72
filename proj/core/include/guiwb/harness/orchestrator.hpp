#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "guiwb/harness/episode.hpp"

namespace guiwb::harness {

/// A regenerated world with its task.
struct TaskInstance {
  sim::World world;
  sim::TaskSpec task;
};

TaskInstance instantiate(const sim::TemplateParams& t);

struct EpisodeJob {
  const sim::World* world = nullptr;
  const sim::TaskSpec* task = nullptr;
  std::uint64_t seed = 0;
  int attempt = 1;
};

/// Runs every job on K worker threads. Each worker owns its environment; the
/// decision function is shared read-only. Results come back in job order, so
/// the output does not depend on K or on completion order.
std::vector<rl::Trajectory> run_jobs(const std::vector<EpisodeJob>& jobs, const DecisionFn& decide,
                                     const EpisodeSettings& base, int workers);

/// Calls fn(i) for i in [0, n) on K threads; fn must only write its own slot.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace guiwb::harness
