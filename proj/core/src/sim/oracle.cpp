#include "guiwb/sim/oracle.hpp"

#include "guiwb/error.hpp"
#include "guiwb/harness/episode.hpp"

namespace guiwb::sim {

rl::Trajectory oracle_rollout(const World& world, const TaskSpec& task) {
  rl::Trajectory t;
  try {
    harness::EpisodeSettings settings;
    settings.seed = stable_hash(task.id);
    t = harness::run_episode(world, task, harness::oracle_replay_planner(), settings);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Index) throw;
    throw Error(ErrorKind::OracleBroken, task.id + ": oracle exhausted before the task was solved");
  }
  if (t.judgedOutcome != Outcome::Success) {
    throw Error(ErrorKind::OracleBroken, task.id + ": oracle replay judged " + std::string(to_string(t.judgedOutcome)));
  }
  if (static_cast<int>(t.steps.size()) != task.difficulty) {
    throw Error(ErrorKind::OracleBroken, task.id + ": oracle replay length differs from difficulty");
  }
  for (const auto& s : t.steps) {
    if (s.features.empty()) throw Error(ErrorKind::OracleBroken, task.id + ": oracle action is not a planner candidate");
  }
  t.expert = true;
  return t;
}

}  // namespace guiwb::sim
