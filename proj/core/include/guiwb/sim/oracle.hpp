#pragma once

#include "guiwb/rl/trajectory.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::sim {

/// Replays the task's oracle through the grounder and environment and returns
/// the expert trajectory. Throws OracleBroken unless the replay is a Success
/// of exactly `difficulty` steps with every oracle action among the planner's
/// candidates.
rl::Trajectory oracle_rollout(const World& world, const TaskSpec& task);

}  // namespace guiwb::sim
