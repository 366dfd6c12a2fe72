#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "guiwb/sim/world.hpp"

namespace guiwb::sim {

/// One JSON object {"world":{...},"task":{...}} without a trailing newline.
/// Actions are stored in canonical DSL text.
std::string world_task_line(const World& w, const TaskSpec& t);

/// Inverse of world_task_line. Throws ConfigError on malformed input.
std::pair<World, TaskSpec> parse_world_task_line(std::string_view line);

std::string observation_json(const Observation& o);
Observation parse_observation_json(std::string_view text);

}  // namespace guiwb::sim
