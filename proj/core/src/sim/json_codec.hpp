#pragma once

// nlohmann-based encoders shared by the serializers; not part of the installed API.

#include <json.hpp>

#include "guiwb/sim/environment.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::sim::codec {

using Json = nlohmann::ordered_json;

Json to_json(const Element& e);
Element element_from(const nlohmann::json& j);
Json to_json(const World& w);
World world_from(const nlohmann::json& j);
Json to_json(const TaskSpec& t);
TaskSpec task_from(const nlohmann::json& j);
Json to_json(const Observation& o);
Observation observation_from(const nlohmann::json& j);
Json to_json(const JudgeState& s);
JudgeState judge_from(const nlohmann::json& j);

}  // namespace guiwb::sim::codec
