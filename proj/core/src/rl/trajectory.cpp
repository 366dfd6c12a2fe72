#include "guiwb/rl/trajectory.hpp"

#include <json.hpp>

#include "guiwb/error.hpp"

namespace guiwb::rl {

void assign_rewards(Trajectory& t, bool success) {
  for (auto& s : t.steps) s.reward = -kStepPenalty;
  if (success && !t.steps.empty()) t.steps.back().reward += 1.0;
}

std::vector<double> rewards_of(const Trajectory& t) {
  std::vector<double> r;
  r.reserve(t.steps.size());
  for (const auto& s : t.steps) r.push_back(s.reward);
  return r;
}

std::string trajectory_log_lines(const Trajectory& t) {
  std::string out;
  for (const auto& s : t.steps) {
    nlohmann::ordered_json j;
    j["taskId"] = t.taskId;
    j["stepIndex"] = s.stepIndex;
    j["screenId"] = s.screenId;
    j["actionText"] = dsl::render_action(s.action);
    j["behaviorLogProb"] = s.behaviorLogProb;
    j["reward"] = s.reward;
    j["missedClick"] = s.missedClick;
    j["milestonesBitmask"] = s.milestones;
    out += j.dump();
    out += "\n";
  }
  return out;
}

StepLogRecord parse_step_log_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    StepLogRecord r;
    r.taskId = j.at("taskId").get<std::string>();
    r.stepIndex = j.at("stepIndex").get<int>();
    r.screenId = j.at("screenId").get<int>();
    r.actionText = j.at("actionText").get<std::string>();
    r.behaviorLogProb = j.at("behaviorLogProb").get<double>();
    r.reward = j.at("reward").get<double>();
    r.missedClick = j.at("missedClick").get<bool>();
    r.milestonesBitmask = j.at("milestonesBitmask").get<std::uint32_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("bad trajectory log line: ") + e.what());
  }
}

}  // namespace guiwb::rl
