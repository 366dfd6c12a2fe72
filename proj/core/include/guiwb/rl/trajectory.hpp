#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "guiwb/dsl/action.hpp"
#include "guiwb/planner/policy.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::rl {

inline constexpr double kStepPenalty = 0.01;

struct StepRecord {
  int stepIndex = 0;
  int screenId = 0;
  dsl::Action action;  // as emitted by the planner
  // Candidate features at this state; empty when the planner was not candidate based.
  std::vector<planner::FeatureVector> features;
  std::size_t chosen = 0;
  planner::FeatureVector stateFeatures{};
  double behaviorLogProb = 0.0;
  double reward = 0.0;
  bool missedClick = false;
  std::uint32_t milestones = 0;
};

struct Trajectory {
  std::string taskId;
  std::string instruction;
  int difficulty = 1;
  int maxSteps = 0;
  int milestoneCount = 0;
  std::vector<StepRecord> steps;
  sim::Outcome outcome = sim::Outcome::Fail;        // label under the training reward source
  sim::Outcome judgedOutcome = sim::Outcome::Fail;  // ground-truth judge
  std::int64_t policyVersion = 0;
  bool expert = false;
  bool finished = false;
  bool transportFailure = false;
  std::optional<std::string> answer;
  int screensInWorld = 0;
  std::vector<int> visitedScreens;  // distinct, ascending
  bool finalScreenHasFlag = false;
  std::uint32_t finalMilestones = 0;
  std::uint64_t seed = 0;
  int attempt = 1;
};

/// Per-step -0.01 shaping plus +1 on the last step when `success`.
void assign_rewards(Trajectory& t, bool success);

std::vector<double> rewards_of(const Trajectory& t);

/// One JSON object per step: taskId, stepIndex, screenId, actionText,
/// behaviorLogProb, reward, missedClick, milestonesBitmask.
std::string trajectory_log_lines(const Trajectory& t);

struct StepLogRecord {
  std::string taskId;
  int stepIndex = 0;
  int screenId = 0;
  std::string actionText;
  double behaviorLogProb = 0.0;
  double reward = 0.0;
  bool missedClick = false;
  std::uint32_t milestonesBitmask = 0;
};

StepLogRecord parse_step_log_line(std::string_view line);

}  // namespace guiwb::rl
