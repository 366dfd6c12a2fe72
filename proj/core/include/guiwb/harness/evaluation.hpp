#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "guiwb/harness/episode.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::harness {

enum class PlannerKind { Softmax, Oracle, ScriptedNoisy };

std::string_view to_string(PlannerKind k) noexcept;
PlannerKind planner_kind_from_string(std::string_view s);

struct RunConfig {
  std::uint64_t masterSeed = 0;
  int workers = 1;
  std::vector<sim::TemplateParams> suite;
  planner::PolicyParams policy;  // used by the softmax planner
  double groundingEpsilon = 0.0;
  PlannerKind plannerKind = PlannerKind::Softmax;
  double noiseP = 0.0;  // scripted-noisy planner only
  InterfaceMode interfaceMode = InterfaceMode::Intermediate;
  bool perturbLayout = false;
  int maxShift = 120;
};

/// Seed of one episode: depends only on (masterSeed, taskId, attempt).
std::uint64_t episode_seed(std::uint64_t masterSeed, std::string_view taskId, int attempt);

struct EpisodeResult {
  std::string taskId;
  int attempt = 1;
  sim::Outcome outcome = sim::Outcome::Fail;
  int steps = 0;
  double totalReward = 0.0;
  std::uint64_t seedUsed = 0;
  int difficulty = 1;
  bool transportFailure = false;
  bool operator==(const EpisodeResult&) const = default;
};

EpisodeResult to_result(const rl::Trajectory& t);

struct DifficultyMetrics {
  int tasks = 0;
  int successes = 0;  // attempt 1
  double sr = 0.0;
  bool operator==(const DifficultyMetrics&) const = default;
};

struct MetricsReport {
  std::string method;
  double sr = 0.0;
  double passAt2 = 0.0;
  double partialRate = 0.0;
  double failRate = 0.0;
  std::map<int, DifficultyMetrics> perDifficulty;
  int tasks = 0;     // suite size
  int episodes = 0;  // episodes executed, reruns included
  std::vector<EpisodeResult> results;  // attempt-1 rows in suite order, then reruns
  bool operator==(const MetricsReport&) const = default;
};

/// Success / Partial / Fail of a final judge state.
sim::Outcome classify(const sim::JudgeState& judge, int milestoneCount);

/// Metrics from an episode log. Rates count attempt-1 rows; a task counts
/// toward passAt2 when any of its attempts succeeded.
MetricsReport aggregate(const std::vector<EpisodeResult>& results, std::string method = {});

DecisionFn make_planner(const RunConfig& cfg);

struct SuiteRun {
  MetricsReport report;
  std::vector<rl::Trajectory> trajectories;  // same order as report.results
};

/// Attempt 1 on every task. Throws ConfigError on an empty suite or bad knobs.
SuiteRun run_suite_detailed(const RunConfig& cfg);
MetricsReport run_suite(const RunConfig& cfg);

/// Attempt 1 on every task, then attempt 2 on the attempt-1 non-successes.
SuiteRun pass_at_2_detailed(const RunConfig& cfg);
MetricsReport pass_at_2(const RunConfig& cfg);

struct AblationReport {
  MetricsReport endToEnd;
  MetricsReport intermediate;
  double delta = 0.0;  // SR(intermediate) - SR(end-to-end)
};

/// Same suite and seeds in both interface modes. Requires the scripted-noisy planner.
AblationReport ablation_interface(const RunConfig& cfg);

}  // namespace guiwb::harness
