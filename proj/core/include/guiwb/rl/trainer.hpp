#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "guiwb/harness/orchestrator.hpp"
#include "guiwb/reward/orm.hpp"
#include "guiwb/rl/learners.hpp"
#include "guiwb/rl/replay.hpp"

namespace guiwb::rl {

enum class RewardSource { Judge, Orm };

std::string_view to_string(RewardSource r) noexcept;
RewardSource reward_source_from_string(std::string_view s);

struct TrainConfig {
  double gamma = 0.9;
  double beta = 0.1;
  double lrPolicy = 0.05;
  double lrCritic = 0.1;
  ConfidenceBand band{std::log(0.05), std::log(0.95)};
  int policyBatch = 8;  // minibatch sizes; one gradient step per minibatch
  int criticBatch = 32;
  int policyEpochs = 3;  // passes over the update batch per iteration
  int criticEpochs = 1;
  int rolloutBudget = 400;
  std::size_t replayCapacity = 2000;
  RewardSource rewardSource = RewardSource::Judge;
  int workers = 1;
  double groundingEpsilon = 0.0;
};

/// Throws ConfigError on out-of-range fields.
void validate(const TrainConfig& c);

struct IterationStats {
  int iteration = 0;
  double sr = 0.0;        // judged success rate of the rollouts
  double rewardSr = 0.0;  // success rate under the configured reward source
  double meanKl = 0.0;
  double policyLoss = 0.0;
  double criticLoss = 0.0;
  std::size_t bufferSize = 0;
  int episodes = 0;
  std::size_t batchSteps = 0;
};

struct IterationResult {
  planner::PolicyParams policy;
  CriticParams critic;
  IterationStats stats;
  std::vector<Trajectory> rollouts;  // in task order
};

/// One online iteration: rolloutBudget episodes over `tasks` (cycled), rewards
/// from the configured source, critic fit on every fresh rollout, then a
/// KL-anchored policy update on fresh successes plus confidence-filtered
/// replay. The pre-iteration policy is the KL reference.
IterationResult train_iteration(const planner::PolicyParams& policy, const CriticParams& critic,
                                const std::vector<harness::TaskInstance>& tasks, const TrainConfig& config,
                                ReplayBuffer& buffer, std::uint64_t seed, int iteration = 0,
                                const reward::OrmParams* orm = nullptr);

/// Relabels a finished rollout under the reward source and reassigns rewards.
void apply_reward_source(Trajectory& t, RewardSource source, const reward::OrmParams* orm);

}  // namespace guiwb::rl
