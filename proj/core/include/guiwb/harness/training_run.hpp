#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "guiwb/curriculum/pool.hpp"
#include "guiwb/harness/config.hpp"
#include "guiwb/reward/orm.hpp"

namespace guiwb::harness {

/// Disjoint seed ranges for the generated task families.
inline constexpr std::uint64_t kBcSeedBase = 0;
inline constexpr std::uint64_t kPoolSeedBase = 1'000'000;
inline constexpr std::uint64_t kEvalSeedBase = 2'000'000;
inline constexpr std::uint64_t kOrmSeedBase = 3'000'000;
inline constexpr std::uint64_t kOrmHeldOutSeedBase = 4'000'000;

/// `count` templates with seeds base, base+1, ... and difficulties cycling
/// through [minD, maxD].
std::vector<sim::TemplateParams> make_suite(std::uint64_t base, int count, int minD, int maxD);

/// Expert trajectories for the BC corpus (oracle replays).
std::vector<rl::Trajectory> bc_corpus(int count, int maxDifficulty, int workers, std::uint64_t base = kBcSeedBase);

/// Rollouts from a mix of planners (the given policy and scripted-noisy
/// planners at several noise levels) labelled by the judge.
std::vector<reward::OrmExample> orm_dataset(const planner::PolicyParams& policy, int count, int minD, int maxD,
                                            std::uint64_t base, std::uint64_t masterSeed, int workers);

/// BC warm start from the loop's corpus settings (bcCount, bcMaxDifficulty,
/// bcLr, bcEpochs), starting from zero weights.
planner::PolicyParams train_bc_policy(const ExperimentConfig& cfg);

/// ORM fitted on ormCount mixed-planner rollouts seeded from the given policy.
reward::OrmTrainResult train_orm_model(const planner::PolicyParams& policy, const ExperimentConfig& cfg);

struct IterationRecord {
  rl::IterationStats stats;
  double evalSr = 0.0;
  std::size_t poolSize = 0;
  int candidates = 0;  // mutations proposed this iteration
  int accepted = 0;    // mutations admitted to the pool
};

/// {iteration, SR, meanKL, policyLoss, criticLoss, bufferSize, evalSR, ...}
std::string stats_line(const IterationRecord& r);

struct TrainingRunResult {
  double startEvalSr = 0.0;
  planner::PolicyParams policy;
  rl::CriticParams critic;
  std::vector<IterationRecord> iterations;
  curriculum::Pool pool;
};

/// Self-evolving curriculum RL from `start`. With a non-empty outDir, writes
/// config.json, stats.jsonl, policy_<k>.json, critic_<k>.json,
/// trajectories_<k>.jsonl and pool.jsonl. `orm` is required when the reward
/// source is orm.
TrainingRunResult run_training(const ExperimentConfig& cfg, const planner::PolicyParams& start,
                               const std::string& outDir = {}, const reward::OrmParams* orm = nullptr);

/// SR of a policy on a suite under the run's seeds (attempt 1).
double evaluate_policy(const planner::PolicyParams& p, const std::vector<sim::TemplateParams>& suite,
                       const ExperimentConfig& cfg);

}  // namespace guiwb::harness
