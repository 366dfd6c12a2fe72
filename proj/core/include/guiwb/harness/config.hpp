#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "guiwb/curriculum/pool.hpp"
#include "guiwb/harness/evaluation.hpp"
#include "guiwb/rl/trainer.hpp"

namespace guiwb::harness {

/// Knobs of the curriculum training loop itself.
struct LoopOptions {
  int iterations = 6;
  int seedTasks = 600;  // seed records in the initial pool
  int evalTasks = 600;  // held-out suite size
  int minDifficulty = 1;
  int maxDifficulty = 6;
  bool criticFilter = true;
  int bcCount = 1000;
  int bcMaxDifficulty = 2;
  double bcLr = 0.1;
  int bcEpochs = 2;
  int ormCount = 2000;  // rollouts used to fit the ORM when rewardSource is orm
  double ormLr = 0.5;
  int ormEpochs = 2000;
};

struct ExperimentConfig {
  rl::TrainConfig train;
  curriculum::CurriculumConfig curriculum;
  RunConfig run;  // suite and policy are supplied separately
  LoopOptions loop;
};

/// Parses a flat JSON object; every key is optional, unknown keys and
/// out-of-range values throw ConfigError.
ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

void validate(const ExperimentConfig& c);

}  // namespace guiwb::harness
