#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

#include "guiwb/planner/policy.hpp"
#include "guiwb/rl/trajectory.hpp"
#include "guiwb/sim/environment.hpp"

namespace guiwb::harness {

enum class InterfaceMode { Intermediate, EndToEnd };

std::string_view to_string(InterfaceMode m) noexcept;
InterfaceMode interface_mode_from_string(std::string_view s);

struct EpisodeSettings {
  std::uint64_t seed = 0;
  double groundingEpsilon = 0.0;
  InterfaceMode mode = InterfaceMode::Intermediate;
  bool perturbLayout = false;
  int maxShift = 120;
};

struct Decision {
  dsl::Action action;
  std::vector<planner::FeatureVector> features;
  std::size_t chosen = 0;
  double logProb = 0.0;
};

/// A planner as seen by the episode loop. The judge state is passed so
/// scripted planners can follow progress; learned planners ignore it.
using DecisionFn =
    std::function<Decision(const planner::PlannerContext&, const sim::TaskSpec&, const sim::JudgeState&, Rng&)>;

DecisionFn softmax_planner(const planner::PolicyParams& params);

/// Replays task.oracle step by step.
DecisionFn oracle_replay_planner();

/// Follows the oracle from the current judge progress (backing out of wrong
/// screens) and picks a uniformly random candidate with probability p.
DecisionFn scripted_noisy_planner(double p);

/// Where episode steps execute: an in-process environment or a remote worker.
class EpisodeBackend {
 public:
  virtual ~EpisodeBackend() = default;
  virtual sim::Observation reset(const sim::World& world, const sim::TaskSpec& task, std::uint64_t seed) = 0;
  virtual sim::StepResult step(const dsl::Action& grounded) = 0;
  virtual sim::StepResult skip_step() = 0;
  virtual bool screen_has_flag_element() const = 0;
};

class LocalBackend final : public EpisodeBackend {
 public:
  sim::Observation reset(const sim::World& world, const sim::TaskSpec& task, std::uint64_t seed) override;
  sim::StepResult step(const dsl::Action& grounded) override { return env_.step(grounded); }
  sim::StepResult skip_step() override { return env_.skip_step(); }
  bool screen_has_flag_element() const override { return env_.screen_has_flag_element(); }

 private:
  sim::Environment env_;
};

/// Raised by a backend whose transport went away mid-episode.
struct TransportLost {};

/// Runs one episode to termination. Descriptive actions are resolved by the
/// grounder: against the live layout in intermediate mode, against the
/// unperturbed layout in end-to-end mode.
rl::Trajectory run_episode(const sim::World& world, const sim::TaskSpec& task, const DecisionFn& decide,
                           const EpisodeSettings& settings);

/// Same loop on an arbitrary backend. A TransportLost from the backend ends
/// the episode as a Fail with transportFailure set.
rl::Trajectory run_episode(EpisodeBackend& backend, const sim::World& world, const sim::TaskSpec& task,
                           const DecisionFn& decide, const EpisodeSettings& settings);

}  // namespace guiwb::harness
