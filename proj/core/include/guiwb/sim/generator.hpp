#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "guiwb/random.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::sim {

inline constexpr int kMinDifficulty = 1;
inline constexpr int kMaxDifficulty = 12;

/// Non-navigation steps allowed on one screen before the chain must navigate on.
inline constexpr int kMaxStepsPerScreen = 4;

/// Next step kind for a chain, respecting the per-screen cap.
StepKind draw_step_kind(const std::vector<StepKind>& chainSoFar, Rng& rng);

std::vector<StepKind> random_chain(std::uint64_t seed, int difficulty);

/// Deterministic in (seed, difficulty). Throws RangeError outside [1, 12].
std::pair<World, TaskSpec> generate_world(std::uint64_t seed, int difficulty);

/// Deterministic in the template; the task's oracle has one action per chain step.
std::pair<World, TaskSpec> generate_from_template(const TemplateParams& t);

/// Observation of a screen at scroll offset 0 with initial element states.
Observation initial_observation(const World& w, int screenId, int maxSteps);

/// Moves every element by a seeded offset of at most maxShift units on each
/// axis, keeping elements inside the horizontal viewport and off each other.
World perturb_layout(const World& w, std::uint64_t seed, int maxShift = 120);

}  // namespace guiwb::sim
