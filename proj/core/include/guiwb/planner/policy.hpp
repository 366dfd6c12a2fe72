#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "guiwb/dsl/action.hpp"
#include "guiwb/random.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::planner {

inline constexpr std::size_t kFeatures = 16;

/// Frozen feature index map.
namespace feature {
inline constexpr std::size_t kLabelOverlap = 0;  // instruction/label token Jaccard
inline constexpr std::size_t kRoleBegin = 1;     // [1..6] role one-hots, sim::Role order
inline constexpr std::size_t kTopHalf = 7;
inline constexpr std::size_t kClick = 8;
inline constexpr std::size_t kInput = 9;
inline constexpr std::size_t kScroll = 10;
inline constexpr std::size_t kBack = 11;
inline constexpr std::size_t kFinish = 12;
inline constexpr std::size_t kProgress = 13;  // stepIndex / maxSteps
inline constexpr std::size_t kRepeat = 14;
inline constexpr std::size_t kBias = 15;
}  // namespace feature

using FeatureVector = std::array<double, kFeatures>;

struct PolicyParams {
  FeatureVector w{};
  std::int64_t version = 0;
  double temperature = 1.0;
  bool operator==(const PolicyParams&) const = default;
};

/// Everything the planner sees at one decision point.
struct PlannerContext {
  const sim::Observation& obs;
  std::string_view instruction;
  std::span<const dsl::Action> history;  // actions already taken this episode
};

struct Candidate {
  dsl::Action action;
  FeatureVector phi{};
};

/// Instruction tokens used for label overlap: template verbs and articles dropped.
std::set<std::string> instruction_tokens(std::string_view instruction);

/// Double-quoted payload of the instruction, else its last content token.
std::string input_payload(std::string_view instruction);

/// Candidate actions in deterministic order with their feature vectors.
std::vector<Candidate> enumerate_candidates(const PlannerContext& ctx);
std::vector<dsl::Action> candidates(const PlannerContext& ctx);

/// Critic state features: candidate features averaged, action-kind slots
/// zeroed, progress and bias set.
FeatureVector state_features(std::span<const Candidate> cands, const sim::Observation& obs);
FeatureVector state_features(std::span<const FeatureVector> phis, const sim::Observation& obs);

double dot(const FeatureVector& a, const FeatureVector& b) noexcept;

/// softmax(w.phi / temperature) over the candidate features.
std::vector<double> softmax_probs(const PolicyParams& p, std::span<const FeatureVector> phis);
std::vector<double> log_softmax(const PolicyParams& p, std::span<const FeatureVector> phis);

/// d/dw log pi(chosen) = (phi_chosen - E_pi[phi]) / temperature.
FeatureVector grad_log_prob(const PolicyParams& p, std::span<const FeatureVector> phis, std::size_t chosen);

struct ActResult {
  dsl::Action action;
  std::size_t index = 0;
  double logProb = 0.0;
  std::vector<std::pair<dsl::Action, double>> dist;
  std::vector<FeatureVector> features;
};

ActResult act(const PolicyParams& p, const PlannerContext& ctx, Rng& rng);

/// Log-probability of an action; throws NotACandidate if it is not enumerated.
double log_prob(const PolicyParams& p, const PlannerContext& ctx, const dsl::Action& a);

/// The task's oracle action at a step, in descriptive form. Throws IndexError.
dsl::Action oracle_planner(const sim::TaskSpec& task, int stepIndex);

/// Plain-text context for an external planner: the instruction line, one
/// `[k] role "label" (region)` line per mark, then the last three actions.
std::string serialize_prompt(const PlannerContext& ctx);

using PlannerCallback = std::function<std::string(const std::string& prompt)>;

/// Sends the serialized context to the callback and parses the reply.
dsl::Action external_planner_adapter(const PlannerCallback& callback, const PlannerContext& ctx);

}  // namespace guiwb::planner
