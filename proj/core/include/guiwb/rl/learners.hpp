#pragma once

#include <span>
#include <vector>

#include "guiwb/planner/policy.hpp"
#include "guiwb/rl/trajectory.hpp"

namespace guiwb::rl {

struct CriticParams {
  planner::FeatureVector v{};
  bool operator==(const CriticParams&) const = default;
};

double critic_value(const CriticParams& c, const planner::FeatureVector& psi) noexcept;

struct BcResult {
  planner::PolicyParams params;
  std::vector<double> lossTrace;  // mean negative log-likelihood per epoch
};

/// SGD on -log pi(a_expert | s) over the shuffled expert steps. Throws EmptyData.
BcResult bc_train(std::span<const Trajectory> expert, const planner::PolicyParams& p0, double lr, int epochs,
                  std::uint64_t seed = 0);

/// G_t = r_t + gamma * G_{t+1}.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);
std::vector<double> compute_returns(const Trajectory& t, double gamma);

struct CriticSample {
  planner::FeatureVector psi{};
  double ret = 0.0;
};

struct CriticUpdate {
  CriticParams params;
  double loss = 0.0;  // batch loss before the step
};

/// Mean of 1/2 (v.psi - G)^2.
double critic_loss(const CriticParams& c, std::span<const CriticSample> batch);
planner::FeatureVector critic_grad(const CriticParams& c, std::span<const CriticSample> batch);

/// One gradient step. Throws EmptyBatch.
CriticUpdate critic_update(const CriticParams& c, std::span<const CriticSample> batch, double lr);

/// Sum p_i ln(p_i / q_i) with 0 ln 0 = 0. Throws SupportMismatch when the
/// sizes differ or q vanishes where p does not.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// One decision point of the policy batch.
struct PolicySample {
  std::vector<planner::FeatureVector> phis;
  std::size_t chosen = 0;
  planner::FeatureVector psi{};
  double ret = 0.0;
};

struct PolicyLoss {
  double loss = 0.0;
  double meanKl = 0.0;
};

/// Mean over samples of -A log pi(a|s) + beta KL(pi(.|s) || ref(.|s)),
/// with A = G - v.psi held fixed.
PolicyLoss policy_loss(const planner::PolicyParams& p, const planner::PolicyParams& ref, const CriticParams& c,
                       std::span<const PolicySample> batch, double beta);
planner::FeatureVector policy_grad(const planner::PolicyParams& p, const planner::PolicyParams& ref,
                                   const CriticParams& c, std::span<const PolicySample> batch, double beta);

struct PolicyUpdate {
  planner::PolicyParams params;
  double loss = 0.0;
  double meanKl = 0.0;
};

/// One gradient step; the version is incremented. Throws EmptyBatch.
PolicyUpdate policy_update_kl(const planner::PolicyParams& p, const planner::PolicyParams& ref, const CriticParams& c,
                              std::span<const PolicySample> batch, double beta, double lr);

/// Decision points of a trajectory with their discounted returns; steps the
/// planner took outside the candidate set are skipped.
std::vector<PolicySample> policy_samples(const Trajectory& t, double gamma);
std::vector<CriticSample> critic_samples(const Trajectory& t, double gamma);

}  // namespace guiwb::rl
