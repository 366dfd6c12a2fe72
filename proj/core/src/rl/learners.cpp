#include "guiwb/rl/learners.hpp"

#include <cmath>
#include <numeric>

#include "guiwb/error.hpp"
#include "guiwb/random.hpp"

namespace guiwb::rl {

using planner::FeatureVector;
using planner::kFeatures;

double critic_value(const CriticParams& c, const FeatureVector& psi) noexcept { return planner::dot(c.v, psi); }

BcResult bc_train(std::span<const Trajectory> expert, const planner::PolicyParams& p0, double lr, int epochs,
                  std::uint64_t seed) {
  struct Item {
    const std::vector<FeatureVector>* phis;
    std::size_t chosen;
  };
  std::vector<Item> items;
  for (const auto& t : expert) {
    for (const auto& s : t.steps) {
      if (!s.features.empty()) items.push_back({&s.features, s.chosen});
    }
  }
  if (items.empty()) throw Error(ErrorKind::EmptyData, "no expert steps to clone");

  BcResult res{p0, {}};
  Rng rng = make_rng(stable_hash({seed, 0x6263ULL}));
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < epochs; ++epoch) {
    shuffle(order, rng);
    double nll = 0.0;
    for (std::size_t idx : order) {
      const auto& it = items[idx];
      nll -= planner::log_softmax(res.params, *it.phis)[it.chosen];
      const auto g = planner::grad_log_prob(res.params, *it.phis, it.chosen);
      for (std::size_t k = 0; k < kFeatures; ++k) res.params.w[k] += lr * g[k];
    }
    res.lossTrace.push_back(nll / static_cast<double>(items.size()));
  }
  res.params.version = p0.version + 1;
  return res;
}

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size());
  double g = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    g = rewards[i] + gamma * g;
    out[i] = g;
  }
  return out;
}

std::vector<double> compute_returns(const Trajectory& t, double gamma) {
  const auto r = rewards_of(t);
  return compute_returns(std::span<const double>(r), gamma);
}

double critic_loss(const CriticParams& c, std::span<const CriticSample> batch) {
  double s = 0.0;
  for (const auto& b : batch) {
    const double e = critic_value(c, b.psi) - b.ret;
    s += 0.5 * e * e;
  }
  return batch.empty() ? 0.0 : s / static_cast<double>(batch.size());
}

FeatureVector critic_grad(const CriticParams& c, std::span<const CriticSample> batch) {
  FeatureVector g{};
  for (const auto& b : batch) {
    const double e = critic_value(c, b.psi) - b.ret;
    for (std::size_t k = 0; k < kFeatures; ++k) g[k] += e * b.psi[k];
  }
  if (!batch.empty()) {
    for (double& v : g) v /= static_cast<double>(batch.size());
  }
  return g;
}

CriticUpdate critic_update(const CriticParams& c, std::span<const CriticSample> batch, double lr) {
  if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "critic update on an empty batch");
  CriticUpdate u{c, critic_loss(c, batch)};
  const auto g = critic_grad(c, batch);
  for (std::size_t k = 0; k < kFeatures; ++k) u.params.v[k] -= lr * g[k];
  return u;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorKind::SupportMismatch, "distributions over different supports");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (!(q[i] > 0.0)) throw Error(ErrorKind::SupportMismatch, "q vanishes where p does not");
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

namespace {

double advantage(const CriticParams& c, const PolicySample& s) { return s.ret - critic_value(c, s.psi); }

// Exact KL over the candidate set; uses log-probabilities to stay finite.
double kl_from_logs(const std::vector<double>& lp, const std::vector<double>& lq) {
  double s = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) s += std::exp(lp[i]) * (lp[i] - lq[i]);
  return s;
}

}  // namespace

PolicyLoss policy_loss(const planner::PolicyParams& p, const planner::PolicyParams& ref, const CriticParams& c,
                       std::span<const PolicySample> batch, double beta) {
  PolicyLoss out;
  if (batch.empty()) return out;
  for (const auto& s : batch) {
    const auto lp = planner::log_softmax(p, s.phis);
    const auto lq = planner::log_softmax(ref, s.phis);
    const double kl = kl_from_logs(lp, lq);
    out.loss += -advantage(c, s) * lp[s.chosen] + beta * kl;
    out.meanKl += kl;
  }
  out.loss /= static_cast<double>(batch.size());
  out.meanKl /= static_cast<double>(batch.size());
  return out;
}

FeatureVector policy_grad(const planner::PolicyParams& p, const planner::PolicyParams& ref, const CriticParams& c,
                          std::span<const PolicySample> batch, double beta) {
  FeatureVector g{};
  if (batch.empty()) return g;
  for (const auto& s : batch) {
    const double a = advantage(c, s);
    const auto glp = planner::grad_log_prob(p, s.phis, s.chosen);
    for (std::size_t k = 0; k < kFeatures; ++k) g[k] -= a * glp[k];
    if (beta == 0.0) continue;
    // d KL / dw = sum_i p_i (phi_i - mean phi) (log p_i - log q_i) / T
    const auto lp = planner::log_softmax(p, s.phis);
    const auto lq = planner::log_softmax(ref, s.phis);
    FeatureVector mean{};
    for (std::size_t i = 0; i < s.phis.size(); ++i) {
      const double pi = std::exp(lp[i]);
      for (std::size_t k = 0; k < kFeatures; ++k) mean[k] += pi * s.phis[i][k];
    }
    for (std::size_t i = 0; i < s.phis.size(); ++i) {
      const double coef = std::exp(lp[i]) * (lp[i] - lq[i]) / p.temperature;
      for (std::size_t k = 0; k < kFeatures; ++k) g[k] += beta * coef * (s.phis[i][k] - mean[k]);
    }
  }
  for (double& v : g) v /= static_cast<double>(batch.size());
  return g;
}

PolicyUpdate policy_update_kl(const planner::PolicyParams& p, const planner::PolicyParams& ref,
                              const CriticParams& c, std::span<const PolicySample> batch, double beta, double lr) {
  if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "policy update on an empty batch");
  const auto before = policy_loss(p, ref, c, batch, beta);
  PolicyUpdate u{p, before.loss, before.meanKl};
  const auto g = policy_grad(p, ref, c, batch, beta);
  for (std::size_t k = 0; k < kFeatures; ++k) u.params.w[k] -= lr * g[k];
  u.params.version = p.version + 1;
  return u;
}

std::vector<PolicySample> policy_samples(const Trajectory& t, double gamma) {
  const auto returns = compute_returns(t, gamma);
  std::vector<PolicySample> out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (s.features.empty()) continue;
    out.push_back(PolicySample{s.features, s.chosen, s.stateFeatures, returns[i]});
  }
  return out;
}

std::vector<CriticSample> critic_samples(const Trajectory& t, double gamma) {
  const auto returns = compute_returns(t, gamma);
  std::vector<CriticSample> out;
  out.reserve(t.steps.size());
  for (std::size_t i = 0; i < t.steps.size(); ++i) out.push_back(CriticSample{t.steps[i].stateFeatures, returns[i]});
  return out;
}

}  // namespace guiwb::rl
