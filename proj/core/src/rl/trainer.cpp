#include "guiwb/rl/trainer.hpp"

#include "guiwb/error.hpp"

namespace guiwb::rl {

std::string_view to_string(RewardSource r) noexcept { return r == RewardSource::Judge ? "judge" : "orm"; }

RewardSource reward_source_from_string(std::string_view s) {
  if (s == "judge") return RewardSource::Judge;
  if (s == "orm") return RewardSource::Orm;
  throw Error(ErrorKind::Config, "unknown reward source '" + std::string(s) + "'");
}

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  if (!(c.beta >= 0.0)) fail("beta must be >= 0");
  if (!(c.band.lo < c.band.hi)) fail("confidence band needs cLo < cHi");
  if (c.lrPolicy < 0.0 || c.lrCritic < 0.0) fail("learning rates must be >= 0");
  if (c.policyBatch < 1 || c.criticBatch < 1) fail("batch sizes must be >= 1");
  if (c.policyEpochs < 0 || c.criticEpochs < 0 || c.rolloutBudget < 0) fail("epochs and budget must be >= 0");
  if (c.workers < 1) fail("workers must be >= 1");
}

namespace {

// Shuffles `items` in place and hands out consecutive slices of size `batch`.
template <typename T, typename Fn>
void for_each_minibatch(std::vector<T>& items, int batch, Rng& rng, Fn fn) {
  shuffle(items, rng);
  const auto b = static_cast<std::size_t>(batch);
  for (std::size_t i = 0; i < items.size(); i += b) {
    fn(std::span<const T>(items.data() + i, std::min(b, items.size() - i)));
  }
}

}  // namespace

void apply_reward_source(Trajectory& t, RewardSource source, const reward::OrmParams* orm) {
  if (source == RewardSource::Orm) {
    static const reward::OrmParams untrained{};
    const bool ok = reward::orm_verdict(orm ? *orm : untrained, t);
    t.outcome = ok ? sim::Outcome::Success : sim::Outcome::Fail;
  } else {
    t.outcome = t.judgedOutcome;
  }
  assign_rewards(t, t.outcome == sim::Outcome::Success);
}

IterationResult train_iteration(const planner::PolicyParams& policy, const CriticParams& critic,
                                const std::vector<harness::TaskInstance>& tasks, const TrainConfig& config,
                                ReplayBuffer& buffer, std::uint64_t seed, int iteration,
                                const reward::OrmParams* orm) {
  validate(config);
  IterationResult res{policy, critic, {}, {}};
  res.stats.iteration = iteration;
  res.stats.bufferSize = buffer.size();
  if (config.rolloutBudget == 0) return res;
  if (tasks.empty()) throw Error(ErrorKind::Config, "train_iteration needs at least one task");

  std::vector<harness::EpisodeJob> jobs;
  jobs.reserve(static_cast<std::size_t>(config.rolloutBudget));
  for (int j = 0; j < config.rolloutBudget; ++j) {
    const auto& ti = tasks[static_cast<std::size_t>(j) % tasks.size()];
    jobs.push_back({&ti.world, &ti.task,
                    stable_hash({seed, static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(j)}), 1});
  }
  harness::EpisodeSettings settings;
  settings.groundingEpsilon = config.groundingEpsilon;
  res.rollouts = harness::run_jobs(jobs, harness::softmax_planner(policy), settings, config.workers);

  int judged = 0;
  int rewarded = 0;
  for (auto& t : res.rollouts) {
    t.policyVersion = policy.version;
    apply_reward_source(t, config.rewardSource, orm);
    judged += t.judgedOutcome == sim::Outcome::Success;
    rewarded += t.outcome == sim::Outcome::Success;
  }
  const double n = static_cast<double>(res.rollouts.size());
  res.stats.episodes = static_cast<int>(res.rollouts.size());
  res.stats.sr = judged / n;
  res.stats.rewardSr = rewarded / n;

  // Critic: every fresh rollout.
  std::vector<CriticSample> cbatch;
  for (const auto& t : res.rollouts) {
    auto cs = critic_samples(t, config.gamma);
    cbatch.insert(cbatch.end(), cs.begin(), cs.end());
  }
  Rng rng = make_rng(stable_hash({seed, static_cast<std::uint64_t>(iteration), 0x7472ULL}));
  if (!cbatch.empty()) {
    for (int e = 0; e < config.criticEpochs; ++e) {
      for_each_minibatch(cbatch, config.criticBatch, rng, [&](std::span<const CriticSample> mb) {
        res.critic = critic_update(res.critic, mb, config.lrCritic).params;
      });
    }
    res.stats.criticLoss = critic_loss(res.critic, cbatch);
  }

  // Policy: fresh successes plus replayed experience in the confidence band.
  std::vector<PolicySample> pbatch;
  auto add = [&](const Trajectory& t) {
    auto ps = policy_samples(t, config.gamma);
    pbatch.insert(pbatch.end(), ps.begin(), ps.end());
  };
  for (const auto& t : replay_filter(buffer, policy, config.band)) add(t);
  for (const auto& t : res.rollouts) {
    if (t.outcome == sim::Outcome::Success) add(t);
  }
  for (const auto& t : res.rollouts) buffer.push(t, policy);
  res.stats.bufferSize = buffer.size();
  res.stats.batchSteps = pbatch.size();

  if (!pbatch.empty()) {
    const planner::PolicyParams ref = policy;
    for (int e = 0; e < config.policyEpochs; ++e) {
      for_each_minibatch(pbatch, config.policyBatch, rng, [&](std::span<const PolicySample> mb) {
        res.policy = policy_update_kl(res.policy, ref, res.critic, mb, config.beta, config.lrPolicy).params;
      });
    }
    const auto after = policy_loss(res.policy, ref, res.critic, pbatch, config.beta);
    res.stats.policyLoss = after.loss;
    res.stats.meanKl = after.meanKl;
  }
  buffer.refresh(res.policy);
  return res;
}

}  // namespace guiwb::rl
