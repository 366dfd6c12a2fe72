#include <doctest.h>

#include <cmath>
#include <functional>

#include "guiwb/error.hpp"
#include "guiwb/harness/orchestrator.hpp"
#include "guiwb/harness/training_run.hpp"
#include "guiwb/rl/learners.hpp"
#include "guiwb/rl/replay.hpp"
#include "guiwb/rl/trainer.hpp"

using namespace guiwb;
using namespace guiwb::rl;
using planner::FeatureVector;
using planner::kFeatures;
using planner::PolicyParams;

namespace {

ErrorKind error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected guiwb::Error");
  return ErrorKind::Config;
}

FeatureVector random_vec(Rng& rng, double scale = 1.0) {
  FeatureVector v{};
  for (auto& x : v) x = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

PolicySample random_sample(Rng& rng) {
  PolicySample s;
  const int n = 2 + static_cast<int>(uniform_int(rng, 0, 5));
  for (int i = 0; i < n; ++i) s.phis.push_back(random_vec(rng));
  s.chosen = static_cast<std::size_t>(uniform_int(rng, 0, n - 1));
  s.psi = random_vec(rng);
  s.ret = 2.0 * uniform01(rng) - 1.0;
  return s;
}

std::vector<double> random_dist(Rng& rng, std::size_t n) {
  std::vector<double> d(n);
  double s = 0.0;
  for (auto& x : d) s += (x = uniform01(rng) + 1e-3);
  for (auto& x : d) x /= s;
  return d;
}

double norm_diff(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatures; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Two-candidate step whose first candidate has probability `prob` under w = e0.
StepRecord step_with_prob(double prob) {
  StepRecord s;
  FeatureVector a{}, b{};
  a[0] = std::log(prob / (1.0 - prob));
  s.features = {a, b};
  s.chosen = 0;
  s.action = dsl::Back{};
  return s;
}

Trajectory success_traj(std::vector<double> probs, std::string id = "t") {
  Trajectory t;
  t.taskId = std::move(id);
  t.finished = true;
  t.maxSteps = 10;
  for (double p : probs) t.steps.push_back(step_with_prob(p));
  t.outcome = t.judgedOutcome = sim::Outcome::Success;
  assign_rewards(t, true);
  return t;
}

PolicyParams unit_policy() {
  PolicyParams p;
  p.w[0] = 1.0;
  return p;
}

}  // namespace

TEST_CASE("compute_returns: worked examples") {
  const std::vector<double> r{0, 0, 1};
  const auto g = compute_returns(r, 0.9);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(0.81).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> one{1};
  CHECK(compute_returns(one, 1.0) == std::vector<double>{1.0});

  const std::vector<double> zeros(5, 0.0);
  CHECK(compute_returns(zeros, 0.9) == zeros);
}

TEST_CASE("compute_returns: matches a forward discounted sum") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(uniform_int(rng, 0, 15));
    const double gamma = 0.05 + 0.95 * uniform01(rng);
    std::vector<double> r(n);
    for (auto& x : r) x = uniform01(rng) - 0.5;
    const auto g = compute_returns(r, gamma);
    for (int t = 0; t < n; ++t) {
      double s = 0.0, d = 1.0;
      for (int k = t; k < n; ++k, d *= gamma) s += d * r[k];
      CHECK(g[t] == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("rewards: terminal +1 on success and per-step shaping") {
  auto t = success_traj({0.5, 0.5, 0.5});
  CHECK(rewards_of(t) == std::vector<double>{-0.01, -0.01, 0.99});
  assign_rewards(t, false);
  CHECK(rewards_of(t) == std::vector<double>{-0.01, -0.01, -0.01});
}

TEST_CASE("critic_update: fixed point, hand step, descent, empty batch") {
  Rng rng = make_rng(3);
  CriticParams c{random_vec(rng)};

  std::vector<CriticSample> fixed;
  for (int i = 0; i < 5; ++i) {
    CriticSample s{random_vec(rng), 0.0};
    s.ret = planner::dot(c.v, s.psi);
    fixed.push_back(s);
  }
  const auto same = critic_update(c, fixed, 0.1);
  for (std::size_t i = 0; i < kFeatures; ++i) CHECK(same.params.v[i] == doctest::Approx(c.v[i]).epsilon(1e-14));
  CHECK(same.loss == doctest::Approx(0.0));

  // v' = v - lr (v.psi - G) psi
  FeatureVector v{}, psi{};
  v[0] = 0.5;
  v[15] = -0.2;
  psi[0] = 2.0;
  psi[3] = 1.0;
  psi[15] = 1.0;
  const double G = 1.5;
  const double err = 0.5 * 2.0 - 0.2 - G;  // -0.7
  const std::vector<CriticSample> one{{psi, G}};
  const auto up = critic_update(CriticParams{v}, one, 0.1);
  CHECK(up.params.v[0] == doctest::Approx(0.5 - 0.1 * err * 2.0));
  CHECK(up.params.v[3] == doctest::Approx(-0.1 * err));
  CHECK(up.params.v[15] == doctest::Approx(-0.2 - 0.1 * err));
  CHECK(up.params.v[7] == 0.0);
  CHECK(up.loss == doctest::Approx(0.5 * err * err));

  std::vector<CriticSample> batch;
  for (int i = 0; i < 40; ++i) batch.push_back({random_vec(rng, 0.5), uniform01(rng)});
  CriticParams cur{};
  double prev = critic_loss(cur, batch);
  for (int k = 0; k < 200; ++k) {
    cur = critic_update(cur, batch, 0.05).params;
    const double l = critic_loss(cur, batch);
    CHECK(l <= prev + 1e-12);
    prev = l;
  }

  CHECK(error_of([&] { critic_update(c, std::span<const CriticSample>{}, 0.1); }) == ErrorKind::EmptyBatch);
}

TEST_CASE("kl_divergence: examples, Gibbs, support") {
  const std::vector<double> p{0.5, 0.5}, q{0.75, 0.25};
  CHECK(kl_divergence(p, q) == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(kl_divergence(p, q) == doctest::Approx(0.1438).epsilon(1e-3));
  CHECK(std::abs(kl_divergence(q, q)) < 1e-12);

  const std::vector<double> zeroMass{0.0, 1.0}, pos{0.3, 0.7};
  CHECK(kl_divergence(zeroMass, pos) == doctest::Approx(std::log(1.0 / 0.7)));

  Rng rng = make_rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + uniform_int(rng, 0, 8);
    const auto a = random_dist(rng, n);
    const auto b = random_dist(rng, n);
    CHECK(kl_divergence(a, b) >= 0.0);
    CHECK(std::abs(kl_divergence(a, a)) < 1e-12);
  }

  const std::vector<double> three{0.2, 0.3, 0.5};
  CHECK(error_of([&] { kl_divergence(p, three); }) == ErrorKind::SupportMismatch);
  CHECK(error_of([&] { kl_divergence(pos, zeroMass); }) == ErrorKind::SupportMismatch);
}

TEST_CASE("policy_update_kl: stationary at the reference with zero advantage") {
  Rng rng = make_rng(8);
  PolicyParams p;
  p.w = random_vec(rng);
  p.version = 4;
  CriticParams c{random_vec(rng)};
  std::vector<PolicySample> batch;
  for (int i = 0; i < 10; ++i) {
    auto s = random_sample(rng);
    s.ret = planner::dot(c.v, s.psi);  // A = 0
    batch.push_back(s);
  }
  for (double beta : {0.0, 0.1, 5.0}) {
    const auto up = policy_update_kl(p, p, c, batch, beta, 0.05);
    for (std::size_t i = 0; i < kFeatures; ++i) CHECK(up.params.w[i] == doctest::Approx(p.w[i]).epsilon(1e-14));
    CHECK(up.meanKl == 0.0);
    CHECK(up.params.version == 5);
  }
  CHECK(error_of([&] { policy_update_kl(p, p, c, std::span<const PolicySample>{}, 0.1, 0.05); }) ==
        ErrorKind::EmptyBatch);
}

TEST_CASE("policy_loss: KL term is zero at the reference and positive away from it") {
  Rng rng = make_rng(9);
  PolicyParams p;
  p.w = random_vec(rng);
  CriticParams c{};
  std::vector<PolicySample> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(random_sample(rng));
  CHECK(std::abs(policy_loss(p, p, c, batch, 1.0).meanKl) < 1e-12);
  PolicyParams q = p;
  q.w[0] += 0.7;
  CHECK(policy_loss(q, p, c, batch, 1.0).meanKl > 0.0);
}

TEST_CASE("policy_update_kl: displacement from the reference shrinks with beta") {
  Rng rng = make_rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    PolicyParams ref;
    ref.w = random_vec(rng, 0.5);
    PolicyParams p = ref;
    const auto drift = random_vec(rng, 0.3);
    for (std::size_t i = 0; i < kFeatures; ++i) p.w[i] += drift[i];
    CriticParams c{random_vec(rng, 0.2)};
    std::vector<PolicySample> batch;
    for (int i = 0; i < 16; ++i) batch.push_back(random_sample(rng));
    double prev = std::numeric_limits<double>::infinity();
    for (double beta : {0.01, 0.1, 1.0, 10.0}) {
      const auto up = policy_update_kl(p, ref, c, batch, beta, 0.01);
      const double d = norm_diff(up.params.w, ref.w);
      CHECK(d <= prev + 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("policy_grad: central finite differences including KL") {
  Rng rng = make_rng(12);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    PolicyParams p, ref;
    p.w = random_vec(rng);
    ref.w = random_vec(rng);
    p.temperature = ref.temperature = 0.5 + uniform01(rng);
    CriticParams c{random_vec(rng, 0.3)};
    std::vector<PolicySample> batch;
    const int n = 1 + static_cast<int>(uniform_int(rng, 0, 5));
    for (int i = 0; i < n; ++i) batch.push_back(random_sample(rng));
    const double beta = uniform01(rng) * 2.0;
    const auto g = policy_grad(p, ref, c, batch, beta);
    const double h = 1e-5;
    for (std::size_t k = 0; k < kFeatures; ++k) {
      PolicyParams a = p, b = p;
      a.w[k] += h;
      b.w[k] -= h;
      const double fd = (policy_loss(a, ref, c, batch, beta).loss - policy_loss(b, ref, c, batch, beta).loss) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(g[k]), 1e-3});
      CHECK(std::abs(fd - g[k]) / denom < 1e-5);
      ++checked;
    }
  }
  CHECK(checked == 1600);
}

TEST_CASE("policy_update_kl: version strictly increases") {
  Rng rng = make_rng(13);
  PolicyParams p;
  CriticParams c{};
  std::vector<PolicySample> batch{random_sample(rng)};
  for (int i = 0; i < 5; ++i) {
    const auto up = policy_update_kl(p, p, c, batch, 0.1, 0.05);
    CHECK(up.params.version == p.version + 1);
    p = up.params;
  }
}

TEST_CASE("replay_filter: band on the per-step mean log-prob") {
  const auto p = unit_policy();
  const auto t = success_traj({0.9, 0.8});
  const double expected = (std::log(0.9) + std::log(0.8)) / 2.0;
  CHECK(mean_log_prob(t, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-0.1643).epsilon(1e-3));

  ReplayBuffer buf;
  REQUIRE(buf.push(t, p));
  CHECK(replay_filter(buf, p, {-0.2, -0.1}).size() == 1);
  CHECK(replay_filter(buf, p, {-0.16, 0.0}).empty());
  CHECK(replay_filter(buf, p, {-1.0, -0.17}).empty());
  CHECK(replay_filter(buf, p, ConfidenceBand{}).size() == 1);
  CHECK(replay_filter(ReplayBuffer{}, p, ConfidenceBand{}).empty());

  // The filter uses the policy it is given, not the cached value.
  PolicyParams flat;
  CHECK(replay_filter(buf, flat, {std::log(0.5) - 1e-9, std::log(0.5) + 1e-9}).size() == 1);
}

TEST_CASE("replay buffer: purity and FIFO capacity") {
  const auto p = unit_policy();
  ReplayBuffer buf(3);
  Rng rng = make_rng(14);
  int pushed = 0;
  for (int i = 0; i < 50; ++i) {
    auto t = success_traj({0.6}, "t" + std::to_string(i));
    const double u = uniform01(rng);
    if (u < 0.3) t.outcome = sim::Outcome::Fail;
    else if (u < 0.5) t.outcome = sim::Outcome::Partial;
    const bool ok = buf.push(t, p);
    CHECK(ok == (t.outcome == sim::Outcome::Success));
    pushed += ok;
    CHECK(buf.size() <= 3);
    for (const auto& it : buf.items()) CHECK(it.traj.outcome == sim::Outcome::Success);
  }
  REQUIRE(pushed >= 3);
  // Oldest evicted first: the survivors are the last three admitted, in order.
  ReplayBuffer fifo(2);
  for (int i = 0; i < 5; ++i) fifo.push(success_traj({0.6}, "f" + std::to_string(i)), p);
  REQUIRE(fifo.size() == 2);
  CHECK(fifo.items()[0].traj.taskId == "f3");
  CHECK(fifo.items()[1].traj.taskId == "f4");
}

TEST_CASE("bc_train: zero epochs and empty data") {
  const auto expert = harness::bc_corpus(5, 2, 1);
  PolicyParams p0;
  p0.w[3] = 0.25;
  p0.version = 7;
  const auto r = bc_train(expert, p0, 0.1, 0);
  CHECK(r.params.w == p0.w);
  CHECK(r.params.version == 8);
  CHECK(error_of([&] { bc_train(std::span<const Trajectory>{}, p0, 0.1, 1); }) == ErrorKind::EmptyData);
}

TEST_CASE("bc_train: loss decreases on oracle data") {
  const auto expert = harness::bc_corpus(100, 2, 1);
  const auto r = bc_train(expert, PolicyParams{}, 0.1, 5);
  REQUIRE(r.lossTrace.size() >= 2);
  CHECK(r.lossTrace.back() < r.lossTrace.front());
}

namespace {

std::vector<harness::TaskInstance> instances(std::uint64_t base, int count, int d) {
  std::vector<harness::TaskInstance> out;
  for (const auto& t : harness::make_suite(base, count, d, d)) out.push_back(harness::instantiate(t));
  return out;
}

double suite_sr(const PolicyParams& p, const std::vector<harness::TaskInstance>& tasks, std::uint64_t seed) {
  std::vector<harness::EpisodeJob> jobs;
  for (std::size_t i = 0; i < tasks.size(); ++i) jobs.push_back({&tasks[i].world, &tasks[i].task, seed + i, 1});
  const auto out = harness::run_jobs(jobs, harness::softmax_planner(p), {}, 1);
  int ok = 0;
  for (const auto& t : out) ok += t.judgedOutcome == sim::Outcome::Success;
  return double(ok) / double(out.size());
}

}  // namespace

TEST_CASE("train_iteration: zero budget is a no-op") {
  const auto tasks = instances(harness::kPoolSeedBase, 3, 1);
  PolicyParams p;
  p.w[0] = 1.0;
  CriticParams c{};
  TrainConfig cfg;
  cfg.rolloutBudget = 0;
  ReplayBuffer buf;
  const auto r = train_iteration(p, c, tasks, cfg, buf, 1);
  CHECK(r.policy == p);
  CHECK(r.critic == c);
  CHECK(r.rollouts.empty());
  CHECK(r.stats.episodes == 0);
}

TEST_CASE("train_iteration: no catastrophic drop from a BC start") {
  const auto expert = harness::bc_corpus(300, 1, 1);
  const auto bc = bc_train(expert, PolicyParams{}, 0.1, 2).params;
  const auto train = instances(harness::kPoolSeedBase, 40, 1);
  const auto held = instances(harness::kEvalSeedBase, 100, 1);
  const double before = suite_sr(bc, held, 99);

  TrainConfig cfg;
  cfg.rolloutBudget = 120;
  ReplayBuffer buf;
  const auto r = train_iteration(bc, CriticParams{}, train, cfg, buf, 21, 1);
  CHECK(r.stats.episodes == 120);
  CHECK(r.stats.sr >= before - 0.05);
  CHECK(suite_sr(r.policy, held, 99) >= before - 0.05);
  CHECK(r.policy.version > bc.version);
  CHECK(buf.size() <= cfg.replayCapacity);
  for (const auto& it : buf.items()) CHECK(it.traj.outcome == sim::Outcome::Success);
}

TEST_CASE("train_iteration: untrained ORM reward smoke run") {
  const auto tasks = instances(harness::kPoolSeedBase, 5, 1);
  TrainConfig cfg;
  cfg.rolloutBudget = 20;
  cfg.rewardSource = RewardSource::Orm;
  ReplayBuffer buf;
  const reward::OrmParams untrained{};
  const auto r = train_iteration(PolicyParams{}, CriticParams{}, tasks, cfg, buf, 3, 1, &untrained);
  // u = 0 scores every rollout 0.5, which the >= 0.5 rule accepts.
  CHECK(r.stats.rewardSr == 1.0);
  for (const auto& t : r.rollouts) CHECK(t.outcome == sim::Outcome::Success);
}

TEST_CASE("train_iteration: deterministic and version monotone across iterations") {
  const auto tasks = instances(harness::kPoolSeedBase, 10, 2);
  TrainConfig cfg;
  cfg.rolloutBudget = 30;
  auto run = [&] {
    ReplayBuffer buf;
    PolicyParams p;
    CriticParams c;
    std::vector<std::int64_t> versions{p.version};
    for (int k = 1; k <= 3; ++k) {
      auto r = train_iteration(p, c, tasks, cfg, buf, 5, k);
      p = r.policy;
      c = r.critic;
      versions.push_back(p.version);
    }
    return std::make_pair(p, versions);
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  for (std::size_t i = 1; i < a.second.size(); ++i) CHECK(a.second[i] >= a.second[i - 1]);
}

TEST_CASE("TrainConfig: validation") {
  TrainConfig c;
  CHECK_NOTHROW(validate(c));
  c.gamma = 0.0;
  CHECK(error_of([&] { validate(c); }) == ErrorKind::Config);
  c = {};
  c.beta = -0.1;
  CHECK(error_of([&] { validate(c); }) == ErrorKind::Config);
  c = {};
  c.band = {-0.1, -0.2};
  CHECK(error_of([&] { validate(c); }) == ErrorKind::Config);
}
