#include <doctest.h>

#include <unistd.h>

#include <bit>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include "guiwb/error.hpp"
#include "guiwb/harness/config.hpp"
#include "guiwb/harness/evaluation.hpp"
#include "guiwb/harness/report.hpp"
#include "guiwb/harness/training_run.hpp"
#include "guiwb/sim/generator.hpp"

using namespace guiwb;
using namespace guiwb::harness;
namespace fs = std::filesystem;

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

EpisodeResult row(int i, int attempt, sim::Outcome o) {
  EpisodeResult r;
  r.taskId = "task" + std::to_string(i);
  r.attempt = attempt;
  r.outcome = o;
  r.steps = 3;
  r.difficulty = 1 + i % 3;
  r.seedUsed = episode_seed(0, r.taskId, attempt);
  return r;
}

// 20 tasks: 9 succeed at attempt 1; of the 11 reruns, 3 succeed.
std::vector<EpisodeResult> constructed_log() {
  std::vector<EpisodeResult> log;
  for (int i = 0; i < 20; ++i) {
    const auto o = i < 9 ? sim::Outcome::Success : (i < 14 ? sim::Outcome::Partial : sim::Outcome::Fail);
    log.push_back(row(i, 1, o));
  }
  for (int i = 9; i < 20; ++i) log.push_back(row(i, 2, i < 12 ? sim::Outcome::Success : sim::Outcome::Fail));
  return log;
}

RunConfig noisy_config(int count, double p, std::uint64_t seed = 17) {
  RunConfig cfg;
  cfg.masterSeed = seed;
  cfg.suite = make_suite(kEvalSeedBase, count, 1, 6);
  cfg.plannerKind = PlannerKind::ScriptedNoisy;
  cfg.noiseP = p;
  return cfg;
}

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("guiwb_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("aggregate: 9 of 20 successes") {
  std::vector<EpisodeResult> log;
  for (int i = 0; i < 20; ++i) log.push_back(row(i, 1, i < 9 ? sim::Outcome::Success : sim::Outcome::Fail));
  const auto m = aggregate(log);
  CHECK(m.sr == 0.45);
  CHECK(m.passAt2 == 0.45);
  CHECK(m.failRate == 0.55);
  CHECK(m.tasks == 20);
  CHECK(m.episodes == 20);
}

TEST_CASE("aggregate: constructed second-attempt log gives passAt2 = 0.60") {
  const auto m = aggregate(constructed_log());
  CHECK(m.sr == 0.45);
  CHECK(m.passAt2 == 0.6);
  CHECK(m.partialRate == 0.25);
  CHECK(m.failRate == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(m.episodes == 31);
  CHECK(m.tasks == 20);
  CHECK(std::abs(m.sr + m.partialRate + m.failRate - 1.0) < 1e-9);
}

TEST_CASE("classify delegates to the milestone judge") {
  sim::JudgeState j;
  j.satisfied = 0b111;
  CHECK(classify(j, 3) == sim::Outcome::Success);
  j.satisfied = 0b001;
  CHECK(classify(j, 3) == sim::Outcome::Partial);
  j.satisfied = 0;
  CHECK(classify(j, 3) == sim::Outcome::Fail);
}

TEST_CASE("episode seeds: deterministic and attempt-dependent") {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::string id = "w" + std::to_string(i) + "-NI";
    const auto a1 = episode_seed(5, id, 1);
    const auto a2 = episode_seed(5, id, 2);
    CHECK(a1 != a2);
    CHECK(a1 == episode_seed(5, id, 1));
    CHECK(a1 != episode_seed(6, id, 1));
    seen.insert(a1);
  }
  CHECK(seen.size() == 2000);
}

TEST_CASE("run_suite: empty suite and bad knobs") {
  RunConfig cfg;
  CHECK(error_of([&] { run_suite(cfg); }) == ErrorKind::Config);
  cfg.suite = make_suite(kEvalSeedBase, 2, 1, 1);
  cfg.workers = 0;
  CHECK(error_of([&] { run_suite(cfg); }) == ErrorKind::Config);
}

TEST_CASE("run_suite: identical report for 1 and 8 workers") {
  auto cfg = noisy_config(60, 0.3);
  cfg.groundingEpsilon = 0.1;
  cfg.workers = 1;
  const auto one = pass_at_2(cfg);
  cfg.workers = 8;
  const auto eight = pass_at_2(cfg);
  CHECK(one == eight);
  CHECK(report_json(one) == report_json(eight));

  cfg.plannerKind = PlannerKind::Softmax;
  cfg.policy.w[0] = 2.0;
  cfg.workers = 3;
  const auto s3 = run_suite(cfg);
  cfg.workers = 1;
  CHECK(run_suite(cfg) == s3);
}

TEST_CASE("pass_at_2: reruns only the non-successes with fresh seeds") {
  auto cfg = noisy_config(60, 0.4, 3);
  const auto run = pass_at_2_detailed(cfg);
  const auto& m = run.report;
  int firstOk = 0, reruns = 0, secondOk = 0;
  std::set<std::string> failedFirst;
  for (const auto& r : m.results) {
    if (r.attempt == 1) {
      firstOk += r.outcome == sim::Outcome::Success;
      if (r.outcome != sim::Outcome::Success) failedFirst.insert(r.taskId);
      CHECK(r.seedUsed == episode_seed(cfg.masterSeed, r.taskId, 1));
    } else {
      ++reruns;
      secondOk += r.outcome == sim::Outcome::Success;
      CHECK(failedFirst.count(r.taskId) == 1);
      CHECK(r.seedUsed == episode_seed(cfg.masterSeed, r.taskId, 2));
    }
  }
  REQUIRE(firstOk < 60);
  CHECK(reruns == static_cast<int>(failedFirst.size()));
  CHECK(m.sr == doctest::Approx(firstOk / 60.0).epsilon(1e-12));
  CHECK(m.passAt2 == doctest::Approx((firstOk + secondOk) / 60.0).epsilon(1e-12));
  CHECK(m.sr <= m.passAt2);

  // Attempt-1 numbers agree with a plain run.
  const auto plain = run_suite(cfg);
  CHECK(plain.sr == m.sr);
  CHECK(plain.partialRate == m.partialRate);
}

TEST_CASE("pass_at_2: no reruns when everything succeeds") {
  RunConfig cfg;
  cfg.suite = make_suite(kEvalSeedBase, 25, 1, 6);
  cfg.plannerKind = PlannerKind::Oracle;
  const auto m = pass_at_2(cfg);
  CHECK(m.sr == 1.0);
  CHECK(m.passAt2 == 1.0);
  CHECK(m.episodes == 25);
}

TEST_CASE("rate consistency and SR <= passAt2 across configurations") {
  for (double p : {0.0, 0.2, 0.5, 0.9}) {
    for (double eps : {0.0, 0.2}) {
      auto cfg = noisy_config(30, p, static_cast<std::uint64_t>(p * 100 + eps * 10));
      cfg.groundingEpsilon = eps;
      const auto m = pass_at_2(cfg);
      CHECK(std::abs(m.sr + m.partialRate + m.failRate - 1.0) < 1e-9);
      CHECK(m.sr <= m.passAt2);
      CHECK(m.passAt2 <= 1.0);
    }
  }
}

TEST_CASE("log/judgment agreement: outcomes recomputed from step logs") {
  auto cfg = noisy_config(40, 0.4, 9);
  const auto run = run_suite_detailed(cfg);
  int counts[3] = {0, 0, 0};
  for (const auto& t : run.trajectories) {
    std::istringstream in(rl::trajectory_log_lines(t));
    std::string line;
    std::uint32_t last = 0;
    while (std::getline(in, line)) last = rl::parse_step_log_line(line).milestonesBitmask;
    const int got = std::popcount(last);
    const int idx = got == t.milestoneCount ? 0 : (got > 0 ? 1 : 2);
    ++counts[idx];
  }
  const double n = 40.0;
  CHECK(counts[0] / n == run.report.sr);
  CHECK(counts[1] / n == run.report.partialRate);
  CHECK(counts[2] / n == run.report.failRate);
}

TEST_CASE("ablation_interface: control and perturbed runs") {
  auto cfg = noisy_config(40, 0.0, 4);
  const auto control = ablation_interface(cfg);
  CHECK(control.endToEnd.sr == 1.0);
  CHECK(control.intermediate.sr == 1.0);
  CHECK(control.delta == 0.0);

  cfg.noiseP = 0.1;
  cfg.perturbLayout = true;
  const auto a = ablation_interface(cfg);
  CHECK(a.delta == a.intermediate.sr - a.endToEnd.sr);
  CHECK(a.delta > 0.0);

  cfg.plannerKind = PlannerKind::Softmax;
  CHECK(error_of([&] { ablation_interface(cfg); }) == ErrorKind::Config);
}

TEST_CASE("report_emit: three files, round trip, byte-identical re-emit") {
  auto m = aggregate(constructed_log(), "constructed");
  const auto dir = temp_dir("report");
  report_emit(m, dir.string());
  for (const char* f : {"report.json", "report.csv", "report.md"}) CHECK(fs::exists(dir / f));
  const auto json = read_file((dir / "report.json").string());
  CHECK(parse_report_json(json) == m);

  const auto csv = read_file((dir / "report.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == m.episodes + 1);

  const auto md = read_file((dir / "report.md").string());
  CHECK(md.find("constructed") != std::string::npos);

  report_emit(m, dir.string());
  CHECK(read_file((dir / "report.json").string()) == json);
  CHECK(read_file((dir / "report.csv").string()) == csv);
  CHECK(read_file((dir / "report.md").string()) == md);
  fs::remove_all(dir);

  CHECK(error_of([&] { report_emit(m, "/proc/guiwb-not-writable"); }) == ErrorKind::Io);
}

TEST_CASE("experiment config: parsing, unknown keys, ranges") {
  const auto c = config_from_json(R"({"gamma":0.8,"beta":0.5,"valueBand":[0.1,0.7],"mixRatio":0.25,"workers":4,"iterations":3})");
  CHECK(c.train.gamma == 0.8);
  CHECK(c.train.beta == 0.5);
  CHECK(c.curriculum.vLo == 0.1);
  CHECK(c.curriculum.mixRatio == 0.25);
  CHECK(c.loop.iterations == 3);
  CHECK(config_from_json(config_to_json(c)).train.gamma == 0.8);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));

  CHECK(error_of([] { config_from_json(R"({"gama":0.9})"); }) == ErrorKind::Config);
  CHECK(error_of([] { config_from_json(R"({"gamma":1.5})"); }) == ErrorKind::Config);
  CHECK(error_of([] { config_from_json(R"({"workers":0})"); }) == ErrorKind::Config);
  CHECK(error_of([] { config_from_json("[1,2]"); }) == ErrorKind::Config);
}

TEST_CASE("training run: deterministic stats for a small config") {
  auto cfg = config_from_json(
      R"({"iterations":2,"seedTasks":30,"evalTasks":30,"rolloutBudget":40,"bcCount":50,"maxDifficulty":3})");
  const auto start = train_bc_policy(cfg);
  const auto a = run_training(cfg, start);
  const auto b = run_training(cfg, start);
  REQUIRE(a.iterations.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(stats_line(a.iterations[i]) == stats_line(b.iterations[i]));
  CHECK(a.policy == b.policy);
  CHECK(a.pool.to_jsonl() == b.pool.to_jsonl());

  cfg.train.rewardSource = rl::RewardSource::Orm;
  CHECK(error_of([&] { run_training(cfg, start); }) == ErrorKind::Config);
}
