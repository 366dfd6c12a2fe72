#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "guiwb/error.hpp"
#include "guiwb/harness/config.hpp"
#include "guiwb/harness/ground_bench.hpp"
#include "guiwb/harness/remote.hpp"
#include "guiwb/harness/report.hpp"
#include "guiwb/harness/training_run.hpp"
#include "guiwb/planner/checkpoint.hpp"
#include "guiwb/reward/orm.hpp"
#include "guiwb/rl/learners.hpp"
#include "guiwb/sim/generator.hpp"
#include "guiwb/sim/oracle.hpp"
#include "guiwb/sim/serialize.hpp"

using namespace guiwb;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(harness::read_file(path));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::vector<std::pair<sim::World, sim::TaskSpec>> read_corpus(const std::string& path) {
  std::vector<std::pair<sim::World, sim::TaskSpec>> out;
  for (const auto& line : read_lines(path)) out.push_back(sim::parse_world_task_line(line));
  return out;
}

void write_corpus(const std::string& path, std::uint64_t seed, int count, int minD, int maxD) {
  std::string text;
  for (const auto& t : harness::make_suite(seed, count, minD, maxD)) {
    const auto [w, task] = sim::generate_from_template(t);
    text += sim::world_task_line(w, task) + "\n";
  }
  harness::write_file(path, text);
}

std::vector<sim::TemplateParams> read_suite(const std::string& path) {
  std::vector<sim::TemplateParams> out;
  const auto pool = curriculum::Pool::load(path);
  for (const auto& r : pool.records()) out.push_back(r.templ);
  return out;
}

void print_summary(const harness::MetricsReport& m) {
  std::printf("SR %.4f  pass@2 %.4f  partial %.4f  fail %.4f  (%d tasks, %d episodes)\n", m.sr, m.passAt2,
              m.partialRate, m.failRate, m.tasks, m.episodes);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GUI agent workbench: simulator, planner training, curriculum RL and evaluation"};
  app.require_subcommand(1);

  // gen-world
  std::uint64_t seed = 0, suiteSeed = 0, bcSeed = 0, shuffleSeed = 0, noiseSeed = 0;
  int suiteCount = 0, bcCount = 0;
  int difficulty = 1, count = 1, minD = 1, maxD = 6;
  std::string out;
  auto* genWorld = app.add_subcommand("gen-world", "Generate worlds with their tasks as JSON Lines");
  genWorld->add_option("--seed", seed, "First world seed")->default_val(0);
  genWorld->add_option("--difficulty", difficulty, "Task difficulty (chain length)")->default_val(1);
  genWorld->add_option("--count", count, "Number of worlds")->default_val(1);
  genWorld->add_option("--out", out, "Output file")->required();

  // gen-suite
  auto* genSuite = app.add_subcommand("gen-suite", "Write an evaluation suite (instruction records, JSON Lines)");
  genSuite->add_option("--seed", suiteSeed)->default_val(harness::kEvalSeedBase);
  genSuite->add_option("--count", suiteCount)->default_val(200);
  genSuite->add_option("--min-difficulty", minD)->default_val(1);
  genSuite->add_option("--max-difficulty", maxD)->default_val(6);
  genSuite->add_option("--out", out)->required();

  // gen-bc
  int bcMaxD = 2;
  auto* genBc = app.add_subcommand("gen-bc", "Write an oracle-solvable task corpus for behavior cloning");
  genBc->add_option("--seed", bcSeed)->default_val(harness::kBcSeedBase);
  genBc->add_option("--count", bcCount)->default_val(1000);
  genBc->add_option("--max-difficulty", bcMaxD)->default_val(2);
  genBc->add_option("--out", out)->required();

  // train-bc
  std::string data;
  double lr = 0.1;
  int epochs = 2;
  auto* trainBc = app.add_subcommand("train-bc", "Behavior cloning on oracle trajectories");
  trainBc->add_option("--data", data, "Corpus written by gen-bc")->required()->check(CLI::ExistingFile);
  trainBc->add_option("--out", out, "Policy checkpoint")->required();
  trainBc->add_option("--lr", lr)->default_val(0.1);
  trainBc->add_option("--epochs", epochs)->default_val(2);
  trainBc->add_option("--seed", shuffleSeed, "Shuffle seed")->default_val(0);

  // train-orm
  std::string configPath, policyPath, ormPath;
  auto* trainOrm = app.add_subcommand("train-orm", "Fit the outcome reward model on mixed-planner rollouts");
  trainOrm->add_option("--policy", policyPath)->required()->check(CLI::ExistingFile);
  trainOrm->add_option("--config", configPath)->check(CLI::ExistingFile);
  trainOrm->add_option("--out", out)->required();

  // train-rl
  std::string outDir;
  int trainWorkers = 0;
  auto* trainRl = app.add_subcommand("train-rl", "Self-evolving curriculum RL");
  trainRl->add_option("--config", configPath)->required()->check(CLI::ExistingFile);
  trainRl->add_option("--out-dir", outDir)->required();
  trainRl->add_option("--policy", policyPath, "Start policy (default: BC warm start from the config)")
      ->check(CLI::ExistingFile);
  trainRl->add_option("--orm", ormPath, "ORM checkpoint (default: trained when rewardSource is orm)")
      ->check(CLI::ExistingFile);
  trainRl->add_option("--workers", trainWorkers, "Override the config's worker count")->check(CLI::PositiveNumber);

  // eval
  std::string suitePath, plannerName = "softmax";
  int workers = 1;
  std::uint64_t masterSeed = 0;
  bool passAt2 = false;
  double epsilon = 0.0, noiseP = 0.0, ablateNoiseP = 0.1;
  auto* eval = app.add_subcommand("eval", "Evaluate a planner on a suite");
  eval->add_option("--policy", policyPath)->check(CLI::ExistingFile);
  eval->add_option("--suite", suitePath)->required()->check(CLI::ExistingFile);
  eval->add_option("--workers", workers)->default_val(1)->check(CLI::PositiveNumber);
  eval->add_option("--master-seed", masterSeed)->default_val(0);
  eval->add_flag("--pass-at-2", passAt2);
  eval->add_option("--planner", plannerName, "softmax | oracle | scripted-noisy")->default_val("softmax");
  eval->add_option("--noise-p", noiseP)->default_val(0.0);
  eval->add_option("--epsilon", epsilon, "Grounder noise")->default_val(0.0);
  eval->add_option("--out-dir", outDir, "Write report.json/csv/md here");

  // gen-grounding
  std::uint64_t groundingSeed = 0;
  int groundingWorlds = 0, limit = 0;
  auto* genGrounding = app.add_subcommand("gen-grounding", "Write a grounding corpus of unambiguous element descriptions");
  genGrounding->add_option("--seed", groundingSeed)->default_val(0);
  genGrounding->add_option("--worlds", groundingWorlds)->default_val(600);
  genGrounding->add_option("--limit", limit, "Stop after this many cases (0: all)")->default_val(10000);
  genGrounding->add_option("--out", out)->required();

  // ground-bench
  auto* groundBench = app.add_subcommand("ground-bench", "Ground a corpus of descriptions and score against gold");
  groundBench->add_option("--corpus", data, "Corpus written by gen-grounding")->required()->check(CLI::ExistingFile);
  groundBench->add_option("--epsilon", epsilon)->default_val(0.0);
  groundBench->add_option("--seed", noiseSeed)->default_val(0);

  // ablate-interface
  bool perturb = false;
  auto* ablate = app.add_subcommand("ablate-interface", "Intermediate vs end-to-end interface on one suite");
  ablate->add_option("--suite", suitePath)->required()->check(CLI::ExistingFile);
  ablate->add_flag("--perturb", perturb, "Shift element positions between episodes");
  ablate->add_option("--noise-p", ablateNoiseP)->default_val(0.1);
  ablate->add_option("--epsilon", epsilon)->default_val(0.0);
  ablate->add_option("--workers", workers)->default_val(1)->check(CLI::PositiveNumber);
  ablate->add_option("--master-seed", masterSeed)->default_val(0);
  ablate->add_option("--out-dir", outDir);

  // report
  std::string in, format = "md";
  auto* report = app.add_subcommand("report", "Render a report.json");
  report->add_option("--in", in)->required()->check(CLI::ExistingFile);
  report->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "md"}))->default_val("md");

  auto* worker = app.add_subcommand("worker", "Serve the remote-worker protocol on stdin/stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*genWorld) {
      write_corpus(out, seed, count, difficulty, difficulty);
    } else if (*genSuite) {
      curriculum::Pool pool;
      for (const auto& t : harness::make_suite(suiteSeed, suiteCount, minD, maxD)) pool.add(curriculum::make_seed_record(t));
      pool.save(out);
    } else if (*genBc) {
      write_corpus(out, bcSeed, bcCount, 1, bcMaxD);
    } else if (*trainBc) {
      std::vector<rl::Trajectory> corpus;
      for (const auto& [w, t] : read_corpus(data)) corpus.push_back(sim::oracle_rollout(w, t));
      const auto res = rl::bc_train(corpus, planner::PolicyParams{}, lr, epochs, shuffleSeed);
      planner::save_policy(res.params, out);
      std::printf("trained on %zu trajectories, final loss %.4f\n", corpus.size(), res.lossTrace.back());
    } else if (*trainOrm) {
      const auto cfg = configPath.empty() ? harness::ExperimentConfig{} : harness::load_config(configPath);
      const auto res = harness::train_orm_model(planner::load_policy(policyPath), cfg);
      reward::save_orm(res.params, out);
      std::printf("ORM fitted on %ld examples, final loss %.4f%s\n", static_cast<long>(res.params.trainedOn), res.lossTrace.back(),
                  res.degenerate ? " (single-class data)" : "");
    } else if (*trainRl) {
      auto cfg = harness::load_config(configPath);
      if (trainWorkers > 0) cfg.run.workers = cfg.train.workers = trainWorkers;
      std::filesystem::create_directories(outDir);
      planner::PolicyParams start;
      if (policyPath.empty()) {
        start = harness::train_bc_policy(cfg);
        planner::save_policy(start, outDir + "/policy_bc.json");
      } else {
        start = planner::load_policy(policyPath);
      }
      reward::OrmParams orm;
      const bool useOrm = cfg.train.rewardSource == rl::RewardSource::Orm;
      if (useOrm) {
        if (ormPath.empty()) {
          orm = harness::train_orm_model(start, cfg).params;
          reward::save_orm(orm, outDir + "/orm.json");
        } else {
          orm = reward::load_orm(ormPath);
        }
      }
      const auto res = harness::run_training(cfg, start, outDir, useOrm ? &orm : nullptr);
      std::printf("start eval SR %.4f\n", res.startEvalSr);
      for (const auto& it : res.iterations) std::printf("%s\n", harness::stats_line(it).c_str());
    } else if (*eval) {
      harness::RunConfig rc;
      rc.masterSeed = masterSeed;
      rc.workers = workers;
      rc.suite = read_suite(suitePath);
      rc.plannerKind = harness::planner_kind_from_string(plannerName);
      if (rc.plannerKind == harness::PlannerKind::Softmax) {
        if (policyPath.empty()) throw Error(ErrorKind::Config, "--policy is required for the softmax planner");
        rc.policy = planner::load_policy(policyPath);
      }
      rc.noiseP = noiseP;
      rc.groundingEpsilon = epsilon;
      auto m = passAt2 ? harness::pass_at_2(rc) : harness::run_suite(rc);
      m.method = plannerName;
      print_summary(m);
      if (!outDir.empty()) harness::report_emit(m, outDir);
    } else if (*genGrounding) {
      const auto cases =
          harness::build_grounding_corpus(harness::make_suite(groundingSeed, groundingWorlds, 1, 6), limit);
      std::string text;
      for (const auto& c : cases) text += harness::grounding_case_line(c) + "\n";
      harness::write_file(out, text);
      std::printf("%zu cases\n", cases.size());
    } else if (*groundBench) {
      std::vector<harness::GroundingCase> cases;
      for (const auto& line : read_lines(data)) cases.push_back(harness::parse_grounding_case_line(line));
      const auto r = harness::ground_bench(cases, epsilon, noiseSeed);
      std::printf("queries %d  exact %d (%.4f)  multi-candidate %d  runner-up %d (%.4f)\n", r.queries, r.exact,
                  r.exact_rate(), r.multiCandidate, r.runnerUps, r.runner_up_rate());
    } else if (*ablate) {
      harness::RunConfig rc;
      rc.masterSeed = masterSeed;
      rc.workers = workers;
      rc.suite = read_suite(suitePath);
      rc.plannerKind = harness::PlannerKind::ScriptedNoisy;
      rc.noiseP = ablateNoiseP;
      rc.groundingEpsilon = epsilon;
      rc.perturbLayout = perturb;
      const auto a = harness::ablation_interface(rc);
      std::printf("end-to-end SR %.4f  intermediate SR %.4f  delta %+.4f\n", a.endToEnd.sr, a.intermediate.sr, a.delta);
      if (!outDir.empty()) harness::ablation_emit(a, outDir);
    } else if (*report) {
      const auto m = harness::parse_report_json(harness::read_file(in));
      if (format == "json") std::cout << harness::report_json(m);
      else if (format == "csv") std::cout << harness::report_csv(m);
      else std::cout << harness::report_markdown({m});
    } else if (*worker) {
      harness::StreamChannel channel(std::cin, std::cout);
      harness::serve(channel);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
