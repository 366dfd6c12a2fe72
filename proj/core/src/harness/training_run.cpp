#include "guiwb/harness/training_run.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "guiwb/error.hpp"
#include "guiwb/harness/orchestrator.hpp"
#include "guiwb/harness/report.hpp"
#include "guiwb/planner/checkpoint.hpp"
#include "guiwb/sim/generator.hpp"
#include "guiwb/sim/oracle.hpp"

namespace guiwb::harness {

std::vector<sim::TemplateParams> make_suite(std::uint64_t base, int count, int minD, int maxD) {
  std::vector<sim::TemplateParams> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const int span = maxD - minD + 1;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = base + static_cast<std::uint64_t>(i);
    out.push_back(sim::TemplateParams{seed, sim::random_chain(seed, minD + i % span)});
  }
  return out;
}

std::vector<rl::Trajectory> bc_corpus(int count, int maxDifficulty, int workers, std::uint64_t base) {
  const auto suite = make_suite(base, count, 1, maxDifficulty);
  std::vector<rl::Trajectory> out(suite.size());
  parallel_for(suite.size(), workers, [&](std::size_t i) {
    const auto [w, t] = sim::generate_from_template(suite[i]);
    out[i] = sim::oracle_rollout(w, t);
  });
  return out;
}

std::vector<reward::OrmExample> orm_dataset(const planner::PolicyParams& policy, int count, int minD, int maxD,
                                            std::uint64_t base, std::uint64_t masterSeed, int workers) {
  const auto suite = make_suite(base, count, minD, maxD);
  // Planner mix: the policy and scripted planners at increasing noise.
  const std::vector<DecisionFn> planners = {softmax_planner(policy), scripted_noisy_planner(0.1),
                                            scripted_noisy_planner(0.3), scripted_noisy_planner(0.6)};
  std::vector<reward::OrmExample> out(suite.size());
  parallel_for(suite.size(), workers, [&](std::size_t i) {
    const auto [w, t] = sim::generate_from_template(suite[i]);
    EpisodeSettings s;
    s.seed = episode_seed(masterSeed, t.id, 1);
    const auto traj = run_episode(w, t, planners[i % planners.size()], s);
    out[i] = reward::OrmExample{reward::summarize(traj, t.instruction),
                                traj.judgedOutcome == sim::Outcome::Success ? 1 : 0};
  });
  return out;
}

planner::PolicyParams train_bc_policy(const ExperimentConfig& cfg) {
  const auto corpus = bc_corpus(cfg.loop.bcCount, cfg.loop.bcMaxDifficulty, cfg.run.workers);
  return rl::bc_train(corpus, planner::PolicyParams{}, cfg.loop.bcLr, cfg.loop.bcEpochs, cfg.run.masterSeed).params;
}

reward::OrmTrainResult train_orm_model(const planner::PolicyParams& policy, const ExperimentConfig& cfg) {
  const auto data = orm_dataset(policy, cfg.loop.ormCount, cfg.loop.minDifficulty, cfg.loop.maxDifficulty, kOrmSeedBase,
                                cfg.run.masterSeed, cfg.run.workers);
  return reward::orm_train(data, cfg.loop.ormLr, cfg.loop.ormEpochs);
}

std::string stats_line(const IterationRecord& r) {
  nlohmann::ordered_json j;
  j["iteration"] = r.stats.iteration;
  j["SR"] = r.stats.sr;
  j["meanKL"] = r.stats.meanKl;
  j["policyLoss"] = r.stats.policyLoss;
  j["criticLoss"] = r.stats.criticLoss;
  j["bufferSize"] = r.stats.bufferSize;
  j["rewardSR"] = r.stats.rewardSr;
  j["evalSR"] = r.evalSr;
  j["episodes"] = r.stats.episodes;
  j["batchSteps"] = r.stats.batchSteps;
  j["poolSize"] = r.poolSize;
  j["candidates"] = r.candidates;
  j["accepted"] = r.accepted;
  return j.dump();
}

double evaluate_policy(const planner::PolicyParams& p, const std::vector<sim::TemplateParams>& suite,
                       const ExperimentConfig& cfg) {
  RunConfig rc = cfg.run;
  rc.suite = suite;
  rc.policy = p;
  rc.plannerKind = PlannerKind::Softmax;
  return run_suite(rc).sr;
}

namespace {

std::string trajectories_jsonl(const std::vector<rl::Trajectory>& ts) {
  std::string out;
  for (const auto& t : ts) out += rl::trajectory_log_lines(t);
  return out;
}

std::string critic_json(const rl::CriticParams& c) {
  nlohmann::ordered_json j;
  j["F"] = planner::kFeatures;
  j["v"] = c.v;
  return j.dump() + "\n";
}

}  // namespace

TrainingRunResult run_training(const ExperimentConfig& cfg, const planner::PolicyParams& start,
                               const std::string& outDir, const reward::OrmParams* orm) {
  validate(cfg);
  if (cfg.train.rewardSource == rl::RewardSource::Orm && !orm) {
    throw Error(ErrorKind::Config, "rewardSource orm needs a trained ORM");
  }
  const auto& loop = cfg.loop;
  const bool writing = !outDir.empty();
  if (writing) {
    std::error_code ec;
    std::filesystem::create_directories(outDir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + outDir);
    write_file(outDir + "/config.json", config_to_json(cfg));
    write_file(outDir + "/stats.jsonl", "");
    planner::save_policy(start, outDir + "/policy_0.json");
  }

  TrainingRunResult res;
  res.policy = start;
  for (const auto& t : make_suite(kPoolSeedBase, loop.seedTasks, loop.minDifficulty, loop.maxDifficulty)) {
    res.pool.add(curriculum::make_seed_record(t));
  }
  const auto evalSuite = make_suite(kEvalSeedBase, loop.evalTasks, loop.minDifficulty, loop.maxDifficulty);
  if (!evalSuite.empty()) res.startEvalSr = evaluate_policy(start, evalSuite, cfg);

  rl::TrainConfig train = cfg.train;
  train.workers = cfg.run.workers;
  train.groundingEpsilon = cfg.run.groundingEpsilon;
  rl::ReplayBuffer buffer(train.replayCapacity);
  const std::uint64_t seed = cfg.run.masterSeed;

  for (int k = 0; k < loop.iterations; ++k) {
    Rng rng = make_rng(stable_hash({seed, static_cast<std::uint64_t>(k), 0x73636864ULL}));
    const auto scheduled = curriculum::schedule_iteration(res.pool, cfg.curriculum, train.rolloutBudget, rng);
    std::vector<TaskInstance> tasks(scheduled.size());
    parallel_for(tasks.size(), train.workers, [&](std::size_t i) { tasks[i] = instantiate(scheduled[i].templ); });

    auto it = rl::train_iteration(res.policy, res.critic, tasks, train, buffer, seed, k + 1, orm);
    res.policy = it.policy;
    res.critic = it.critic;

    std::vector<curriculum::EpisodeOutcome> outcomes;
    outcomes.reserve(it.rollouts.size());
    for (const auto& t : it.rollouts) outcomes.push_back({t.taskId, t.outcome});
    const auto failed = curriculum::harvest_failures(outcomes, res.pool);

    std::vector<curriculum::InstructionRecord> candidates;
    for (const auto& f : failed) {
      for (int m = 0; m < cfg.curriculum.mutationsPerFailure; ++m) {
        auto dir = m % 2 == 0 ? curriculum::Direction::Simplify : curriculum::Direction::Complicate;
        if (dir == curriculum::Direction::Simplify && f.difficulty <= loop.minDifficulty) {
          dir = curriculum::Direction::Complicate;
        }
        if (dir == curriculum::Direction::Complicate && f.difficulty >= loop.maxDifficulty) {
          if (f.difficulty <= loop.minDifficulty) continue;
          dir = curriculum::Direction::Simplify;
        }
        candidates.push_back(curriculum::mutate(f, dir, rng));
      }
    }
    const auto accepted = loop.criticFilter
                              ? curriculum::critic_filter(candidates, res.critic, cfg.curriculum.vLo, cfg.curriculum.vHi)
                              : candidates;
    int added = 0;
    for (const auto& a : accepted) added += res.pool.add(a) ? 1 : 0;

    IterationRecord rec;
    rec.stats = it.stats;
    rec.evalSr = evalSuite.empty() ? 0.0 : evaluate_policy(res.policy, evalSuite, cfg);
    rec.poolSize = res.pool.size();
    rec.candidates = static_cast<int>(candidates.size());
    rec.accepted = added;
    res.iterations.push_back(rec);

    if (writing) {
      const std::string n = std::to_string(k + 1);
      std::ofstream stats(outDir + "/stats.jsonl", std::ios::app | std::ios::binary);
      stats << stats_line(rec) << "\n";
      planner::save_policy(res.policy, outDir + "/policy_" + n + ".json");
      write_file(outDir + "/critic_" + n + ".json", critic_json(res.critic));
      write_file(outDir + "/trajectories_" + n + ".jsonl", trajectories_jsonl(it.rollouts));
    }
  }
  if (writing) res.pool.save(outDir + "/pool.jsonl");
  return res;
}

}  // namespace guiwb::harness
