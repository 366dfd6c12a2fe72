#include "guiwb/harness/config.hpp"

#include <functional>
#include <json.hpp>
#include <map>

#include "guiwb/error.hpp"
#include "guiwb/harness/report.hpp"

namespace guiwb::harness {

namespace {

using Json = nlohmann::ordered_json;

template <typename T>
T get(const nlohmann::json& v, std::string_view key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Config, "config key '" + std::string(key) + "' has the wrong type");
  }
}

std::pair<double, double> band(const nlohmann::json& v, std::string_view key) {
  const auto b = get<std::vector<double>>(v, key);
  if (b.size() != 2) throw Error(ErrorKind::Config, "config key '" + std::string(key) + "' needs [lo, hi]");
  return {b[0], b[1]};
}

using Setter = std::function<void(ExperimentConfig&, const nlohmann::json&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      // TrainConfig
      {"gamma", [](auto& c, auto& v, auto k) { c.train.gamma = get<double>(v, k); }},
      {"beta", [](auto& c, auto& v, auto k) { c.train.beta = get<double>(v, k); }},
      {"lrPolicy", [](auto& c, auto& v, auto k) { c.train.lrPolicy = get<double>(v, k); }},
      {"lrCritic", [](auto& c, auto& v, auto k) { c.train.lrCritic = get<double>(v, k); }},
      {"confidenceBand",
       [](auto& c, auto& v, auto k) {
         auto [lo, hi] = band(v, k);
         c.train.band = rl::ConfidenceBand{lo, hi};
       }},
      {"policyBatch", [](auto& c, auto& v, auto k) { c.train.policyBatch = get<int>(v, k); }},
      {"criticBatch", [](auto& c, auto& v, auto k) { c.train.criticBatch = get<int>(v, k); }},
      {"policyEpochs", [](auto& c, auto& v, auto k) { c.train.policyEpochs = get<int>(v, k); }},
      {"criticEpochs", [](auto& c, auto& v, auto k) { c.train.criticEpochs = get<int>(v, k); }},
      {"rolloutBudget", [](auto& c, auto& v, auto k) { c.train.rolloutBudget = get<int>(v, k); }},
      {"replayCapacity", [](auto& c, auto& v, auto k) { c.train.replayCapacity = get<std::size_t>(v, k); }},
      {"rewardSource",
       [](auto& c, auto& v, auto k) { c.train.rewardSource = rl::reward_source_from_string(get<std::string>(v, k)); }},
      // CurriculumConfig
      {"valueBand",
       [](auto& c, auto& v, auto k) {
         auto [lo, hi] = band(v, k);
         c.curriculum.vLo = lo;
         c.curriculum.vHi = hi;
       }},
      {"mixRatio", [](auto& c, auto& v, auto k) { c.curriculum.mixRatio = get<double>(v, k); }},
      {"poolCap", [](auto& c, auto& v, auto k) { c.curriculum.poolCap = get<std::size_t>(v, k); }},
      {"mutationsPerFailure", [](auto& c, auto& v, auto k) { c.curriculum.mutationsPerFailure = get<int>(v, k); }},
      // RunConfig
      {"masterSeed", [](auto& c, auto& v, auto k) { c.run.masterSeed = get<std::uint64_t>(v, k); }},
      {"workers",
       [](auto& c, auto& v, auto k) {
         c.run.workers = get<int>(v, k);
         c.train.workers = c.run.workers;
       }},
      {"groundingEpsilon",
       [](auto& c, auto& v, auto k) {
         c.run.groundingEpsilon = get<double>(v, k);
         c.train.groundingEpsilon = c.run.groundingEpsilon;
       }},
      {"plannerKind", [](auto& c, auto& v, auto k) { c.run.plannerKind = planner_kind_from_string(get<std::string>(v, k)); }},
      {"noiseP", [](auto& c, auto& v, auto k) { c.run.noiseP = get<double>(v, k); }},
      {"interfaceMode",
       [](auto& c, auto& v, auto k) { c.run.interfaceMode = interface_mode_from_string(get<std::string>(v, k)); }},
      {"perturbLayout", [](auto& c, auto& v, auto k) { c.run.perturbLayout = get<bool>(v, k); }},
      {"maxShift", [](auto& c, auto& v, auto k) { c.run.maxShift = get<int>(v, k); }},
      // Training loop
      {"iterations", [](auto& c, auto& v, auto k) { c.loop.iterations = get<int>(v, k); }},
      {"seedTasks", [](auto& c, auto& v, auto k) { c.loop.seedTasks = get<int>(v, k); }},
      {"evalTasks", [](auto& c, auto& v, auto k) { c.loop.evalTasks = get<int>(v, k); }},
      {"minDifficulty", [](auto& c, auto& v, auto k) { c.loop.minDifficulty = get<int>(v, k); }},
      {"maxDifficulty", [](auto& c, auto& v, auto k) { c.loop.maxDifficulty = get<int>(v, k); }},
      {"criticFilter", [](auto& c, auto& v, auto k) { c.loop.criticFilter = get<bool>(v, k); }},
      {"bcCount", [](auto& c, auto& v, auto k) { c.loop.bcCount = get<int>(v, k); }},
      {"bcMaxDifficulty", [](auto& c, auto& v, auto k) { c.loop.bcMaxDifficulty = get<int>(v, k); }},
      {"bcLr", [](auto& c, auto& v, auto k) { c.loop.bcLr = get<double>(v, k); }},
      {"bcEpochs", [](auto& c, auto& v, auto k) { c.loop.bcEpochs = get<int>(v, k); }},
      {"ormCount", [](auto& c, auto& v, auto k) { c.loop.ormCount = get<int>(v, k); }},
      {"ormLr", [](auto& c, auto& v, auto k) { c.loop.ormLr = get<double>(v, k); }},
      {"ormEpochs", [](auto& c, auto& v, auto k) { c.loop.ormEpochs = get<int>(v, k); }},
  };
  return table;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  rl::validate(c.train);
  curriculum::validate(c.curriculum);
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (c.run.workers < 1) fail("workers must be >= 1");
  if (c.run.groundingEpsilon < 0.0 || c.run.groundingEpsilon > 1.0) fail("groundingEpsilon must lie in [0, 1]");
  if (c.run.noiseP < 0.0 || c.run.noiseP > 1.0) fail("noiseP must lie in [0, 1]");
  if (c.run.maxShift < 0) fail("maxShift must be >= 0");
  const auto& l = c.loop;
  if (l.iterations < 0 || l.seedTasks < 1 || l.evalTasks < 0) fail("loop sizes out of range");
  if (l.minDifficulty < 1 || l.maxDifficulty > 12 || l.minDifficulty > l.maxDifficulty) fail("difficulty range out of [1, 12]");
  if (l.bcCount < 0 || l.bcEpochs < 0 || l.bcMaxDifficulty < 1 || l.bcMaxDifficulty > 12) fail("BC settings out of range");
  if (l.ormCount < 0 || l.ormEpochs < 0) fail("ORM settings out of range");
}

ExperimentConfig config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
    it->second(c, value, key);
  }
  validate(c);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  Json j;
  j["gamma"] = c.train.gamma;
  j["beta"] = c.train.beta;
  j["lrPolicy"] = c.train.lrPolicy;
  j["lrCritic"] = c.train.lrCritic;
  j["confidenceBand"] = {c.train.band.lo, c.train.band.hi};
  j["policyBatch"] = c.train.policyBatch;
  j["criticBatch"] = c.train.criticBatch;
  j["policyEpochs"] = c.train.policyEpochs;
  j["criticEpochs"] = c.train.criticEpochs;
  j["rolloutBudget"] = c.train.rolloutBudget;
  j["replayCapacity"] = c.train.replayCapacity;
  j["rewardSource"] = std::string(rl::to_string(c.train.rewardSource));
  j["valueBand"] = {c.curriculum.vLo, c.curriculum.vHi};
  j["mixRatio"] = c.curriculum.mixRatio;
  j["poolCap"] = c.curriculum.poolCap;
  j["mutationsPerFailure"] = c.curriculum.mutationsPerFailure;
  j["masterSeed"] = c.run.masterSeed;
  j["workers"] = c.run.workers;
  j["groundingEpsilon"] = c.run.groundingEpsilon;
  j["plannerKind"] = std::string(to_string(c.run.plannerKind));
  j["noiseP"] = c.run.noiseP;
  j["interfaceMode"] = std::string(to_string(c.run.interfaceMode));
  j["perturbLayout"] = c.run.perturbLayout;
  j["maxShift"] = c.run.maxShift;
  j["iterations"] = c.loop.iterations;
  j["seedTasks"] = c.loop.seedTasks;
  j["evalTasks"] = c.loop.evalTasks;
  j["minDifficulty"] = c.loop.minDifficulty;
  j["maxDifficulty"] = c.loop.maxDifficulty;
  j["criticFilter"] = c.loop.criticFilter;
  j["bcCount"] = c.loop.bcCount;
  j["bcMaxDifficulty"] = c.loop.bcMaxDifficulty;
  j["bcLr"] = c.loop.bcLr;
  j["bcEpochs"] = c.loop.bcEpochs;
  j["ormCount"] = c.loop.ormCount;
  j["ormLr"] = c.loop.ormLr;
  j["ormEpochs"] = c.loop.ormEpochs;
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

}  // namespace guiwb::harness
