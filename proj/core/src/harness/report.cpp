#include "guiwb/harness/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "guiwb/error.hpp"

namespace guiwb::harness {

namespace {

using Json = nlohmann::ordered_json;

Json to_json(const EpisodeResult& r) {
  Json j;
  j["taskId"] = r.taskId;
  j["attempt"] = r.attempt;
  j["outcome"] = std::string(sim::to_string(r.outcome));
  j["steps"] = r.steps;
  j["totalReward"] = r.totalReward;
  j["seedUsed"] = r.seedUsed;
  j["difficulty"] = r.difficulty;
  j["transportFailure"] = r.transportFailure;
  return j;
}

EpisodeResult result_from(const nlohmann::json& j) {
  EpisodeResult r;
  r.taskId = j.at("taskId").get<std::string>();
  r.attempt = j.at("attempt").get<int>();
  r.outcome = sim::outcome_from_string(j.at("outcome").get<std::string>());
  r.steps = j.at("steps").get<int>();
  r.totalReward = j.at("totalReward").get<double>();
  r.seedUsed = j.at("seedUsed").get<std::uint64_t>();
  r.difficulty = j.at("difficulty").get<int>();
  r.transportFailure = j.at("transportFailure").get<bool>();
  return r;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string percent(double v) { return fixed(100.0 * v, 1) + "%"; }

}  // namespace

std::string report_json(const MetricsReport& m) {
  Json j;
  j["method"] = m.method;
  j["SR"] = m.sr;
  j["passAt2"] = m.passAt2;
  j["partialRate"] = m.partialRate;
  j["failRate"] = m.failRate;
  j["tasks"] = m.tasks;
  j["episodes"] = m.episodes;
  Json per = Json::array();
  for (const auto& [d, dm] : m.perDifficulty) {
    per.push_back({{"difficulty", d}, {"tasks", dm.tasks}, {"successes", dm.successes}, {"SR", dm.sr}});
  }
  j["perDifficulty"] = std::move(per);
  Json rows = Json::array();
  for (const auto& r : m.results) rows.push_back(to_json(r));
  j["results"] = std::move(rows);
  return j.dump(2) + "\n";
}

MetricsReport parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport m;
    m.method = j.at("method").get<std::string>();
    m.sr = j.at("SR").get<double>();
    m.passAt2 = j.at("passAt2").get<double>();
    m.partialRate = j.at("partialRate").get<double>();
    m.failRate = j.at("failRate").get<double>();
    m.tasks = j.at("tasks").get<int>();
    m.episodes = j.at("episodes").get<int>();
    for (const auto& p : j.at("perDifficulty")) {
      m.perDifficulty[p.at("difficulty").get<int>()] =
          DifficultyMetrics{p.at("tasks").get<int>(), p.at("successes").get<int>(), p.at("SR").get<double>()};
    }
    for (const auto& r : j.at("results")) m.results.push_back(result_from(r));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad report: ") + e.what());
  }
}

std::string report_csv(const MetricsReport& m) {
  std::string out = "taskId,attempt,outcome,steps,totalReward,seedUsed,difficulty,transportFailure\n";
  for (const auto& r : m.results) {
    out += r.taskId + "," + std::to_string(r.attempt) + "," + std::string(sim::to_string(r.outcome)) + "," +
           std::to_string(r.steps) + "," + fixed(r.totalReward, 6) + "," + std::to_string(r.seedUsed) + "," +
           std::to_string(r.difficulty) + "," + (r.transportFailure ? "true" : "false") + "\n";
  }
  return out;
}

std::string report_markdown(const std::vector<MetricsReport>& reports) {
  std::string out = "| Method | SR | Pass@2 | Partial | Fail | Tasks |\n|---|---|---|---|---|---|\n";
  for (const auto& m : reports) {
    out += "| " + (m.method.empty() ? std::string("-") : m.method) + " | " + percent(m.sr) + " | " +
           percent(m.passAt2) + " | " + percent(m.partialRate) + " | " + percent(m.failRate) + " | " +
           std::to_string(m.tasks) + " |\n";
  }
  for (const auto& m : reports) {
    out += "\n### " + (m.method.empty() ? std::string("Per difficulty") : m.method) + "\n\n";
    out += "| Difficulty | Tasks | SR |\n|---|---|---|\n";
    for (const auto& [d, dm] : m.perDifficulty) {
      out += "| " + std::to_string(d) + " | " + std::to_string(dm.tasks) + " | " + percent(dm.sr) + " |\n";
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path);
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create directory " + dir);
}

}  // namespace

void report_emit(const MetricsReport& m, const std::string& dir) {
  ensure_dir(dir);
  write_file(dir + "/report.json", report_json(m));
  write_file(dir + "/report.csv", report_csv(m));
  write_file(dir + "/report.md", report_markdown({m}));
}

void ablation_emit(const AblationReport& a, const std::string& dir) {
  ensure_dir(dir);
  report_emit(a.endToEnd, dir + "/end-to-end");
  report_emit(a.intermediate, dir + "/intermediate");
  Json j;
  j["SR_endToEnd"] = a.endToEnd.sr;
  j["SR_intermediate"] = a.intermediate.sr;
  j["delta"] = a.delta;
  write_file(dir + "/ablation.json", j.dump(2) + "\n");
  write_file(dir + "/report.md", report_markdown({a.endToEnd, a.intermediate}) + "\nDelta (intermediate - end-to-end): " +
                                     fixed(100.0 * a.delta, 1) + " points\n");
}

}  // namespace guiwb::harness
