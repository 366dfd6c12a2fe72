#include "guiwb/reward/orm.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "guiwb/error.hpp"
#include "guiwb/text.hpp"

namespace guiwb::reward {

Summary summarize(const rl::Trajectory& t, std::string_view instruction) {
  if (!t.finished) throw Error(ErrorKind::UnfinishedTrajectory, "trajectory '" + t.taskId + "' has not finished");
  Summary s{};
  const double len = static_cast<double>(t.steps.size());
  if (t.answer) s[0] = text::jaccard(text::token_set(*t.answer), text::token_set(instruction));
  // An immediate Finish is one step long.
  s[1] = t.maxSteps > 0 ? std::min(1.0, std::max(len, 1.0) / t.maxSteps) : 0.0;
  double missed = 0.0;
  bool input = false;
  for (const auto& st : t.steps) {
    missed += st.missedClick ? 1.0 : 0.0;
    input = input || std::holds_alternative<dsl::Input>(st.action);
  }
  s[2] = len > 0 ? missed / len : 0.0;
  s[3] = t.screensInWorld > 0 ? std::min(1.0, double(t.visitedScreens.size()) / t.screensInWorld) : 0.0;
  s[4] = t.finalScreenHasFlag ? 1.0 : 0.0;
  s[5] = input ? 1.0 : 0.0;
  s[6] = t.answer.has_value() ? 1.0 : 0.0;
  s[7] = 1.0;
  return s;
}

namespace {

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(const Summary& a, const Summary& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < kSummaryFeatures; ++i) s += a[i] * b[i];
  return s;
}

// log(1 + e^z) without overflow.
double softplus(double z) noexcept { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double orm_loss(const OrmParams& p, std::span<const OrmExample> data) {
  if (data.empty()) return 0.0;
  double l = 0.0;
  for (const auto& ex : data) {
    const double z = dot(p.u, ex.s);
    l += ex.label ? softplus(-z) : softplus(z);
  }
  return l / static_cast<double>(data.size());
}

Summary orm_grad(const OrmParams& p, std::span<const OrmExample> data) {
  Summary g{};
  if (data.empty()) return g;
  for (const auto& ex : data) {
    const double e = sigmoid(dot(p.u, ex.s)) - ex.label;
    for (std::size_t i = 0; i < kSummaryFeatures; ++i) g[i] += e * ex.s[i];
  }
  for (double& v : g) v /= static_cast<double>(data.size());
  return g;
}

OrmTrainResult orm_train(std::span<const OrmExample> data, double lr, int epochs) {
  if (data.size() < 2) throw Error(ErrorKind::EmptyData, "ORM training needs at least two examples");
  OrmTrainResult res;
  res.params.trainedOn = static_cast<std::int64_t>(data.size());
  std::size_t positives = 0;
  for (const auto& ex : data) positives += ex.label ? 1 : 0;
  if (positives == 0 || positives == data.size()) {
    // Constant predictor: a large bias toward the only class seen.
    res.degenerate = true;
    res.params.u[kSummaryFeatures - 1] = positives ? 10.0 : -10.0;
    res.lossTrace.push_back(orm_loss(res.params, data));
    return res;
  }
  for (int e = 0; e < epochs; ++e) {
    res.lossTrace.push_back(orm_loss(res.params, data));
    const auto g = orm_grad(res.params, data);
    for (std::size_t i = 0; i < kSummaryFeatures; ++i) res.params.u[i] -= lr * g[i];
  }
  res.lossTrace.push_back(orm_loss(res.params, data));
  return res;
}

double orm_score(const OrmParams& p, const Summary& s) noexcept { return sigmoid(dot(p.u, s)); }

bool orm_verdict(const OrmParams& p, const rl::Trajectory& t) {
  return orm_score(p, summarize(t, t.instruction)) >= 0.5;
}

std::string orm_to_json(const OrmParams& p) {
  nlohmann::ordered_json j;
  j["G"] = kSummaryFeatures;
  j["u"] = p.u;
  j["trainedOn"] = p.trainedOn;
  return j.dump();
}

OrmParams orm_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("G").get<std::size_t>() != kSummaryFeatures) throw Error(ErrorKind::Config, "ORM checkpoint has wrong G");
    OrmParams p;
    const auto u = j.at("u").get<std::vector<double>>();
    if (u.size() != kSummaryFeatures) throw Error(ErrorKind::Config, "ORM checkpoint has wrong u length");
    std::copy(u.begin(), u.end(), p.u.begin());
    p.trainedOn = j.at("trainedOn").get<std::int64_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad ORM checkpoint: ") + e.what());
  }
}

void save_orm(const OrmParams& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << orm_to_json(p) << "\n";
}

OrmParams load_orm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return orm_from_json(ss.str());
}

}  // namespace guiwb::reward
