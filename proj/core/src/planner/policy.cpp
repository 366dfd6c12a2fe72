#include "guiwb/planner/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "guiwb/error.hpp"
#include "guiwb/grounding/grounder.hpp"
#include "guiwb/text.hpp"

namespace guiwb::planner {

namespace {

bool is_template_word(std::string_view t) {
  static const std::set<std::string_view> words = {"open", "type", "into", "check", "press", "then",
                                                   "the",  "a",    "an",   "and",   "on",    "to"};
  return words.count(t) > 0;
}

bool already_taken(std::span<const dsl::Action> history, const dsl::Action& a) {
  return std::find(history.begin(), history.end(), a) != history.end();
}

FeatureVector base_features(const PlannerContext& ctx, const dsl::Action& a) {
  FeatureVector phi{};
  phi[feature::kProgress] =
      ctx.obs.maxSteps > 0 ? std::clamp(double(ctx.obs.stepIndex) / double(ctx.obs.maxSteps), 0.0, 1.0) : 0.0;
  phi[feature::kRepeat] = already_taken(ctx.history, a) ? 1.0 : 0.0;
  phi[feature::kBias] = 1.0;
  return phi;
}

void element_features(FeatureVector& phi, const sim::Element& e, const sim::Observation& obs,
                      const std::set<std::string>& instr) {
  phi[feature::kLabelOverlap] = text::jaccard(instr, grounding::content_tokens(e.label));
  phi[feature::kRoleBegin + static_cast<std::size_t>(e.role)] = 1.0;
  phi[feature::kTopHalf] = sim::visible_center(e, obs.scrollOffset).y < dsl::kViewport / 2 ? 1.0 : 0.0;
}

}  // namespace

std::set<std::string> instruction_tokens(std::string_view instruction) {
  std::set<std::string> out;
  for (auto& t : text::tokenize(instruction)) {
    if (!is_template_word(t)) out.insert(std::move(t));
  }
  return out;
}

std::string input_payload(std::string_view instruction) {
  auto open = instruction.find('"');
  if (open != std::string_view::npos) {
    auto close = instruction.find('"', open + 1);
    if (close != std::string_view::npos && close > open + 1) return std::string(instruction.substr(open + 1, close - open - 1));
  }
  auto toks = text::tokenize(instruction);
  for (auto it = toks.rbegin(); it != toks.rend(); ++it) {
    if (!is_template_word(*it)) return *it;
  }
  return {};
}

std::vector<Candidate> enumerate_candidates(const PlannerContext& ctx) {
  const auto instr = instruction_tokens(ctx.instruction);
  const std::string payload = input_payload(ctx.instruction);
  std::vector<Candidate> out;
  out.reserve(ctx.obs.visibleElements.size() + 4);

  for (const auto& e : ctx.obs.visibleElements) {
    dsl::Action a;
    std::size_t kindSlot = 0;
    if (e.role == sim::Role::Textbox) {
      a = dsl::Input{dsl::Descriptive{grounding::make_description(e, ctx.obs)}, payload};
      kindSlot = feature::kInput;
    } else if (sim::is_clickable(e.role)) {
      a = dsl::Click{dsl::Descriptive{grounding::make_description(e, ctx.obs)}};
      kindSlot = feature::kClick;
    } else {
      continue;
    }
    FeatureVector phi = base_features(ctx, a);
    element_features(phi, e, ctx.obs, instr);
    phi[kindSlot] = 1.0;
    out.push_back(Candidate{std::move(a), phi});
  }

  auto add = [&](dsl::Action a, std::size_t kindSlot) {
    FeatureVector phi = base_features(ctx, a);
    phi[kindSlot] = 1.0;
    out.push_back(Candidate{std::move(a), phi});
  };
  if (ctx.obs.scrollOffset < ctx.obs.scrollExtent) add(dsl::Scroll{dsl::ScrollDirection::Down, 1}, feature::kScroll);
  if (ctx.obs.scrollOffset > 0) add(dsl::Scroll{dsl::ScrollDirection::Up, 1}, feature::kScroll);
  if (ctx.obs.historyDepth > 0) add(dsl::Back{}, feature::kBack);
  dsl::Finish fin;
  if (!payload.empty()) fin.answer = payload;
  add(fin, feature::kFinish);
  return out;
}

std::vector<dsl::Action> candidates(const PlannerContext& ctx) {
  std::vector<dsl::Action> out;
  for (auto& c : enumerate_candidates(ctx)) out.push_back(std::move(c.action));
  return out;
}

FeatureVector state_features(std::span<const FeatureVector> phis, const sim::Observation& obs) {
  FeatureVector psi{};
  if (!phis.empty()) {
    for (const auto& phi : phis) {
      for (std::size_t i = 0; i < kFeatures; ++i) psi[i] += phi[i];
    }
    for (auto& v : psi) v /= static_cast<double>(phis.size());
  }
  for (std::size_t i = feature::kClick; i <= feature::kFinish; ++i) psi[i] = 0.0;
  psi[feature::kProgress] = obs.maxSteps > 0 ? std::clamp(double(obs.stepIndex) / double(obs.maxSteps), 0.0, 1.0) : 0.0;
  psi[feature::kBias] = 1.0;
  return psi;
}

FeatureVector state_features(std::span<const Candidate> cands, const sim::Observation& obs) {
  std::vector<FeatureVector> phis;
  phis.reserve(cands.size());
  for (const auto& c : cands) phis.push_back(c.phi);
  return state_features(std::span<const FeatureVector>(phis), obs);
}

double dot(const FeatureVector& a, const FeatureVector& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatures; ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> log_softmax(const PolicyParams& p, std::span<const FeatureVector> phis) {
  std::vector<double> z(phis.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phis.size(); ++i) {
    z[i] = dot(p.w, phis[i]) / p.temperature;
    mx = std::max(mx, z[i]);
  }
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  for (double& v : z) v -= lse;
  return z;
}

std::vector<double> softmax_probs(const PolicyParams& p, std::span<const FeatureVector> phis) {
  auto lp = log_softmax(p, phis);
  for (double& v : lp) v = std::exp(v);
  return lp;
}

FeatureVector grad_log_prob(const PolicyParams& p, std::span<const FeatureVector> phis, std::size_t chosen) {
  const auto probs = softmax_probs(p, phis);
  FeatureVector g = phis[chosen];
  for (std::size_t i = 0; i < phis.size(); ++i) {
    for (std::size_t k = 0; k < kFeatures; ++k) g[k] -= probs[i] * phis[i][k];
  }
  for (double& v : g) v /= p.temperature;
  return g;
}

ActResult act(const PolicyParams& p, const PlannerContext& ctx, Rng& rng) {
  auto cands = enumerate_candidates(ctx);
  ActResult res;
  res.features.reserve(cands.size());
  for (const auto& c : cands) res.features.push_back(c.phi);
  const auto lp = log_softmax(p, res.features);

  const double u = uniform01(rng);
  double acc = 0.0;
  res.index = cands.size() - 1;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    acc += std::exp(lp[i]);
    if (u < acc) {
      res.index = i;
      break;
    }
  }
  res.logProb = lp[res.index];
  res.action = cands[res.index].action;
  res.dist.reserve(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) res.dist.emplace_back(std::move(cands[i].action), std::exp(lp[i]));
  return res;
}

double log_prob(const PolicyParams& p, const PlannerContext& ctx, const dsl::Action& a) {
  const auto cands = enumerate_candidates(ctx);
  std::vector<FeatureVector> phis;
  for (const auto& c : cands) phis.push_back(c.phi);
  const auto lp = log_softmax(p, phis);
  double mass = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].action == a) {
      mass += std::exp(lp[i]);
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::NotACandidate, dsl::render_action(a));
  return std::log(mass);
}

dsl::Action oracle_planner(const sim::TaskSpec& task, int stepIndex) {
  if (stepIndex < 0 || stepIndex >= static_cast<int>(task.oracle.size())) {
    throw Error(ErrorKind::Index, "oracle step " + std::to_string(stepIndex) + " outside [0," +
                                      std::to_string(task.oracle.size()) + ")");
  }
  return task.oracle[static_cast<std::size_t>(stepIndex)];
}

std::string serialize_prompt(const PlannerContext& ctx) {
  std::string out(ctx.instruction);
  out += "\n";
  for (const auto& m : grounding::enumerate_som(ctx.obs)) {
    const sim::Element* e = nullptr;
    for (const auto& v : ctx.obs.visibleElements) {
      if (v.id == m.elementId) e = &v;
    }
    const auto c = sim::visible_center(*e, ctx.obs.scrollOffset);
    out += "[" + std::to_string(m.mark) + "] " + std::string(sim::to_string(m.role)) + " \"" + m.label + "\" (" +
           std::string(grounding::to_string(grounding::region_of(c.x, c.y))) + ")\n";
  }
  const std::size_t n = ctx.history.size();
  for (std::size_t i = n > 3 ? n - 3 : 0; i < n; ++i) out += dsl::render_action(ctx.history[i]) + "\n";
  return out;
}

dsl::Action external_planner_adapter(const PlannerCallback& callback, const PlannerContext& ctx) {
  if (!callback) throw Error(ErrorKind::Config, "no planner callback registered");
  std::string reply = callback(serialize_prompt(ctx));
  while (!reply.empty() && (reply.back() == '\n' || reply.back() == '\r')) reply.pop_back();
  return dsl::parse_action(reply);
}

}  // namespace guiwb::planner
