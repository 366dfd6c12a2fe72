#include "guiwb/curriculum/pool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "guiwb/error.hpp"
#include "guiwb/planner/policy.hpp"
#include "guiwb/sim/generator.hpp"

namespace guiwb::curriculum {

std::string_view to_string(Direction d) noexcept { return d == Direction::Complicate ? "complicate" : "simplify"; }

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Pending:
      return "pending";
    case Status::Solved:
      return "solved";
    case Status::Failed:
      return "failed";
  }
  return "pending";
}

Direction direction_from_string(std::string_view s) {
  if (s == "complicate") return Direction::Complicate;
  if (s == "simplify") return Direction::Simplify;
  throw Error(ErrorKind::Config, "unknown mutation direction '" + std::string(s) + "'");
}

Status status_from_string(std::string_view s) {
  if (s == "pending") return Status::Pending;
  if (s == "solved") return Status::Solved;
  if (s == "failed") return Status::Failed;
  throw Error(ErrorKind::Config, "unknown record status '" + std::string(s) + "'");
}

InstructionRecord make_seed_record(const sim::TemplateParams& t) {
  const auto [world, task] = sim::generate_from_template(t);
  InstructionRecord r;
  r.id = task.id;
  r.templ = t;
  r.instruction = task.instruction;
  r.difficulty = task.difficulty;
  return r;
}

void validate(const CurriculumConfig& c) {
  if (!(c.vLo >= 0.0 && c.vLo < c.vHi)) throw Error(ErrorKind::Config, "value band needs 0 <= vLo < vHi");
  if (!(c.mixRatio >= 0.0 && c.mixRatio <= 1.0)) throw Error(ErrorKind::Config, "mixRatio must lie in [0, 1]");
  if (c.poolCap == 0) throw Error(ErrorKind::Config, "poolCap must be positive");
  if (c.mutationsPerFailure < 0) throw Error(ErrorKind::Config, "mutationsPerFailure must be >= 0");
}

bool Pool::add(InstructionRecord r) {
  if (find(r.id)) return false;
  r.created = counter_++;
  records_.push_back(std::move(r));
  return true;
}

InstructionRecord* Pool::find(std::string_view id) {
  auto it = std::find_if(records_.begin(), records_.end(), [&](const auto& r) { return r.id == id; });
  return it == records_.end() ? nullptr : &*it;
}

const InstructionRecord* Pool::find(std::string_view id) const { return const_cast<Pool*>(this)->find(id); }

void Pool::evict_to(std::size_t cap) {
  // records_ is in insertion order, so the first mutated records are the oldest.
  std::size_t excess = records_.size() > cap ? records_.size() - cap : 0;
  std::erase_if(records_, [&](const InstructionRecord& r) {
    if (excess == 0 || r.provenance.seed) return false;
    --excess;
    return true;
  });
}

namespace {

nlohmann::ordered_json record_json(const InstructionRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  std::string chain;
  for (auto k : r.templ.chain) chain.push_back(sim::step_code(k));
  j["templateParams"] = {{"seed", r.templ.seed}, {"chain", chain}};
  j["instruction"] = r.instruction;
  j["difficulty"] = r.difficulty;
  if (r.provenance.seed) {
    j["provenance"] = {{"kind", "seed"}};
  } else {
    j["provenance"] = {{"kind", "mutatedFrom"},
                       {"parent", r.provenance.parentId},
                       {"direction", std::string(to_string(r.provenance.direction))}};
  }
  j["status"] = std::string(to_string(r.status));
  j["attempts"] = r.attempts;
  j["created"] = r.created;
  return j;
}

InstructionRecord record_from_json(const nlohmann::json& j) {
  InstructionRecord r;
  r.id = j.at("id").get<std::string>();
  const auto& t = j.at("templateParams");
  r.templ = sim::parse_template_key("w" + std::to_string(t.at("seed").get<std::uint64_t>()) + "-" +
                                    t.at("chain").get<std::string>());
  r.instruction = j.at("instruction").get<std::string>();
  r.difficulty = j.at("difficulty").get<int>();
  const auto& p = j.at("provenance");
  const auto kind = p.at("kind").get<std::string>();
  if (kind == "seed") {
    r.provenance = Provenance{};
  } else if (kind == "mutatedFrom") {
    r.provenance.seed = false;
    r.provenance.parentId = p.at("parent").get<std::string>();
    r.provenance.direction = direction_from_string(p.at("direction").get<std::string>());
  } else {
    throw Error(ErrorKind::Config, "unknown provenance kind '" + kind + "'");
  }
  r.status = status_from_string(j.at("status").get<std::string>());
  r.attempts = j.at("attempts").get<int>();
  r.created = j.at("created").get<std::int64_t>();
  if (r.id != sim::template_key(r.templ)) throw Error(ErrorKind::Config, "record id does not match its template");
  return r;
}

}  // namespace

std::string Pool::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) out += record_json(r).dump() + "\n";
  return out;
}

Pool Pool::from_jsonl(std::string_view text) {
  Pool pool;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto r = record_from_json(nlohmann::json::parse(line));
      pool.counter_ = std::max(pool.counter_, r.created + 1);
      pool.records_.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Config, std::string("bad pool record: ") + e.what());
    }
  }
  return pool;
}

void Pool::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << to_jsonl();
}

Pool Pool::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

std::vector<InstructionRecord> harvest_failures(const std::vector<EpisodeOutcome>& results, Pool& pool) {
  for (const auto& res : results) {
    if (!pool.find(res.taskId)) throw Error(ErrorKind::UnknownRecord, "no pool record '" + res.taskId + "'");
  }
  std::vector<InstructionRecord> failed;
  for (const auto& res : results) {
    InstructionRecord* r = pool.find(res.taskId);
    ++r->attempts;
    if (res.outcome == sim::Outcome::Success) {
      r->status = Status::Solved;
    } else {
      r->status = Status::Failed;
    }
  }
  // Report each failing id once, with its final bookkeeping.
  std::vector<std::string> seen;
  for (const auto& res : results) {
    if (res.outcome == sim::Outcome::Success) continue;
    if (std::find(seen.begin(), seen.end(), res.taskId) != seen.end()) continue;
    seen.push_back(res.taskId);
    failed.push_back(*pool.find(res.taskId));
  }
  return failed;
}

InstructionRecord mutate(const InstructionRecord& r, Direction direction, Rng& rng) {
  sim::TemplateParams t = r.templ;
  if (direction == Direction::Simplify) {
    if (t.chain.size() <= 1) throw Error(ErrorKind::FloorReached, "cannot simplify difficulty-1 record '" + r.id + "'");
    t.chain.pop_back();
  } else {
    if (static_cast<int>(t.chain.size()) >= sim::kMaxDifficulty) {
      throw Error(ErrorKind::Range, "record '" + r.id + "' is already at the maximum difficulty");
    }
    t.chain.push_back(sim::draw_step_kind(t.chain, rng));
  }
  InstructionRecord child = make_seed_record(t);
  child.provenance = Provenance{false, r.id, direction};
  return child;
}

double initial_value(const InstructionRecord& r, const rl::CriticParams& critic) {
  const auto [world, task] = sim::generate_from_template(r.templ);
  const auto obs = sim::initial_observation(world, world.initialScreen, task.max_steps());
  const planner::PlannerContext ctx{obs, task.instruction, {}};
  const auto cands = planner::enumerate_candidates(ctx);
  return rl::critic_value(critic, planner::state_features(std::span<const planner::Candidate>(cands), obs));
}

std::vector<InstructionRecord> critic_filter(const std::vector<InstructionRecord>& candidates,
                                             const rl::CriticParams& critic, double vLo, double vHi) {
  std::vector<InstructionRecord> out;
  for (const auto& c : candidates) {
    const double v = initial_value(c, critic);
    if (v >= vLo && v <= vHi) out.push_back(c);
  }
  return out;
}

std::vector<InstructionRecord> schedule_iteration(Pool& pool, const CurriculumConfig& config, int budget, Rng& rng) {
  validate(config);
  if (pool.empty()) throw Error(ErrorKind::EmptyPool, "cannot schedule from an empty pool");
  pool.evict_to(config.poolCap);
  if (budget <= 0) return {};

  std::vector<const InstructionRecord*> evolved;
  std::vector<const InstructionRecord*> seeds;
  for (const auto& r : pool.records()) {
    if (r.status == Status::Solved) continue;
    (r.provenance.seed ? seeds : evolved).push_back(&r);
  }
  std::sort(evolved.begin(), evolved.end(), [](auto* a, auto* b) { return a->created > b->created; });
  shuffle(seeds, rng);
  if (evolved.empty() && seeds.empty()) {
    // Everything is solved: fall back to the whole pool.
    for (const auto& r : pool.records()) seeds.push_back(&r);
    shuffle(seeds, rng);
  }

  const auto n = static_cast<std::size_t>(budget);
  std::size_t wantEvolved = static_cast<std::size_t>(std::llround(config.mixRatio * static_cast<double>(n)));
  std::size_t takeEvolved = std::min(wantEvolved, evolved.size());
  std::size_t takeSeeds = std::min(n - takeEvolved, seeds.size());
  takeEvolved = std::min(evolved.size(), n - takeSeeds);

  std::vector<InstructionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < takeEvolved; ++i) out.push_back(*evolved[i]);
  for (std::size_t i = 0; i < takeSeeds; ++i) out.push_back(*seeds[i]);
  // Short pool: repeat what was drawn.
  for (std::size_t i = 0; out.size() < n; ++i) out.push_back(out[i]);
  return out;
}

}  // namespace guiwb::curriculum
