#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guiwb/random.hpp"
#include "guiwb/rl/learners.hpp"
#include "guiwb/sim/world.hpp"

namespace guiwb::curriculum {

enum class Direction { Complicate, Simplify };
enum class Status { Pending, Solved, Failed };

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(Status s) noexcept;
Direction direction_from_string(std::string_view s);
Status status_from_string(std::string_view s);

struct Provenance {
  bool seed = true;
  std::string parentId;  // mutated records only
  Direction direction = Direction::Complicate;
  bool operator==(const Provenance&) const = default;
};

struct InstructionRecord {
  std::string id;  // template key
  sim::TemplateParams templ;
  std::string instruction;
  int difficulty = 1;
  Provenance provenance;
  Status status = Status::Pending;
  int attempts = 0;
  std::int64_t created = 0;  // pool insertion counter; larger is newer
  bool operator==(const InstructionRecord&) const = default;
};

/// A seed record for a template; regenerates the task to fill in the text.
InstructionRecord make_seed_record(const sim::TemplateParams& t);

struct CurriculumConfig {
  double vLo = 0.05;
  double vHi = 0.75;
  double mixRatio = 0.5;
  std::size_t poolCap = 5000;
  int mutationsPerFailure = 2;
};

/// Throws ConfigError on out-of-range fields.
void validate(const CurriculumConfig& c);

class Pool {
 public:
  /// Inserts a record unless one with the same id exists; returns whether it was added.
  bool add(InstructionRecord r);

  InstructionRecord* find(std::string_view id);
  const InstructionRecord* find(std::string_view id) const;

  const std::vector<InstructionRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Drops the oldest mutated records until size() <= cap.
  void evict_to(std::size_t cap);

  /// JSON Lines, one record per line, in insertion order.
  std::string to_jsonl() const;
  static Pool from_jsonl(std::string_view text);
  void save(const std::string& path) const;
  static Pool load(const std::string& path);

 private:
  std::vector<InstructionRecord> records_;
  std::int64_t counter_ = 0;
};

struct EpisodeOutcome {
  std::string taskId;
  sim::Outcome outcome = sim::Outcome::Fail;
};

/// Marks each referenced record solved or failed and bumps its attempts;
/// returns the failed records (one entry per distinct id, in first-seen order).
/// Throws UnknownRecord.
std::vector<InstructionRecord> harvest_failures(const std::vector<EpisodeOutcome>& results, Pool& pool);

/// Complicate appends one step to the chain; simplify drops the last one.
/// The world seed is kept. Throws FloorReached when simplifying difficulty 1
/// and RangeError when complicating the maximum difficulty.
InstructionRecord mutate(const InstructionRecord& r, Direction direction, Rng& rng);

/// Critic value of the task's initial state.
double initial_value(const InstructionRecord& r, const rl::CriticParams& critic);

/// Candidates with vLo <= V(s0) <= vHi.
std::vector<InstructionRecord> critic_filter(const std::vector<InstructionRecord>& candidates,
                                             const rl::CriticParams& critic, double vLo, double vHi);

/// `budget` records: round(mixRatio * budget) from unsolved mutated records,
/// newest first, the rest from unsolved seed records in a seeded random
/// order; either side tops up the other when short, and records repeat when
/// the pool is smaller than the budget. Evicts to poolCap first. Throws EmptyPool.
std::vector<InstructionRecord> schedule_iteration(Pool& pool, const CurriculumConfig& config, int budget, Rng& rng);

}  // namespace guiwb::curriculum
