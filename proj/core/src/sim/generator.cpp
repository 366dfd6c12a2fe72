#include "guiwb/sim/generator.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "guiwb/error.hpp"
#include "guiwb/grounding/grounder.hpp"

namespace guiwb::sim {

namespace {

// Label vocabulary. None of these collide with role, spatial, article or
// instruction-template words.
const std::vector<std::string> kModifiers = {
    "recent", "saved",  "express", "premium", "daily",  "weekly", "monthly", "quick",  "secure", "default",
    "primary", "shared", "private", "public",  "archived", "pending", "active", "favorite", "featured", "local",
    "global", "mobile", "annual",  "custom",  "classic", "smart",  "family",  "guest"};

const std::vector<std::string> kNouns = {
    "orders",  "account", "profile", "settings",     "cart",     "checkout", "payment", "shipping", "address",
    "coupon",  "review",  "rating",  "message",      "inbox",    "contact",  "booking", "reservation", "ticket",
    "flight",  "hotel",   "restaurant", "menu",      "invoice",  "receipt",  "wallet",  "balance",  "transfer",
    "history", "notification", "privacy", "security", "password", "email",   "phone",   "language", "theme",
    "subscription", "newsletter", "wishlist", "gift", "delivery", "pickup",  "calendar", "photo",   "album",
    "playlist", "story",  "comment"};

const std::vector<std::string> kPayloads = {"latte", "amsterdam", "tuesday", "umbrella", "kyoto",  "saturday", "espresso",
                                            "lisbon", "jasmine",  "oslo",    "friday",   "violet", "mocha",    "berlin",
                                            "sunday", "chai",     "vienna",  "copper",   "maple",  "harbor"};

constexpr int kColumns = 3;
constexpr int kMaxElements = 12;
constexpr int kRows = 6;
constexpr int kCellW = 333;
constexpr int kCellH = 166;

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct LabelParts {
  std::string mod;
  std::string noun;
  std::string text() const { return capitalize(mod) + " " + noun; }
  bool operator==(const LabelParts&) const = default;
};

struct Draft {
  Role role = Role::Button;
  LabelParts label;
  Effect click;
  bool textEntry = false;
  bool checked = false;
  int step = -1;  // chain index for targets
  bool belowFold = false;
};

class WorldBuilder {
 public:
  explicit WorldBuilder(const TemplateParams& t)
      : t_(t), rng_(make_rng(stable_hash({t.seed, stable_hash(template_key(t))}))) {}

  std::pair<World, TaskSpec> build() {
    const int d = static_cast<int>(t_.chain.size());
    if (d < kMinDifficulty || d > kMaxDifficulty) {
      throw Error(ErrorKind::Range, "difficulty " + std::to_string(d) + " outside [1,12]");
    }
    payload_ = pick(kPayloads, rng_);

    std::vector<std::string> mods = kModifiers;
    std::vector<std::string> nouns = kNouns;
    shuffle(mods, rng_);
    shuffle(nouns, rng_);
    for (int k = 0; k < d; ++k) targets_.push_back(LabelParts{mods[k], nouns[k]});
    freeMods_.assign(mods.begin() + d, mods.end());
    freeNouns_.assign(nouns.begin() + d, nouns.end());

    // Main-path screens: one per navigation step plus the start screen.
    std::vector<std::vector<int>> stepsOn(1);
    for (int k = 0; k < d; ++k) {
      stepsOn.back().push_back(k);
      if (t_.chain[k] == StepKind::Navigate) stepsOn.emplace_back();
    }
    const int mainScreens = static_cast<int>(stepsOn.size());
    nextScreen_ = mainScreens;
    stepScreen_.assign(d, 0);
    stepElement_.assign(d, 0);

    world_.seed = t_.seed;
    world_.provenance = stable_hash(template_key(t_));
    world_.initialScreen = 0;
    for (int s = 0; s < mainScreens; ++s) build_main_screen(s, stepsOn[s]);

    return {world_, make_task()};
  }

 private:
  LabelParts sharing_label(const std::vector<int>& localSteps) {
    const bool local = !localSteps.empty() && uniform01(rng_) < 0.9;
    const LabelParts& src = local ? targets_[pick(localSteps, rng_)] : pick(targets_, rng_);
    if (uniform01(rng_) < 0.5) return {src.mod, pick(freeNouns_, rng_)};
    return {pick(freeMods_, rng_), src.noun};
  }

  LabelParts unrelated_label() { return {pick(freeMods_, rng_), pick(freeNouns_, rng_)}; }

  Role distractor_role() {
    static const std::vector<Role> weighted = {Role::Button,   Role::Button,   Role::Button,  Role::Link,
                                               Role::Link,     Role::Link,     Role::ListItem, Role::ListItem,
                                               Role::Checkbox, Role::Textbox,  Role::Label,   Role::Label};
    return pick(weighted, rng_);
  }

  Draft distractor(LabelParts label, bool allowNavigation) {
    Draft dr;
    dr.role = distractor_role();
    dr.label = std::move(label);
    switch (dr.role) {
      case Role::Link:
      case Role::ListItem:
        if (allowNavigation) dr.click = Effect{EffectKind::Navigate, -1};
        break;
      case Role::Checkbox:
        dr.click = Effect{EffectKind::Toggle, 0};
        dr.checked = uniform01(rng_) < 0.5;
        break;
      case Role::Textbox:
        dr.textEntry = true;
        break;
      default:
        break;
    }
    return dr;
  }

  bool label_taken(const std::vector<Draft>& drafts, const LabelParts& l) const {
    return std::any_of(drafts.begin(), drafts.end(), [&](const Draft& x) { return x.label == l; });
  }

  template <typename MakeLabel>
  void add_unique(std::vector<Draft>& drafts, MakeLabel make, bool allowNavigation) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      LabelParts l = make();
      if (!label_taken(drafts, l)) {
        drafts.push_back(distractor(std::move(l), allowNavigation));
        return;
      }
    }
  }

  void build_main_screen(int sid, const std::vector<int>& steps) {
    std::vector<Draft> drafts;
    for (int k : steps) {
      Draft dr;
      dr.step = k;
      dr.label = targets_[k];
      switch (t_.chain[k]) {
        case StepKind::Navigate:
          dr.role = uniform01(rng_) < 0.7 ? Role::Link : Role::ListItem;
          dr.click = Effect{EffectKind::Navigate, sid + 1};
          break;
        case StepKind::Input:
          dr.role = Role::Textbox;
          dr.textEntry = true;
          break;
        case StepKind::Toggle:
          dr.role = Role::Checkbox;
          dr.click = Effect{EffectKind::Toggle, 0};
          break;
        case StepKind::Submit:
          dr.role = Role::Button;
          dr.click = Effect{EffectKind::SubmitFlag, k};
          world_.flags.insert(k);
          break;
      }
      drafts.push_back(std::move(dr));
    }

    // At most 5 targets, so every screen keeps 4..12 elements.
    const bool scrollable = uniform01(rng_) < 0.3;
    const int below = scrollable ? static_cast<int>(uniform_int(rng_, 1, 2)) : 0;
    const int room = kMaxElements - static_cast<int>(drafts.size()) - below - 1;
    const int sharing = std::min(static_cast<int>(uniform_int(rng_, 4, 6)), room);
    for (int i = 0; i < sharing; ++i) add_unique(drafts, [&] { return sharing_label(steps); }, true);

    int unrelated = static_cast<int>(uniform_int(rng_, 1, 3));
    unrelated = std::min(unrelated, kMaxElements - static_cast<int>(drafts.size()) - below);
    for (int i = 0; i < unrelated; ++i) add_unique(drafts, [&] { return unrelated_label(); }, true);
    for (int i = 0; i < below; ++i) {
      add_unique(drafts, [&] { return unrelated_label(); }, true);
      drafts.back().belowFold = true;
    }

    Screen screen;
    screen.id = sid;
    screen.scrollExtent = scrollable ? static_cast<int>(uniform_int(rng_, 2, 4)) * 100 : 0;
    place(screen, drafts);
    world_.screens[sid] = std::move(screen);
  }

  int build_dead_end() {
    const int sid = nextScreen_++;
    std::vector<Draft> drafts;
    const int total = static_cast<int>(uniform_int(rng_, 4, 6));
    for (int i = 0; i < 2; ++i) add_unique(drafts, [&] { return sharing_label({}); }, false);
    while (static_cast<int>(drafts.size()) < total) add_unique(drafts, [&] { return unrelated_label(); }, false);
    Screen screen;
    screen.id = sid;
    place(screen, drafts);
    world_.screens[sid] = std::move(screen);
    return sid;
  }

  // Assigns ids in shuffled order, lays drafts out on grid cells and wires transitions.
  void place(Screen& screen, std::vector<Draft>& drafts) {
    shuffle(drafts, rng_);
    std::vector<int> cells(kColumns * kRows);
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) cells[i] = i;
    shuffle(cells, rng_);
    std::size_t nextCell = 0;
    int belowCount = 0;

    for (std::size_t i = 0; i < drafts.size(); ++i) {
      Draft& dr = drafts[i];
      Element e;
      e.id = static_cast<int>(i);
      e.role = dr.role;
      e.label = dr.label.text();
      e.state.checked = dr.checked;
      e.bounds.w = static_cast<int>(uniform_int(rng_, 80, 200));
      e.bounds.h = static_cast<int>(uniform_int(rng_, 40, 100));
      int col = 0;
      int top = 0;
      if (dr.belowFold) {
        col = belowCount++ % kColumns;
        const int room = screen.scrollExtent - e.bounds.h - 4;
        top = dsl::kViewport + static_cast<int>(uniform_int(rng_, 0, std::max(0, room)));
        e.bounds.y = top;
      } else {
        const int cell = cells[nextCell++];
        col = cell % kColumns;
        top = (cell / kColumns) * kCellH;
        e.bounds.y = top + static_cast<int>(uniform_int(rng_, 4, kCellH - 4 - e.bounds.h));
      }
      e.bounds.x = col * kCellW + static_cast<int>(uniform_int(rng_, 8, kCellW - 8 - e.bounds.w));

      const TransitionKey click{screen.id, e.id, dsl::ActionKind::Click};
      if (dr.click.kind == EffectKind::Navigate && dr.click.target < 0) {
        world_.transitions[click] = Effect{EffectKind::Navigate, build_dead_end()};
      } else if (dr.click.kind != EffectKind::NoOp) {
        world_.transitions[click] = dr.click;
      }
      if (dr.textEntry) world_.transitions[{screen.id, e.id, dsl::ActionKind::Input}] = Effect{EffectKind::SetText, 0};
      if (dr.step >= 0) {
        stepScreen_[dr.step] = screen.id;
        stepElement_[dr.step] = e.id;
      }
      screen.elements.push_back(std::move(e));
    }
  }

  TaskSpec make_task() {
    TaskSpec task;
    task.templ = t_;
    task.id = template_key(t_);
    task.worldSeed = world_.seed;
    task.provenance = world_.provenance;
    task.difficulty = static_cast<int>(t_.chain.size());
    task.payload = payload_;

    std::string instruction;
    for (int k = 0; k < task.difficulty; ++k) {
      const int sid = stepScreen_[k];
      const int eid = stepElement_[k];
      const Element& e = *world_.screen(sid).find(eid);
      const Observation obs = initial_observation(world_, sid, task.max_steps());
      const std::string desc = grounding::make_description(e, obs);
      const std::string quoted = "'" + e.label + "'";

      Milestone m;
      m.screen = sid;
      m.element = eid;
      std::string phrase;
      switch (t_.chain[k]) {
        case StepKind::Navigate:
          m.kind = MilestoneKind::AtScreen;
          m.screen = world_.effect(sid, eid, dsl::ActionKind::Click).target;
          m.name = "reached " + quoted;
          phrase = "open " + quoted;
          task.oracle.push_back(dsl::Click{dsl::Descriptive{desc}});
          break;
        case StepKind::Input:
          m.kind = MilestoneKind::TextEquals;
          m.text = payload_;
          m.name = "typed \"" + payload_ + "\" into " + quoted;
          phrase = "type \"" + payload_ + "\" into " + quoted;
          task.oracle.push_back(dsl::Input{dsl::Descriptive{desc}, payload_});
          break;
        case StepKind::Toggle:
          m.kind = MilestoneKind::Checked;
          m.name = "checked " + quoted;
          phrase = "check " + quoted;
          task.oracle.push_back(dsl::Click{dsl::Descriptive{desc}});
          break;
        case StepKind::Submit:
          m.kind = MilestoneKind::FlagRaised;
          m.flag = k;
          m.name = "pressed " + quoted;
          phrase = "press " + quoted;
          task.oracle.push_back(dsl::Click{dsl::Descriptive{desc}});
          break;
      }
      task.oracleScreens.push_back(sid);
      task.milestones.push_back(std::move(m));
      instruction += k == 0 ? capitalize(phrase) : ", then " + phrase;
    }
    task.instruction = instruction + ".";
    return task;
  }

  TemplateParams t_;
  Rng rng_;
  World world_;
  std::string payload_;
  std::vector<LabelParts> targets_;
  std::vector<std::string> freeMods_;
  std::vector<std::string> freeNouns_;
  std::vector<int> stepScreen_;
  std::vector<int> stepElement_;
  int nextScreen_ = 0;
};

}  // namespace

StepKind draw_step_kind(const std::vector<StepKind>& chainSoFar, Rng& rng) {
  int sinceNavigate = 0;
  for (auto it = chainSoFar.rbegin(); it != chainSoFar.rend() && *it != StepKind::Navigate; ++it) ++sinceNavigate;
  if (sinceNavigate >= kMaxStepsPerScreen) return StepKind::Navigate;
  const double u = uniform01(rng);
  if (u < 0.4) return StepKind::Navigate;
  if (u < 0.6) return StepKind::Input;
  if (u < 0.8) return StepKind::Toggle;
  return StepKind::Submit;
}

std::vector<StepKind> random_chain(std::uint64_t seed, int difficulty) {
  if (difficulty < kMinDifficulty || difficulty > kMaxDifficulty) {
    throw Error(ErrorKind::Range, "difficulty " + std::to_string(difficulty) + " outside [1,12]");
  }
  Rng rng = make_rng(stable_hash({seed, static_cast<std::uint64_t>(difficulty), 0xc4a1}));
  std::vector<StepKind> chain;
  while (static_cast<int>(chain.size()) < difficulty) chain.push_back(draw_step_kind(chain, rng));
  return chain;
}

std::pair<World, TaskSpec> generate_world(std::uint64_t seed, int difficulty) {
  return generate_from_template(TemplateParams{seed, random_chain(seed, difficulty)});
}

std::pair<World, TaskSpec> generate_from_template(const TemplateParams& t) { return WorldBuilder(t).build(); }

Observation initial_observation(const World& w, int screenId, int maxSteps) {
  Observation obs;
  obs.screenId = screenId;
  obs.maxSteps = maxSteps;
  const Screen& s = w.screen(screenId);
  obs.scrollExtent = s.scrollExtent;
  for (const auto& e : s.elements) {
    if (e.bounds.intersects_rows(0, dsl::kViewport)) obs.visibleElements.push_back(e);
  }
  return obs;
}

World perturb_layout(const World& w, std::uint64_t seed, int maxShift) {
  World out = w;
  for (auto& [sid, screen] : out.screens) {
    Rng rng = make_rng(stable_hash({seed, static_cast<std::uint64_t>(sid), 0x9e7}));
    const int floor = dsl::kViewport + screen.scrollExtent;
    std::vector<Bounds> placed;
    for (auto& e : screen.elements) {
      Bounds chosen = e.bounds;
      for (int attempt = 0; attempt < 32; ++attempt) {
        Bounds b = e.bounds;
        b.x += static_cast<int>(uniform_int(rng, -maxShift, maxShift));
        b.y += static_cast<int>(uniform_int(rng, -maxShift, maxShift));
        if (b.x < 0 || b.x + b.w > dsl::kViewport || b.y < 0 || b.y + b.h > floor) continue;
        if (std::any_of(placed.begin(), placed.end(), [&](const Bounds& p) { return p.overlaps(b); })) continue;
        chosen = b;
        break;
      }
      e.bounds = chosen;
      placed.push_back(chosen);
    }
  }
  return out;
}

}  // namespace guiwb::sim
