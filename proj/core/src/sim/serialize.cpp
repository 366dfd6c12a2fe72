#include "guiwb/sim/serialize.hpp"

#include "guiwb/error.hpp"
#include "json_codec.hpp"

namespace guiwb::sim {

namespace codec {

namespace {

dsl::ActionKind action_kind_from(std::string_view s) {
  for (auto k : {dsl::ActionKind::Click, dsl::ActionKind::Input, dsl::ActionKind::Scroll, dsl::ActionKind::Back,
                 dsl::ActionKind::Finish}) {
    if (dsl::to_string(k) == s) return k;
  }
  throw Error(ErrorKind::Config, "unknown action kind '" + std::string(s) + "'");
}

}  // namespace

Json to_json(const Element& e) {
  Json j;
  j["id"] = e.id;
  j["role"] = std::string(to_string(e.role));
  j["label"] = e.label;
  j["bounds"] = {e.bounds.x, e.bounds.y, e.bounds.w, e.bounds.h};
  j["state"] = {{"text", e.state.text}, {"checked", e.state.checked}};
  return j;
}

Element element_from(const nlohmann::json& j) {
  Element e;
  e.id = j.at("id").get<int>();
  e.role = role_from_string(j.at("role").get<std::string>());
  e.label = j.at("label").get<std::string>();
  const auto b = j.at("bounds").get<std::vector<int>>();
  if (b.size() != 4) throw Error(ErrorKind::Config, "bounds need four integers");
  e.bounds = Bounds{b[0], b[1], b[2], b[3]};
  e.state.text = j.at("state").at("text").get<std::string>();
  e.state.checked = j.at("state").at("checked").get<bool>();
  return e;
}

Json to_json(const World& w) {
  Json j;
  j["seed"] = w.seed;
  j["provenance"] = w.provenance;
  j["initialScreen"] = w.initialScreen;
  Json screens = Json::array();
  for (const auto& [id, s] : w.screens) {
    Json sj;
    sj["id"] = id;
    sj["scrollExtent"] = s.scrollExtent;
    sj["elements"] = Json::array();
    for (const auto& e : s.elements) sj["elements"].push_back(to_json(e));
    screens.push_back(std::move(sj));
  }
  j["screens"] = std::move(screens);
  Json transitions = Json::array();
  for (const auto& [k, eff] : w.transitions) {
    transitions.push_back({{"screen", k.screen},
                           {"element", k.element},
                           {"action", std::string(dsl::to_string(k.action))},
                           {"effect", std::string(to_string(eff.kind))},
                           {"target", eff.target}});
  }
  j["transitions"] = std::move(transitions);
  j["flags"] = w.flags;
  return j;
}

World world_from(const nlohmann::json& j) {
  World w;
  w.seed = j.at("seed").get<std::uint64_t>();
  w.provenance = j.at("provenance").get<std::uint64_t>();
  w.initialScreen = j.at("initialScreen").get<int>();
  for (const auto& sj : j.at("screens")) {
    Screen s;
    s.id = sj.at("id").get<int>();
    s.scrollExtent = sj.at("scrollExtent").get<int>();
    for (const auto& ej : sj.at("elements")) s.elements.push_back(element_from(ej));
    w.screens[s.id] = std::move(s);
  }
  for (const auto& tj : j.at("transitions")) {
    TransitionKey k{tj.at("screen").get<int>(), tj.at("element").get<int>(),
                    action_kind_from(tj.at("action").get<std::string>())};
    w.transitions[k] = Effect{effect_from_string(tj.at("effect").get<std::string>()), tj.at("target").get<int>()};
  }
  w.flags = j.at("flags").get<std::set<int>>();
  return w;
}

Json to_json(const TaskSpec& t) {
  Json j;
  j["id"] = t.id;
  j["instruction"] = t.instruction;
  j["worldSeed"] = t.worldSeed;
  j["provenance"] = t.provenance;
  j["difficulty"] = t.difficulty;
  Json ms = Json::array();
  for (const auto& m : t.milestones) {
    ms.push_back({{"kind", std::string(to_string(m.kind))},
                  {"name", m.name},
                  {"screen", m.screen},
                  {"element", m.element},
                  {"flag", m.flag},
                  {"text", m.text}});
  }
  j["milestones"] = std::move(ms);
  Json oracle = Json::array();
  for (const auto& a : t.oracle) oracle.push_back(dsl::render_action(a));
  j["oracle"] = std::move(oracle);
  j["oracleScreens"] = t.oracleScreens;
  j["payload"] = t.payload;
  return j;
}

TaskSpec task_from(const nlohmann::json& j) {
  TaskSpec t;
  t.id = j.at("id").get<std::string>();
  t.templ = parse_template_key(t.id);
  t.instruction = j.at("instruction").get<std::string>();
  t.worldSeed = j.at("worldSeed").get<std::uint64_t>();
  t.provenance = j.at("provenance").get<std::uint64_t>();
  t.difficulty = j.at("difficulty").get<int>();
  for (const auto& mj : j.at("milestones")) {
    Milestone m;
    m.kind = milestone_from_string(mj.at("kind").get<std::string>());
    m.name = mj.at("name").get<std::string>();
    m.screen = mj.at("screen").get<int>();
    m.element = mj.at("element").get<int>();
    m.flag = mj.at("flag").get<int>();
    m.text = mj.at("text").get<std::string>();
    t.milestones.push_back(std::move(m));
  }
  for (const auto& a : j.at("oracle")) t.oracle.push_back(dsl::parse_action(a.get<std::string>()));
  t.oracleScreens = j.at("oracleScreens").get<std::vector<int>>();
  t.payload = j.at("payload").get<std::string>();
  return t;
}

Json to_json(const Observation& o) {
  Json j;
  j["screenId"] = o.screenId;
  j["scrollOffset"] = o.scrollOffset;
  j["stepIndex"] = o.stepIndex;
  j["scrollExtent"] = o.scrollExtent;
  j["historyDepth"] = o.historyDepth;
  j["maxSteps"] = o.maxSteps;
  j["visibleElements"] = Json::array();
  for (const auto& e : o.visibleElements) j["visibleElements"].push_back(to_json(e));
  return j;
}

Observation observation_from(const nlohmann::json& j) {
  Observation o;
  o.screenId = j.at("screenId").get<int>();
  o.scrollOffset = j.at("scrollOffset").get<int>();
  o.stepIndex = j.at("stepIndex").get<int>();
  o.scrollExtent = j.at("scrollExtent").get<int>();
  o.historyDepth = j.at("historyDepth").get<int>();
  o.maxSteps = j.at("maxSteps").get<int>();
  for (const auto& ej : j.at("visibleElements")) o.visibleElements.push_back(element_from(ej));
  return o;
}

Json to_json(const JudgeState& s) {
  Json j;
  j["satisfied"] = s.satisfied;
  j["answer"] = s.answer ? Json(*s.answer) : Json(nullptr);
  return j;
}

JudgeState judge_from(const nlohmann::json& j) {
  JudgeState s;
  s.satisfied = j.at("satisfied").get<std::uint32_t>();
  if (!j.at("answer").is_null()) s.answer = j.at("answer").get<std::string>();
  return s;
}

}  // namespace codec

namespace {

template <typename Fn>
auto guarded(Fn fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed record: ") + e.what());
  }
}

}  // namespace

std::string world_task_line(const World& w, const TaskSpec& t) {
  codec::Json j;
  j["world"] = codec::to_json(w);
  j["task"] = codec::to_json(t);
  return j.dump();
}

std::pair<World, TaskSpec> parse_world_task_line(std::string_view line) {
  return guarded([&] {
    const auto j = nlohmann::json::parse(line);
    return std::pair<World, TaskSpec>{codec::world_from(j.at("world")), codec::task_from(j.at("task"))};
  });
}

std::string observation_json(const Observation& o) { return codec::to_json(o).dump(); }

Observation parse_observation_json(std::string_view text) {
  return guarded([&] { return codec::observation_from(nlohmann::json::parse(text)); });
}

}  // namespace guiwb::sim
