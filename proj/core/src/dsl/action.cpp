#include "guiwb/dsl/action.hpp"

#include <array>
#include <charconv>
#include <map>

#include "guiwb/error.hpp"
#include "guiwb/text.hpp"

namespace guiwb::dsl {

ActionKind kind_of(const Action& a) noexcept { return static_cast<ActionKind>(a.index()); }

std::string_view to_string(ActionKind k) noexcept {
  switch (k) {
    case ActionKind::Click: return "Click";
    case ActionKind::Input: return "Input";
    case ActionKind::Scroll: return "Scroll";
    case ActionKind::Back: return "Back";
    case ActionKind::Finish: return "Finish";
  }
  return "?";
}

const TargetSpec* target_of(const Action& a) noexcept {
  if (const auto* c = std::get_if<Click>(&a)) return &c->target;
  if (const auto* i = std::get_if<Input>(&a)) return &i->target;
  return nullptr;
}

bool is_descriptive(const Action& a) noexcept {
  const auto* t = target_of(a);
  return t != nullptr && std::holds_alternative<Descriptive>(*t);
}

void validate_description(std::string_view description) {
  if (text::trim(description).empty()) throw Error(ErrorKind::Syntax, "empty element description");
  if (description.size() > kMaxDescription) throw Error(ErrorKind::Range, "element description longer than 512 characters");
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  std::size_t pos() const { return pos_; }

  bool consume(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view lit) {
    if (!consume(lit)) fail("expected '" + std::string(lit) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Syntax, what + " at column " + std::to_string(pos_));
  }

  // Body of a quoted string; the opening quote is already consumed, the closing one is eaten.
  std::string quoted_body() {
    std::string out;
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        char e = s_[pos_++];
        if (e != '"' && e != '\\') fail("invalid escape");
        out.push_back(e);
      } else {
        out.push_back(c);
      }
    }
    fail("unterminated string");
  }

  std::string quoted() {
    expect("\"");
    return quoted_body();
  }

  // '-'? ( '0' | [1-9][0-9]* ), at most 9 digits.
  long long integer() {
    const std::size_t start = pos_;
    bool negative = consume("-");
    std::size_t digits_begin = pos_;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
    const std::size_t n = pos_ - digits_begin;
    if (n == 0) fail("expected integer");
    if (n > 1 && s_[digits_begin] == '0') fail("leading zero in integer");
    if (n > 9) throw Error(ErrorKind::Range, "integer out of range at column " + std::to_string(start));
    long long v = 0;
    std::from_chars(s_.data() + digits_begin, s_.data() + pos_, v);
    return negative ? -v : v;
  }

  std::string identifier() {
    std::size_t b = pos_;
    while (pos_ < s_.size() && ((s_[pos_] >= 'a' && s_[pos_] <= 'z') || s_[pos_] == '_')) ++pos_;
    if (pos_ == b) fail("expected argument name");
    return std::string(s_.substr(b, pos_ - b));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

int coordinate(long long v) {
  if (v < 0 || v >= kViewport) throw Error(ErrorKind::Range, "coordinate " + std::to_string(v) + " outside [0,1000)");
  return static_cast<int>(v);
}

void check_line(std::string_view text) {
  if (text.size() > kMaxLine) throw Error(ErrorKind::Syntax, "input longer than 8192 characters");
  if (text.find_first_of("\r\n") != std::string_view::npos) throw Error(ErrorKind::Syntax, "input must be a single line");
}

using ArgValue = std::variant<long long, std::string, Grounded>;

Action parse_do(Cursor& cur) {
  const std::string name = cur.quoted();
  static const std::array<std::string_view, 4> known = {"Click", "Input", "Scroll", "Back"};
  ActionKind kind{};
  bool found = false;
  for (std::size_t i = 0; i < known.size(); ++i) {
    if (name == known[i]) {
      kind = static_cast<ActionKind>(i);
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::UnknownAction, "unknown action \"" + name + "\"");

  std::map<std::string, ArgValue> args;
  while (cur.consume(", ")) {
    std::string key = cur.identifier();
    cur.expect("=");
    ArgValue value;
    if (key == "element_coordinates") {
      cur.expect("[");
      int x = coordinate(cur.integer());
      cur.expect(",");
      int y = coordinate(cur.integer());
      cur.expect("]");
      value = Grounded{x, y};
    } else if (key == "element_description" || key == "text" || key == "direction") {
      value = cur.quoted();
    } else if (key == "element_id" || key == "amount") {
      value = cur.integer();
    } else {
      cur.fail("unknown argument '" + key + "'");
    }
    if (!args.emplace(key, std::move(value)).second) cur.fail("duplicate argument '" + key + "'");
  }
  cur.expect(")");
  if (!cur.done()) cur.fail("trailing characters");

  auto take = [&](const char* key) -> std::optional<ArgValue> {
    auto it = args.find(key);
    if (it == args.end()) return std::nullopt;
    ArgValue v = std::move(it->second);
    args.erase(it);
    return v;
  };

  auto take_target = [&]() -> TargetSpec {
    auto coords = take("element_coordinates");
    auto desc = take("element_description");
    auto id = take("element_id");
    const int present = int(coords.has_value()) + int(desc.has_value()) + int(id.has_value());
    if (present != 1) {
      throw Error(ErrorKind::MissingTarget, std::string(to_string(kind)) +
                                                " requires exactly one of element_coordinates, element_description, element_id");
    }
    if (coords) return std::get<Grounded>(*coords);
    if (desc) {
      auto& d = std::get<std::string>(*desc);
      validate_description(d);
      return Descriptive{std::move(d)};
    }
    long long v = std::get<long long>(*id);
    if (v < 0) throw Error(ErrorKind::Range, "element_id must be nonnegative");
    return ElementRef{static_cast<int>(v)};
  };

  auto reject_leftovers = [&]() {
    if (!args.empty()) throw Error(ErrorKind::Syntax, "argument '" + args.begin()->first + "' not valid for " + name);
  };

  switch (kind) {
    case ActionKind::Click: {
      Click c{take_target()};
      reject_leftovers();
      return c;
    }
    case ActionKind::Input: {
      TargetSpec t = take_target();
      auto txt = take("text");
      if (!txt) throw Error(ErrorKind::Syntax, "Input requires text");
      reject_leftovers();
      auto& s = std::get<std::string>(*txt);
      if (s.size() > kMaxText) throw Error(ErrorKind::Range, "text longer than 4096 characters");
      return Input{std::move(t), std::move(s)};
    }
    case ActionKind::Scroll: {
      if (args.count("element_coordinates") || args.count("element_description") || args.count("element_id")) {
        throw Error(ErrorKind::Syntax, "Scroll takes no target");
      }
      auto dir = take("direction");
      auto amount = take("amount");
      if (!dir || !amount) throw Error(ErrorKind::Syntax, "Scroll requires direction and amount");
      reject_leftovers();
      const auto& d = std::get<std::string>(*dir);
      Scroll s;
      if (d == "up") {
        s.direction = ScrollDirection::Up;
      } else if (d == "down") {
        s.direction = ScrollDirection::Down;
      } else {
        throw Error(ErrorKind::Syntax, "direction must be \"up\" or \"down\"");
      }
      long long a = std::get<long long>(*amount);
      if (a < 1) throw Error(ErrorKind::Range, "amount must be positive");
      s.amount = static_cast<int>(a);
      return s;
    }
    case ActionKind::Back:
      reject_leftovers();
      return Back{};
    case ActionKind::Finish:
      break;
  }
  throw Error(ErrorKind::UnknownAction, name);
}

void append_quoted(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
}

void append_target(std::string& out, const TargetSpec& t) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Grounded>) {
          out += ", element_coordinates=[" + std::to_string(v.x) + "," + std::to_string(v.y) + "]";
        } else if constexpr (std::is_same_v<T, Descriptive>) {
          out += ", element_description=";
          append_quoted(out, v.description);
        } else {
          out += ", element_id=" + std::to_string(v.elementId);
        }
      },
      t);
}

}  // namespace

Action parse_action(std::string_view text) {
  check_line(text);
  Cursor cur(text);
  if (cur.consume("finish(")) {
    Finish f;
    if (cur.consume("answer=")) {
      f.answer = cur.quoted();
      if (f.answer->size() > kMaxText) throw Error(ErrorKind::Range, "answer longer than 4096 characters");
    }
    cur.expect(")");
    if (!cur.done()) cur.fail("trailing characters");
    return f;
  }
  if (cur.consume("do(action=")) return parse_do(cur);
  cur.fail("expected 'do(' or 'finish('");
}

std::string render_action(const Action& a) {
  std::string out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Click>) {
          out = "do(action=\"Click\"";
          append_target(out, v.target);
          out += ")";
        } else if constexpr (std::is_same_v<T, Input>) {
          out = "do(action=\"Input\"";
          append_target(out, v.target);
          out += ", text=";
          append_quoted(out, v.text);
          out += ")";
        } else if constexpr (std::is_same_v<T, Scroll>) {
          out = "do(action=\"Scroll\", direction=";
          out += v.direction == ScrollDirection::Up ? "\"up\"" : "\"down\"";
          out += ", amount=" + std::to_string(v.amount) + ")";
        } else if constexpr (std::is_same_v<T, Back>) {
          out = "do(action=\"Back\")";
        } else {
          out = "finish(";
          if (v.answer) {
            out += "answer=";
            append_quoted(out, *v.answer);
          }
          out += ")";
        }
      },
      a);
  return out;
}

GroundingQuery parse_grounding_query(std::string_view text) {
  check_line(text);
  Cursor cur(text);
  cur.expect("find_coordinates_by_instruction(");
  std::string desc = cur.quoted();
  cur.expect(")");
  if (!cur.done()) cur.fail("trailing characters");
  if (text::trim(desc).empty()) throw Error(ErrorKind::Syntax, "empty description");
  validate_description(desc);
  return GroundingQuery{std::move(desc)};
}

std::string render_grounding_query(const GroundingQuery& q) {
  std::string out = "find_coordinates_by_instruction(";
  append_quoted(out, q.description);
  out += ")";
  return out;
}

std::optional<GroundingSplit> split_for_grounding(const Action& a) {
  if (const auto* c = std::get_if<Click>(&a)) {
    if (const auto* d = std::get_if<Descriptive>(&c->target)) {
      return GroundingSplit{PendingAction{ActionKind::Click, {}}, GroundingQuery{d->description}};
    }
  } else if (const auto* i = std::get_if<Input>(&a)) {
    if (const auto* d = std::get_if<Descriptive>(&i->target)) {
      return GroundingSplit{PendingAction{ActionKind::Input, i->text}, GroundingQuery{d->description}};
    }
  }
  return std::nullopt;
}

Action resolve_target(const PendingAction& pending, Grounded at) {
  if (pending.kind == ActionKind::Input) return Input{at, pending.text};
  return Click{at};
}

}  // namespace guiwb::dsl
