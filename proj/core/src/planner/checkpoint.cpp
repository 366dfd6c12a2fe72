#include "guiwb/planner/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "guiwb/error.hpp"

namespace guiwb::planner {

std::string policy_to_json(const PolicyParams& p) {
  nlohmann::ordered_json j;
  j["version"] = p.version;
  j["F"] = kFeatures;
  j["w"] = p.w;
  j["temperature"] = p.temperature;
  return j.dump();
}

PolicyParams policy_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("F").get<std::size_t>() != kFeatures) {
      throw Error(ErrorKind::Config, "checkpoint has F=" + j.at("F").dump() + ", expected 16");
    }
    const auto w = j.at("w").get<std::vector<double>>();
    if (w.size() != kFeatures) throw Error(ErrorKind::Config, "checkpoint weight vector has the wrong length");
    PolicyParams p;
    std::copy(w.begin(), w.end(), p.w.begin());
    p.version = j.at("version").get<std::int64_t>();
    p.temperature = j.at("temperature").get<double>();
    if (!(p.temperature > 0.0)) throw Error(ErrorKind::Config, "checkpoint temperature must be positive");
    for (double v : p.w) {
      if (!std::isfinite(v)) throw Error(ErrorKind::Config, "checkpoint has a non-finite weight");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad policy checkpoint: ") + e.what());
  }
}

void save_policy(const PolicyParams& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << policy_to_json(p) << "\n";
}

PolicyParams load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return policy_from_json(ss.str());
}

}  // namespace guiwb::planner
