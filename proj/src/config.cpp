#include "squeezekit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace sqk {

IfoConfig et_lf_config() { return IfoConfig{}; }

IfoConfig lossless(IfoConfig c) {
  c.eps_i = c.eps_r = c.eps_SRC = c.eps_arm = c.eps_f = 0.0;
  c.dL_f = 0.0;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v, int line) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(fmt::format("line {}: bad value '{}' for {}", line, v, key));
  return x;
}

using Field = double IfoConfig::*;

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = {
      {"M", &IfoConfig::M},           {"I", &IfoConfig::I0},
      {"L_SRC", &IfoConfig::L_SRC},   {"L_arm", &IfoConfig::L_arm},
      {"T_SRM", &IfoConfig::T_SRM},   {"T_ITM", &IfoConfig::T_ITM},
      {"phi_SRC", &IfoConfig::phi_SRC}, {"Delta", &IfoConfig::Delta},
      {"zeta_s", &IfoConfig::zeta_s}, {"zeta_i", &IfoConfig::zeta_i},
      {"r", &IfoConfig::r},           {"eps_i", &IfoConfig::eps_i},
      {"eps_r", &IfoConfig::eps_r},   {"eps_SRC", &IfoConfig::eps_SRC},
      {"eps_arm", &IfoConfig::eps_arm}, {"eps_f", &IfoConfig::eps_f},
      {"dL_f", &IfoConfig::dL_f},     {"lambda", &IfoConfig::lambda},
      {"L_f", &IfoConfig::L_f},
  };
  return f;
}

void validate(const IfoConfig& c) {
  auto positive = [](const char* k, double v) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be positive", k));
  };
  auto unit = [](const char* k, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(fmt::format("{} must lie in [0, 1]", k));
  };
  auto loss = [](const char* k, double v) {
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError(fmt::format("{} must lie in [0, 1)", k));
  };
  positive("M", c.M);
  if (c.I0 < 0.0) throw ConfigError("I must be non-negative");
  positive("L_SRC", c.L_SRC);
  positive("L_arm", c.L_arm);
  positive("lambda", c.lambda);
  positive("L_f", c.L_f);
  unit("T_SRM", c.T_SRM);
  unit("T_ITM", c.T_ITM);
  if (c.r < 0.0) throw ConfigError("r must be non-negative");
  loss("eps_i", c.eps_i);
  loss("eps_r", c.eps_r);
  loss("eps_SRC", c.eps_SRC);
  loss("eps_arm", c.eps_arm);
  loss("eps_f", c.eps_f);
}

}  // namespace

IfoConfig parse_config(const std::string& text, IfoConfig base) {
  std::istringstream in(text);
  std::string raw;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("line {}: expected key=value", line));
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    auto it = fields().find(key);
    if (it == fields().end())
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line, key));
    if (!seen.insert(key).second)
      throw ConfigError(fmt::format("line {}: repeated key '{}'", line, key));
    double x = parse_number(key, val, line);
    if (key == "Delta") x = rad_s(x);
    base.*(it->second) = x;
  }
  validate(base);
  return base;
}

IfoConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const IfoConfig& c) {
  std::string out;
  for (const auto& [k, p] : fields()) {
    double v = c.*p;
    if (k == "Delta") v = hz(v);
    out += fmt::format("{} = {:.17g}\n", k, v);
  }
  return out;
}

double squeezing_db_to_r(double db) { return db * std::log(10.0) / 20.0; }

}  // namespace sqk
