#include "modeconv/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "modeconv/errors.hpp"
#include "modeconv/modes.hpp"

namespace modeconv {

using nlohmann::json;

std::string RunConfig::cache_path() const {
  return cache.empty() ? out + "/constants.json" : cache;
}

SolverParams RunConfig::solver() const {
  SolverParams p;
  p.mesh.h = h;
  p.mesh.junction_levels = levels;
  p.mesh.min_layers = min_layers;
  p.n_terms = n_terms;
  return p;
}

GammaParams RunConfig::gamma_params() const {
  GammaParams p;
  p.R = R;
  p.h = gamma_h;
  p.n_terms = n_terms;
  return p;
}

Abc parse_abc(const std::string& s) {
  if (s == "neumann") return Abc::Neumann;
  if (s == "dirichlet") return Abc::Dirichlet;
  throw ConfigError("unknown ABC '" + s + "' (expected neumann or dirichlet)");
}

RunConfig parse_config(const std::string& text) {
  static const std::set<std::string> known = {
      "omega", "epsilon", "mode_count", "h", "levels", "min_layers", "R", "n_terms",
      "ligaments", "m_minus", "m_plus", "abc", "out", "cache", "targets", "grid",
      "threads", "refine", "gamma_h", "override_range"};
  RunConfig c;
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items())
      if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
    c.omega = j.value("omega", c.omega);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.mode_count = j.value("mode_count", c.mode_count);
    c.h = j.value("h", c.h);
    c.levels = j.value("levels", c.levels);
    c.min_layers = j.value("min_layers", c.min_layers);
    c.R = j.value("R", c.R);
    c.n_terms = j.value("n_terms", c.n_terms);
    c.m_minus = j.value("m_minus", c.m_minus);
    c.m_plus = j.value("m_plus", c.m_plus);
    c.out = j.value("out", c.out);
    c.cache = j.value("cache", c.cache);
    c.grid = j.value("grid", c.grid);
    c.threads = j.value("threads", c.threads);
    c.refine = j.value("refine", c.refine);
    c.gamma_h = j.value("gamma_h", c.gamma_h);
    c.override_range = j.value("override_range", c.override_range);
    if (j.contains("targets")) c.targets = parse_targets(j["targets"].get<std::string>());
    if (j.contains("abc") && !j["abc"].is_null()) {
      std::string a = j["abc"].get<std::string>();
      if (a != "none") c.abc = parse_abc(a);
    }
    if (j.contains("ligaments")) {
      const auto& l = j["ligaments"];
      if (l.is_string()) {
        if (l.get<std::string>() != "auto") throw ConfigError("ligaments must be \"auto\" or a list");
      } else {
        c.auto_ligaments = false;
        for (const auto& e : l) {
          LigamentSpec s;
          s.y_attach = e.at("y");
          s.length = e.at("length");
          s.width = e.value("width", c.epsilon);
          s.bend_sign = e.value("bend", -1);
          c.ligaments.push_back(s);
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  json j = {{"omega", c.omega},   {"epsilon", c.epsilon}, {"mode_count", c.mode_count},
            {"h", c.h},           {"levels", c.levels},   {"min_layers", c.min_layers},
            {"R", c.R},           {"n_terms", c.n_terms}, {"m_minus", c.m_minus},
            {"m_plus", c.m_plus}, {"out", c.out},         {"cache", c.cache},
            {"targets", to_string(c.targets)},            {"grid", c.grid},
            {"threads", c.threads},                       {"refine", c.refine},
            {"gamma_h", c.gamma_h},                       {"override_range", c.override_range},
            {"abc", c.abc ? to_string(*c.abc) : "none"}};
  if (c.auto_ligaments) {
    j["ligaments"] = "auto";
  } else {
    j["ligaments"] = json::array();
    for (const auto& l : c.ligaments)
      j["ligaments"].push_back(
          {{"y", l.y_attach}, {"length", l.length}, {"width", l.width}, {"bend", l.bend_sign}});
  }
  return j.dump(2);
}

void validate(const RunConfig& c) {
  using std::numbers::pi;
  if (!(c.omega > 0)) throw ConfigError("omega must be positive");
  if (!c.override_range && !(c.omega > pi && c.omega < 2 * pi))
    throw ConfigError("omega must lie in (pi, 2 pi); pass --override-range to bypass");
  if (!(c.epsilon >= 0)) throw ConfigError("epsilon must be non-negative");
  if (!(c.h > 0) || !(c.gamma_h > 0)) throw ConfigError("mesh size must be positive");
  if (c.levels < 0 || c.min_layers < 1) throw ConfigError("refinement levels must be positive");
  if (!(c.R > 0.5)) throw ConfigError("truncation R must exceed 1/2");
  if (c.n_terms < 2) throw ConfigError("n_terms must be at least 2");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  for (const auto& l : c.ligaments)
    if (!(l.width > 0) || !(l.length > 0)) throw ConfigError("ligament sizes must be positive");
  if (!c.override_range) {
    ModeBasis basis(c.omega, c.n_terms);
    if (basis.propagating() != c.mode_count)
      throw ConfigError("omega gives " + std::to_string(basis.propagating()) +
                        " propagating modes, config expects " + std::to_string(c.mode_count));
  }
}

SweepGrid parse_grid(const std::string& spec, SweepGrid base) {
  double a, b, c, d;
  int n, m;
  char s1, s2, s3, s4, s5;
  std::istringstream in(spec);
  if (!(in >> a >> s1 >> b >> s2 >> n >> s3 >> c >> s4 >> d >> s5 >> m) || s1 != ':' ||
      s2 != ':' || s3 != ',' || s4 != ':' || s5 != ':' || n < 1 || m < 1 || !(b >= a) ||
      !(d >= c))
    throw ConfigError("grid must look like a:b:n,c:d:m with a <= b and c <= d");
  base.lm_min = a;
  base.lm_max = b;
  base.n_minus = n;
  base.lp_min = c;
  base.lp_max = d;
  base.n_plus = m;
  return base;
}

}  // namespace modeconv
