#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modeconv/fem.hpp"
#include "modeconv/geometry.hpp"
#include "modeconv/optimizer.hpp"
#include "modeconv/scattering.hpp"

namespace modeconv {

struct RunConfig {
  double omega = 4.71238898038469;  // 3 pi / 2
  double epsilon = 0.01;
  int mode_count = 2;     // propagating modes the pipeline expects
  double h = 0.05;
  int levels = 3;         // junction refinement levels
  int min_layers = 3;     // element layers across a ligament
  double R = 1.5;
  int n_terms = 15;
  bool auto_ligaments = true;  // "ligaments": "auto" runs the design recipe
  std::vector<LigamentSpec> ligaments;
  int m_minus = 1, m_plus = 2;
  std::optional<Abc> abc;      // unset: full domain
  std::string out = "out";
  std::string cache;           // default <out>/constants.json
  Targets targets = Targets::Eq13;
  std::string grid;            // "a:b:n,c:d:m"; default 41 x 41 over +-5 epsilon
  int threads = 0;
  bool refine = true;
  double gamma_h = 0.05;
  bool override_range = false;

  std::string cache_path() const;
  SolverParams solver() const;
  GammaParams gamma_params() const;
};

// Unknown keys and ill-typed values raise ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& c);

// Positivity and range checks; throws ConfigError.
void validate(const RunConfig& c);

Abc parse_abc(const std::string& s);

// Fills the ranges of `base` from "a:b:n,c:d:m".
SweepGrid parse_grid(const std::string& spec, SweepGrid base);

}  // namespace modeconv
