#pragma once

// JSON run configuration:
//
// {
//   "backend": {"kind": "torus4d" | "hopf" | "inoue", "sizes": [...], "params": {...}},
//   "problem": {"kind": "linear" | "nonlinear" | "prescribe" | "flatten" | "decompose" | "hopf",
//               "p": 1, "q": 1, "signs": [1, -1],
//               "F": {"kind": "zero" | "constant" | "random" | "expression", ...},
//               "base": {"kind": "flat" | "tricerri" | "su" | "random", ...}},
//   "solver": {"tol": 1e-11, "max_newton": 30, "path_steps": 10, "floor": 1e-8},
//   "output": {"dir": "out"}
// }

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitma/backends.hpp"
#include "splitma/tma.hpp"

namespace splitma::cli {

struct BackendConfig {
  BackendKind kind = BackendKind::Torus4D;
  std::vector<std::size_t> sizes;
  std::vector<double> periods{1.0, 1.0, 1.0, 1.0};  // torus4d
  double alpha = 1.0, beta = 1.0, half_width = 0.0;  // hopf
  double y_lo = 1.0, y_hi = 3.0;                     // inoue
};

struct FieldConfig {
  std::string kind = "zero";
  double value = 0.0;  // constant
  std::uint64_t seed = 0;
  double amplitude = 0.1;
  double decay = 1.0;
  std::string expression;
};

struct BaseConfig {
  std::string kind;  // empty: the backend's natural metric
  double a = 1.0, b = 1.0;  // tricerri
  double t = 0.0;           // su
  std::uint64_t seed = 0;   // random
  double amplitude = 0.3;
};

struct ProblemConfig {
  std::string kind = "nonlinear";
  double p = 1.0, q = 1.0;
  int sigma_plus = 1, sigma_minus = -1;
  FieldConfig F;
  BaseConfig base;
  BaseConfig other;                 // second form for `bracket`
  std::vector<double> basis{1.0, 0.5};  // conformal-family parameters for `decompose`
};

struct Config {
  BackendConfig backend;
  ProblemConfig problem;
  TmaOptions solver;
  std::string output_dir;
  nlohmann::json source;  // the validated input, echoed into reports
};

/// Validates and converts; throws Error(Config) naming every offending key.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

GridPtr make_grid(const BackendConfig& b);
SplitForm make_base(const BaseConfig& base, const GridPtr& grid, const BackendConfig& backend);
ScalarField make_field(const FieldConfig& f, const GridPtr& grid);

}  // namespace splitma::cli
