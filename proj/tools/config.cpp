#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "expression.hpp"
#include "splitma/hopf.hpp"

namespace splitma::cli {

namespace {

using nlohmann::json;

class Checker {
 public:
  /// Records keys of `j` outside `allowed`; false when `j` is not an object.
  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      invalid(path, "expected an object");
      return false;
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
      if (!ok.count(k)) unknown_.push_back(path.empty() ? k : path + "." + k);
    return true;
  }

  void invalid(const std::string& path, const std::string& msg) { invalid_.push_back(path + ": " + msg); }

  template <class T>
  void number(const json& j, const char* key, const std::string& path, T& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) {
      invalid(path + "." + key, "expected a number");
      return;
    }
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        invalid(path + "." + key, "expected an integer");
        return;
      }
      if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned()) {
        invalid(path + "." + key, "expected a non-negative integer");
        return;
      }
    }
    out = v.get<T>();
  }

  void string(const json& j, const char* key, const std::string& path, std::string& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) {
      invalid(path + "." + key, "expected a string");
      return;
    }
    out = j.at(key).get<std::string>();
  }

  void numbers(const json& j, const char* key, const std::string& path, std::vector<double>& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      invalid(path + "." + key, "expected an array of numbers");
      return;
    }
    out = v.get<std::vector<double>>();
  }

  void finish() const {
    if (unknown_.empty() && invalid_.empty()) return;
    std::string msg;
    if (!unknown_.empty()) {
      msg = "unknown keys:";
      for (const auto& k : unknown_) msg += " " + k;
    }
    for (const auto& e : invalid_) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorKind::Config, msg);
  }

 private:
  std::vector<std::string> unknown_;
  std::vector<std::string> invalid_;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

void parse_backend(const json& j, Checker& c, BackendConfig& b) {
  if (!c.object(j, "backend", {"kind", "sizes", "params"})) return;
  std::string kind = "torus4d";
  c.string(j, "kind", "backend", kind);
  kind = lower(kind);
  std::size_t rank = 4;
  if (kind == "torus4d" || kind == "torus") {
    b.kind = BackendKind::Torus4D;
    b.sizes = {8, 8, 8, 8};
  } else if (kind == "hopf" || kind == "hopfcylinder") {
    b.kind = BackendKind::HopfCylinder;
    b.sizes = {257, 8};
    rank = 2;
  } else if (kind == "inoue" || kind == "inouestrip") {
    b.kind = BackendKind::InoueStrip;
    b.sizes = {33};
    rank = 1;
  } else {
    c.invalid("backend.kind", "unknown backend '" + kind + "' (torus4d, hopf, inoue)");
  }
  if (j.contains("sizes")) {
    const json& s = j.at("sizes");
    const bool ok = s.is_array() && s.size() == rank &&
                    std::all_of(s.begin(), s.end(), [](const json& e) { return e.is_number_integer() && e.get<long>() >= 4; });
    if (ok) b.sizes = s.get<std::vector<std::size_t>>();
    else c.invalid("backend.sizes", "expected " + std::to_string(rank) + " integers >= 4");
  }
  if (!j.contains("params")) return;
  const json& p = j.at("params");
  switch (b.kind) {
    case BackendKind::Torus4D:
      if (!c.object(p, "backend.params", {"periods"})) return;
      c.numbers(p, "periods", "backend.params", b.periods);
      if (b.periods.size() != 4 || std::any_of(b.periods.begin(), b.periods.end(), [](double v) { return !(v > 0.0); }))
        c.invalid("backend.params.periods", "expected 4 positive numbers");
      break;
    case BackendKind::HopfCylinder:
      if (!c.object(p, "backend.params", {"alpha", "beta", "half_width"})) return;
      c.number(p, "alpha", "backend.params", b.alpha);
      c.number(p, "beta", "backend.params", b.beta);
      c.number(p, "half_width", "backend.params", b.half_width);
      if (!(b.alpha > 0.0) || !(b.beta > 0.0)) c.invalid("backend.params", "alpha and beta must be positive");
      break;
    case BackendKind::InoueStrip:
      if (!c.object(p, "backend.params", {"y_lo", "y_hi"})) return;
      c.number(p, "y_lo", "backend.params", b.y_lo);
      c.number(p, "y_hi", "backend.params", b.y_hi);
      if (!(b.y_lo > 0.0) || !(b.y_hi > b.y_lo)) c.invalid("backend.params", "need 0 < y_lo < y_hi");
      break;
  }
}

void parse_field(const json& j, Checker& c, const std::string& path, FieldConfig& f) {
  if (!c.object(j, path, {"kind", "value", "seed", "amplitude", "decay", "expression"})) return;
  c.string(j, "kind", path, f.kind);
  c.number(j, "value", path, f.value);
  c.number(j, "seed", path, f.seed);
  c.number(j, "amplitude", path, f.amplitude);
  c.number(j, "decay", path, f.decay);
  c.string(j, "expression", path, f.expression);
  static const std::set<std::string> kinds{"zero", "constant", "random", "expression"};
  if (!kinds.count(f.kind)) c.invalid(path + ".kind", "unknown field kind '" + f.kind + "'");
  if (f.kind == "expression" && f.expression.empty()) c.invalid(path + ".expression", "missing");
}

void parse_base(const json& j, Checker& c, const std::string& path, BaseConfig& b) {
  if (!c.object(j, path, {"kind", "a", "b", "t", "seed", "amplitude"})) return;
  c.string(j, "kind", path, b.kind);
  c.number(j, "a", path, b.a);
  c.number(j, "b", path, b.b);
  c.number(j, "t", path, b.t);
  c.number(j, "seed", path, b.seed);
  c.number(j, "amplitude", path, b.amplitude);
  static const std::set<std::string> kinds{"flat", "tricerri", "su", "random"};
  if (!b.kind.empty() && !kinds.count(b.kind)) c.invalid(path + ".kind", "unknown base kind '" + b.kind + "'");
}

void parse_problem(const json& j, Checker& c, ProblemConfig& p) {
  if (!c.object(j, "problem", {"kind", "p", "q", "signs", "F", "base", "other", "basis"})) return;
  c.string(j, "kind", "problem", p.kind);
  static const std::set<std::string> kinds{"linear", "nonlinear", "prescribe", "flatten", "decompose", "hopf"};
  if (!kinds.count(p.kind)) c.invalid("problem.kind", "unknown problem kind '" + p.kind + "'");
  c.number(j, "p", "problem", p.p);
  c.number(j, "q", "problem", p.q);
  if (j.contains("signs")) {
    const json& s = j.at("signs");
    const auto unit = [](const json& e) { return e.is_number_integer() && (e.get<int>() == 1 || e.get<int>() == -1); };
    if (s.is_array() && s.size() == 2 && unit(s[0]) && unit(s[1])) {
      p.sigma_plus = s[0].get<int>();
      p.sigma_minus = s[1].get<int>();
    } else {
      c.invalid("problem.signs", "expected [+-1, +-1]");
    }
  }
  if (j.contains("F")) parse_field(j.at("F"), c, "problem.F", p.F);
  if (j.contains("base")) parse_base(j.at("base"), c, "problem.base", p.base);
  if (j.contains("other")) parse_base(j.at("other"), c, "problem.other", p.other);
  if (j.contains("basis")) {
    c.numbers(j, "basis", "problem", p.basis);
    if (p.basis.size() != 2) c.invalid("problem.basis", "expected two conformal parameters");
  }
}

void parse_solver(const json& j, Checker& c, TmaOptions& o) {
  if (!c.object(j, "solver", {"tol", "max_newton", "path_steps", "floor"})) return;
  c.number(j, "tol", "solver", o.tol);
  c.number(j, "max_newton", "solver", o.max_newton);
  c.number(j, "path_steps", "solver", o.path_steps);
  c.number(j, "floor", "solver", o.floor);
  if (!(o.tol > 0.0)) c.invalid("solver.tol", "must be positive");
  if (o.max_newton < 1) c.invalid("solver.max_newton", "must be at least 1");
  if (o.path_steps < 1) c.invalid("solver.path_steps", "must be at least 1");
  if (!(o.floor > 0.0)) c.invalid("solver.floor", "must be positive");
}

}  // namespace

Config parse_config(const json& j) {
  Config cfg;
  Checker c;
  if (c.object(j, "", {"backend", "problem", "solver", "output"})) {
    parse_backend(j.contains("backend") ? j.at("backend") : json::object(), c, cfg.backend);
    if (j.contains("problem")) parse_problem(j.at("problem"), c, cfg.problem);
    if (j.contains("solver")) parse_solver(j.at("solver"), c, cfg.solver);
    if (j.contains("output") && c.object(j.at("output"), "output", {"dir"})) c.string(j.at("output"), "dir", "output", cfg.output_dir);
  }
  c.finish();
  cfg.source = j;
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, "config " + path + ": " + e.what());
  }
  return parse_config(j);
}

GridPtr make_grid(const BackendConfig& b) {
  switch (b.kind) {
    case BackendKind::Torus4D:
      return Grid::make(GridSpec::torus({b.sizes[0], b.sizes[1], b.sizes[2], b.sizes[3]},
                                        {b.periods[0], b.periods[1], b.periods[2], b.periods[3]}));
    case BackendKind::HopfCylinder:
      return Grid::make(GridSpec::hopf(b.alpha, b.beta, b.sizes[0], b.sizes[1], b.half_width));
    case BackendKind::InoueStrip:
      return Grid::make(GridSpec::inoue(b.sizes[0], b.y_lo, b.y_hi));
  }
  throw Error(ErrorKind::UnsupportedBackend, "unknown backend");
}

SplitForm make_base(const BaseConfig& base, const GridPtr& grid, const BackendConfig& backend) {
  std::string kind = base.kind;
  if (kind.empty()) {
    kind = backend.kind == BackendKind::Torus4D ? "flat" : backend.kind == BackendKind::HopfCylinder ? "su" : "tricerri";
  }
  if (kind == "random") {
    return {exp(random_smooth_field(grid, base.seed, base.amplitude)), exp(random_smooth_field(grid, base.seed + 1, base.amplitude))};
  }
  if (kind == "flat" && backend.kind == BackendKind::Torus4D) return flat_torus_metric(grid);
  if (kind == "tricerri" && backend.kind == BackendKind::InoueStrip) return tricerri_metric(grid, base.a, base.b);
  if (kind == "su" && backend.kind == BackendKind::HopfCylinder)
    return su_metric(k_profile(backend.alpha, backend.beta, grid), base.t);
  throw Error(ErrorKind::Config, "problem.base.kind: '" + kind + "' is not available on backend " + to_string(backend.kind));
}

ScalarField make_field(const FieldConfig& f, const GridPtr& grid) {
  if (f.kind == "constant") return ScalarField(grid, f.value);
  if (f.kind == "random") return random_smooth_field(grid, f.seed, f.amplitude, f.decay);
  if (f.kind == "expression") {
    std::vector<std::string> vars;
    switch (grid->kind()) {
      case BackendKind::Torus4D: vars = {"x1", "x2", "x3", "x4"}; break;
      case BackendKind::HopfCylinder: vars = {"x", "s"}; break;
      case BackendKind::InoueStrip: vars = {"y"}; break;
    }
    const Expression e(f.expression, vars);
    ScalarField out = ScalarField::sample(grid, [&](std::span<const double> c) { return e(c); });
    if (!out.finite()) throw Error(ErrorKind::Config, "problem.F.expression is not finite on the grid");
    return out;
  }
  return ScalarField(grid, 0.0);
}

}  // namespace splitma::cli
