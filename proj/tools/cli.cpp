#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "splitma/cohomology.hpp"
#include "splitma/curvature.hpp"
#include "splitma/elliptic.hpp"
#include "splitma/experiments.hpp"
#include "splitma/hopf.hpp"
#include "splitma/split_forms.hpp"

namespace splitma::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_field(const fs::path& path, const ScalarField& u) {
  const Grid& g = *u.grid();
  std::string text;
  for (std::size_t a = 0; a < g.rank(); ++a) text += "axis" + std::to_string(a) + ",";
  text += "value\n";
  std::vector<double> c(g.rank());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coordinates(i, c);
    for (double x : c) text += g17(x) + ",";
    text += g17(u[i]) + "\n";
  }
  write_text(path, text);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  std::string command;
  fs::path dir;
  Clock::time_point start = Clock::now();
  json timings = json::object();

  void finish(const json& report) const {
    write_json(dir / "report.json", report);
    json meta{{"command", command},
              {"finished_utc", utc_now()},
              {"seconds", std::chrono::duration<double>(Clock::now() - start).count()},
              {"timings", timings}};
    write_json(dir / "metadata.json", meta);
  }
};

fs::path output_dir(const std::string& flag, const std::string& from_config) {
  std::string d = flag;
  if (d.empty()) d = from_config;
  if (d.empty()) {
    const char* env = std::getenv("SPLITMA_OUTPUT_DIR");
    if (env != nullptr && *env != '\0') d = env;
  }
  if (d.empty()) d = "splitma_out";
  fs::create_directories(d);
  return d;
}

json to_json(const SolveReport& r) {
  json path = json::array();
  for (const auto& s : r.path)
    path.push_back({{"t", s.t},
                    {"min_lambda", s.min_lambda},
                    {"max_lambda", s.max_lambda},
                    {"min_eta", s.min_eta},
                    {"max_eta", s.max_eta},
                    {"newton_iterations", s.newton_iterations},
                    {"residual", s.residual}});
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"bound", c.bound}, {"slack", c.slack}});
  return {{"method", r.method},
          {"converged", r.converged},
          {"xi", r.xi},
          {"final_residual", r.final_residual},
          {"newton_iterations", r.newton_iterations},
          {"krylov_iterations", r.krylov_iterations},
          {"rejected_steps", r.rejected_steps},
          {"residual_history", r.residual_history},
          {"path", path},
          {"checks", checks},
          {"u_min", r.u.min()},
          {"u_max", r.u.max()}};
}

bool checks_pass(const SolveReport& r) {
  if (!r.converged) return false;
  for (const auto& c : r.checks)
    if (!c.passed) return false;
  return true;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
    case ErrorKind::UnsupportedBackend:
    case ErrorKind::GridMismatch:
    case ErrorKind::Ellipticity:
      return kExitConfig;
    default:
      return kExitSolver;
  }
}

json error_json(const Error& e) { return {{"kind", to_string(e.kind())}, {"message", e.what()}}; }

// ---- subcommands --------------------------------------------------------

int run_solve(const Config& cfg, Run& run, std::ostream& out) {
  const ProblemConfig& p = cfg.problem;
  const GridPtr grid = make_grid(cfg.backend);
  const SplitForm base = make_base(p.base, grid, cfg.backend);
  const ScalarField F = make_field(p.F, grid);
  json report{{"config", cfg.source}, {"problem", p.kind}};
  auto fail = [&](const Error& e) {
    report["converged"] = false;
    report["error"] = error_json(e);
    run.finish(report);
    return exit_code_for(e.kind());
  };
  try {
    if (p.kind == "decompose") {
      const SplitForm A = conformal_family(base, p.basis[0]), B = conformal_family(base, p.basis[1]);
      const SplitForm omega = base + box(F);
      const auto d = decompose(omega, A, B);
      report.update({{"rA", d.rA}, {"rB", d.rB}, {"residual", d.residual}, {"converged", true}});
      write_field(run.dir / "u.csv", d.u);
      out << "rA=" << g17(d.rA) << " rB=" << g17(d.rB) << " residual=" << g17(d.residual) << "\n";
      run.finish(report);
      return kExitOk;
    }
    if (p.kind == "hopf") {
      if (cfg.backend.kind != BackendKind::HopfCylinder)
        throw Error(ErrorKind::Config, "problem.kind 'hopf' needs backend.kind 'hopf'");
      const KProfile profile = k_profile(cfg.backend.alpha, cfg.backend.beta, grid);
      const auto proj = project_to_su(base + box(F), profile);
      report.update({{"s", proj.s}, {"t", proj.t}, {"residual", proj.residual}, {"converged", true}});
      write_field(run.dir / "u.csv", proj.u);
      out << "s=" << g17(proj.s) << " t=" << g17(proj.t) << " residual=" << g17(proj.residual) << "\n";
      run.finish(report);
      return kExitOk;
    }
    SolveReport r;
    TmaProblem tp{base, F, p.p, p.q, p.sigma_plus, p.sigma_minus};
    if (p.kind == "linear") {
      r = solve_linear(base, F, cfg.solver);
      tp = {base, F, 1.0, 1.0, 1, -1};
    } else if (p.kind == "nonlinear") {
      r = solve_nonlinear(tp, cfg.solver);
    } else if (p.kind == "prescribe") {
      r = prescribe_bismut_ricci(base, F, cfg.solver);
      tp = {base, -1.0 * F, 1.0, 1.0, 1, -1};
      const SplitForm target = bismut_ricci(base) + box(F);
      report["ricci_error"] = interior_form_norm(bismut_ricci(deformed_metric(tp, r.u)) - target);
    } else {  // flatten
      r = flatten_bundle(base, p.p, p.q, cfg.solver);
      tp = flatten_problem(base, p.p, p.q);
    }
    run.timings["solver_seconds"] = r.seconds;
    report.update(to_json(r));
    write_field(run.dir / "u.csv", r.u);
    const SplitForm w = deformed_metric(tp, r.u);
    write_field(run.dir / "omega_plus.csv", w.plus);
    write_field(run.dir / "omega_minus.csv", w.minus);
    out << "xi=" << g17(r.xi) << " residual=" << g17(r.final_residual) << " newton=" << r.newton_iterations << "\n";
    const bool ok = checks_pass(r);
    report["passed"] = ok;
    run.finish(report);
    return ok ? kExitOk : kExitSolver;
  } catch (const Error& e) {
    if (exit_code_for(e.kind()) == kExitConfig) throw;
    return fail(e);
  }
}

int run_preset(const std::string& id, Run& run, std::ostream& out) {
  if (!is_criterion(id)) throw Error(ErrorKind::Config, "unknown preset '" + id + "'");
  const CriterionResult res = run_criterion(id);
  json ms = json::array();
  for (const auto& m : res.measurements) {
    if (m.timing) {
      run.timings[m.name] = {{"value", m.value}, {"bound", m.bound}, {"passed", m.passed}};
      continue;
    }
    ms.push_back({{"name", m.name}, {"value", m.value}, {"bound", m.bound}, {"passed", m.passed}});
  }
  json report{{"criterion", res.id}, {"title", res.title}, {"passed", res.passed}, {"measurements", ms}};
  if (!res.error.empty()) report["error"] = res.error;
  run.finish(report);
  out << summary_line(res) << "\n";
  return res.passed ? kExitOk : kExitSolver;
}

int run_gauduchon(const Config& cfg, Run& run, std::ostream& out) {
  const GridPtr grid = make_grid(cfg.backend);
  const SplitForm base = make_base(cfg.problem.base, grid, cfg.backend);
  const auto g = gauduchon_factor(base);
  write_field(run.dir / "f.csv", g.f);
  json report{{"config", cfg.source},
              {"iterations", g.iterations},
              {"residual", g.residual},
              {"residual_history", g.residual_history},
              {"f_min", g.f.min()},
              {"f_max", g.f.max()}};
  run.finish(report);
  out << "residual=" << g17(g.residual) << " iterations=" << g.iterations << "\n";
  return kExitOk;
}

int run_ricci(const Config& cfg, Run& run, std::ostream& out) {
  const GridPtr grid = make_grid(cfg.backend);
  const SplitForm base = make_base(cfg.problem.base, grid, cfg.backend);
  const SplitForm ric = bismut_ricci(base);
  write_field(run.dir / "ricci_plus.csv", ric.plus);
  write_field(run.dir / "ricci_minus.csv", ric.minus);
  json report{{"config", cfg.source}, {"interior_sup", interior_form_norm(ric)}, {"pluriclosed_residual", pluriclosed_residual(base)}};
  run.finish(report);
  out << "interior_sup=" << g17(interior_form_norm(ric)) << "\n";
  return kExitOk;
}

int run_bracket(const Config& cfg, Run& run, std::ostream& out) {
  const GridPtr grid = make_grid(cfg.backend);
  const SplitForm a = make_base(cfg.problem.base, grid, cfg.backend);
  const SplitForm b = make_base(cfg.problem.other, grid, cfg.backend);
  const BracketValue v = bracket(a, b);
  json report{{"config", cfg.source}, {"bracket", v.value}, {"quadrature_error", v.error}};
  run.finish(report);
  out << "bracket=" << g17(v.value) << " quadrature_error=" << g17(v.error) << "\n";
  return kExitOk;
}

int run_hopf(double alpha, double beta, std::size_t nx, std::size_t ns, double half_width, const std::string& check,
             std::vector<double> ts, const std::string& dir_flag, std::ostream& out) {
  const GridPtr grid = Grid::make(GridSpec::hopf(alpha, beta, nx, ns, half_width));
  const KProfile profile = k_profile(alpha, beta, grid);
  std::string csv;
  json report{{"alpha", alpha}, {"beta", beta}, {"nx", nx}, {"ns", ns}, {"half_width", grid->coordinate(0, nx - 1)}, {"check", check}};
  if (check == "brackets") {
    const auto res = hopf_bracket_constants(profile, ts);
    csv = "t,bracket,c_t\n";
    json rows = json::array();
    for (const auto& ch : res.checks) {
      csv += g17(ch.t) + "," + g17(ch.with_base) + "," + g17(res.c * ch.t) + "\n";
      rows.push_back({{"t", ch.t},
                      {"bracket_t_0", ch.with_base},
                      {"bracket_prime_t", ch.prime_first},
                      {"bracket_t_prime", ch.prime_second},
                      {"rel_err_base", ch.rel_err_base},
                      {"rel_err_prime", ch.rel_err_prime}});
    }
    report["c"] = res.c;
    report["rows"] = rows;
  } else if (check == "soliton") {
    csv = "t,residual\n";
    json rows = json::array();
    for (double t : ts) {
      const double r = soliton_residual(profile, t);
      csv += g17(t) + "," + g17(r) + "\n";
      rows.push_back({{"t", t}, {"residual", r}});
    }
    report["epsilon"] = kSolitonSign;
    report["rows"] = rows;
  } else {  // profile
    csv = "x,k,one_minus_k,dk\n";
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = grid->coordinate(0, i);
      csv += g17(x) + "," + g17(profile.k(x)) + "," + g17(profile.one_minus_k(x)) + "," + g17(profile.dk(x)) + "\n";
    }
    report["ode_residual"] = profile.ode_residual();
  }
  out << csv;
  if (!dir_flag.empty()) {
    Run run{"hopf", output_dir(dir_flag, "")};
    write_text(run.dir / (check + ".csv"), csv);
    run.finish(report);
  }
  return kExitOk;
}

int run_report(const std::string& path, std::ostream& out) {
  fs::path p = path;
  if (fs::is_directory(p)) p /= "report.json";
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::Config, "cannot open " + p.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, p.string() + ": " + e.what());
  }
  bool ok = j.value("passed", j.value("converged", true));
  if (j.contains("criterion")) {
    out << j["criterion"].get<std::string>() << (ok ? " PASS " : " FAIL ") << j.value("title", "") << "\n";
    for (const auto& m : j["measurements"])
      out << "  " << m["name"].get<std::string>() << " = " << g17(m["value"].get<double>()) << " (bound "
          << g17(m["bound"].get<double>()) << ")" << (m["passed"].get<bool>() ? "" : "  FAILED") << "\n";
  } else {
    for (const char* key : {"problem", "method", "converged", "xi", "final_residual", "newton_iterations", "rA", "rB", "s", "t",
                            "residual", "bracket", "iterations"})
      if (j.contains(key)) out << key << " = " << j[key].dump() << "\n";
    if (j.contains("checks"))
      for (const auto& c : j["checks"])
        out << "  check " << c["name"].get<std::string>() << (c["passed"].get<bool>() ? " ok " : " FAILED ")
            << g17(c["measured"].get<double>()) << "\n";
    if (j.contains("error")) out << "error = " << j["error"].dump() << "\n";
  }
  return ok ? kExitOk : kExitSolver;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Split-tangent bi-Hermitian geometry: solvers and checks"};
  app.require_subcommand(0, 1);

  std::string preset, config, dir;
  app.add_option("--preset", preset, "Run a named acceptance experiment (A1..A12)");
  app.add_option("-o,--output", dir, "Output directory (default: config output.dir, $SPLITMA_OUTPUT_DIR, ./splitma_out)");

  auto* solve = app.add_subcommand("solve", "Solve the configured problem");
  solve->add_option("-c,--config", config, "JSON config");
  solve->add_option("--preset", preset, "Named acceptance experiment");
  solve->add_option("-o,--output", dir, "Output directory");

  std::vector<CLI::App*> simple;
  for (const char* name : {"gauduchon", "ricci", "bracket", "decompose"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config, "JSON config")->required();
    sub->add_option("-o,--output", dir, "Output directory");
    simple.push_back(sub);
  }
  simple[0]->description("Gauduchon conformal factor of the base metric");
  simple[1]->description("Bismut Ricci form of the base metric");
  simple[2]->description("Bracket {base, other}");
  simple[3]->description("Decompose base + box F over two conformal-family classes");

  double alpha = 1.0, beta = 2.0, half_width = 12.0;
  std::size_t nx = 1024, ns = 32;
  std::string check = "brackets";
  std::vector<double> ts{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  auto* hopf = app.add_subcommand("hopf", "Checks on the SU family of the Hopf cylinder; CSV to stdout");
  hopf->add_option("--alpha", alpha)->check(CLI::PositiveNumber);
  hopf->add_option("--beta", beta)->check(CLI::PositiveNumber);
  hopf->add_option("--nx", nx)->check(CLI::Range(4, 1 << 20));
  hopf->add_option("--ns", ns)->check(CLI::Range(4, 1 << 12));
  hopf->add_option("--half-width", half_width)->check(CLI::PositiveNumber);
  hopf->add_option("--check", check)->check(CLI::IsMember({"brackets", "soliton", "profile"}));
  hopf->add_option("--t", ts, "Shift parameters")->delimiter(',');
  hopf->add_option("-o,--output", dir, "Also write CSV and report here");

  std::string report_path;
  auto* report = app.add_subcommand("report", "Summarize a report.json (or a directory holding one)");
  report->add_option("path", report_path)->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*hopf) return run_hopf(alpha, beta, nx, ns, half_width, check, ts, dir, out);
    if (*report) return run_report(report_path, out);

    const bool any_simple = std::any_of(simple.begin(), simple.end(), [](CLI::App* s) { return bool(*s); });
    if (!preset.empty() && (any_simple || !config.empty())) {
      err << "--preset cannot be combined with --config\n";
      return kExitUsage;
    }
    if (!preset.empty()) {
      Run run{"preset " + preset, output_dir(dir, "")};
      return run_preset(preset, run, out);
    }
    if (config.empty()) {
      err << app.help();
      return kExitUsage;
    }
    Config cfg = load_config(config);
    std::string command = "solve";
    for (auto* s : simple)
      if (*s) command = s->get_name();
    Run run{command, output_dir(dir, cfg.output_dir)};
    if (command == "gauduchon") return run_gauduchon(cfg, run, out);
    if (command == "ricci") return run_ricci(cfg, run, out);
    if (command == "bracket") return run_bracket(cfg, run, out);
    if (command == "decompose") cfg.problem.kind = "decompose";
    return run_solve(cfg, run, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace splitma::cli
