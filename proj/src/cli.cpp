#include "harvest/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "harvest/correlations.hpp"
#include "harvest/density.hpp"
#include "harvest/sweep.hpp"
#include "harvest/thermality.hpp"
#include "harvest/wightman.hpp"

namespace harvest {

namespace {

struct Options {
  // point
  std::string scenario = "parallel";
  double a = 1.0;
  double omega = 0.5;
  double L = 1.0;
  std::string format = "text";
  // sweep
  std::vector<std::string> scenarios{"parallel"};
  std::string a_range = "1";
  std::string omega_range = "0.5";
  std::string L_range = "1";
  std::string out;
  std::string config;
  int workers = 0;
  bool reproducible = false;
  // report
  std::string kind = "equivalence";
  std::string report_a = "0.5,1,2";
  std::string report_omega = "0.5,1,2";
  // shared
  double lambda = 0.1;
  double temperature = 0.0;
  QuadratureSpec quadrature;
};

struct Commands {
  std::unique_ptr<CLI::App> app;
  CLI::App* point = nullptr;
  CLI::App* sweep = nullptr;
  CLI::App* verify = nullptr;
  CLI::App* report = nullptr;
};

void add_quadrature(CLI::App* cmd, Options& o) {
  cmd->add_option("--abs-tol", o.quadrature.abs_tol, "absolute tolerance of the 2D quadrature")->capture_default_str();
  cmd->add_option("--rel-tol", o.quadrature.rel_tol, "relative tolerance of the 2D quadrature")->capture_default_str();
  cmd->add_option("--half-width", o.quadrature.half_width, "integration box half-width in units of sigma")
      ->capture_default_str();
  cmd->add_option("--eps0", o.quadrature.regulator.initial, "first UV regulator of the ladder")->capture_default_str();
  cmd->add_option("--levels", o.quadrature.regulator.levels, "regulator halvings")->capture_default_str();
  cmd->add_option("--order", o.quadrature.regulator.order, "extrapolation order in eps")->capture_default_str();
}

void add_state(CLI::App* cmd, Options& o) {
  cmd->add_option("--temperature", o.temperature, "field temperature T sigma; 0 selects the Minkowski vacuum")
      ->capture_default_str();
}

Commands make_commands(Options& o) {
  Commands c;
  c.app = std::make_unique<CLI::App>("Correlations harvested by two Unruh-DeWitt detectors (units of sigma).",
                                     "harvest");
  c.app->require_subcommand(1);
  c.app->set_version_flag("--version", std::string(kVersion));

  c.point = c.app->add_subcommand("point", "compute one configuration");
  c.point->add_option("--scenario", o.scenario, "inertial | parallel | anti-parallel | perpendicular")
      ->capture_default_str();
  c.point->add_option("--a", o.a, "acceleration a sigma (0 for inertial)")->capture_default_str();
  c.point->add_option("--omega", o.omega, "energy gap Omega sigma")->capture_default_str();
  c.point->add_option("--L", o.L, "separation L / sigma")->capture_default_str();
  c.point->add_option("--lambda", o.lambda, "coupling")->capture_default_str();
  c.point->add_option("--format", o.format, "text | csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
  add_state(c.point, o);
  add_quadrature(c.point, o);

  c.sweep = c.app->add_subcommand("sweep", "evaluate a parameter grid and write CSV");
  c.sweep->add_option("--scenario", o.scenarios, "comma-separated scenarios")->delimiter(',')->capture_default_str();
  c.sweep->add_option("--a", o.a_range, "start:stop:step or comma list")->capture_default_str();
  c.sweep->add_option("--omega", o.omega_range, "start:stop:step or comma list")->capture_default_str();
  c.sweep->add_option("--L", o.L_range, "start:stop:step or comma list")->capture_default_str();
  c.sweep->add_option("--lambda", o.lambda, "coupling recorded in the output")->capture_default_str();
  c.sweep->add_option("--out", o.out, "CSV path (default: stdout)");
  c.sweep->add_option("--workers", o.workers, "worker threads (default: $HARVEST_WORKERS or all cores)");
  c.sweep->add_flag("--reproducible", o.reproducible, "zero wall times and take the timestamp from SOURCE_DATE_EPOCH");
  c.sweep->add_option("--config", o.config, "TOML/INI file with option names as keys; flags win");
  add_state(c.sweep, o);
  add_quadrature(c.sweep, o);

  c.verify = c.app->add_subcommand("verify", "run the identity and dual-path checks");
  add_quadrature(c.verify, o);

  c.report = c.app->add_subcommand("report", "thermality comparison tables as CSV");
  c.report->add_option("--kind", o.kind, "equivalence | series")
      ->check(CLI::IsMember({"equivalence", "series"}))
      ->capture_default_str();
  c.report->add_option("--a", o.report_a, "accelerations for the equivalence table")->capture_default_str();
  c.report->add_option("--omega", o.report_omega, "gaps for the equivalence table")->capture_default_str();
  c.report->add_option("--out", o.out, "CSV path (default: stdout)");
  add_quadrature(c.report, o);
  return c;
}

// CLI11 reads `argv` back to front from a vector.
void parse(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
}

// Options from the config file that the command line does not already set,
// rendered as flags placed ahead of the command-line arguments.
std::vector<std::string> config_arguments(CLI::App& sweep, const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw std::runtime_error("cannot open config file '" + path + "'");
  std::vector<std::string> extra;
  for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "sweep"))
      throw std::invalid_argument("config: unexpected section for key '" + item.name + "'");
    std::string name = item.name;
    CLI::Option* opt = sweep.get_option_no_throw("--" + name);
    if (!opt) {
      for (char& ch : name)
        if (ch == '_') ch = '-';
      opt = sweep.get_option_no_throw("--" + name);
    }
    if (!opt || name == "config") throw std::invalid_argument("config: unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    std::string value;
    for (std::size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
    extra.push_back("--" + name + "=" + value);
  }
  return extra;
}

FieldState state_from(const Options& o) {
  if (!(o.temperature >= 0.0) || !std::isfinite(o.temperature))
    throw std::invalid_argument("temperature must be non-negative");
  if (o.temperature == 0.0) return MinkowskiVacuum{};
  return ThermalKms{1.0 / o.temperature};
}

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt(cplx z) { return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i"; }

int run_point(const Options& o, std::ostream& out) {
  const Scenario s = parse_scenario(o.scenario);
  const FieldState state = state_from(o);
  if (o.format == "csv") {
    SweepSpec spec;
    spec.scenarios = {s};
    spec.acceleration = parse_range(fmt(o.a));
    spec.gap = parse_range(fmt(o.omega));
    spec.separation = parse_range(fmt(o.L));
    spec.state = state;
    spec.coupling = o.lambda;
    spec.quadrature = o.quadrature;
    spec.workers = 1;
    spec.reproducible = true;
    write_csv(out, spec, run_sweep(spec));
    return 0;
  }
  const ScenarioConfig cfg{s, o.a, o.L};
  const HarvestResult r = harvest(cfg, DetectorPair::symmetric(o.lambda, o.omega), state, o.quadrature);
  const MatrixElements& e = r.elements;
  const auto line = [&](std::string_view key, const std::string& value) {
    out << key << std::string(key.size() < 16 ? 16 - key.size() : 1, ' ') << value << '\n';
  };
  line("scenario", std::string(to_string(s)));
  line("a_sigma", fmt(o.a));
  line("omega_sigma", fmt(o.omega));
  line("L_sigma", fmt(o.L));
  line("lambda", fmt(o.lambda));
  line("state", describe(state));
  line("L_AA", fmt(e.laa) + "  +/- " + fmt(e.err_laa));
  line("L_BB", fmt(e.lbb) + "  +/- " + fmt(e.err_lbb));
  line("L_AB", fmt(e.lab) + "  +/- " + fmt(e.err_lab));
  line("M", fmt(e.m) + "  +/- " + fmt(e.err_m));
  line("L_plus", fmt(r.l_plus));
  line("L_minus", fmt(r.l_minus));
  line("mutual_info", fmt(r.mutual_info) + "  +/- " + fmt(r.err_mutual_info));
  line("concurrence", fmt(r.concurrence) + "  +/- " + fmt(r.err_concurrence));
  line("converged", e.converged ? "yes" : "no (" + e.diagnostics + ")");
  return 0;
}

int run_sweep_command(const Options& o, std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  spec.scenarios.clear();
  for (const auto& name : o.scenarios) spec.scenarios.push_back(parse_scenario(name));
  spec.acceleration = parse_range(o.a_range);
  spec.gap = parse_range(o.omega_range);
  spec.separation = parse_range(o.L_range);
  spec.state = state_from(o);
  spec.coupling = o.lambda;
  spec.quadrature = o.quadrature;
  spec.output = o.out;
  spec.workers = o.workers;
  spec.reproducible = o.reproducible;
  const auto rows = run_sweep(spec);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.converged ? 0 : 1;
  if (o.out.empty()) write_csv(out, spec, rows);
  else err << "wrote " << rows.size() << " rows to " << o.out << '\n';
  if (failed) err << "warning: " << failed << " of " << rows.size() << " rows did not converge\n";
  return 0;
}

struct Check {
  std::string name;
  std::function<std::pair<bool, std::string>()> run;
};

std::pair<bool, std::string> relative(double value, double reference, double tol, bool converged = true) {
  const double dev = std::abs(value - reference) / std::abs(reference);
  return {converged && dev <= tol, "value " + fmt(value) + " reference " + fmt(reference) + " rel dev " + fmt(dev) +
                                       " (tol " + fmt(tol) + ")" + (converged ? "" : " unconverged")};
}

int run_verify(const Options& o, std::ostream& out) {
  constexpr double pi = std::numbers::pi;
  const QuadratureSpec& q = o.quadrature;
  validate(q);
  std::vector<Check> checks;
  for (const auto& [a, w] : {std::pair{0.5, 0.5}, std::pair{1.0, 1.0}, std::pair{2.0, 2.0}}) {
    checks.push_back({"dual-path response a=" + fmt(a) + " omega=" + fmt(w), [=, &q] {
                        const ScenarioConfig cfg{Scenario::parallel, a, 1.0};
                        const auto det = DetectorPair::symmetric(1.0, w);
                        const auto closed = transition_probability_closed(a, w, 1.0);
                        const auto quad = l_element(Detector::A, Detector::A, cfg, det, MinkowskiVacuum{}, q,
                                                    Route::quadrature);
                        return relative(quad.value.real(), closed.value.real(), 1e-4,
                                        closed.converged && quad.converged);
                      }});
  }
  checks.push_back({"dual-path response at rest omega=1", [&q] {
                      const ScenarioConfig cfg{Scenario::inertial, 0.0, 1.0};
                      const auto det = DetectorPair::symmetric(1.0, 1.0);
                      const auto quad =
                          l_element(Detector::A, Detector::A, cfg, det, MinkowskiVacuum{}, q, Route::quadrature);
                      const double closed = transition_probability_closed(0.0, 1.0, 1.0).value.real();
                      return relative(quad.value.real(), closed, 1e-6, quad.converged);
                    }});
  checks.push_back({"thermal image sum vs sinh form", [] {
                      const double beta = 2.0 * pi, dt = 0.5;
                      const cplx sum = wightman_thermal_auto(dt, 0.0, beta, 0.0, 1e-15);
                      const double s = std::sinh(pi * dt / beta);
                      const double closed = -1.0 / (4.0 * beta * beta * s * s);
                      const double diff = std::abs(sum - closed);
                      return std::pair{diff <= 1e-8, "abs dev " + fmt(diff) + " (tol 1e-8)"};
                    }});
  checks.push_back({"thermal image sum vs radial integral", [] {
                      const double dt = 0.3, r = 0.7, beta = 2.0;
                      const int n = thermal_terms(dt, r, beta, 0.0, 1e-14);
                      const cplx sum = thermal_correction(dt, r, beta, 0.0, n).value;
                      const IntegralResult ref = wightman_thermal_integral(dt, r, beta);
                      const double diff = std::abs(sum.real() - ref.value.real());
                      return std::pair{ref.converged && diff <= 1e-6, "abs dev " + fmt(diff) + " (tol 1e-6)"};
                    }});
  const auto series_check = [](const SeriesPoint& p) {
    const SeriesCoefficients s = series_in_temperature(p);
    const double c1 = std::abs(s.c[1]);
    const double c2 = std::abs(s.c[2] - 1.0 / 12.0);
    return std::pair{s.stable && c1 < 1e-6 && c2 < 1e-4,
                     "|c1| " + fmt(c1) + " |c2 - 1/12| " + fmt(c2) + (s.stable ? "" : " unstable")};
  };
  checks.push_back({"thermal series", [&] { return series_check(StaticPair{0.5, 0.0}); }});
  checks.push_back({"accelerated single-trajectory series", [&] {
                      return series_check(TrajectoryPair{Scenario::parallel, 1.0, Detector::A, 0.4, Detector::A, -0.4});
                    }});
  checks.push_back({"de Sitter first-order coefficient", [] {
                      const SeriesCoefficients s = series_in_temperature(DeSitterPair{0.5, 0.3, 1.0});
                      const double c1 = std::abs(s.c[1]);
                      return std::pair{s.stable && c1 > 1e-4, "|c1| " + fmt(c1) + " (must exceed 1e-4)"};
                    }});
  checks.push_back({"accelerated vs thermal response a=1 omega=0.5", [&q] {
                      const EquivalenceRow r = single_detector_equivalence(1.0, 0.5, q);
                      return relative(r.thermal, r.accelerated, 1e-4, r.converged);
                    }});

  int failed = 0;
  for (const auto& c : checks) {
    std::pair<bool, std::string> result;
    try {
      result = c.run();
    } catch (const std::exception& ex) {
      result = {false, std::string("threw: ") + ex.what()};
    }
    failed += result.first ? 0 : 1;
    out << (result.first ? "PASS " : "FAIL ") << c.name << ": " << result.second << '\n';
  }
  out << (failed ? "verify: " + std::to_string(failed) + " check(s) failed" : std::string("verify: all checks passed"))
      << '\n';
  return failed ? 1 : 0;
}

void write_series_report(std::ostream& os) {
  struct Named {
    std::string family;
    std::string where;
    SeriesPoint point;
  };
  const std::vector<Named> points = {
      {"thermal", "dt=0.5 r=0", StaticPair{0.5, 0.0}},
      {"thermal", "dt=0.3 r=0.7", StaticPair{0.3, 0.7}},
      {"accelerated", "single tau=0.4 tau'=-0.4", TrajectoryPair{Scenario::parallel, 1.0, Detector::A, 0.4, Detector::A, -0.4}},
      {"accelerated", "parallel L=1 tau_A=0.4 tau_B=-0.3",
       TrajectoryPair{Scenario::parallel, 1.0, Detector::A, 0.4, Detector::B, -0.3}},
      {"accelerated", "anti-parallel L=1 tau_A=0.4 tau_B=-0.3",
       TrajectoryPair{Scenario::anti_parallel, 1.0, Detector::A, 0.4, Detector::B, -0.3}},
      {"desitter", "dt=0.5 dt_sum=0.3 L=1", DeSitterPair{0.5, 0.3, 1.0}},
  };
  os << "family,point,order,re_c,im_c,stability,stable\n";
  for (const auto& p : points) {
    const SeriesCoefficients s = series_in_temperature(p.point);
    for (int k = 0; k < 4; ++k)
      os << p.family << ',' << p.where << ',' << k << ',' << fmt(s.c[k].real()) << ',' << fmt(s.c[k].imag()) << ','
         << fmt(s.error[k]) << ',' << (s.stable ? 1 : 0) << '\n';
  }
}

int run_report(const Options& o, std::ostream& out, std::ostream& err) {
  std::ostringstream table;
  if (o.kind == "series") {
    write_series_report(table);
  } else {
    const auto rows = single_detector_equivalence_report(parse_range(o.report_a).values,
                                                         parse_range(o.report_omega).values, o.quadrature);
    write_equivalence_csv(table, rows);
  }
  if (o.out.empty()) {
    out << table.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!(f << table.str())) throw std::runtime_error("cannot write '" + o.out + "'");
    err << "wrote " << o.out << '\n';
  }
  return 0;
}

std::string quoted(std::string_view s) {
  std::string q = "\"";
  for (const char ch : s) {
    if (ch == '"' || ch == '\\') q += '\\';
    q += ch == '\n' ? ' ' : ch;
  }
  return q + '"';
}

void error_line(std::ostream& err, std::string_view kind, std::string_view message) {
  err << "error: kind=" << kind << " message=" << quoted(message) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  Commands c = make_commands(o);
  try {
    parse(*c.app, args);
    if (c.sweep->parsed() && !o.config.empty()) {
      const std::vector<std::string> extra = config_arguments(*c.sweep, o.config);
      std::vector<std::string> merged;
      bool inserted = false;
      for (const auto& arg : args) {
        merged.push_back(arg);
        if (!inserted && arg == "sweep") {
          merged.insert(merged.end(), extra.begin(), extra.end());
          inserted = true;
        }
      }
      o = Options{};
      c = make_commands(o);
      parse(*c.app, merged);
    }
  } catch (const CLI::CallForHelp&) {
    out << c.app->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << c.app->help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& ex) {
    error_line(err, "usage", ex.what());
    err << c.app->help();
    return 2;
  } catch (const std::invalid_argument& ex) {
    error_line(err, "invalid-argument", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    error_line(err, "io", ex.what());
    return 1;
  }

  try {
    if (c.point->parsed()) return run_point(o, out);
    if (c.sweep->parsed()) return run_sweep_command(o, out, err);
    if (c.verify->parsed()) return run_verify(o, out);
    return run_report(o, out, err);
  } catch (const std::invalid_argument& ex) {
    error_line(err, "invalid-argument", ex.what());
    return 2;
  } catch (const ConvergenceError& ex) {
    error_line(err, "convergence", ex.what());
    return 1;
  } catch (const std::domain_error& ex) {
    error_line(err, "domain", ex.what());
    return 1;
  } catch (const std::exception& ex) {
    error_line(err, "runtime", ex.what());
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace harvest
