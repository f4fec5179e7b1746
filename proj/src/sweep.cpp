#include "harvest/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace harvest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument(std::string(context) + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

// Removes the drift of start + k step so that 0.1:0.3:0.1 yields 0.3, not 0.30000000000000004.
double snap(double x) {
  const double scaled = x * 1e12;
  if (std::abs(scaled) > 1e15) return x;
  return std::round(scaled) / 1e12;
}

void put(std::ostream& os, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  os.write(buf, res.ptr - buf);
}

std::string format_number(double x) {
  std::ostringstream os;
  put(os, x);
  return os.str();
}

std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string timestamp(bool reproducible) {
  if (!reproducible) return iso_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    long long v = 0;
    const std::string_view s(env);
    if (std::from_chars(s.data(), s.data() + s.size(), v).ec == std::errc()) t = static_cast<std::time_t>(v);
  }
  return iso_utc(t);
}

constexpr std::string_view kUnconverged = "unconverged: row=";

}  // namespace

Range parse_range(std::string_view text) {
  Range r{std::string(trim(text)), {}};
  const std::string_view body = r.text;
  if (body.empty()) throw std::invalid_argument("range: empty");
  if (body.find(':') != std::string_view::npos) {
    const auto parts = split(body, ':');
    if (parts.size() != 3) throw std::invalid_argument("range: expected start:stop:step, got '" + r.text + "'");
    const double start = parse_number(parts[0], "range start");
    const double stop = parse_number(parts[1], "range stop");
    const double step = parse_number(parts[2], "range step");
    if (!std::isfinite(start) || !std::isfinite(stop)) throw std::invalid_argument("range: bounds must be finite");
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("range: step must be positive");
    if (stop < start) throw std::invalid_argument("range: stop is below start in '" + r.text + "'");
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    if (n > 1'000'000) throw std::invalid_argument("range: more than a million points in '" + r.text + "'");
    for (long long k = 0; k <= n; ++k) r.values.push_back(snap(start + static_cast<double>(k) * step));
  } else {
    for (const auto part : split(body, ',')) {
      const double v = parse_number(part, "range value");
      if (!std::isfinite(v)) throw std::invalid_argument("range: values must be finite");
      r.values.push_back(v);
    }
  }
  std::sort(r.values.begin(), r.values.end());
  r.values.erase(std::unique(r.values.begin(), r.values.end()), r.values.end());
  return r;
}

std::string SweepSpec::echo() const {
  std::string s = "scenarios=";
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    if (k) s += ',';
    s += to_string(scenarios[k]);
  }
  const QuadratureSpec& q = quadrature;
  s += ";a=" + acceleration.text + ";omega=" + gap.text + ";L=" + separation.text + ";state=" + describe(state) +
       ";lambda=" + format_number(coupling) + ";abs_tol=" + format_number(q.abs_tol) +
       ";rel_tol=" + format_number(q.rel_tol) + ";half_width=" + format_number(q.half_width) +
       ";eps0=" + format_number(q.regulator.initial) + ";levels=" + std::to_string(q.regulator.levels) +
       ";order=" + std::to_string(q.regulator.order);
  return s;
}

void validate(const SweepSpec& spec) {
  if (spec.scenarios.empty()) throw std::invalid_argument("sweep: no scenarios");
  if (spec.acceleration.values.empty() || spec.gap.values.empty() || spec.separation.values.empty())
    throw std::invalid_argument("sweep: every range needs at least one value");
  if (!(spec.coupling >= 0.0) || !std::isfinite(spec.coupling))
    throw std::invalid_argument("sweep: lambda must be non-negative");
  if (spec.workers < 0) throw std::invalid_argument("sweep: workers must be non-negative");
  validate(spec.state);
  validate(spec.quadrature);
  if (std::holds_alternative<DeSitterConformal>(spec.state))
    throw std::invalid_argument("sweep: de Sitter detector pairs are not supported");
  for (const Scenario s : spec.scenarios) {
    if (std::holds_alternative<ThermalKms>(spec.state) && s != Scenario::inertial)
      throw std::invalid_argument("sweep: the thermal state needs the inertial scenario");
    if (is_accelerated(s))
      for (const double a : spec.acceleration.values)
        if (!(a > 0.0)) throw std::invalid_argument("sweep: accelerated scenarios need a > 0");
  }
  for (const double L : spec.separation.values)
    if (!(L >= 0.0) || !std::isfinite(L)) throw std::invalid_argument("sweep: L must be non-negative");
  for (const double w : spec.gap.values)
    if (!std::isfinite(w)) throw std::invalid_argument("sweep: Omega must be finite");
}

int default_workers() {
  if (const char* env = std::getenv("HARVEST_WORKERS")) {
    int n = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<GridPoint> expand_grid(const SweepSpec& spec) {
  std::vector<Scenario> scenarios = spec.scenarios;
  std::sort(scenarios.begin(), scenarios.end());
  scenarios.erase(std::unique(scenarios.begin(), scenarios.end()), scenarios.end());
  std::vector<GridPoint> grid;
  for (const Scenario s : scenarios) {
    const std::vector<double> accelerations = is_accelerated(s) ? spec.acceleration.values : std::vector<double>{0.0};
    for (const double a : accelerations)
      for (const double w : spec.gap.values)
        for (const double L : spec.separation.values) grid.push_back({s, a, w, L});
  }
  return grid;
}

ResultRow make_row(const HarvestResult& unit, double coupling, double wall_time_ms) {
  const MatrixElements& e = unit.elements;
  ResultRow row;
  row.scenario = unit.config.scenario;
  row.a_sigma = unit.config.acceleration;
  row.omega_sigma = unit.detectors.A.gap;
  row.L_sigma = unit.config.separation;
  row.lambda = coupling;
  row.L_AA = e.laa;
  row.L_BB = e.lbb;
  row.re_LAB = e.lab.real();
  row.im_LAB = e.lab.imag();
  row.re_M = e.m.real();
  row.im_M = e.m.imag();
  row.L_plus = unit.l_plus;
  row.L_minus = unit.l_minus;
  row.mutual_info = unit.mutual_info;
  row.concurrence = unit.concurrence;
  row.err_est = std::max({e.max_error(), unit.err_mutual_info, unit.err_concurrence});
  row.wall_time_ms = wall_time_ms;
  row.converged = e.converged;
  row.diagnostics = e.diagnostics;
  return row;
}

ResultRow evaluate_point(const GridPoint& p, const SweepSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig cfg{p.scenario, p.acceleration, p.separation};
  ResultRow row;
  try {
    const HarvestResult r = harvest(cfg, DetectorPair::symmetric(1.0, p.gap), spec.state, spec.quadrature);
    row = make_row(r, spec.coupling, 0.0);
  } catch (const std::exception& ex) {
    row.scenario = p.scenario;
    row.a_sigma = p.acceleration;
    row.omega_sigma = p.gap;
    row.L_sigma = p.separation;
    row.lambda = spec.coupling;
    for (double* v : {&row.L_AA, &row.L_BB, &row.re_LAB, &row.im_LAB, &row.re_M, &row.im_M, &row.L_plus,
                      &row.L_minus, &row.mutual_info, &row.concurrence, &row.err_est})
      *v = kNaN;
    row.converged = false;
    row.diagnostics = ex.what();
  }
  if (!spec.reproducible)
    row.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const Progress& progress) {
  validate(spec);
  const std::vector<GridPoint> grid = expand_grid(spec);
  std::vector<ResultRow> rows(grid.size());
  const int workers = std::max(1, std::min<int>(spec.workers > 0 ? spec.workers : default_workers(),
                                                static_cast<int>(grid.size())));
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      rows[k] = evaluate_point(grid[k], spec);
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(++done, grid.size());
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (!spec.output.empty()) write_csv(spec.output, spec, rows);
  return rows;
}

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<ResultRow>& rows) {
  os << "# harvest " << kVersion << '\n';
  os << "# spec: " << spec.echo() << '\n';
  os << "# timestamp: " << timestamp(spec.reproducible) << '\n';
  os << "# units: a_sigma, omega_sigma, L_sigma in units of sigma; L_AA through err_est in units of lambda^2\n";
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (!rows[k].converged) os << "# " << kUnconverged << k << ' ' << rows[k].diagnostics << '\n';
  os << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    os << to_string(r.scenario);
    for (const double v : {r.a_sigma, r.omega_sigma, r.L_sigma, r.lambda, r.L_AA, r.L_BB, r.re_LAB, r.im_LAB, r.re_M,
                           r.im_M, r.L_plus, r.L_minus, r.mutual_info, r.concurrence, r.err_est, r.wall_time_ms}) {
      os << ',';
      put(os, v);
    }
    os << '\n';
  }
}

void write_csv(const std::string& path, const SweepSpec& spec, const std::vector<ResultRow>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(os, spec, rows);
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  bool header_seen = false;
  std::vector<std::pair<std::size_t, std::string>> unconverged;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body(line);
      body.remove_prefix(1);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      table.metadata.emplace_back(body);
      if (body.starts_with(kUnconverged)) {
        body.remove_prefix(kUnconverged.size());
        const auto space = body.find(' ');
        const std::string_view index = body.substr(0, space);
        std::size_t k = 0;
        if (std::from_chars(index.data(), index.data() + index.size(), k).ec != std::errc())
          throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad unconverged row index");
        unconverged.emplace_back(k, space == std::string_view::npos ? "" : std::string(body.substr(space + 1)));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw std::runtime_error("csv line " + std::to_string(line_no) + ": unexpected header");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 17)
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected 17 fields, got " +
                               std::to_string(fields.size()));
    ResultRow r;
    try {
      r.scenario = parse_scenario(fields[0]);
    } catch (const std::exception& ex) {
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": " + ex.what());
    }
    double* targets[] = {&r.a_sigma, &r.omega_sigma, &r.L_sigma, &r.lambda, &r.L_AA, &r.L_BB,
                         &r.re_LAB,  &r.im_LAB,      &r.re_M,    &r.im_M,   &r.L_plus, &r.L_minus,
                         &r.mutual_info, &r.concurrence, &r.err_est, &r.wall_time_ms};
    for (std::size_t k = 0; k < 16; ++k) {
      const std::string_view f = fields[k + 1];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), *targets[k]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad number '" + std::string(f) + "'");
    }
    table.rows.push_back(std::move(r));
  }
  if (!header_seen) throw std::runtime_error("csv: header line missing");
  for (const auto& [k, note] : unconverged) {
    if (k >= table.rows.size()) throw std::runtime_error("csv: unconverged row index out of range");
    table.rows[k].converged = false;
    table.rows[k].diagnostics = note;
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(is);
}

}  // namespace harvest
