#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "harvest/core.hpp"
#include "harvest/correlations.hpp"
#include "harvest/quadrature.hpp"
#include "harvest/wightman.hpp"

namespace harvest {

inline constexpr std::string_view kVersion = "0.1.0";

/// A grid axis: "start:stop:step" (inclusive of stop), a comma list, or one
/// number. The source text is kept for the CSV header echo.
struct Range {
  std::string text;
  std::vector<double> values;
};

Range parse_range(std::string_view text);

struct SweepSpec {
  std::vector<Scenario> scenarios{Scenario::parallel};
  Range acceleration = parse_range("1");
  Range gap = parse_range("0.5");
  Range separation = parse_range("1");
  FieldState state = MinkowskiVacuum{};
  double coupling = 0.1;
  QuadratureSpec quadrature;
  std::string output;  // CSV path; empty for none
  int workers = 0;     // 0: HARVEST_WORKERS, else hardware concurrency
  bool reproducible = false;  // zero wall times and a fixed timestamp

  /// One-line canonical description written into the CSV metadata.
  std::string echo() const;
};

void validate(const SweepSpec& spec);

/// Worker count used when the spec leaves it at 0.
int default_workers();

struct GridPoint {
  Scenario scenario;
  double acceleration;
  double gap;
  double separation;
};

/// Grid points in canonical order: scenario, then a, Omega, L ascending.
/// The inertial scenario contributes a = 0 only.
std::vector<GridPoint> expand_grid(const SweepSpec& spec);

/// One CSV line. Elements, L_plus, L_minus, mutual_info, concurrence and
/// err_est are in units of lambda^2.
struct ResultRow {
  Scenario scenario = Scenario::parallel;
  double a_sigma = 0.0;
  double omega_sigma = 0.0;
  double L_sigma = 0.0;
  double lambda = 0.0;
  double L_AA = 0.0;
  double L_BB = 0.0;
  double re_LAB = 0.0;
  double im_LAB = 0.0;
  double re_M = 0.0;
  double im_M = 0.0;
  double L_plus = 0.0;
  double L_minus = 0.0;
  double mutual_info = 0.0;
  double concurrence = 0.0;
  double err_est = 0.0;
  double wall_time_ms = 0.0;
  bool converged = true;
  std::string diagnostics;

  bool operator==(const ResultRow&) const = default;
};

/// Row for a result computed at unit coupling, labeled with `coupling`.
ResultRow make_row(const HarvestResult& unit, double coupling, double wall_time_ms);

/// Evaluates one grid point at unit coupling. Failures are captured in the
/// row (NaN values, converged = false) rather than thrown.
ResultRow evaluate_point(const GridPoint& p, const SweepSpec& spec);

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// Every grid point, spread over the worker pool, returned in canonical order.
/// Writes the CSV when spec.output is set.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const Progress& progress = {});

inline constexpr std::string_view kCsvHeader =
    "scenario,a_sigma,omega_sigma,L_sigma,lambda,L_AA,L_BB,re_LAB,im_LAB,re_M,im_M,L_plus,L_minus,mutual_info,"
    "concurrence,err_est,wall_time_ms";

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<ResultRow>& rows);
void write_csv(const std::string& path, const SweepSpec& spec, const std::vector<ResultRow>& rows);

struct CsvTable {
  std::vector<std::string> metadata;  // '#' lines without the prefix
  std::vector<ResultRow> rows;
};

/// Parses what write_csv emits; throws std::runtime_error on malformed input.
CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::string& path);

}  // namespace harvest
