#pragma once

// Scenario driver: evolve a three-qubit family under local amplitude damping
// across a time grid, score each snapshot with either the roof lower bound or
// the X-form concurrence, and serialize the resulting curves (CSV, SVG).

#include "qfill/convex_roof.hpp"
#include "qfill/damping.hpp"
#include "qfill/measures.hpp"
#include "qfill/states.hpp"
#include "qfill/witness_plan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qfill {

enum class MeasureKind { FillRoof, GmcXAuto };

inline const char* measure_name(MeasureKind kind) {
  return kind == MeasureKind::FillRoof ? "fill-roof" : "gmc-x-auto";
}

inline MeasureKind measure_from_name(std::string_view name) {
  if (name == "fill-roof") return MeasureKind::FillRoof;
  if (name == "gmc-x-auto") return MeasureKind::GmcXAuto;
  throw std::invalid_argument("unknown measure: " + std::string(name));
}

/// Unitaries commuting with the family's initial state and with its entire
/// amplitude-damped trajectory: permutations of interchangeable qubits plus
/// an excitation-number phase whose order annihilates every coherence the
/// family carries (the damping channel preserves excitation-number
/// differences, so invariance at t = 0 persists for all t).
inline std::vector<Matrix> family_symmetry_generators(Family kind) {
  const Matrix swap_ab = permutation_unitary({1, 0, 2});
  const Matrix swap_bc = permutation_unitary({0, 2, 1});
  switch (kind) {
    case Family::GHZ:
    case Family::GTheta:
    case Family::W:
      return {swap_ab, swap_bc, excitation_phase_unitary(3, 3)};
    case Family::WTheta:
    case Family::WBarTheta:
      return {swap_bc, excitation_phase_unitary(3, 4)};
    case Family::SigmaTheta:
      return {swap_ab, swap_bc, excitation_phase_unitary(3, 2)};
  }
  return {};
}

/// Uniform grid 0, dt, ..., n*dt covering [0, t_max] inclusive.
inline std::vector<double> uniform_grid(double t_max, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("uniform_grid: dt must be > 0");
  if (!(t_max >= 0.0)) throw std::invalid_argument("uniform_grid: t_max must be >= 0");
  const int n = static_cast<int>(std::round(t_max / dt));
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = i * dt;
  return grid;
}

struct Scenario {
  StateFamily family;
  std::vector<double> time_grid = uniform_grid(3.0, 0.05);  // in units of tau
  MeasureKind measure = MeasureKind::FillRoof;
  RoofOptions roof;
  std::string csv_path;  // written when nonempty
  std::string svg_path;  // written when nonempty
  bool log_scale = false;
  // Opt-in cutting-plane warm starts for the roof ascent (PlanOptions respect
  // roof's budget, seed, support_tol and generators). The planner carries its
  // warm-start pool from one grid point to the next, so enabling it makes the
  // grid points sequential rather than independent.
  bool plan_witnesses = false;
  PlanOptions plan;
};

struct DynamicsRecord {
  double t_over_tau = 0.0;
  double value = 0.0;
  BoundKind bound_kind = BoundKind::Heuristic;
  double converged_fraction = 0.0;
};

// ---------------------------------------------------------------------------
// CSV.

namespace detail {

inline std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

inline void write_csv(const std::vector<DynamicsRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps line endings LF everywhere
  if (!out) throw std::invalid_argument("write_csv: cannot open " + path);
  out << "t_over_tau,value,bound_kind,converged_fraction\n";
  for (const auto& r : records)
    out << detail::format_sig12(r.t_over_tau) << ',' << detail::format_sig12(r.value) << ','
        << bound_kind_name(r.bound_kind) << ',' << detail::format_sig12(r.converged_fraction)
        << '\n';
  if (!out) throw std::invalid_argument("write_csv: write failed for " + path);
}

inline std::vector<DynamicsRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_csv: empty file " + path);
  std::vector<DynamicsRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string t, value, kind, fraction;
    if (!std::getline(ss, t, ',') || !std::getline(ss, value, ',') ||
        !std::getline(ss, kind, ',') || !std::getline(ss, fraction, ','))
      throw std::invalid_argument("read_csv: malformed row: " + line);
    records.push_back({std::stod(t), std::stod(value), bound_kind_from_name(kind),
                       std::stod(fraction)});
  }
  return records;
}

// ---------------------------------------------------------------------------
// SVG plotting. Minimal but self-contained: axes, ticks, one polyline per
// series, legend. On a log axis non-positive values are dropped and the line
// breaks around them; points whose converged fraction fell below 0.2 are
// drawn as hollow markers.

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  bool low_confidence = false;
};

struct PlotSeries {
  std::string label;
  std::vector<PlotPoint> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t / tau";
  std::string y_label = "value";
  bool log_y = false;
};

inline void write_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& options,
                           const std::string& path) {
  if (series.empty()) throw std::invalid_argument("write_svg_plot: no series");
  const double width = 720, height = 480;
  const double ml = 74, mr = 22, mt = 42, mb = 56;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (options.log_y && !(p.y > 0.0)) continue;
      x_min = std::min(x_min, p.x);
      x_max = std::max(x_max, p.x);
      y_min = std::min(y_min, p.y);
      y_max = std::max(y_max, p.y);
    }
  if (!(x_min <= x_max)) {  // nothing plottable; keep a valid empty canvas
    x_min = 0, x_max = 1, y_min = options.log_y ? 0.1 : 0, y_max = 1;
  }
  if (x_max == x_min) x_max = x_min + 1;
  if (options.log_y) {
    y_min = std::pow(10.0, std::floor(std::log10(y_min)));
    y_max = std::pow(10.0, std::ceil(std::log10(y_max)));
    if (y_max == y_min) y_max = 10 * y_min;
  } else {
    y_min = std::min(0.0, y_min);
    y_max = y_max + 0.05 * (y_max - y_min == 0 ? 1.0 : y_max - y_min);
  }

  const auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
  const auto sy = [&](double y) {
    const double t = options.log_y ? (std::log10(y) - std::log10(y_min)) /
                                         (std::log10(y_max) - std::log10(y_min))
                                   : (y - y_min) / (y_max - y_min);
    return height - mb - t * (height - mt - mb);
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' viewBox='0 0 " << width << " " << height << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";

  // Axes.
  svg << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
      << height - mb << "' stroke='black'/>\n"
      << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb
      << "' stroke='black'/>\n";

  // X ticks.
  for (int i = 0; i <= 6; ++i) {
    const double x = x_min + i * (x_max - x_min) / 6;
    svg << "<line x1='" << sx(x) << "' y1='" << height - mb << "' x2='" << sx(x) << "' y2='"
        << height - mb + 5 << "' stroke='black'/>\n"
        << "<text x='" << sx(x) << "' y='" << height - mb + 20
        << "' font-size='12' text-anchor='middle'>" << detail::format_sig12(std::round(x * 1e6) / 1e6)
        << "</text>\n";
  }
  // Y ticks.
  if (options.log_y) {
    for (double y = y_min; y <= y_max * 1.0001; y *= 10)
      svg << "<line x1='" << ml - 5 << "' y1='" << sy(y) << "' x2='" << ml << "' y2='" << sy(y)
          << "' stroke='black'/>\n"
          << "<text x='" << ml - 8 << "' y='" << sy(y) + 4
          << "' font-size='12' text-anchor='end'>" << detail::format_sig12(y) << "</text>\n";
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double y = y_min + i * (y_max - y_min) / 5;
      svg << "<line x1='" << ml - 5 << "' y1='" << sy(y) << "' x2='" << ml << "' y2='" << sy(y)
          << "' stroke='black'/>\n"
          << "<text x='" << ml - 8 << "' y='" << sy(y) + 4
          << "' font-size='12' text-anchor='end'>"
          << detail::format_sig12(std::round(y * 1e6) / 1e6) << "</text>\n";
    }
  }

  // Labels and title.
  svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
      << "' font-size='13' text-anchor='middle'>" << options.x_label << "</text>\n"
      << "<text x='16' y='" << (mt + height - mb) / 2
      << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
      << (mt + height - mb) / 2 << ")'>" << options.y_label << "</text>\n";
  if (!options.title.empty())
    svg << "<text x='" << width / 2 << "' y='24' font-size='15' text-anchor='middle'>"
        << options.title << "</text>\n";

  // Series.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = palette[si % 6];
    std::vector<std::string> segment;
    const auto flush = [&]() {
      if (segment.size() >= 2) {
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.8' points='";
        for (const auto& pt : segment) svg << pt << ' ';
        svg << "'/>\n";
      }
      segment.clear();
    };
    for (const auto& p : series[si].points) {
      if (options.log_y && !(p.y > 0.0)) {
        flush();
        continue;
      }
      std::ostringstream pt;
      pt << sx(p.x) << ',' << sy(p.y);
      segment.push_back(pt.str());
      if (p.low_confidence)
        svg << "<circle cx='" << sx(p.x) << "' cy='" << sy(p.y)
            << "' r='3' fill='white' stroke='" << color << "'/>\n";
    }
    flush();

    const double ly = mt + 16 + 16 * static_cast<double>(si);
    svg << "<line x1='" << width - mr - 150 << "' y1='" << ly << "' x2='" << width - mr - 120
        << "' y2='" << ly << "' stroke='" << color << "' stroke-width='1.8'/>\n"
        << "<text x='" << width - mr - 114 << "' y='" << ly + 4 << "' font-size='12'>"
        << series[si].label << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("write_svg_plot: cannot open " + path);
  out << svg.str();
  if (!out) throw std::invalid_argument("write_svg_plot: write failed for " + path);
}

inline PlotSeries to_plot_series(const std::vector<DynamicsRecord>& records,
                                 const std::string& label) {
  PlotSeries s{label, {}};
  for (const auto& r : records)
    s.points.push_back({r.t_over_tau, r.value, r.converged_fraction < 0.2});
  return s;
}

// ---------------------------------------------------------------------------
// Dynamics.

namespace detail {

/// gmc-x-auto scoring: the X-form concurrence where it applies, a pointed
/// error where it does not.
inline double gmc_x_auto(const DensityMatrix& rho) {
  if (!is_x_form(rho))
    throw std::invalid_argument(
        "gmc-x-auto: the damped state is not X-form; use the fill-roof measure instead");
  return gmc_x(rho);
}

}  // namespace detail

inline void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("time grid is empty");
  double prev = -1.0;
  for (double t : grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("time grid entries must be >= 0");
    if (!(t > prev)) throw std::invalid_argument("time grid must be strictly increasing");
    prev = t;
  }
}

/// Damps the family's initial state across the grid and scores each snapshot.
/// Grid point i draws its RNG stream from (roof.seed, i). With plan_witnesses
/// set, a WitnessPlanner seeds each point's ascent and each point's minimizer
/// feeds the planner's pool for the next. Writes CSV/SVG sidecars when the
/// scenario names them.
inline std::vector<DynamicsRecord> run_dynamics(const Scenario& scenario) {
  validate_grid(scenario.time_grid);
  const DensityMatrix rho0{make_state(scenario.family)};

  std::optional<WitnessPlanner> planner;
  if (scenario.plan_witnesses && scenario.measure == MeasureKind::FillRoof)
    planner.emplace(scenario.roof, scenario.plan);

  std::vector<DynamicsRecord> records;
  records.reserve(scenario.time_grid.size());
  for (std::size_t i = 0; i < scenario.time_grid.size(); ++i) {
    const double t = scenario.time_grid[i];
    const DensityMatrix rho_t = apply_amplitude_damping(rho0, {t, 1.0});
    if (scenario.measure == MeasureKind::GmcXAuto) {
      records.push_back({t, detail::gmc_x_auto(rho_t), BoundKind::ExactAnalytic, 1.0});
    } else {
      RoofOptions opts = scenario.roof;
      opts.seed = mix_seed(scenario.roof.seed, static_cast<std::uint64_t>(i));
      if (planner) opts.initial_witness = planner->plan(rho_t).witness.matrix();
      const MeasureResult res = fill_mixed(rho_t, opts);
      if (planner) planner->remember(res.inner_minimizer);
      records.push_back({t, res.value, res.bound_kind, res.converged_fraction});
    }
  }

  if (!scenario.csv_path.empty()) write_csv(records, scenario.csv_path);
  if (!scenario.svg_path.empty()) {
    PlotOptions po;
    po.title = std::string(family_name(scenario.family.kind)) + " under amplitude damping";
    po.y_label = scenario.measure == MeasureKind::FillRoof ? "fill lower bound" : "GMC";
    po.log_y = scenario.log_scale;
    write_svg_plot({to_plot_series(records, measure_name(scenario.measure))}, po,
                   scenario.svg_path);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Sudden-death onset.

struct OnsetEstimate {
  double t_over_tau = 0.0;
  bool heuristic = false;  // grid scan rather than bisection
};

/// Earliest time at which the scenario's measure hits zero (and stays there).
///
/// For the X-form concurrence the zero set of these damped families is a ray
/// [t*, inf), so bisection on [0, 10] localizes t* to 1e-6. For the roof
/// measure only grid evidence is available: the first grid time whose value
/// drops below zero_tol with every later grid value also below it; such an
/// estimate is flagged heuristic. Returns nullopt when no onset is found.
inline std::optional<OnsetEstimate> find_esd_onset(const Scenario& scenario,
                                                   double zero_tol = 1e-4) {
  if (scenario.measure == MeasureKind::GmcXAuto) {
    const DensityMatrix rho0{make_state(scenario.family)};
    const auto gmc_at = [&](double t) {
      return detail::gmc_x_auto(apply_amplitude_damping(rho0, {t, 1.0}));
    };
    double lo = 0.0, hi = 10.0;
    if (!(gmc_at(lo) > 0.0)) return OnsetEstimate{0.0, false};
    if (gmc_at(hi) > 0.0) return std::nullopt;
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      (gmc_at(mid) > 0.0 ? lo : hi) = mid;
    }
    return OnsetEstimate{0.5 * (lo + hi), false};
  }

  const auto records = run_dynamics(scenario);
  for (std::size_t i = 0; i < records.size(); ++i) {
    bool dead = true;
    for (std::size_t j = i; j < records.size(); ++j)
      if (records[j].value >= zero_tol) {
        dead = false;
        break;
      }
    if (dead) return OnsetEstimate{records[i].t_over_tau, true};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// GHZ/W interpolation scan.

struct ScanRecord {
  double s = 0.0;
  double value = 0.0;
  double analytic = 0.0;
  BoundKind bound_kind = BoundKind::Heuristic;
  double converged_fraction = 0.0;
};

/// Roof lower bound across rho(s) = s |GHZ><GHZ| + (1-s) |W><W| on a uniform
/// s grid, against the known roof value (5 s^2 - 4 s + 8) / 9.
inline std::vector<ScanRecord> ghz_w_scan(const std::vector<double>& s_grid,
                                          const RoofOptions& roof = {}) {
  const PureState ghz = make_state(Family::GHZ);
  const PureState w = make_state(Family::W);
  std::vector<ScanRecord> records;
  records.reserve(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const double s = s_grid[i];
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("ghz_w_scan: s outside [0, 1]");
    RoofOptions opts = roof;
    opts.seed = mix_seed(roof.seed, static_cast<std::uint64_t>(i));
    const MeasureResult res = fill_mixed(mix({{s, ghz}, {1.0 - s, w}}), opts);
    records.push_back(
        {s, res.value, (5.0 * s * s - 4.0 * s + 8.0) / 9.0, res.bound_kind,
         res.converged_fraction});
  }
  return records;
}

inline std::vector<ScanRecord> ghz_w_scan(int points, const RoofOptions& roof = {}) {
  if (points < 2) throw std::invalid_argument("ghz_w_scan: need at least 2 points");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / (points - 1);
  return ghz_w_scan(grid, roof);
}

inline void write_scan_csv(const std::vector<ScanRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("write_scan_csv: cannot open " + path);
  out << "s,value,analytic,bound_kind,converged_fraction\n";
  for (const auto& r : records)
    out << detail::format_sig12(r.s) << ',' << detail::format_sig12(r.value) << ','
        << detail::format_sig12(r.analytic) << ',' << bound_kind_name(r.bound_kind) << ','
        << detail::format_sig12(r.converged_fraction) << '\n';
  if (!out) throw std::invalid_argument("write_scan_csv: write failed for " + path);
}

}  // namespace qfill
