// Command-line front end: pure-state fill values, damped dynamics curves,
// sudden-death onsets, the GHZ/W interpolation scan, and the X-form
// concurrence closed form.
//
// Exit codes: 0 success, 2 argument or validation problem, 3 numerical
// consistency failure.

#include "qfill/qfill.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

namespace {

double resolve_theta(qfill::Family kind, bool has_theta, double theta, bool has_cos,
                     double cos_theta) {
  if (has_theta && has_cos)
    throw std::invalid_argument("--theta and --cos-theta are mutually exclusive");
  if (kind == qfill::Family::GHZ || kind == qfill::Family::W) return 0.0;
  if (has_cos) {
    if (cos_theta < -1.0 || cos_theta > 1.0)
      throw std::invalid_argument("--cos-theta must lie in [-1, 1]");
    return std::acos(cos_theta);
  }
  if (has_theta) return theta;
  throw std::invalid_argument("this family needs --theta or --cos-theta");
}

void print_value(double v) { std::printf("%.12g\n", v); }

void print_records(const std::vector<qfill::DynamicsRecord>& records) {
  std::printf("t_over_tau,value,bound_kind,converged_fraction\n");
  for (const auto& r : records)
    std::printf("%.12g,%.12g,%s,%.12g\n", r.t_over_tau, r.value,
                qfill::bound_kind_name(r.bound_kind), r.converged_fraction);
}

void print_scan(const std::vector<qfill::ScanRecord>& records) {
  std::printf("s,value,analytic,bound_kind,converged_fraction\n");
  for (const auto& r : records)
    std::printf("%.12g,%.12g,%.12g,%s,%.12g\n", r.s, r.value, r.analytic,
                qfill::bound_kind_name(r.bound_kind), r.converged_fraction);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-qubit entanglement under local amplitude damping", "qfill"};
  app.set_config("--config", "", "key=value file supplying solver options");
  app.require_subcommand(1);

  qfill::RoofOptions roof;
  app.add_option("--inner-restarts", roof.inner_restarts, "Haar restarts per inner minimization")
      ->capture_default_str();
  app.add_option("--inner-max-iters", roof.inner_max_iters,
                 "projected-gradient iterations per restart")
      ->capture_default_str();
  app.add_option("--inner-tol", roof.inner_tol, "inner gradient-norm tolerance")
      ->capture_default_str();
  app.add_option("--outer-iters", roof.outer_iters, "witness ascent steps")
      ->capture_default_str();
  app.add_option("--step0", roof.step0, "ascent step scale (step k is step0/sqrt(k))")
      ->capture_default_str();
  app.add_option("--seed", roof.seed, "RNG seed")->capture_default_str();
  app.add_option("--support-tol", roof.support_tol, "eigenvalue cutoff for the support face")
      ->capture_default_str();

  const auto add_family = [](CLI::App* sub, std::string& family, double& theta, double& cos_theta,
                             CLI::Option*& theta_opt, CLI::Option*& cos_opt) {
    sub->add_option("--family", family,
                    "g-theta | w-theta | wbar-theta | sigma-theta | ghz | w")
        ->required();
    theta_opt = sub->add_option("--theta", theta, "family angle in radians");
    cos_opt = sub->add_option("--cos-theta", cos_theta, "cosine of the family angle");
  };

  // fill-pure
  auto* fill_cmd = app.add_subcommand("fill-pure", "Fill measure of a pure family state");
  fill_cmd->fallthrough();
  std::string fp_family;
  double fp_theta = 0.0, fp_cos = 0.0;
  CLI::Option *fp_theta_opt, *fp_cos_opt;
  add_family(fill_cmd, fp_family, fp_theta, fp_cos, fp_theta_opt, fp_cos_opt);

  // dynamics
  auto* dyn_cmd =
      app.add_subcommand("dynamics", "Measure a damped family across a time grid");
  dyn_cmd->fallthrough();
  std::string dy_family, dy_measure = "fill-roof", dy_csv, dy_svg;
  double dy_theta = 0.0, dy_cos = 0.0, dy_tmax = 3.0, dy_dt = 0.05;
  bool dy_log = false, dy_twirl = false, dy_plan = false;
  CLI::Option *dy_theta_opt, *dy_cos_opt;
  add_family(dyn_cmd, dy_family, dy_theta, dy_cos, dy_theta_opt, dy_cos_opt);
  dyn_cmd->add_option("--measure", dy_measure, "fill-roof | gmc-x-auto")
      ->check(CLI::IsMember({"fill-roof", "gmc-x-auto"}))
      ->capture_default_str();
  dyn_cmd->add_option("--t-max", dy_tmax, "grid end, in units of tau")->capture_default_str();
  dyn_cmd->add_option("--dt", dy_dt, "grid spacing, in units of tau")->capture_default_str();
  dyn_cmd->add_option("--seed", roof.seed, "RNG seed");
  dyn_cmd->add_option("--csv", dy_csv, "write records to this CSV file");
  dyn_cmd->add_option("--svg", dy_svg, "write a plot to this SVG file");
  dyn_cmd->add_flag("--log-scale", dy_log, "logarithmic value axis in the SVG");
  dyn_cmd->add_flag("--twirl", dy_twirl,
                    "project witnesses onto the family symmetry commutant");
  dyn_cmd->add_flag("--plan", dy_plan,
                    "seed each fill-roof point with a cutting-plane witness "
                    "(grid points then run in order, each warm-started by the last)");

  // esd-onset
  auto* onset_cmd =
      app.add_subcommand("esd-onset", "Time at which the measure first hits zero");
  onset_cmd->fallthrough();
  std::string on_family, on_measure;
  double on_theta = 0.0, on_cos = 0.0, on_tmax = 3.0, on_dt = 0.05, on_zero_tol = 1e-4;
  bool on_analytic = false, on_twirl = false, on_plan = false;
  CLI::Option *on_theta_opt, *on_cos_opt;
  add_family(onset_cmd, on_family, on_theta, on_cos, on_theta_opt, on_cos_opt);
  onset_cmd->add_flag("--analytic", on_analytic,
                      "closed-form inversion (g-theta and ghz only)");
  onset_cmd->add_option("--measure", on_measure,
                        "fill-roof | gmc-x-auto (default picks by family)")
      ->check(CLI::IsMember({"fill-roof", "gmc-x-auto"}));
  onset_cmd->add_option("--zero-tol", on_zero_tol, "threshold for calling a value zero")
      ->capture_default_str();
  onset_cmd->add_option("--t-max", on_tmax, "grid end for the fill-roof scan")
      ->capture_default_str();
  onset_cmd->add_option("--dt", on_dt, "grid spacing for the fill-roof scan")
      ->capture_default_str();
  onset_cmd->add_flag("--twirl", on_twirl,
                      "project witnesses onto the family symmetry commutant");
  onset_cmd->add_flag("--plan", on_plan,
                      "seed each fill-roof point with a cutting-plane witness");

  // ghz-w-scan
  auto* scan_cmd = app.add_subcommand(
      "ghz-w-scan", "Roof lower bound across s|GHZ><GHZ| + (1-s)|W><W|");
  scan_cmd->fallthrough();
  int sc_points = 11;
  std::string sc_csv, sc_svg;
  bool sc_twirl = false;
  scan_cmd->add_option("--points", sc_points, "number of s grid points")
      ->capture_default_str();
  scan_cmd->add_option("--csv", sc_csv, "write records to this CSV file");
  scan_cmd->add_option("--svg", sc_svg, "write a plot to this SVG file");
  scan_cmd->add_flag("--twirl", sc_twirl,
                     "project witnesses onto the exchange/phase commutant");

  // gmc
  auto* gmc_cmd =
      app.add_subcommand("gmc", "Closed-form X-state concurrence of the damped g-theta family");
  gmc_cmd->fallthrough();
  std::string gm_family;
  double gm_theta = 0.0, gm_cos = 0.0, gm_t = 0.0;
  CLI::Option *gm_theta_opt, *gm_cos_opt;
  add_family(gmc_cmd, gm_family, gm_theta, gm_cos, gm_theta_opt, gm_cos_opt);
  gmc_cmd->add_option("--t-over-tau", gm_t, "elapsed time in units of tau")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fill_cmd->parsed()) {
      const auto kind = qfill::family_from_name(fp_family);
      const double theta =
          resolve_theta(kind, fp_theta_opt->count() > 0, fp_theta, fp_cos_opt->count() > 0, fp_cos);
      print_value(qfill::fill_pure(qfill::make_state(kind, theta)));
    } else if (dyn_cmd->parsed()) {
      qfill::Scenario scenario;
      const auto kind = qfill::family_from_name(dy_family);
      scenario.family = {kind, resolve_theta(kind, dy_theta_opt->count() > 0, dy_theta,
                                             dy_cos_opt->count() > 0, dy_cos)};
      scenario.time_grid = qfill::uniform_grid(dy_tmax, dy_dt);
      scenario.measure = qfill::measure_from_name(dy_measure);
      scenario.roof = roof;
      if (dy_twirl)
        scenario.roof.symmetry_generators = qfill::family_symmetry_generators(kind);
      scenario.plan_witnesses = dy_plan;
      scenario.csv_path = dy_csv;
      scenario.svg_path = dy_svg;
      scenario.log_scale = dy_log;
      const auto records = qfill::run_dynamics(scenario);
      if (dy_csv.empty()) print_records(records);
    } else if (onset_cmd->parsed()) {
      const auto kind = qfill::family_from_name(on_family);
      const double theta = resolve_theta(kind, on_theta_opt->count() > 0, on_theta,
                                         on_cos_opt->count() > 0, on_cos);
      if (on_analytic) {
        if (kind == qfill::Family::GTheta) {
          const auto onset = qfill::esd_onset_g_theta(theta);
          onset ? print_value(*onset) : (void)std::printf("none\n");
        } else if (kind == qfill::Family::GHZ) {
          const auto onset = qfill::esd_onset_g_theta(std::numbers::pi_v<double> / 4);
          onset ? print_value(*onset) : (void)std::printf("none\n");
        } else {
          throw std::invalid_argument("--analytic requires the g-theta (or ghz) family");
        }
      } else {
        qfill::Scenario scenario;
        scenario.family = {kind, theta};
        scenario.time_grid = qfill::uniform_grid(on_tmax, on_dt);
        scenario.roof = roof;
        if (on_twirl)
          scenario.roof.symmetry_generators = qfill::family_symmetry_generators(kind);
        scenario.plan_witnesses = on_plan;
        if (!on_measure.empty())
          scenario.measure = qfill::measure_from_name(on_measure);
        else
          scenario.measure = (kind == qfill::Family::GTheta || kind == qfill::Family::GHZ)
                                 ? qfill::MeasureKind::GmcXAuto
                                 : qfill::MeasureKind::FillRoof;
        const auto onset = qfill::find_esd_onset(scenario, on_zero_tol);
        onset ? print_value(onset->t_over_tau) : (void)std::printf("none\n");
      }
    } else if (scan_cmd->parsed()) {
      qfill::RoofOptions opts = roof;
      if (sc_twirl)
        opts.symmetry_generators = {qfill::permutation_unitary({1, 0, 2}),
                                    qfill::permutation_unitary({1, 2, 0}),
                                    qfill::excitation_phase_unitary(3, 3)};
      const auto records = qfill::ghz_w_scan(sc_points, opts);
      if (!sc_csv.empty())
        qfill::write_scan_csv(records, sc_csv);
      else
        print_scan(records);
      if (!sc_svg.empty()) {
        qfill::PlotSeries bound{"roof lower bound", {}}, exact{"analytic roof", {}};
        for (const auto& r : records) {
          bound.points.push_back({r.s, r.value, r.converged_fraction < 0.2});
          exact.points.push_back({r.s, r.analytic, false});
        }
        qfill::PlotOptions po;
        po.title = "s GHZ + (1-s) W mixture";
        po.x_label = "s";
        po.y_label = "fill";
        qfill::write_svg_plot({bound, exact}, po, sc_svg);
      }
    } else if (gmc_cmd->parsed()) {
      const auto kind = qfill::family_from_name(gm_family);
      if (kind != qfill::Family::GTheta)
        throw std::invalid_argument("gmc expects --family g-theta");
      const double theta = resolve_theta(kind, gm_theta_opt->count() > 0, gm_theta,
                                         gm_cos_opt->count() > 0, gm_cos);
      print_value(qfill::gmc_g_theta(theta, gm_t));
    }
  } catch (const qfill::numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
