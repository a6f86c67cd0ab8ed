// Acceptance suite: regenerates the reference tables and checks the model
// against them at pinned tolerances, one pass/fail line per criterion.
// Exit code is the number of failed criteria.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cmutsim/capacitance.hpp"
#include "cmutsim/constants.hpp"
#include "cmutsim/electrostatics.hpp"
#include "cmutsim/geometry.hpp"
#include "cmutsim/material.hpp"
#include "cmutsim/plate.hpp"
#include "cmutsim/sweep.hpp"

using namespace cmutsim;

namespace {

const MaterialDB& db() {
  static const MaterialDB instance = MaterialDB::builtin();
  return instance;
}

std::string fixture(const std::string& name) {
  return std::string(CMUT_DATA_DIR) + "/reference/" + name;
}

struct Criterion {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("       " + what); }
};

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f%%", 100.0 * x);
  return buf;
}

double rel_err(double model, double reference) { return (model - reference) / reference; }

// --- criterion 1: displacement-voltage rows and V^2 constancy ---------------
Criterion criterion1() {
  Criterion c;
  SweepResult ref = read_csv_file(fixture("displacement_vs_voltage.csv"));
  std::vector<double> grid;
  for (const SweepRow& row : ref.rows) grid.push_back(row.param);

  SweepResult model = displacement_voltage_sweep(default_cell(), db().at("Si3N4"), grid,
                                                 PlateConfig{}, CouplingConfig{});
  double q_min = 1e300, q_max = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double w_model = model.rows[i].values[0];
    double w_ref = ref.rows[i].values[0];
    double err = rel_err(w_model, w_ref);
    std::ostringstream os;
    os << "V=" << grid[i] << ": model " << format_value(w_model) << " um vs reference "
       << format_value(w_ref) << " um (" << pct(err) << ", tol 10%)";
    c.check(std::abs(err) <= 0.10, os.str());
    double q = w_model / (grid[i] * grid[i]);
    q_min = std::min(q_min, q);
    q_max = std::max(q_max, q);
  }
  double spread = (q_max - q_min) / q_min;
  c.check(spread <= 0.03, "w0/V^2 spread across the grid " + pct(spread) + " (tol 3%)");
  if (!c.pass)
    c.note("the converged coupled solve amplifies the V^2 law at large bias; "
           "the reference rows scale as V^2 exactly");
  return c;
}

// --- criterion 2: Si3N4 first eigenfrequency and the 1/r^2 law --------------
Criterion criterion2() {
  Criterion c;
  double f1 = eigenfrequencies(default_cell(), db().at("Si3N4"), PlateConfig{}, 1)[0].frequency;
  SweepResult ref = read_csv_file(fixture("frequency_vs_cavity_radius.csv"));
  std::size_t col = ref.response_index("frequency_si3n4");
  double f_ref25 = 0.0;
  for (const SweepRow& row : ref.rows)
    if (row.param == 25.0) f_ref25 = row.values[col];
  double err = rel_err(f1 / 1e6, f_ref25);
  c.check(std::abs(err) <= 0.05, "f1 model " + format_value(f1 / 1e6) + " MHz vs reference " +
                                     format_value(f_ref25) + " MHz (" + pct(err) + ", tol 5%)");

  std::vector<double> grid;
  for (double rc = 22.0; rc <= 26.0; rc += 1.0) grid.push_back(rc * kMicron);
  SweepResult sweep =
      frequency_sweep(default_cell(), db().at("Si3N4"), PlateConfig{}, SweepParameter::CavityRadius, grid);
  double q0 = sweep.rows[0].values[0] * sweep.rows[0].param * sweep.rows[0].param;
  double worst = 0.0;
  for (const SweepRow& row : sweep.rows)
    worst = std::max(worst, std::abs(row.values[0] * row.param * row.param / q0 - 1.0));
  c.check(worst < 1e-9, "model f r^2 constant over 22-26 um (max dev " + format_value(worst) + ")");

  double q_sum = 0.0;
  int n_rows = 0;
  for (const SweepRow& row : ref.rows)
    if (row.param <= 26.0) {
      q_sum += row.values[col] * row.param * row.param;
      ++n_rows;
    }
  double q_mean = q_sum / n_rows;
  double worst_ref = 0.0;
  for (const SweepRow& row : ref.rows)
    if (row.param <= 26.0)
      worst_ref = std::max(worst_ref,
                           std::abs(row.values[col] * row.param * row.param / q_mean - 1.0));
  c.check(worst_ref <= 0.03, "reference rows 22-26 um follow 1/r^2 within " + pct(worst_ref) +
                                 " (tol 3%; the 27 um row deviates ~5% and is excluded)");
  return c;
}

// --- criterion 3: SiC first eigenfrequency, mass loading shrinks the gap ----
Criterion criterion3() {
  Criterion c;
  const double reference = 8.4814;  // MHz
  double unloaded =
      eigenfrequencies(default_cell(), db().at("SiC"), PlateConfig{}, 1)[0].frequency / 1e6;
  PlateConfig loaded_cfg;
  loaded_cfg.mass_loading = MassLoading::TopElectrode;
  double loaded =
      eigenfrequencies(default_cell(), db().at("SiC"), loaded_cfg, 1)[0].frequency / 1e6;
  double err_unloaded = rel_err(unloaded, reference);
  double err_loaded = rel_err(loaded, reference);
  c.check(std::abs(err_unloaded) <= 0.15, "unloaded " + format_value(unloaded) + " MHz vs " +
                                              format_value(reference) + " MHz (" +
                                              pct(err_unloaded) + ", tol 15%)");
  c.check(std::abs(err_loaded) < std::abs(err_unloaded),
          "top-electrode loading shrinks the error to " + pct(err_loaded));
  return c;
}

// --- criterion 4: capacitance vs cavity radius after calibration ------------
Criterion criterion4() {
  Criterion c;
  auto rows = reference_rows_from_csv(fixture("capacitance_vs_cavity_radius.csv"),
                                      "capacitance_si3n4");
  CellGeometry g = default_cell();
  double ro = calibrate_overlap_radius(rows, g, db().at("Si3N4"), db().at("SiO2"));
  c.note("calibrated overlap radius " + format_value(ro / kMicron) + " um");
  CellGeometry fitted = g;
  fitted.overlap_radius = ro;

  for (const auto& [rc, c_ref] : rows) {
    if (rc > 25e-6) continue;
    CellGeometry gg = fitted;
    gg.cavity_radius = rc;
    double model = cell_capacitance(gg, db().at("Si3N4"), db().at("SiO2")).total;
    double err = rel_err(model, c_ref);
    c.check(std::abs(err) <= 0.03, "r=" + format_value(rc / kMicron) + " um: model " +
                                       format_value(model * 1e9) + " nF vs reference " +
                                       format_value(c_ref * 1e9) + " nF (" + pct(err) +
                                       ", tol 3%)");
  }

  SweepSpec spec;
  spec.geometry = fitted;
  spec.response = SweepResponse::Capacitance;
  spec.vary = SweepParameter::CavityRadius;
  for (double rc = 22.0; rc <= 27.0; rc += 1.0) spec.grid.push_back(rc * kMicron);
  SweepResult sweep = run_sweep(spec);
  bool decreasing = true;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i)
    decreasing = decreasing && sweep.rows[i].values[0] < sweep.rows[i - 1].values[0];
  c.check(decreasing, "model strictly decreasing over 22-27 um");

  double single_disc = parallel_plate(kPi * 25e-6 * 25e-6, 0.5e-6, 1.0);
  double ref25 = 0.0;
  for (const auto& [rc, c_ref] : rows)
    if (std::abs(rc - 25e-6) < 1e-12) ref25 = c_ref;
  double err_disc = rel_err(single_disc, ref25);
  c.check(std::abs(err_disc) <= 0.03,
          "bare gap disc at r=25 um: " + format_value(single_disc * 1e9) + " nF vs reference " +
              format_value(ref25 * 1e9) + " nF (" + pct(err_disc) + ", tol 3%)");
  return c;
}

// --- criterion 5: capacitance vs gap height ---------------------------------
Criterion criterion5() {
  Criterion c;
  SweepResult ref = read_csv_file(fixture("capacitance_vs_gap_height.csv"));
  std::size_t col = ref.response_index("capacitance_si3n4");

  SweepSpec spec;
  spec.response = SweepResponse::Capacitance;
  spec.vary = SweepParameter::GapHeight;
  for (const SweepRow& row : ref.rows) spec.grid.push_back(row.param * kMicron);
  SweepResult model = run_sweep(spec);
  c.note("series-membrane two-region model at the calibrated overlap radius");

  for (std::size_t i = 0; i < ref.rows.size(); ++i) {
    double gap_um = ref.rows[i].param;
    double err = rel_err(model.rows[i].values[0], ref.rows[i].values[col]);
    double tol = gap_um == 0.5 ? 0.03 : 0.08;
    std::ostringstream os;
    os << "gap=" << format_value(gap_um) << " um: model " << format_value(model.rows[i].values[0])
       << " nF vs reference " << format_value(ref.rows[i].values[col]) << " nF (" << pct(err)
       << ", tol " << format_value(tol * 100) << "%)";
    c.check(std::abs(err) <= tol, os.str());
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < model.rows.size(); ++i)
    decreasing = decreasing && model.rows[i].values[0] < model.rows[i - 1].values[0];
  c.check(decreasing, "model strictly decreasing over 0.3-1.0 um");
  return c;
}

// --- criterion 6: mode structure, two solution routes ------------------------
Criterion criterion6() {
  Criterion c;
  CellGeometry g = default_cell();
  PlateConfig cfg;  // 401 nodes

  auto structure_ok = [](const std::vector<ModeResult>& m) {
    return m.size() == 4 && m[0].azimuthal_order == 0 && m[0].radial_order == 1 &&
           m[1].azimuthal_order == 1 && m[2].azimuthal_order == 1 &&
           m[1].frequency == m[2].frequency && m[3].azimuthal_order == 2 &&
           m[3].radial_order == 1;
  };

  std::vector<ModeResult> bessel = eigenfrequencies(g, db().at("Si3N4"), cfg, 4);
  std::vector<ModeResult> fd = eigenfrequencies_fd(g, db().at("Si3N4"), cfg, 4);
  c.check(structure_ok(bessel), "characteristic-equation route orders the first four modes "
                                "(0,1), (1,1) pair, (2,1)");
  c.check(structure_ok(fd), "discretized route orders the first four modes the same way");

  double ratio_bessel = bessel[1].frequency / bessel[0].frequency;
  double ratio_fd = fd[1].frequency / fd[0].frequency;
  c.check(std::abs(ratio_bessel / 2.081 - 1.0) <= 0.01,
          "f(1,1)/f(0,1) = " + format_value(ratio_bessel) + " from the characteristic equation "
          "(2.081 +- 1%)");
  c.check(std::abs(ratio_fd / 2.081 - 1.0) <= 0.01,
          "f(1,1)/f(0,1) = " + format_value(ratio_fd) + " from the discretized operator "
          "(2.081 +- 1%)");

  double D = flexural_rigidity(db().at("Si3N4"), g.membrane_thickness);
  double rho_t = areal_density(g, db().at("Si3N4"), MassLoading::None);
  RadialPlateOperator op(0, g.cavity_radius, cfg.radial_nodes, D, 0.0);
  Eigen::VectorXd ev = op.eigenvalues(3);
  for (int m = 0; m < 3; ++m) {
    double lam_fd = std::sqrt(ev[m] / rho_t) * g.cavity_radius * g.cavity_radius *
                    std::sqrt(rho_t / D);
    double lam_ref = clamped_plate_lambda_sq(0, m + 1);
    double err = rel_err(lam_fd, lam_ref);
    c.check(std::abs(err) <= 1e-3, "lambda^2(0," + std::to_string(m + 1) + "): routes differ by " +
                                       pct(err) + " at 401 nodes (tol 0.1%)");
  }
  return c;
}

// --- criterion 7: solver oracles ---------------------------------------------
Criterion criterion7() {
  Criterion c;
  CellGeometry g = default_cell();
  const Material& sin = db().at("Si3N4");
  PlateConfig cfg;

  // static bending vs the closed form
  const double P = 1.967597e4;
  DeflectionProfile p = static_deflection(g, sin, Eigen::VectorXd::Constant(401, P), cfg);
  double D = flexural_rigidity(sin, g.membrane_thickness);
  double a = g.cavity_radius;
  double w0_exact = P * a * a * a * a / (64.0 * D);
  double worst = 0.0;
  for (int i = 0; i < p.radii.size(); ++i) {
    double q = a * a - p.radii[i] * p.radii[i];
    double exact = P * q * q / (64.0 * D);
    worst = std::max(worst, std::abs(p.w[i] - exact) / w0_exact);
  }
  c.check(worst < 1e-3, "uniform-load deflection vs closed form: max error " +
                            format_value(worst * 100) + "% (tol 0.1%)");

  // deflected capacitance vs a 1e6-node quadrature oracle
  const int oracle_nodes = 1000001;
  double w0 = 0.1 * g.gap_height;
  double h = a / (oracle_nodes - 1);
  double acc = 0.0;
  for (int i = 0; i + 1 < oracle_nodes; ++i) {
    auto f = [&](double r) {
      double x = r / a;
      double shape = (1.0 - x * x) * (1.0 - x * x);
      return r / (g.gap_height - w0 * shape);
    };
    acc += 0.5 * (f(i * h) + f((i + 1) * h)) * h;
  }
  RegionAreas areas = region_areas(g);
  double oracle = 2.0 * kPi * kVacuumPermittivity * acc +
                  kVacuumPermittivity * 3.9 * areas.pillar_area / g.gap_height;
  DeflectionProfile shape;
  shape.radii = Eigen::VectorXd::LinSpaced(401, 0.0, a);
  shape.w.resize(401);
  for (int i = 0; i < 401; ++i) {
    double x = shape.radii[i] / a;
    shape.w[i] = w0 * (1.0 - x * x) * (1.0 - x * x);
  }
  double model = deflected_capacitance(g, sin, db().at("SiO2"), shape, GapPolicy::GapOnly);
  double err_cap = rel_err(model, oracle);
  c.check(std::abs(err_cap) <= 1e-4, "deflected capacitance vs 1e6-node quadrature: " +
                                         pct(err_cap) + " (tol 0.01%)");

  // pull-in vs the lumped oracle
  double v_pi = pull_in_voltage(g, sin, cfg, CouplingConfig{});
  double k_m = 64.0 * kPi * D / (a * a);
  double d_eff = effective_gap(g, sin, GapPolicy::SeriesMembrane);
  double lumped = std::sqrt(8.0 * k_m * d_eff * d_eff * d_eff /
                            (27.0 * kVacuumPermittivity * kPi * a * a));
  double err_pi = rel_err(v_pi, lumped);
  c.check(std::abs(err_pi) <= 0.25, "pull-in " + format_value(v_pi) + " V vs lumped oracle " +
                                        format_value(lumped) + " V (" + pct(err_pi) +
                                        ", tol 25%)");
  return c;
}

// --- criterion 8: trend suite -------------------------------------------------
Criterion criterion8() {
  Criterion c;
  auto monotone = [](const SweepResult& r, bool increasing) {
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      bool ok = increasing ? r.rows[i].values[0] > r.rows[i - 1].values[0]
                           : r.rows[i].values[0] < r.rows[i - 1].values[0];
      if (!ok) return false;
    }
    return true;
  };
  auto five = [](double from, double to) {
    std::vector<double> g;
    for (int i = 0; i < 5; ++i) g.push_back(from + i * (to - from) / 4.0);
    return g;
  };

  SweepSpec freq_t;
  freq_t.response = SweepResponse::Frequency;
  freq_t.vary = SweepParameter::MembraneThickness;
  freq_t.grid = five(0.5e-6, 1.0e-6);
  c.check(monotone(run_sweep(freq_t), true),
          "frequency strictly increases with membrane thickness (5 points)");

  SweepSpec soft_gap;
  soft_gap.response = SweepResponse::SoftenedFrequency;
  soft_gap.vary = SweepParameter::GapHeight;
  soft_gap.grid = five(0.3e-6, 1.0e-6);
  soft_gap.bias_voltage = 40.0;
  c.check(monotone(run_sweep(soft_gap), true),
          "softened frequency at 40 V strictly increases with gap height (5 points)");

  SweepSpec disp_t;
  disp_t.response = SweepResponse::Displacement;
  disp_t.vary = SweepParameter::MembraneThickness;
  disp_t.grid = five(0.5e-6, 1.0e-6);
  disp_t.bias_voltage = 40.0;
  c.check(monotone(run_sweep(disp_t), false),
          "displacement at 40 V strictly decreases with membrane thickness (5 points)");

  SweepSpec disp_r;
  disp_r.response = SweepResponse::Displacement;
  disp_r.vary = SweepParameter::CavityRadius;
  disp_r.grid = five(22e-6, 27e-6);
  disp_r.bias_voltage = 40.0;
  c.check(monotone(run_sweep(disp_r), true),
          "displacement at 40 V strictly increases with cavity radius (5 points)");
  return c;
}

// --- criterion 9: CLI determinism ----------------------------------------------
struct CliRun {
  int status = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  CliRun r;
  std::string cmd = std::string("'") + CMUT_CLI_PATH + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  int rc = pclose(pipe);
  r.status = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  return r;
}

Criterion criterion9() {
  Criterion c;
  const std::string fixtures = fixture("capacitance_vs_cavity_radius.csv");
  const std::vector<std::string> commands = {
      "materials list",
      "materials show SiC",
      "cap",
      "cap-sweep --vary radius --from 22 --to 27 --step 1",
      "cap-sweep --vary gap --from 0.3 --to 1 --step 0.1",
      "modes --count 6",
      "modes --method fd",
      "freq-sweep --vary radius --from 22 --to 27 --step 1",
      "freq-sweep --vary thickness --from 0.5 --to 1 --step 0.125",
      "disp --voltage 40",
      "disp --voltage 40 --format json",
      "disp-sweep --from 40 --to 100 --step 10",
      "pull-in",
      "calibrate --fixtures '" + fixtures + "'",
      "compare",
  };
  for (const std::string& cmd : commands) {
    CliRun first = run_cli(cmd);
    CliRun second = run_cli(cmd);
    bool ok = first.status == 0 && second.status == 0 && !first.output.empty() &&
              first.output == second.output;
    c.check(ok, "`" + cmd + "` exits 0 and is byte-identical across two runs");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
      {"displacement-voltage rows within 10%, w0/V^2 constant within 3% (Si3N4)", criterion1},
      {"first eigenfrequency within 5% at r=25 um, 1/r^2 law (Si3N4)", criterion2},
      {"SiC first eigenfrequency within 15%, mass loading shrinks the gap", criterion3},
      {"capacitance vs cavity radius: calibrated fit within 3%, monotone", criterion4},
      {"capacitance vs gap height: 3% at 0.5 um, 8% elsewhere, monotone", criterion5},
      {"mode structure and route agreement (0.1% on lambda^2)", criterion6},
      {"solver oracles: bending 0.1%, capacitance 0.01%, pull-in 25%", criterion7},
      {"trend suite: four strict monotonicities over 5-point grids", criterion8},
      {"CLI determinism: byte-identical reruns of every subcommand", criterion9},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 64;
    }
  }

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int number = static_cast<int>(i) + 1;
    if (only != 0 && number != only) continue;
    Criterion result = criteria[i].second();
    std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << "criterion " << number << ": "
              << criteria[i].first << "\n";
    for (const std::string& line : result.details) std::cout << line << "\n";
    if (!result.pass) ++failures;
  }
  return failures;
}
