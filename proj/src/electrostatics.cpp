#include "cmutsim/electrostatics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cmutsim/constants.hpp"
#include "cmutsim/errors.hpp"

namespace cmutsim {

const Material& default_pillar_material() {
  static const Material pillar = MaterialDB::builtin().at("SiO2");
  return pillar;
}

namespace {

void validate_coupling(const CouplingConfig& cfg) {
  if (!(cfg.relaxation > 0.0 && cfg.relaxation <= 1.0)) {
    std::ostringstream os;
    os << "coupling config: relaxation = " << cfg.relaxation << " must be in (0, 1]";
    throw ValidationError(os.str());
  }
  if (!(cfg.tol > 0.0)) throw ValidationError("coupling config: tol must be > 0");
  if (cfg.max_iter < 1) throw ValidationError("coupling config: max_iter must be >= 1");
}

}  // namespace

Eigen::VectorXd electrostatic_pressure(const CellGeometry& g, const Material& membrane,
                                       double voltage, const DeflectionProfile& w,
                                       GapPolicy policy) {
  const double d_eff = effective_gap(g, membrane, policy);
  if (w.max() >= d_eff) {
    std::ostringstream os;
    os << "contact: deflection " << w.max() << " m closes the effective gap " << d_eff << " m";
    throw ContactError(os.str());
  }
  Eigen::VectorXd p(w.w.size());
  const double half_eps_v2 = 0.5 * kVacuumPermittivity * voltage * voltage;
  for (Eigen::Index i = 0; i < w.w.size(); ++i) {
    double gap = d_eff - w.w[i];
    p[i] = half_eps_v2 / (gap * gap);
  }
  return p;
}

BiasPoint solve_equilibrium(const CellGeometry& g, const Material& membrane, double voltage,
                            const PlateConfig& plate_cfg, const CouplingConfig& cfg,
                            const Material& pillar) {
  validate_coupling(cfg);
  if (voltage < 0.0) throw DomainError("solve_equilibrium: voltage must be >= 0");

  const double rigidity = flexural_rigidity(membrane, g.membrane_thickness);
  RadialPlateOperator op(0, g.cavity_radius, plate_cfg.radial_nodes, rigidity, plate_cfg.tension);

  BiasPoint point;
  point.voltage = voltage;
  point.profile.radii = op.radii();
  point.profile.w = Eigen::VectorXd::Zero(op.radii().size());

  bool contact = false;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    point.iterations = it;
    Eigen::VectorXd pressure =
        electrostatic_pressure(g, membrane, voltage, point.profile, cfg.pressure_policy);
    Eigen::VectorXd w_next = op.solve(pressure);
    Eigen::VectorXd w_updated =
        (1.0 - cfg.relaxation) * point.profile.w + cfg.relaxation * w_next;
    double delta = (w_updated - point.profile.w).cwiseAbs().maxCoeff();
    point.profile.w = w_updated;
    if (point.profile.max() >= g.gap_height) {
      contact = true;  // membrane hits the cavity bottom: at/beyond pull-in
      break;
    }
    if (delta < cfg.tol) {
      point.converged = true;
      break;
    }
  }

  point.center_displacement = point.profile.center();
  if (contact) {
    point.capacitance = std::numeric_limits<double>::quiet_NaN();
  } else {
    point.capacitance =
        deflected_capacitance(g, membrane, pillar, point.profile, cfg.capacitance_policy);
  }
  return point;
}

SweepResult displacement_voltage_sweep(const CellGeometry& g, const Material& membrane,
                                       const std::vector<double>& voltages,
                                       const PlateConfig& plate_cfg, const CouplingConfig& cfg,
                                       const Material& pillar) {
  if (voltages.empty()) throw ValidationError("displacement_voltage_sweep: empty grid");
  for (std::size_t i = 1; i < voltages.size(); ++i)
    if (!(voltages[i] > voltages[i - 1]))
      throw ValidationError("displacement_voltage_sweep: voltage grid must be ascending");

  SweepResult result;
  result.param = {"voltage", "V"};
  result.responses = {{"displacement", "um"}, {"capacitance", "nF"}};
  result.has_flags = true;
  result.metadata.push_back(std::string(kVersion));
  result.metadata.push_back("response = displacement; vary = voltage");
  result.metadata.push_back("membrane = " + membrane.name + "; pillar = " + pillar.name);
  std::ostringstream pol;
  pol << "pressure policy = " << to_string(cfg.pressure_policy)
      << "; capacitance policy = " << to_string(cfg.capacitance_policy);
  result.metadata.push_back(pol.str());
  std::ostringstream solver;
  solver << "relaxation = " << cfg.relaxation << "; tol_m = " << cfg.tol
         << "; max_iter = " << cfg.max_iter << "; radial_nodes = " << plate_cfg.radial_nodes;
  result.metadata.push_back(solver.str());

  for (double v : voltages) {
    BiasPoint p = solve_equilibrium(g, membrane, v, plate_cfg, cfg, pillar);
    result.rows.push_back({v,
                           {p.center_displacement / kMicron, p.capacitance * 1e9},
                           p.converged ? "" : "non-converged"});
  }
  return result;
}

double softened_frequency(const CellGeometry& g, const Material& membrane, double voltage,
                          const PlateConfig& plate_cfg, const CouplingConfig& cfg) {
  BiasPoint eq = solve_equilibrium(g, membrane, voltage, plate_cfg, cfg);
  if (!eq.converged) {
    std::ostringstream os;
    os << "softened_frequency: equilibrium does not converge at " << voltage << " V";
    throw SolverError(os.str());
  }
  const double a = g.cavity_radius;
  const double d_eff = effective_gap(g, membrane, cfg.pressure_policy);
  const double area = kPi * a * a;
  const double center_gap = d_eff - eq.center_displacement;
  const double k_e = kVacuumPermittivity * area * voltage * voltage /
                     (center_gap * center_gap * center_gap);
  const double rigidity = flexural_rigidity(membrane, g.membrane_thickness);
  const double k_m = 64.0 * kPi * rigidity / (a * a);
  if (k_e >= k_m) {
    std::ostringstream os;
    os << "softening collapse: electrostatic stiffness " << k_e
       << " N/m reaches plate stiffness " << k_m << " N/m";
    throw DomainError(os.str());
  }
  double f1 = eigenfrequencies(g, membrane, plate_cfg, 1).front().frequency;
  return f1 * std::sqrt(1.0 - k_e / k_m);
}

double pull_in_voltage(const CellGeometry& g, const Material& membrane,
                       const PlateConfig& plate_cfg, const CouplingConfig& cfg) {
  auto converged = [&](double v) {
    return solve_equilibrium(g, membrane, v, plate_cfg, cfg).converged;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (converged(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) throw SolverError("pull_in_voltage: no pull-in below 1e7 V");
  }
  while (hi - lo > 0.1) {
    double mid = 0.5 * (lo + hi);
    if (converged(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace cmutsim
