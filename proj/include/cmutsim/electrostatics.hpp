#pragma once

#include <vector>

#include <Eigen/Core>

#include "cmutsim/capacitance.hpp"
#include "cmutsim/deflection.hpp"
#include "cmutsim/geometry.hpp"
#include "cmutsim/material.hpp"
#include "cmutsim/plate.hpp"
#include "cmutsim/sweep_result.hpp"

namespace cmutsim {

/// Solver knobs for the coupled electrostatic-structural fixed point.
/// Pressure and capacitance policies are independent: the force path and
/// the terminal configuration of the reference data differ.
struct CouplingConfig {
  GapPolicy pressure_policy = GapPolicy::SeriesMembrane;
  GapPolicy capacitance_policy = GapPolicy::SeriesMembrane;
  double relaxation = 0.7;  // in (0, 1]
  double tol = 1e-13;       // m, max-norm stop on the deflection update
  int max_iter = 200;
};

struct BiasPoint {
  double voltage = 0.0;
  DeflectionProfile profile;
  double center_displacement = 0.0;  // w(0)
  double capacitance = 0.0;          // F, deflected two-region value
  bool converged = false;
  int iterations = 0;
};

// The built-in SiO2 entry; default pillar dielectric for bias solves.
const Material& default_pillar_material();

// P(r) = eps0 V^2 / (2 (d_eff - w(r))^2) on the profile's grid.
// ContactError when the membrane reaches the effective gap.
Eigen::VectorXd electrostatic_pressure(const CellGeometry& g, const Material& membrane,
                                       double voltage, const DeflectionProfile& w,
                                       GapPolicy policy);

// Under-relaxed fixed point w <- (1-alpha) w + alpha S[P(w)] from w = 0.
// Contact during iteration or running out of iterations returns a
// non-converged point (at or beyond pull-in), never fabricated values.
BiasPoint solve_equilibrium(const CellGeometry& g, const Material& membrane, double voltage,
                            const PlateConfig& plate_cfg, const CouplingConfig& cfg,
                            const Material& pillar = default_pillar_material());

SweepResult displacement_voltage_sweep(const CellGeometry& g, const Material& membrane,
                                       const std::vector<double>& voltages,
                                       const PlateConfig& plate_cfg, const CouplingConfig& cfg,
                                       const Material& pillar = default_pillar_material());

// Spring-softened first-mode frequency f1 sqrt(1 - k_e/k_m) with the
// electrostatic stiffness linearized at the equilibrium centre gap
// (lumped area pi a^2) and k_m = 64 pi D / a^2 (uniform-load stiffness
// referenced to the centre). DomainError past softening collapse.
double softened_frequency(const CellGeometry& g, const Material& membrane, double voltage,
                          const PlateConfig& plate_cfg, const CouplingConfig& cfg);

// Largest converged bias, found by doubling to a non-converged bracket and
// bisecting to 0.1 V.
double pull_in_voltage(const CellGeometry& g, const Material& membrane,
                       const PlateConfig& plate_cfg, const CouplingConfig& cfg);

}  // namespace cmutsim
