#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cmutsim/deflection.hpp"
#include "cmutsim/geometry.hpp"
#include "cmutsim/material.hpp"
#include "cmutsim/sweep_result.hpp"

namespace cmutsim {

enum class MassLoading {
  None,
  TopElectrode,  // adds rho_Al * top_electrode_thickness to the areal mass
};

struct PlateConfig {
  double tension = 0.0;     // N/m, membrane tension term
  int radial_nodes = 401;   // >= 50
  MassLoading mass_loading = MassLoading::None;
};

/// One eigenmode of the clamped circular plate. lambda is the dimensionless
/// eigenvalue: f = lambda^2 / (2*pi*a^2) * sqrt(D / rho_areal).
struct ModeResult {
  int azimuthal_order = 0;  // n >= 0
  int radial_order = 0;     // m >= 1
  double frequency = 0.0;   // Hz
  double lambda = 0.0;
};

// D = Y t^3 / (12 (1 - sigma^2)).
double flexural_rigidity(const Material& m, double thickness);

// Areal mass of the vibrating stack, kg/m^2.
double areal_density(const CellGeometry& g, const Material& membrane, MassLoading loading);

// m-th positive root lambda_nm of J_n(x) I_n'(x) - I_n(x) J_n'(x) = 0
// (clamped-plate characteristic equation), by bracketed bisection.
double clamped_plate_lambda(int n, int m);
double clamped_plate_lambda_sq(int n, int m);

/// Finite-difference discretization of D*laplacian^2 - T*laplacian on the
/// clamped disc of given radius, azimuthal order n, uniform radial grid.
/// The biharmonic is composed from two tridiagonal Laplacian applications,
/// giving a pentadiagonal system; the clamped edge (w = w' = 0) enters
/// through a ghost node, the centre through symmetry (n = 0) or the
/// regularity condition w(0) = 0 (n >= 1).
class RadialPlateOperator {
 public:
  RadialPlateOperator(int azimuthal_order, double radius, int radial_nodes,
                      double rigidity, double tension);
  ~RadialPlateOperator();
  RadialPlateOperator(RadialPlateOperator&&) noexcept;
  RadialPlateOperator& operator=(RadialPlateOperator&&) noexcept;

  const Eigen::VectorXd& radii() const;  // all nodes, 0..cavity edge

  // Solve (D*lap^2 - T*lap) w = load; load sampled on radii() (boundary
  // entries of the load are ignored), result padded with the boundary
  // zeros. SolverError on a singular system.
  Eigen::VectorXd solve(const Eigen::VectorXd& load) const;

  // Ascending real positive spectrum of the operator (first `count`).
  // Divide by the areal density for omega^2.
  Eigen::VectorXd eigenvalues(int count) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Static clamped-plate bending, D*lap^2 w - T*lap w = P, axisymmetric.
// pressure is sampled on the uniform grid of cfg.radial_nodes points over
// [0, cavity_radius].
DeflectionProfile static_deflection(const CellGeometry& g, const Material& m,
                                    const Eigen::VectorXd& pressure, const PlateConfig& cfg);

// Lowest n_modes natural frequencies over azimuthal orders n = 0..3, each
// n >= 1 mode counted twice (degenerate pair). Tension-free plates use the
// characteristic-equation route; tension switches to the discretized
// operator's eigenproblem.
std::vector<ModeResult> eigenfrequencies(const CellGeometry& g, const Material& m,
                                         const PlateConfig& cfg, int n_modes);

// Discretized route regardless of tension; the independent cross-check of
// the characteristic-equation route.
std::vector<ModeResult> eigenfrequencies_fd(const CellGeometry& g, const Material& m,
                                            const PlateConfig& cfg, int n_modes);

// First-mode frequency tabulated over a grid of one geometric parameter.
// gap_height does not enter the uncoupled plate model, so that sweep is
// constant by construction (the bias-softened response lives in
// electrostatics).
SweepResult frequency_sweep(const CellGeometry& g, const Material& m, const PlateConfig& cfg,
                            SweepParameter vary, const std::vector<double>& grid);

}  // namespace cmutsim
