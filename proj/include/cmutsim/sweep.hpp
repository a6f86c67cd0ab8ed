#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cmutsim/capacitance.hpp"
#include "cmutsim/electrostatics.hpp"
#include "cmutsim/geometry.hpp"
#include "cmutsim/material.hpp"
#include "cmutsim/plate.hpp"
#include "cmutsim/sweep_result.hpp"

namespace cmutsim {

/// One parameter sweep: which response, which parameter, over which grid,
/// in which fixed context. Grids are SI.
struct SweepSpec {
  SweepResponse response = SweepResponse::Capacitance;
  SweepParameter vary = SweepParameter::CavityRadius;
  std::vector<double> grid;  // SI (m or V), strictly monotone, non-empty

  CellGeometry geometry;
  std::string membrane = "Si3N4";
  std::string pillar = "SiO2";
  double bias_voltage = 40.0;  // V, for displacement/softened responses over geometry grids

  GapPolicy capacitance_policy = GapPolicy::SeriesMembrane;
  PlateConfig plate;
  CouplingConfig coupling;

  SweepSpec();  // defaults geometry to default_cell()
};

SweepResult run_sweep(const SweepSpec& spec, const MaterialDB& db = MaterialDB::builtin());

// Least-squares fit of the electrode-overlap radius against reference
// (cavity radius, capacitance) rows, SeriesMembrane two-region model,
// restricted to rows with cavity radius <= the cell's cavity radius. The
// fit is closed-form in x = pi k_pillar r_o^2 with relative-error
// weighting. ValidationError when fewer than two usable rows; Error when
// the fitted radius is not bracketed in (max cavity radius, substrate
// radius].
double calibrate_overlap_radius(const std::vector<std::pair<double, double>>& reference_rows,
                                const CellGeometry& g, const Material& membrane,
                                const Material& pillar);

// Convenience: parse a fixture CSV (radius um, capacitance nF columns) into
// (m, F) rows for calibrate_overlap_radius.
std::vector<std::pair<double, double>> reference_rows_from_csv(const std::string& path,
                                                               const std::string& response_column);

struct ComparisonRow {
  std::string response;
  std::string unit;
  double si3n4 = 0.0;
  double sic = 0.0;
  std::string winner;
  std::string note;  // non-empty where model and reference data disagree
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;  // capacitance, frequency, displacement
};

// Si3N4 vs SiC at identical geometry: capacitance (SeriesMembrane),
// first-mode frequency, and centre displacement at the given bias. The
// displacement row carries a fixed discrepancy note: reference FEM data
// reports SiC displacing more, while any plate model with SiC's larger
// rigidity predicts the opposite.
ComparisonReport compare_materials(const CellGeometry& g, const MaterialDB& db,
                                   const PlateConfig& plate_cfg, const CouplingConfig& coupling,
                                   double bias_voltage = 40.0);

std::string to_csv(const ComparisonReport& report);

}  // namespace cmutsim
