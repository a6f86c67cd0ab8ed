#include "cmutsim/sweep.hpp"

#include <cmath>
#include <sstream>

#include "cmutsim/constants.hpp"
#include "cmutsim/errors.hpp"

namespace cmutsim {

SweepSpec::SweepSpec() : geometry(default_cell()) {}

namespace {

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("sweep: empty grid");
  if (grid.size() < 2) return;
  bool ascending = grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    bool ok = ascending ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1];
    if (!ok) throw ValidationError("sweep: grid must be strictly monotone");
  }
}

bool pairing_allowed(SweepResponse response, SweepParameter vary) {
  switch (response) {
    case SweepResponse::Capacitance:
      return vary == SweepParameter::CavityRadius || vary == SweepParameter::GapHeight;
    case SweepResponse::Frequency:
      return vary == SweepParameter::CavityRadius || vary == SweepParameter::GapHeight ||
             vary == SweepParameter::MembraneThickness;
    case SweepResponse::Displacement:
      return vary == SweepParameter::Voltage || vary == SweepParameter::CavityRadius ||
             vary == SweepParameter::MembraneThickness;
    case SweepResponse::SoftenedFrequency:
      return vary == SweepParameter::GapHeight || vary == SweepParameter::Voltage;
  }
  return false;
}

CellGeometry with_parameter(const CellGeometry& g, SweepParameter vary, double value) {
  CellGeometry gg = g;
  switch (vary) {
    case SweepParameter::CavityRadius:
      gg.cavity_radius = value;
      break;
    case SweepParameter::GapHeight:
      gg.gap_height = value;
      break;
    case SweepParameter::MembraneThickness:
      gg.membrane_thickness = value;
      break;
    case SweepParameter::Voltage:
      break;
  }
  return gg;
}

std::string context_line(const SweepSpec& spec) {
  std::ostringstream os;
  os << "membrane = " << spec.membrane << "; pillar = " << spec.pillar;
  return os.str();
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const MaterialDB& db) {
  validate_grid(spec.grid);
  if (!pairing_allowed(spec.response, spec.vary)) {
    throw ValidationError("sweep: response '" + to_string(spec.response) +
                          "' cannot vary '" + to_string(spec.vary) + "'");
  }
  const Material& membrane = db.at(spec.membrane);
  const Material& pillar = db.at(spec.pillar);

  const bool param_is_voltage = spec.vary == SweepParameter::Voltage;
  SweepResult result;
  result.param = {to_string(spec.vary), param_is_voltage ? "V" : "um"};
  result.metadata.push_back(std::string(kVersion));
  result.metadata.push_back("response = " + to_string(spec.response) +
                            "; vary = " + to_string(spec.vary));
  result.metadata.push_back(context_line(spec));
  auto display_param = [&](double v) { return param_is_voltage ? v : v / kMicron; };

  switch (spec.response) {
    case SweepResponse::Capacitance: {
      result.responses = {{"capacitance", "nF"}};
      result.metadata.push_back("capacitance policy = " + to_string(spec.capacitance_policy));
      std::ostringstream geom;
      geom << "overlap_radius_um = " << format_value(spec.geometry.overlap_radius / kMicron);
      result.metadata.push_back(geom.str());
      for (double value : spec.grid) {
        CellGeometry gg = with_parameter(spec.geometry, spec.vary, value);
        double total = cell_capacitance(gg, membrane, pillar, spec.capacitance_policy).total;
        result.rows.push_back({display_param(value), {total * 1e9}, ""});
      }
      break;
    }
    case SweepResponse::Frequency:
      // frequency_sweep already carries the full metadata (solver knobs,
      // constant-gap note)
      return frequency_sweep(spec.geometry, membrane, spec.plate, spec.vary, spec.grid);
    case SweepResponse::Displacement: {
      if (spec.vary == SweepParameter::Voltage) {
        SweepResult inner = displacement_voltage_sweep(spec.geometry, membrane, spec.grid,
                                                       spec.plate, spec.coupling, pillar);
        return inner;
      }
      result.responses = {{"displacement", "um"}};
      result.has_flags = true;
      std::ostringstream bias;
      bias << "bias_voltage_v = " << format_value(spec.bias_voltage);
      result.metadata.push_back(bias.str());
      result.metadata.push_back("pressure policy = " + to_string(spec.coupling.pressure_policy));
      for (double value : spec.grid) {
        CellGeometry gg = with_parameter(spec.geometry, spec.vary, value);
        BiasPoint p = solve_equilibrium(gg, membrane, spec.bias_voltage, spec.plate,
                                        spec.coupling, pillar);
        result.rows.push_back({display_param(value),
                               {p.center_displacement / kMicron},
                               p.converged ? "" : "non-converged"});
      }
      break;
    }
    case SweepResponse::SoftenedFrequency: {
      result.responses = {{"softened_frequency", "MHz"}};
      result.metadata.push_back(
          "lumping: k_e = eps0*pi*a^2*V^2/(d_eff - w0)^3 at equilibrium; "
          "k_m = 64*pi*D/a^2 (uniform load, centre deflection)");
      if (spec.vary != SweepParameter::Voltage) {
        std::ostringstream bias;
        bias << "bias_voltage_v = " << format_value(spec.bias_voltage);
        result.metadata.push_back(bias.str());
      }
      for (double value : spec.grid) {
        CellGeometry gg = spec.geometry;
        double v = spec.bias_voltage;
        if (spec.vary == SweepParameter::Voltage) {
          v = value;
        } else {
          gg = with_parameter(spec.geometry, spec.vary, value);
        }
        double f = softened_frequency(gg, membrane, v, spec.plate, spec.coupling);
        result.rows.push_back({display_param(value), {f / 1e6}, ""});
      }
      break;
    }
  }
  return result;
}

double calibrate_overlap_radius(const std::vector<std::pair<double, double>>& reference_rows,
                                const CellGeometry& g, const Material& membrane,
                                const Material& pillar) {
  // Two-region SeriesMembrane model: C(r_c) = pi*k_g*r_c^2 + pi*k_p*(r_o^2 - r_c^2),
  // linear in x = pi*k_p*r_o^2. Least squares on relative error gives x in
  // closed form.
  std::vector<std::pair<double, double>> rows;
  double max_rc = 0.0;
  for (const auto& [rc, c] : reference_rows) {
    if (rc <= g.cavity_radius) {
      if (!(c > 0.0)) throw ValidationError("calibration: non-positive reference capacitance");
      rows.emplace_back(rc, c);
      max_rc = std::max(max_rc, rc);
    }
  }
  if (rows.size() < 2) {
    std::ostringstream os;
    os << "calibration: need >= 2 reference rows with cavity radius <= "
       << g.cavity_radius / kMicron << " um, got " << rows.size();
    throw ValidationError(os.str());
  }
  const double k_g = kVacuumPermittivity /
                     (g.gap_height + g.membrane_thickness / membrane.permittivity());
  const double k_p = kVacuumPermittivity /
                     (g.gap_height / pillar.permittivity() +
                      g.membrane_thickness / membrane.permittivity());
  double num = 0.0, den = 0.0;
  for (const auto& [rc, c] : rows) {
    double b = kPi * (k_p - k_g) * rc * rc;
    num += (b + c) / (c * c);
    den += 1.0 / (c * c);
  }
  double x = num / den;
  double ro_sq = x / (kPi * k_p);
  if (!(ro_sq > max_rc * max_rc)) {
    throw Error("calibration: fitted overlap radius is not bracketed above the largest "
                "reference cavity radius (degenerate fit)");
  }
  double ro = std::sqrt(ro_sq);
  if (ro > g.substrate_radius) {
    std::ostringstream os;
    os << "calibration: fitted overlap radius " << ro / kMicron
       << " um exceeds the substrate radius " << g.substrate_radius / kMicron << " um";
    throw Error(os.str());
  }
  return ro;
}

std::vector<std::pair<double, double>> reference_rows_from_csv(const std::string& path,
                                                               const std::string& response_column) {
  SweepResult fixture = read_csv_file(path);
  std::size_t col = fixture.response_index(response_column);
  std::vector<std::pair<double, double>> rows;
  rows.reserve(fixture.rows.size());
  for (const SweepRow& row : fixture.rows)
    rows.emplace_back(row.param * kMicron, row.values[col] * 1e-9);  // um -> m, nF -> F
  return rows;
}

ComparisonReport compare_materials(const CellGeometry& g, const MaterialDB& db,
                                   const PlateConfig& plate_cfg, const CouplingConfig& coupling,
                                   double bias_voltage) {
  const Material& sin = db.at("Si3N4");
  const Material& sic = db.at("SiC");
  const Material& pillar = db.at("SiO2");

  ComparisonReport report;

  double cap_sin = cell_capacitance(g, sin, pillar, GapPolicy::SeriesMembrane).total * 1e9;
  double cap_sic = cell_capacitance(g, sic, pillar, GapPolicy::SeriesMembrane).total * 1e9;
  report.rows.push_back({"capacitance", "nF", cap_sin, cap_sic,
                         cap_sic >= cap_sin ? "SiC" : "Si3N4", ""});

  double f_sin = eigenfrequencies(g, sin, plate_cfg, 1).front().frequency / 1e6;
  double f_sic = eigenfrequencies(g, sic, plate_cfg, 1).front().frequency / 1e6;
  report.rows.push_back({"frequency", "MHz", f_sin, f_sic,
                         f_sic >= f_sin ? "SiC" : "Si3N4", ""});

  double w_sin =
      solve_equilibrium(g, sin, bias_voltage, plate_cfg, coupling, pillar).center_displacement /
      kMicron;
  double w_sic =
      solve_equilibrium(g, sic, bias_voltage, plate_cfg, coupling, pillar).center_displacement /
      kMicron;
  report.rows.push_back(
      {"displacement", "um", w_sin, w_sic, w_sic >= w_sin ? "SiC" : "Si3N4",
       "reference FEM data reports SiC displacing more at equal bias; a clamped-plate "
       "model with SiC's larger flexural rigidity predicts the opposite"});

  return report;
}

std::string to_csv(const ComparisonReport& report) {
  std::ostringstream os;
  os << "# " << kVersion << "\n";
  os << "response,unit,si3n4,sic,winner,note\n";
  for (const ComparisonRow& row : report.rows) {
    os << row.response << "," << row.unit << "," << format_value(row.si3n4) << ","
       << format_value(row.sic) << "," << row.winner << "," << row.note << "\n";
  }
  return os.str();
}

}  // namespace cmutsim
