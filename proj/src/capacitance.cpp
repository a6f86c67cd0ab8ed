#include "cmutsim/capacitance.hpp"

#include <sstream>

#include "cmutsim/constants.hpp"
#include "cmutsim/errors.hpp"

namespace cmutsim {

std::string to_string(GapPolicy p) {
  return p == GapPolicy::GapOnly ? "gap-only" : "series-membrane";
}

GapPolicy gap_policy_from_string(std::string_view s) {
  if (s == "gap-only") return GapPolicy::GapOnly;
  if (s == "series-membrane") return GapPolicy::SeriesMembrane;
  throw DomainError("unknown gap policy '" + std::string(s) +
                    "' (expected gap-only or series-membrane)");
}

double parallel_plate(double area, double separation, double relative_permittivity) {
  if (!(separation > 0.0)) {
    std::ostringstream os;
    os << "parallel_plate: separation = " << separation << " must be > 0";
    throw DomainError(os.str());
  }
  if (area < 0.0) throw DomainError("parallel_plate: negative area");
  if (relative_permittivity < 1.0)
    throw DomainError("parallel_plate: relative permittivity below 1");
  return kVacuumPermittivity * relative_permittivity * area / separation;
}

double series_equivalent(double c_a, double c_g) {
  if (c_a < 0.0 || c_g < 0.0) throw DomainError("series_equivalent: negative capacitance");
  if (c_a + c_g == 0.0) throw DomainError("series_equivalent: both capacitances zero");
  return c_a * c_g / (c_a + c_g);
}

namespace {

// Capacitance of one region: the region dielectric, with the membrane in
// series under SeriesMembrane.
double region_capacitance(double area, double separation, double region_eps,
                          const CellGeometry& g, const Material& membrane, GapPolicy policy) {
  if (area == 0.0) return 0.0;
  double c_region = parallel_plate(area, separation, region_eps);
  if (policy == GapPolicy::GapOnly) return c_region;
  double c_membrane = parallel_plate(area, g.membrane_thickness, membrane.permittivity());
  return series_equivalent(c_membrane, c_region);
}

}  // namespace

CapacitanceBreakdown cell_capacitance(const CellGeometry& g, const Material& membrane,
                                      const Material& pillar, GapPolicy policy) {
  RegionAreas areas = region_areas(g);
  CapacitanceBreakdown b;
  b.gap_region = region_capacitance(areas.gap_area, g.gap_height, 1.0, g, membrane, policy);
  b.pillar_region =
      region_capacitance(areas.pillar_area, g.gap_height, pillar.permittivity(), g, membrane, policy);
  b.total = b.gap_region + b.pillar_region;
  return b;
}

double effective_gap(const CellGeometry& g, const Material& membrane, GapPolicy policy) {
  if (policy == GapPolicy::GapOnly) return g.gap_height;
  return g.gap_height + g.membrane_thickness / membrane.permittivity();
}

double deflected_capacitance(const CellGeometry& g, const Material& membrane,
                             const Material& pillar, const DeflectionProfile& w,
                             GapPolicy policy) {
  if (w.radii.size() < 2 || w.radii.size() != w.w.size())
    throw DomainError("deflected_capacitance: profile needs matching radius/displacement grids");
  if (w.max() >= g.gap_height) {
    std::ostringstream os;
    os << "contact: max deflection " << w.max() << " m reaches gap height " << g.gap_height << " m";
    throw ContactError(os.str());
  }
  const double d_eff = effective_gap(g, membrane, policy);
  // 2*pi*eps0 * integral r/(d_eff - w) dr, trapezoid on the profile grid
  double integral = 0.0;
  for (Eigen::Index i = 0; i + 1 < w.radii.size(); ++i) {
    double f0 = w.radii[i] / (d_eff - w.w[i]);
    double f1 = w.radii[i + 1] / (d_eff - w.w[i + 1]);
    integral += 0.5 * (f0 + f1) * (w.radii[i + 1] - w.radii[i]);
  }
  double gap_term = 2.0 * kPi * kVacuumPermittivity * integral;

  RegionAreas areas = region_areas(g);
  double pillar_term =
      region_capacitance(areas.pillar_area, g.gap_height, pillar.permittivity(), g, membrane, policy);
  return gap_term + pillar_term;
}

}  // namespace cmutsim
