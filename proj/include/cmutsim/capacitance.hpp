#pragma once

#include "cmutsim/deflection.hpp"
#include "cmutsim/geometry.hpp"
#include "cmutsim/material.hpp"

namespace cmutsim {

/// Dielectric stack between the terminals. GapOnly treats the air gap (or
/// oxide, under the pillar) as the only dielectric; SeriesMembrane puts the
/// membrane dielectric in series on both regions. The reference FEM
/// capacitance tables reproduce under SeriesMembrane; the bare gap disc is
/// the GapOnly sanity value.
enum class GapPolicy { GapOnly, SeriesMembrane };

std::string to_string(GapPolicy p);
GapPolicy gap_policy_from_string(std::string_view s);  // DomainError if unknown

struct CapacitanceBreakdown {
  double gap_region = 0.0;     // F, stack over the cavity disc
  double pillar_region = 0.0;  // F, stack over the oxide annulus
  double total = 0.0;          // F, gap_region + pillar_region
};

// C = eps0 * eps_r * A / d.
double parallel_plate(double area, double separation, double relative_permittivity);

// Eq-uivalent of two capacitances in series, (c_a*c_g)/(c_a + c_g).
double series_equivalent(double c_a, double c_g);

// Two-region analytic capacitance of the cell. The gap disc is capped at
// the electrode overlap (radius min(cavity, overlap)); the pillar annulus
// covers the rest of the overlap disc. Fringing fields are ignored.
CapacitanceBreakdown cell_capacitance(const CellGeometry& g, const Material& membrane,
                                      const Material& pillar,
                                      GapPolicy policy = GapPolicy::SeriesMembrane);

// Effective electrode separation over the gap region for a policy:
// gap_height, plus membrane_thickness/eps_membrane under SeriesMembrane.
double effective_gap(const CellGeometry& g, const Material& membrane, GapPolicy policy);

// Gap-region capacitance of a deflected membrane,
//   2*pi*eps0 * integral r / (d_eff - w(r)) dr
// by the trapezoid rule on the profile's grid, plus the undeflected pillar
// term. ContactError if w reaches the gap height anywhere.
double deflected_capacitance(const CellGeometry& g, const Material& membrane,
                             const Material& pillar, const DeflectionProfile& w,
                             GapPolicy policy = GapPolicy::SeriesMembrane);

}  // namespace cmutsim
