#pragma once

#include <filesystem>
#include <string>

namespace cmutsim {

/// Parametric description of the single cell. All lengths in metres.
/// overlap_radius is the effective electrode-overlap radius: it bounds the
/// region that collects capacitance (gap disc plus oxide annulus) and is a
/// first-class parameter fitted once against reference capacitance data.
struct CellGeometry {
  double substrate_radius = 0.0;           // subR
  double substrate_thickness = 0.0;        // subH
  double bottom_electrode_thickness = 0.0; // belecH
  double gap_height = 0.0;                 // oxiH, air gap under the membrane
  double cavity_radius = 0.0;              // oxiinR, vibrating radius
  double top_electrode_thickness = 0.0;    // telecH
  double membrane_thickness = 0.0;         // memH
  double overlap_radius = 0.0;             // overlapR

  bool operator==(const CellGeometry&) const = default;
};

struct RegionAreas {
  double gap_area = 0.0;     // disc of min(cavity_radius, overlap_radius)
  double pillar_area = 0.0;  // annulus out to overlap_radius
};

// Fitted electrode-overlap radius for the default cell (two-region
// capacitance model least-squares against the reference FEM rows at
// cavity radii 22..25 um).
inline constexpr double kDefaultOverlapRadius = 2.6020018128878440e-05;

CellGeometry default_cell();

// Returns g unchanged when every invariant holds; ValidationError naming
// the field and both offending values otherwise.
CellGeometry validate(const CellGeometry& g);

RegionAreas region_areas(const CellGeometry& g);

// JSON file mirroring the cell parameter names (subR, subH, belecH, oxiH,
// oxiinR, telecH, memH, overlapR), values in micrometres. Missing fields
// keep the default cell's values.
CellGeometry geometry_from_json(const std::string& text);
CellGeometry load_geometry(const std::filesystem::path& file);

}  // namespace cmutsim
