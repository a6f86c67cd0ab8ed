#include "cmutsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmutsim/constants.hpp"
#include "cmutsim/errors.hpp"

namespace cmutsim {

using nlohmann::json;

CellGeometry default_cell() {
  CellGeometry g;
  g.substrate_radius = 28e-6;
  g.substrate_thickness = 3e-6;
  g.bottom_electrode_thickness = 1e-6;
  g.gap_height = 0.5e-6;
  g.cavity_radius = 25e-6;
  g.top_electrode_thickness = 0.1e-6;
  g.membrane_thickness = 0.75e-6;
  g.overlap_radius = kDefaultOverlapRadius;
  return g;
}

namespace {

void check_positive(const char* field, double v) {
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << "geometry: " << field << " = " << v << " must be > 0";
    throw ValidationError(os.str());
  }
}

void check_less(const char* a, double va, const char* b, double vb, bool allow_equal) {
  // unit conversions at the flag/file boundary can differ by an ulp from
  // the built-in literals, so equality gets a vanishing relative slack
  double slack = 1e-12 * std::max(std::abs(va), std::abs(vb));
  bool ok = allow_equal ? va <= vb + slack : va < vb;
  if (!ok) {
    std::ostringstream os;
    os << "geometry: " << a << " = " << va << " must be " << (allow_equal ? "<=" : "<")
       << " " << b << " = " << vb;
    throw ValidationError(os.str());
  }
}

}  // namespace

CellGeometry validate(const CellGeometry& g) {
  check_positive("substrate_radius", g.substrate_radius);
  check_positive("substrate_thickness", g.substrate_thickness);
  check_positive("bottom_electrode_thickness", g.bottom_electrode_thickness);
  check_positive("gap_height", g.gap_height);
  check_positive("cavity_radius", g.cavity_radius);
  check_positive("top_electrode_thickness", g.top_electrode_thickness);
  check_positive("membrane_thickness", g.membrane_thickness);
  check_positive("overlap_radius", g.overlap_radius);
  check_less("cavity_radius", g.cavity_radius, "substrate_radius", g.substrate_radius, false);
  check_less("cavity_radius", g.cavity_radius, "overlap_radius", g.overlap_radius, true);
  check_less("overlap_radius", g.overlap_radius, "substrate_radius", g.substrate_radius, true);
  return g;
}

RegionAreas region_areas(const CellGeometry& g) {
  // Capacitance is collected under the electrode overlap: the gap disc is
  // capped at the overlap radius so a sweep pushing the cavity past the
  // electrode edge degrades gracefully.
  double r_gap = std::min(g.cavity_radius, g.overlap_radius);
  RegionAreas a;
  a.gap_area = kPi * r_gap * r_gap;
  a.pillar_area = kPi * (g.overlap_radius * g.overlap_radius - r_gap * r_gap);
  return a;
}

CellGeometry geometry_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("geometry file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("geometry file: expected a JSON object");
  CellGeometry g = default_cell();
  auto set_um = [&](const char* field, double& target) {
    if (!j.contains(field)) return;
    if (!j[field].is_number())
      throw ParseError(std::string("geometry file: non-numeric field '") + field + "'");
    target = j[field].get<double>() * kMicron;
  };
  set_um("subR", g.substrate_radius);
  set_um("subH", g.substrate_thickness);
  set_um("belecH", g.bottom_electrode_thickness);
  set_um("oxiH", g.gap_height);
  set_um("oxiinR", g.cavity_radius);
  set_um("telecH", g.top_electrode_thickness);
  set_um("memH", g.membrane_thickness);
  set_um("overlapR", g.overlap_radius);
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"subR", "subH", "belecH", "oxiH",
                                  "oxiinR", "telecH", "memH", "overlapR"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw ParseError("geometry file: unknown field '" + key + "'");
  }
  return validate(g);
}

CellGeometry load_geometry(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open geometry file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return geometry_from_json(buf.str());
}

}  // namespace cmutsim
