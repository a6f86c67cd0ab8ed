#include <doctest.h>

#include <cmath>

#include "cmutsim/constants.hpp"
#include "cmutsim/errors.hpp"
#include "cmutsim/geometry.hpp"

using namespace cmutsim;

TEST_CASE("default cell matches the reference geometry") {
  CellGeometry g = default_cell();
  CHECK(g.substrate_radius == doctest::Approx(28e-6));
  CHECK(g.substrate_thickness == doctest::Approx(3e-6));
  CHECK(g.bottom_electrode_thickness == doctest::Approx(1e-6));
  CHECK(g.gap_height == doctest::Approx(0.5e-6));
  CHECK(g.cavity_radius == doctest::Approx(25e-6));
  CHECK(g.top_electrode_thickness == doctest::Approx(0.1e-6));
  CHECK(g.membrane_thickness == doctest::Approx(0.75e-6));
  CHECK(g.overlap_radius == doctest::Approx(kDefaultOverlapRadius));
  CHECK_NOTHROW(validate(g));
}

TEST_CASE("validation reports the violated field with both values") {
  CellGeometry g = default_cell();
  g.cavity_radius = 29e-6;
  g.overlap_radius = 29.5e-6;  // keep only the substrate constraint violated
  CHECK_THROWS_WITH_AS(validate(g), doctest::Contains("cavity_radius"), ValidationError);

  g = default_cell();
  g.overlap_radius = 20e-6;
  CHECK_THROWS_WITH_AS(validate(g), doctest::Contains("overlap_radius"), ValidationError);

  g = default_cell();
  g.membrane_thickness = 0.0;
  CHECK_THROWS_WITH_AS(validate(g), doctest::Contains("membrane_thickness"), ValidationError);
}

TEST_CASE("equality constraints tolerate unit-conversion rounding") {
  // 25 * 1e-6 and the 25e-6 literal differ by an ulp; a degenerate annulus
  // entered through the flag boundary must still validate
  CellGeometry g = default_cell();
  g.overlap_radius = 25.0 * kMicron;
  CHECK_NOTHROW(validate(g));
}

TEST_CASE("region areas") {
  CellGeometry g = default_cell();
  // pi r^2 disc at the default cavity radius
  CHECK(region_areas(g).gap_area == doctest::Approx(kPi * 25e-6 * 25e-6).epsilon(1e-12));
  CHECK(region_areas(g).gap_area == doctest::Approx(1.9634954e-9).epsilon(1e-6));

  SUBCASE("degenerate annulus") {
    g.overlap_radius = g.cavity_radius;
    CHECK(region_areas(g).pillar_area == doctest::Approx(0.0));
  }

  SUBCASE("hand-computed annulus") {
    g.cavity_radius = 22e-6;
    g.overlap_radius = 26.04e-6;
    CHECK(region_areas(g).pillar_area == doctest::Approx(6.097268e-10).epsilon(1e-6));
  }
}

TEST_CASE("areas partition the overlap disc and respond monotonically") {
  CellGeometry g = default_cell();
  double prev_gap = -1.0, prev_pillar = 1e9;
  for (double rc_um = 20.0; rc_um <= 26.0; rc_um += 0.5) {
    g.cavity_radius = rc_um * kMicron;
    RegionAreas a = region_areas(g);
    CHECK(a.gap_area + a.pillar_area ==
          doctest::Approx(kPi * g.overlap_radius * g.overlap_radius).epsilon(1e-14));
    CHECK(a.gap_area > prev_gap);
    CHECK(a.pillar_area < prev_pillar);
    CHECK(a.pillar_area >= 0.0);
    prev_gap = a.gap_area;
    prev_pillar = a.pillar_area;
  }
}

TEST_CASE("geometry JSON honours micrometre fields and rejects junk") {
  CellGeometry g = geometry_from_json(R"({"oxiinR": 22, "memH": 0.8})");
  CHECK(g.cavity_radius == doctest::Approx(22e-6));
  CHECK(g.membrane_thickness == doctest::Approx(0.8e-6));
  CHECK(g.gap_height == doctest::Approx(0.5e-6));  // untouched default

  CHECK_THROWS_AS(geometry_from_json("[1,2]"), ParseError);
  CHECK_THROWS_WITH_AS(geometry_from_json(R"({"cavityRadius": 22})"),
                       doctest::Contains("cavityRadius"), ParseError);
  CHECK_THROWS_AS(geometry_from_json(R"({"oxiinR": 29})"), ValidationError);
}
