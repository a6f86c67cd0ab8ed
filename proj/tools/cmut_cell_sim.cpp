// Command-line front end for the single-cell CMUT simulator. Boundary units
// mirror the reference tables (lengths um, bias V, frequency MHz,
// capacitance nF); everything behind the flag parser is strict SI.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmutsim/capacitance.hpp"
#include "cmutsim/constants.hpp"
#include "cmutsim/electrostatics.hpp"
#include "cmutsim/errors.hpp"
#include "cmutsim/geometry.hpp"
#include "cmutsim/material.hpp"
#include "cmutsim/plate.hpp"
#include "cmutsim/sweep.hpp"

namespace {

using namespace cmutsim;
using nlohmann::json;

struct GeometryFlags {
  std::string file;
  std::optional<double> subR, subH, belecH, oxiH, oxiinR, telecH, memH, overlapR;  // um

  void attach(CLI::App* cmd) {
    cmd->add_option("--geometry", file, "geometry JSON file (values in um)");
    auto um = [&](const char* name, std::optional<double>& slot, const char* what) {
      cmd->add_option(name, slot, std::string(what) + " [um]");
    };
    um("--subR", subR, "substrate radius");
    um("--subH", subH, "substrate thickness");
    um("--belecH", belecH, "bottom electrode thickness");
    um("--oxiH", oxiH, "gap (cavity) height");
    um("--oxiinR", oxiinR, "cavity radius");
    um("--telecH", telecH, "top electrode thickness");
    um("--memH", memH, "membrane thickness");
    um("--overlapR", overlapR, "electrode overlap radius");
  }

  CellGeometry resolve() const {
    CellGeometry g = file.empty() ? default_cell() : load_geometry(file);
    auto apply = [](const std::optional<double>& v, double& slot) {
      if (v) slot = *v * kMicron;
    };
    apply(subR, g.substrate_radius);
    apply(subH, g.substrate_thickness);
    apply(belecH, g.bottom_electrode_thickness);
    apply(oxiH, g.gap_height);
    apply(oxiinR, g.cavity_radius);
    apply(telecH, g.top_electrode_thickness);
    apply(memH, g.membrane_thickness);
    apply(overlapR, g.overlap_radius);
    return validate(g);
  }
};

struct OutputFlags {
  std::string format = "csv";
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", out, "write output to a file instead of standard output");
  }

  void emit(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out);
      if (!f) throw Error("cannot open output file '" + out + "'");
      f << text;
    }
  }
};

struct MaterialFlags {
  std::string file;
  std::string membrane = "Si3N4";
  std::string pillar = "SiO2";

  void attach(CLI::App* cmd, bool with_names = true) {
    cmd->add_option("--materials", file,
                    "material JSON file overlaying the built-ins (CMUT_MATERIALS env "
                    "variable is the fallback)");
    if (with_names) {
      cmd->add_option("--membrane", membrane, "membrane material name")->capture_default_str();
      cmd->add_option("--pillar", pillar, "pillar material name")->capture_default_str();
    }
  }

  MaterialDB load_db() const {
    if (!file.empty()) return MaterialDB::load(file);
    if (const char* env = std::getenv("CMUT_MATERIALS"); env && *env)
      return MaterialDB::load(env);
    return MaterialDB::builtin();
  }
};

struct PlateFlags {
  double tension = 0.0;
  int nodes = 401;
  std::string mass_loading = "none";

  void attach(CLI::App* cmd) {
    cmd->add_option("--tension", tension, "membrane tension [N/m]")->capture_default_str();
    cmd->add_option("--nodes", nodes, "radial grid nodes")->capture_default_str();
    cmd->add_option("--mass-loading", mass_loading, "areal mass loading")
        ->check(CLI::IsMember({"none", "top-electrode"}))
        ->capture_default_str();
  }

  PlateConfig resolve() const {
    PlateConfig cfg;
    cfg.tension = tension;
    cfg.radial_nodes = nodes;
    cfg.mass_loading =
        mass_loading == "top-electrode" ? MassLoading::TopElectrode : MassLoading::None;
    return cfg;
  }
};

struct CouplingFlags {
  std::string pressure_policy = "series-membrane";
  std::string capacitance_policy = "series-membrane";
  double relaxation = 0.7;
  double tol = 1e-13;
  int max_iter = 200;

  void attach(CLI::App* cmd) {
    cmd->add_option("--pressure-policy", pressure_policy, "gap policy for the electrostatic force")
        ->check(CLI::IsMember({"gap-only", "series-membrane"}))
        ->capture_default_str();
    cmd->add_option("--cap-policy", capacitance_policy, "gap policy for reported capacitance")
        ->check(CLI::IsMember({"gap-only", "series-membrane"}))
        ->capture_default_str();
    cmd->add_option("--relaxation", relaxation, "fixed-point under-relaxation, (0,1]")
        ->capture_default_str();
    cmd->add_option("--tol", tol, "fixed-point stop tolerance [m]")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "fixed-point iteration cap")->capture_default_str();
  }

  CouplingConfig resolve() const {
    CouplingConfig cfg;
    cfg.pressure_policy = gap_policy_from_string(pressure_policy);
    cfg.capacitance_policy = gap_policy_from_string(capacitance_policy);
    cfg.relaxation = relaxation;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    return cfg;
  }
};

std::vector<double> make_grid(double from, double to, double step) {
  if (!(step > 0.0)) throw ValidationError("grid: step must be > 0");
  if (!(to >= from)) throw ValidationError("grid: to must be >= from");
  std::vector<double> grid;
  // half-step slack so an exact endpoint joins the grid despite rounding
  for (double v = from; v <= to + 0.5 * step; v += step) grid.push_back(v);
  return grid;
}

json sweep_to_json(const SweepResult& r) {
  json root;
  root["metadata"] = r.metadata;
  json rows = json::array();
  for (const SweepRow& row : r.rows) {
    json o;
    o[r.param.name + "_" + r.param.unit] = row.param;
    for (std::size_t i = 0; i < r.responses.size(); ++i)
      o[r.responses[i].name + "_" + r.responses[i].unit] = row.values[i];
    if (r.has_flags) o["flags"] = row.flag;
    rows.push_back(o);
  }
  root["rows"] = rows;
  return root;
}

std::string render(const SweepResult& r, const std::string& format) {
  if (format == "json") return sweep_to_json(r).dump(2) + "\n";
  return to_csv(r);
}

SweepParameter parse_vary(const std::string& vary) {
  if (vary == "radius") return SweepParameter::CavityRadius;
  if (vary == "gap") return SweepParameter::GapHeight;
  if (vary == "thickness") return SweepParameter::MembraneThickness;
  if (vary == "voltage") return SweepParameter::Voltage;
  throw ValidationError("unknown sweep parameter '" + vary + "'");
}

std::string material_csv(const Material& m) {
  std::ostringstream os;
  os << m.name << "," << format_value(m.density) << ","
     << (m.relative_permittivity ? format_value(*m.relative_permittivity) : std::string("-"))
     << "," << format_value(m.youngs_modulus / 1e9) << "," << format_value(m.poissons_ratio)
     << "\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-cell CMUT simulator: analytic capacitance, clamped-plate modes, "
               "coupled electrostatic deflection"};
  app.require_subcommand(1);

  // materials list | show
  auto* mats = app.add_subcommand("materials", "inspect the material database");
  mats->require_subcommand(1);
  MaterialFlags mat_list_flags, mat_show_flags;
  OutputFlags out_list, out_show;
  auto* mat_list = mats->add_subcommand("list", "list all materials");
  mat_list_flags.attach(mat_list, /*with_names=*/false);
  out_list.attach(mat_list);
  std::string show_name;
  auto* mat_show = mats->add_subcommand("show", "show one material");
  mat_show->add_option("name", show_name, "material name")->required();
  mat_show_flags.attach(mat_show, /*with_names=*/false);
  out_show.attach(mat_show);

  // cap
  auto* cap = app.add_subcommand("cap", "two-region cell capacitance at a point");
  GeometryFlags cap_geom;
  MaterialFlags cap_mat;
  OutputFlags cap_out;
  std::string cap_policy = "series-membrane";
  cap_geom.attach(cap);
  cap_mat.attach(cap);
  cap_out.attach(cap);
  cap->add_option("--policy", cap_policy, "dielectric stack policy")
      ->check(CLI::IsMember({"gap-only", "series-membrane"}))
      ->capture_default_str();

  // cap-sweep
  auto* cap_sweep = app.add_subcommand("cap-sweep", "capacitance over a geometry grid");
  GeometryFlags cs_geom;
  MaterialFlags cs_mat;
  OutputFlags cs_out;
  std::string cs_vary = "radius", cs_policy = "series-membrane";
  double cs_from = 0, cs_to = 0, cs_step = 0;
  cap_sweep->add_option("--vary", cs_vary, "swept parameter: radius | gap")
      ->check(CLI::IsMember({"radius", "gap"}))
      ->capture_default_str();
  cap_sweep->add_option("--from", cs_from, "grid start [um]")->required();
  cap_sweep->add_option("--to", cs_to, "grid end [um]")->required();
  cap_sweep->add_option("--step", cs_step, "grid step [um]")->required();
  cap_sweep->add_option("--policy", cs_policy, "dielectric stack policy")
      ->check(CLI::IsMember({"gap-only", "series-membrane"}))
      ->capture_default_str();
  cs_geom.attach(cap_sweep);
  cs_mat.attach(cap_sweep);
  cs_out.attach(cap_sweep);

  // modes
  auto* modes = app.add_subcommand("modes", "clamped-plate natural frequencies");
  GeometryFlags md_geom;
  MaterialFlags md_mat;
  OutputFlags md_out;
  PlateFlags md_plate;
  int md_count = 4;
  std::string md_method = "auto";
  modes->add_option("--count", md_count, "number of modes")->capture_default_str();
  modes->add_option("--method", md_method, "solution route")
      ->check(CLI::IsMember({"auto", "bessel", "fd"}))
      ->capture_default_str();
  md_geom.attach(modes);
  md_mat.attach(modes);
  md_plate.attach(modes);
  md_out.attach(modes);

  // freq-sweep
  auto* freq_sweep = app.add_subcommand("freq-sweep", "first-mode frequency over a geometry grid");
  GeometryFlags fs_geom;
  MaterialFlags fs_mat;
  OutputFlags fs_out;
  PlateFlags fs_plate;
  std::string fs_vary = "radius";
  double fs_from = 0, fs_to = 0, fs_step = 0;
  freq_sweep->add_option("--vary", fs_vary, "swept parameter: radius | thickness | gap")
      ->check(CLI::IsMember({"radius", "thickness", "gap"}))
      ->capture_default_str();
  freq_sweep->add_option("--from", fs_from, "grid start [um]")->required();
  freq_sweep->add_option("--to", fs_to, "grid end [um]")->required();
  freq_sweep->add_option("--step", fs_step, "grid step [um]")->required();
  fs_geom.attach(freq_sweep);
  fs_mat.attach(freq_sweep);
  fs_plate.attach(freq_sweep);
  fs_out.attach(freq_sweep);

  // disp
  auto* disp = app.add_subcommand("disp", "coupled equilibrium at one DC bias");
  GeometryFlags dp_geom;
  MaterialFlags dp_mat;
  OutputFlags dp_out;
  PlateFlags dp_plate;
  CouplingFlags dp_coupling;
  double dp_voltage = 0.0;
  disp->add_option("--voltage", dp_voltage, "DC bias [V]")->required();
  dp_geom.attach(disp);
  dp_mat.attach(disp);
  dp_plate.attach(disp);
  dp_coupling.attach(disp);
  dp_out.attach(disp);

  // disp-sweep
  auto* disp_sweep = app.add_subcommand("disp-sweep", "equilibrium over a bias grid");
  GeometryFlags ds_geom;
  MaterialFlags ds_mat;
  OutputFlags ds_out;
  PlateFlags ds_plate;
  CouplingFlags ds_coupling;
  double ds_from = 0, ds_to = 0, ds_step = 0;
  disp_sweep->add_option("--from", ds_from, "grid start [V]")->required();
  disp_sweep->add_option("--to", ds_to, "grid end [V]")->required();
  disp_sweep->add_option("--step", ds_step, "grid step [V]")->required();
  ds_geom.attach(disp_sweep);
  ds_mat.attach(disp_sweep);
  ds_plate.attach(disp_sweep);
  ds_coupling.attach(disp_sweep);
  ds_out.attach(disp_sweep);

  // pull-in
  auto* pull_in = app.add_subcommand("pull-in", "largest converged bias (0.1 V resolution)");
  GeometryFlags pi_geom;
  MaterialFlags pi_mat;
  OutputFlags pi_out;
  PlateFlags pi_plate;
  CouplingFlags pi_coupling;
  pi_geom.attach(pull_in);
  pi_mat.attach(pull_in);
  pi_plate.attach(pull_in);
  pi_coupling.attach(pull_in);
  pi_out.attach(pull_in);

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate",
                                       "fit the electrode overlap radius to reference rows");
  GeometryFlags cb_geom;
  MaterialFlags cb_mat;
  OutputFlags cb_out;
  std::string cb_fixtures, cb_column = "capacitance_si3n4";
  calibrate->add_option("--fixtures", cb_fixtures, "reference CSV (radius um, capacitance nF)")
      ->required();
  calibrate->add_option("--column", cb_column, "response column to fit against")
      ->capture_default_str();
  cb_geom.attach(calibrate);
  cb_mat.attach(calibrate);
  cb_out.attach(calibrate);

  // compare
  auto* compare = app.add_subcommand("compare", "Si3N4 vs SiC at identical geometry");
  GeometryFlags cm_geom;
  MaterialFlags cm_mat;
  OutputFlags cm_out;
  PlateFlags cm_plate;
  CouplingFlags cm_coupling;
  double cm_voltage = 40.0;
  compare->add_option("--voltage", cm_voltage, "bias for the displacement row [V]")
      ->capture_default_str();
  cm_geom.attach(compare);
  cm_mat.attach(compare, /*with_names=*/false);
  cm_plate.attach(compare);
  cm_coupling.attach(compare);
  cm_out.attach(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help or a usage diagnostic
    return code == 0 ? 0 : 1;
  }

  try {
    if (mat_list->parsed()) {
      MaterialDB db = mat_list_flags.load_db();
      if (out_list.format == "json") {
        out_list.emit(db.to_json() + "\n");
      } else {
        std::ostringstream os;
        os << "name,density(kg/m3),relative_permittivity,youngs_modulus(GPa),poissons_ratio\n";
        for (const auto& [name, m] : db.entries()) os << material_csv(m);
        out_list.emit(os.str());
      }
    } else if (mat_show->parsed()) {
      MaterialDB db = mat_show_flags.load_db();
      const Material& m = db.at(show_name);
      if (out_show.format == "json") {
        json o;
        o["name"] = m.name;
        o["density_kg_m3"] = m.density;
        if (m.relative_permittivity) o["relative_permittivity"] = *m.relative_permittivity;
        o["youngs_modulus_gpa"] = m.youngs_modulus / 1e9;
        o["poissons_ratio"] = m.poissons_ratio;
        out_show.emit(o.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "name,density(kg/m3),relative_permittivity,youngs_modulus(GPa),poissons_ratio\n";
        os << material_csv(m);
        out_show.emit(os.str());
      }
    } else if (cap->parsed()) {
      CellGeometry g = cap_geom.resolve();
      MaterialDB db = cap_mat.load_db();
      CapacitanceBreakdown b = cell_capacitance(g, db.at(cap_mat.membrane),
                                                db.at(cap_mat.pillar),
                                                gap_policy_from_string(cap_policy));
      if (cap_out.format == "json") {
        json o;
        o["policy"] = cap_policy;
        o["gap_region_nF"] = b.gap_region * 1e9;
        o["pillar_region_nF"] = b.pillar_region * 1e9;
        o["total_nF"] = b.total * 1e9;
        cap_out.emit(o.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "# " << kVersion << "\n# policy = " << cap_policy << "\n";
        os << "region,capacitance(nF)\n";
        os << "gap," << format_value(b.gap_region * 1e9) << "\n";
        os << "pillar," << format_value(b.pillar_region * 1e9) << "\n";
        os << "total," << format_value(b.total * 1e9) << "\n";
        cap_out.emit(os.str());
      }
    } else if (cap_sweep->parsed()) {
      SweepSpec spec;
      spec.response = SweepResponse::Capacitance;
      spec.vary = parse_vary(cs_vary);
      for (double v : make_grid(cs_from, cs_to, cs_step)) spec.grid.push_back(v * kMicron);
      spec.geometry = cs_geom.resolve();
      spec.membrane = cs_mat.membrane;
      spec.pillar = cs_mat.pillar;
      spec.capacitance_policy = gap_policy_from_string(cs_policy);
      cs_out.emit(render(run_sweep(spec, cs_mat.load_db()), cs_out.format));
    } else if (modes->parsed()) {
      CellGeometry g = md_geom.resolve();
      MaterialDB db = md_mat.load_db();
      PlateConfig cfg = md_plate.resolve();
      const Material& m = db.at(md_mat.membrane);
      std::vector<ModeResult> result;
      if (md_method == "fd") {
        result = eigenfrequencies_fd(g, m, cfg, md_count);
      } else if (md_method == "bessel" && cfg.tension > 0.0) {
        throw ValidationError("modes: the characteristic-equation route needs tension = 0");
      } else {
        result = eigenfrequencies(g, m, cfg, md_count);
      }
      if (md_out.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < result.size(); ++i) {
          json o;
          o["mode"] = i + 1;
          o["azimuthal_order"] = result[i].azimuthal_order;
          o["radial_order"] = result[i].radial_order;
          o["frequency_MHz"] = result[i].frequency / 1e6;
          o["lambda"] = result[i].lambda;
          rows.push_back(o);
        }
        json root;
        root["rows"] = rows;
        md_out.emit(root.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "# " << kVersion << "\n# membrane = " << md_mat.membrane << "\n";
        os << "mode,azimuthal_order,radial_order,frequency(MHz),lambda\n";
        for (std::size_t i = 0; i < result.size(); ++i)
          os << i + 1 << "," << result[i].azimuthal_order << "," << result[i].radial_order << ","
             << format_value(result[i].frequency / 1e6) << "," << format_value(result[i].lambda)
             << "\n";
        md_out.emit(os.str());
      }
    } else if (freq_sweep->parsed()) {
      SweepSpec spec;
      spec.response = SweepResponse::Frequency;
      spec.vary = parse_vary(fs_vary);
      for (double v : make_grid(fs_from, fs_to, fs_step)) spec.grid.push_back(v * kMicron);
      spec.geometry = fs_geom.resolve();
      spec.membrane = fs_mat.membrane;
      spec.pillar = fs_mat.pillar;
      spec.plate = fs_plate.resolve();
      fs_out.emit(render(run_sweep(spec, fs_mat.load_db()), fs_out.format));
    } else if (disp->parsed()) {
      CellGeometry g = dp_geom.resolve();
      MaterialDB db = dp_mat.load_db();
      BiasPoint p = solve_equilibrium(g, db.at(dp_mat.membrane), dp_voltage,
                                      dp_plate.resolve(), dp_coupling.resolve(),
                                      db.at(dp_mat.pillar));
      if (dp_out.format == "json") {
        json o;
        o["voltage_V"] = p.voltage;
        o["displacement_um"] = p.center_displacement / kMicron;
        o["capacitance_nF"] = p.capacitance * 1e9;
        o["converged"] = p.converged;
        o["iterations"] = p.iterations;
        dp_out.emit(o.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "# " << kVersion << "\n";
        os << "voltage(V),displacement(um),capacitance(nF),converged,iterations\n";
        os << format_value(p.voltage) << "," << format_value(p.center_displacement / kMicron)
           << "," << format_value(p.capacitance * 1e9) << "," << (p.converged ? "yes" : "no")
           << "," << p.iterations << "\n";
        dp_out.emit(os.str());
      }
    } else if (disp_sweep->parsed()) {
      CellGeometry g = ds_geom.resolve();
      MaterialDB db = ds_mat.load_db();
      SweepResult r = displacement_voltage_sweep(g, db.at(ds_mat.membrane),
                                                 make_grid(ds_from, ds_to, ds_step),
                                                 ds_plate.resolve(), ds_coupling.resolve(),
                                                 db.at(ds_mat.pillar));
      ds_out.emit(render(r, ds_out.format));
    } else if (pull_in->parsed()) {
      CellGeometry g = pi_geom.resolve();
      MaterialDB db = pi_mat.load_db();
      double v = pull_in_voltage(g, db.at(pi_mat.membrane), pi_plate.resolve(),
                                 pi_coupling.resolve());
      if (pi_out.format == "json") {
        json o;
        o["pull_in_V"] = v;
        pi_out.emit(o.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "# " << kVersion << "\n";
        os << "pull_in(V)\n" << format_value(v) << "\n";
        pi_out.emit(os.str());
      }
    } else if (calibrate->parsed()) {
      CellGeometry g = cb_geom.resolve();
      MaterialDB db = cb_mat.load_db();
      auto rows = reference_rows_from_csv(cb_fixtures, cb_column);
      const Material& membrane = db.at(cb_mat.membrane);
      const Material& pillar = db.at(cb_mat.pillar);
      double ro = calibrate_overlap_radius(rows, g, membrane, pillar);
      CellGeometry fitted = g;
      fitted.overlap_radius = ro;
      if (cb_out.format == "json") {
        json o;
        o["overlap_radius_um"] = ro / kMicron;
        json res = json::array();
        for (const auto& [rc, c] : rows) {
          CellGeometry gg = fitted;
          gg.cavity_radius = rc;
          double model = cell_capacitance(gg, membrane, pillar).total;
          json e;
          e["cavity_radius_um"] = rc / kMicron;
          e["reference_nF"] = c * 1e9;
          e["model_nF"] = model * 1e9;
          e["relative_error"] = (model - c) / c;
          res.push_back(e);
        }
        o["residuals"] = res;
        cb_out.emit(o.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "# " << kVersion << "\n";
        os << "# overlap_radius(um) = " << format_value(ro / kMicron) << "\n";
        os << "cavity_radius(um),reference(nF),model(nF),relative_error\n";
        for (const auto& [rc, c] : rows) {
          CellGeometry gg = fitted;
          gg.cavity_radius = rc;
          double model = cell_capacitance(gg, membrane, pillar).total;
          os << format_value(rc / kMicron) << "," << format_value(c * 1e9) << ","
             << format_value(model * 1e9) << "," << format_value((model - c) / c) << "\n";
        }
        cb_out.emit(os.str());
      }
    } else if (compare->parsed()) {
      CellGeometry g = cm_geom.resolve();
      MaterialDB db = cm_mat.load_db();
      ComparisonReport report =
          compare_materials(g, db, cm_plate.resolve(), cm_coupling.resolve(), cm_voltage);
      if (cm_out.format == "json") {
        json rows = json::array();
        for (const ComparisonRow& row : report.rows) {
          json o;
          o["response"] = row.response;
          o["unit"] = row.unit;
          o["si3n4"] = row.si3n4;
          o["sic"] = row.sic;
          o["winner"] = row.winner;
          o["note"] = row.note;
          rows.push_back(o);
        }
        json root;
        root["rows"] = rows;
        cm_out.emit(root.dump(2) + "\n");
      } else {
        cm_out.emit(to_csv(report));
      }
    }
  } catch (const cmutsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
