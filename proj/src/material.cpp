#include "cmutsim/material.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmutsim/errors.hpp"

namespace cmutsim {

using nlohmann::json;

double Material::permittivity() const {
  if (!relative_permittivity)
    throw DomainError("material '" + name + "' is a conductor (no relative permittivity)");
  return *relative_permittivity;
}

void validate_material(const Material& m) {
  auto fail = [&](const std::string& field, double value, const std::string& constraint) {
    std::ostringstream os;
    os << "material '" << m.name << "': " << field << " = " << value
       << " violates " << constraint;
    throw ValidationError(os.str());
  };
  if (m.name.empty()) throw ValidationError("material with empty name");
  if (!(m.density > 0.0)) fail("density", m.density, "density > 0");
  if (!(m.youngs_modulus > 0.0)) fail("youngs_modulus", m.youngs_modulus, "youngs_modulus > 0");
  if (!(m.poissons_ratio >= 0.0 && m.poissons_ratio < 0.5))
    fail("poissons_ratio", m.poissons_ratio, "0 <= poissons_ratio < 0.5");
  if (m.relative_permittivity && !(*m.relative_permittivity >= 1.0))
    fail("relative_permittivity", *m.relative_permittivity, "relative_permittivity >= 1");
}

std::string normalize_material_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (std::size_t i = 0; i < name.size(); ++i) {
    // UTF-8 subscript digits U+2080..U+2089 are E2 82 80..89
    if (i + 2 < name.size() && static_cast<unsigned char>(name[i]) == 0xE2 &&
        static_cast<unsigned char>(name[i + 1]) == 0x82) {
      unsigned char b = static_cast<unsigned char>(name[i + 2]);
      if (b >= 0x80 && b <= 0x89) {
        out.push_back(static_cast<char>('0' + (b - 0x80)));
        i += 2;
        continue;
      }
    }
    out.push_back(name[i]);
  }
  return out;
}

MaterialDB MaterialDB::builtin() {
  MaterialDB db;
  db.upsert({"Si", 2329.0, 11.7, 170e9, 0.28});
  db.upsert({"Si3N4", 3100.0, 7.5, 250e9, 0.23});
  db.upsert({"SiC", 3216.0, 9.7, 748e9, 0.45});
  db.upsert({"SiO2", 2200.0, 3.9, 70e9, 0.17});
  db.upsert({"Al", 2700.0, std::nullopt, 70e9, 0.33});
  return db;
}

void MaterialDB::upsert(Material m) {
  m.name = normalize_material_name(m.name);
  validate_material(m);
  entries_[m.name] = std::move(m);
}

const Material& MaterialDB::at(std::string_view name) const {
  auto it = entries_.find(normalize_material_name(name));
  if (it == entries_.end())
    throw DomainError("unknown material '" + std::string(name) + "'");
  return it->second;
}

bool MaterialDB::contains(std::string_view name) const {
  return entries_.count(normalize_material_name(name)) > 0;
}

namespace {

Material material_from_json(const json& j, std::size_t index) {
  auto context = [&](const std::string& field) {
    return "materials[" + std::to_string(index) + "]." + field;
  };
  Material m;
  try {
    m.name = j.at("name").get<std::string>();
  } catch (const json::exception&) {
    throw ParseError("missing or non-string field " + context("name"));
  }
  auto number = [&](const char* field) {
    if (!j.contains(field))
      throw ParseError("material '" + m.name + "': missing field " + context(field));
    if (!j[field].is_number())
      throw ParseError("material '" + m.name + "': non-numeric field " + context(field));
    return j[field].get<double>();
  };
  m.density = number("density_kg_m3");
  m.youngs_modulus = number("youngs_modulus_gpa") * 1e9;  // GPa at the file boundary
  m.poissons_ratio = number("poissons_ratio");
  if (j.contains("relative_permittivity")) {
    if (!j["relative_permittivity"].is_number())
      throw ParseError("material '" + m.name + "': non-numeric field " +
                       context("relative_permittivity"));
    m.relative_permittivity = j["relative_permittivity"].get<double>();
  }
  return m;
}

}  // namespace

MaterialDB MaterialDB::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("material file: ") + e.what());
  }
  MaterialDB db = builtin();
  if (j.is_null() || (j.is_object() && j.empty())) return db;
  if (!j.is_object() || !j.contains("materials"))
    throw ParseError("material file: expected top-level object with a 'materials' array");
  const json& arr = j["materials"];
  if (!arr.is_array()) throw ParseError("material file: 'materials' is not an array");
  for (std::size_t i = 0; i < arr.size(); ++i)
    db.upsert(material_from_json(arr[i], i));
  return db;
}

MaterialDB MaterialDB::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open material file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    return builtin();  // empty file, built-ins only
  return from_json(text);
}

std::string MaterialDB::to_json() const {
  json arr = json::array();
  for (const auto& [name, m] : entries_) {
    json e;
    e["name"] = m.name;
    e["density_kg_m3"] = m.density;
    if (m.relative_permittivity) e["relative_permittivity"] = *m.relative_permittivity;
    e["youngs_modulus_gpa"] = m.youngs_modulus / 1e9;
    e["poissons_ratio"] = m.poissons_ratio;
    arr.push_back(e);
  }
  json root;
  root["materials"] = arr;
  return root.dump(2);
}

}  // namespace cmutsim
