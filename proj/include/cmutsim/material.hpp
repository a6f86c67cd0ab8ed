#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cmutsim {

/// Named isotropic solid. All quantities strict SI; GPa inputs are converted
/// at ingestion. Conductors carry no permittivity at all, so any dielectric
/// use of one is a hard error rather than a silent sentinel.
struct Material {
  std::string name;
  double density = 0.0;          // kg/m^3
  std::optional<double> relative_permittivity;  // absent for conductors
  double youngs_modulus = 0.0;   // Pa
  double poissons_ratio = 0.0;

  // Permittivity of a dielectric; DomainError for conductors.
  double permittivity() const;

  bool operator==(const Material&) const = default;
};

// ValidationError naming the offending field and value.
void validate_material(const Material& m);

// Map Unicode subscript digits to ASCII so "Si₃N₄" and "Si3N4" are the
// same key.
std::string normalize_material_name(std::string_view name);

/// Immutable after construction; safe for concurrent reads.
class MaterialDB {
 public:
  // The five built-in materials: Si, Si3N4, SiC, SiO2, Al.
  static MaterialDB builtin();

  // builtin() overlaid with the entries of a JSON material file; file
  // entries with the same name replace built-ins.
  static MaterialDB load(const std::filesystem::path& file);
  static MaterialDB from_json(const std::string& text);

  std::string to_json() const;

  const Material& at(std::string_view name) const;  // DomainError if unknown
  bool contains(std::string_view name) const;

  const std::map<std::string, Material>& entries() const { return entries_; }

  bool operator==(const MaterialDB&) const = default;

 private:
  void upsert(Material m);  // validates, then inserts or replaces

  std::map<std::string, Material> entries_;
};

}  // namespace cmutsim
