#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmutsim {

enum class SweepParameter { CavityRadius, GapHeight, MembraneThickness, Voltage };
enum class SweepResponse { Capacitance, Frequency, Displacement, SoftenedFrequency };

std::string to_string(SweepParameter p);
std::string to_string(SweepResponse r);

struct SweepColumn {
  std::string name;
  std::string unit;
};

struct SweepRow {
  double param = 0.0;               // display units (um, V)
  std::vector<double> values;       // display units (nF, MHz, um)
  std::string flag;                 // empty, or e.g. "non-converged"
};

/// Tabular result of one swept parameter. Rows are stored in the same
/// display units the CSV carries (um, V, nF, MHz) so emitted files diff
/// directly against the reference fixtures.
struct SweepResult {
  SweepColumn param;                   // e.g. {"cavity_radius", "um"}
  std::vector<SweepColumn> responses;  // e.g. {{"capacitance", "nF"}}
  bool has_flags = false;
  std::vector<SweepRow> rows;
  std::vector<std::string> metadata;   // emitted as '#'-prefixed lines

  std::size_t response_index(const std::string& name) const;  // DomainError if absent
};

// CSV schema: '#'-prefixed metadata lines, then
//   param_name(unit),response(unit)[,...][,flags]
// Values print with six significant digits; two runs over identical input
// are byte-identical.
void write_csv(const SweepResult& result, std::ostream& out);
std::string to_csv(const SweepResult& result);

SweepResult read_csv(std::istream& in);
SweepResult read_csv_file(const std::string& path);

// Six-significant-digit value formatting shared by CSV and the CLI.
std::string format_value(double v);

}  // namespace cmutsim
