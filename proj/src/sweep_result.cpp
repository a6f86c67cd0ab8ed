#include "cmutsim/sweep_result.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cmutsim/errors.hpp"

namespace cmutsim {

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::CavityRadius: return "cavity_radius";
    case SweepParameter::GapHeight: return "gap_height";
    case SweepParameter::MembraneThickness: return "membrane_thickness";
    case SweepParameter::Voltage: return "voltage";
  }
  return "?";
}

std::string to_string(SweepResponse r) {
  switch (r) {
    case SweepResponse::Capacitance: return "capacitance";
    case SweepResponse::Frequency: return "frequency";
    case SweepResponse::Displacement: return "displacement";
    case SweepResponse::SoftenedFrequency: return "softened_frequency";
  }
  return "?";
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::size_t SweepResult::response_index(const std::string& name) const {
  for (std::size_t i = 0; i < responses.size(); ++i)
    if (responses[i].name == name) return i;
  throw DomainError("sweep result has no response column '" + name + "'");
}

void write_csv(const SweepResult& result, std::ostream& out) {
  for (const std::string& line : result.metadata) out << "# " << line << "\n";
  out << result.param.name << "(" << result.param.unit << ")";
  for (const SweepColumn& c : result.responses) out << "," << c.name << "(" << c.unit << ")";
  if (result.has_flags) out << ",flags";
  out << "\n";
  for (const SweepRow& row : result.rows) {
    out << format_value(row.param);
    for (double v : row.values) out << "," << format_value(v);
    if (result.has_flags) out << "," << row.flag;
    out << "\n";
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream os;
  write_csv(result, os);
  return os.str();
}

namespace {

SweepColumn parse_column(const std::string& token, int line_no) {
  auto open = token.find('(');
  auto close = token.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    std::ostringstream os;
    os << "csv line " << line_no << ": column '" << token << "' is not name(unit)";
    throw ParseError(os.str());
  }
  return {token.substr(0, open), token.substr(open + 1, close - open - 1)};
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& token, int line_no, const std::string& column) {
  try {
    std::size_t pos = 0;
    double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << "csv line " << line_no << ": field '" << column << "' has non-numeric value '"
       << token << "'";
    throw ParseError(os.str());
  }
}

}  // namespace

SweepResult read_csv(std::istream& in) {
  SweepResult result;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = line.find_first_not_of("# ");
      result.metadata.push_back(start == std::string::npos ? "" : line.substr(start));
      continue;
    }
    std::vector<std::string> tokens = split(line);
    if (!header_seen) {
      if (tokens.size() < 2) throw ParseError("csv: header needs a parameter and a response column");
      result.param = parse_column(tokens[0], line_no);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i] == "flags") {
          if (i + 1 != tokens.size())
            throw ParseError("csv: flags must be the last column");
          result.has_flags = true;
        } else {
          result.responses.push_back(parse_column(tokens[i], line_no));
        }
      }
      header_seen = true;
      continue;
    }
    std::size_t expected = 1 + result.responses.size() + (result.has_flags ? 1 : 0);
    if (tokens.size() != expected) {
      std::ostringstream os;
      os << "csv line " << line_no << ": expected " << expected << " fields, got "
         << tokens.size();
      throw ParseError(os.str());
    }
    SweepRow row;
    row.param = parse_number(tokens[0], line_no, result.param.name);
    for (std::size_t i = 0; i < result.responses.size(); ++i)
      row.values.push_back(parse_number(tokens[1 + i], line_no, result.responses[i].name));
    if (result.has_flags) row.flag = tokens.back();
    result.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError("csv: no header row");
  return result;
}

SweepResult read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open csv file '" + path + "'");
  return read_csv(in);
}

}  // namespace cmutsim
