#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curlforce/fieldkit.hpp"
#include "curlforce/pathwork.hpp"

namespace curlforce::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_input = 2, exit_numerical = 3, exit_assertion = 4 };

/// Parsed and bound problem description. Expression sources are kept next to
/// the bound fields so reports can echo them.
struct ProblemFile {
  std::string origin;
  std::string canonical_json;  // compact dump used for the inputs digest
  int dimension = 2;
  ConstantTable constants;
  Box domain;
  double mass = 1.0;
  std::vector<std::string> force_sources;
  std::vector<VectorField> force;  // exactly one entry
  std::map<std::string, std::string> potential_sources;
  std::map<std::string, ScalarField> potentials;  // any of U, V, W
  std::vector<std::string> v_candidates;
  std::map<std::string, ParamPath> paths;
  std::map<std::string, Region> regions;

  const VectorField& field() const { return force.front(); }
  const ScalarField* potential(const std::string& name) const;
};

/// Throws InputError with a field path (e.g. "force[1]") or a line:column
/// position in the message.
ProblemFile parse_problem(std::string_view json_text, std::string_view origin);
ProblemFile load_problem(const std::filesystem::path& path);

/// "%.17g"; NaN and infinities are spelled nan, inf, -inf.
std::string format_number(double v);

/// Header row plus one line per row, comma separated, LF endings.
void emit_series(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curlforce::cli
