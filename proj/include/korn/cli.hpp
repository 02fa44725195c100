#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "korn/calculus.hpp"
#include "korn/measure.hpp"

namespace korn {

/// Fixed command vocabulary, in the order run() executes them.
const std::vector<std::string>& command_vocabulary();

struct RunConfig {
  PotentialSpec potential;
  int quadrature_order = 0;  // 0 chooses automatically
  int basis_degree = 4;
  int field_degree = 3;
  double nullspace_tolerance = 1e-8;
  std::vector<std::string> commands;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  int field_count = 100;
  std::vector<PolyVectorField> user_fields;
  bool quiet = false;
};

Polynomial polynomial_from_json(const nlohmann::json& j);
nlohmann::json polynomial_to_json(const Polynomial& p);
PolyVectorField field_from_json(const nlohmann::json& j);

/// Throws korn::Error on unknown keys' values, unknown commands or bad types.
RunConfig parse_config(const nlohmann::json& j);

struct RunOutcome {
  nlohmann::json report;
  std::string spectra_csv;
  std::string inequalities_csv;
  /// Every holds flag true and every certificate matched.
  bool all_ok = true;
  std::vector<std::string> failures;
};

RunOutcome run(const RunConfig& config);

/// Writes report.json, spectra.csv and inequalities.csv into config.out_dir.
void write_outputs(const RunOutcome& outcome, const std::filesystem::path& out_dir);

}  // namespace korn
