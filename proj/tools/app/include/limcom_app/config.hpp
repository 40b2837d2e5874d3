#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "limcom/boundary.hpp"
#include "limcom/model.hpp"

namespace limcom::app {

struct RunConfig {
  ModelParams params;

  int boundary_steps = 256;
  BoundaryRule boundary_rule = BoundaryRule::GaussSqrt;
  double quad_tol = 1e-9;
  double tail_tol = 1e-9;

  int fd_time_steps = 400;
  int fd_space_steps = 400;

  int sim_steps = 600;
  std::size_t paths = 1000;      // Monte Carlo paths for `simulate`
  std::size_t csv_paths = 3;     // contract paths written as CSV
  std::uint64_t seed = 42;

  std::filesystem::path out_dir = ".";

  /// Canonical `key=value` lines, one per field, in a fixed order.
  std::string canonical() const;
  /// FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
  /// Comment line for CSV headers.
  std::string comment() const;

  BoundaryOptions boundary_options() const;
};

/// Apply one `key=value` assignment. Throws CONFIG_ERROR on unknown keys or
/// unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_assignment(RunConfig& cfg, const std::string& assignment);

/// Flat `key = value` text; `#` starts a comment, blank lines are ignored.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Knobs must be positive; model parameters are checked by derive_constants.
DerivedConstants validate(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace limcom::app
