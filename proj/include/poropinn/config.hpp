#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "poropinn/training.hpp"

namespace poropinn {

/// Everything a CLI run needs. Every key is optional in the config file and
/// falls back to the defaults below.
struct RunConfig {
  TrainConfig train;
  CurriculumConfig curriculum;
  std::string output_dir;

  double slice_t = 1.0;
  double profile_x = 1.0;
  int slice_nx = 50;
  int slice_nz = 50;
  int profile_nz = 50;
};

/// Parses flat `dotted.key = value` text. Blank lines and `#` comments are
/// ignored; unknown or repeated keys raise ConfigError naming the key.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Sets one key from its textual value (used by the parser and CLI overrides).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every key with its effective value, in a stable order; feeding the output
/// back through parse_config reproduces the same RunConfig.
std::string echo_config(const RunConfig& cfg);

std::vector<std::string> config_keys();

/// Cross-field checks for the given training mode (throws ConfigError).
void validate(const RunConfig& cfg, bool curriculum);

/// The TrainConfig for one mode, with the curriculum section attached when
/// `curriculum` is true.
TrainConfig train_config_for(const RunConfig& cfg, bool curriculum);

}  // namespace poropinn
