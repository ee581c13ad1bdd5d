#pragma once

#include "smoothsaa/experiments.hpp"

#include <string>
#include <vector>

namespace smoothsaa::io {

struct OutputSpec {
  std::string name = "experiment";
  std::string dir = ".";
  /// Any of "csv", "md", "svg".
  std::vector<std::string> formats = {"csv", "md"};
};

struct RunConfig {
  ExperimentConfig experiment;
  OutputSpec outputs;
  /// Presets also emit the bias and variance pivot CSVs.
  bool pivot_csv = false;
};

/// Parses a JSON config document. Throws ConfigError naming the bad key.
RunConfig parse_config_text(const std::string& text);
/// Reads and parses a config file. Throws ConfigError naming the file when it cannot be read.
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
/// Built-in bias/variance table experiments. Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);

/// Checks a list of output formats. Throws ConfigError naming an unknown format.
void validate_formats(const std::vector<std::string>& formats);

}  // namespace smoothsaa::io
