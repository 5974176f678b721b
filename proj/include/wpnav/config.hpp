#pragma once

#include <filesystem>
#include <iosfwd>

#include "wpnav/experiment.hpp"

namespace wpnav {

/// Reads an `EXPERIMENT 1` key-value file. Relative paths resolve against `base_dir`.
bench::ExperimentConfig parse_experiment_config(std::istream& in, const std::filesystem::path& base_dir);
bench::ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Writes the configuration back in the same dialect, every key spelled out.
void write_experiment_config(std::ostream& out, const bench::ExperimentConfig& cfg);

}  // namespace wpnav
