#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ghostlab/config.hpp"
#include "ghostlab/masks.hpp"

namespace ghostlab {

const char* version();

struct RunOptions {
  /// Directory that relative mask paths are resolved against.
  std::filesystem::path config_dir = ".";
  /// Worker count; nullopt falls back to [experiment] threads, then all cores.
  std::optional<unsigned> threads;
  /// Also write "<name>_display.pgm" copies of inverted images turned upright.
  /// Data files are never flipped.
  bool flip_display = false;
};

struct Artifact {
  std::string file;
  /// "ghost", "classical-sim" or "classical-imaging".
  std::string philosophy;
};

struct RunResult {
  std::filesystem::path directory;
  std::filesystem::path manifest;
  std::vector<Artifact> artifacts;
  std::vector<std::pair<std::string, std::string>> derived;
};

/// Builds the mask described by [mask] (shape generator or PGM file).
ApertureMask build_mask(const ExperimentConfig& config, const std::filesystem::path& config_dir);

/// Runs a validated configuration and writes its artifacts and manifest into
/// [output] directory. Every file is written atomically.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Documentation of every file format the runner reads or writes.
std::string formats_documentation();

}  // namespace ghostlab
