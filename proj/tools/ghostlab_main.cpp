#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ghostlab/config.hpp"
#include "ghostlab/field_io.hpp"
#include "ghostlab/runner.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

std::optional<unsigned> env_threads() {
  const char* v = std::getenv("GHOSTLAB_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0') {
    std::cerr << "ghostlab: ignoring malformed GHOSTLAB_THREADS='" << v << "'\n";
    return std::nullopt;
  }
  return static_cast<unsigned>(n);
}

void report(const char* what, const std::vector<std::string>& messages, const std::string& path) {
  std::cerr << path << ": " << what << "\n";
  for (const auto& m : messages) std::cerr << "  " << m << "\n";
}

// Parses and validates; returns the exit code on failure.
int load(const std::string& path, ghostlab::ExperimentConfig& out) {
  std::string text;
  try {
    text = ghostlab::read_file(path);
  } catch (const std::exception& e) {
    std::cerr << "ghostlab: " << e.what() << "\n";
    return kExitParse;
  }
  try {
    out = ghostlab::parse_config(text);
  } catch (const ghostlab::ParseError& e) {
    report("parse error", e.messages(), path);
    return kExitParse;
  }
  try {
    ghostlab::validate_config(out);
  } catch (const ghostlab::ValidationError& e) {
    report("invalid configuration", e.messages(), path);
    return kExitValidation;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghostlab: ghost imaging and HBT simulation runner"};
  app.set_version_flag("--version", std::string(ghostlab::version()));
  app.require_subcommand(1);

  std::string run_path;
  bool flip = false;
  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  run->add_option("config", run_path, "Configuration file")->required();
  run->add_flag("--flip", flip, "Also write upright display copies of inverted images");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a configuration");
  validate->add_option("config", validate_path, "Configuration file")->required();

  auto* formats = app.add_subcommand("formats", "Describe the file formats and configuration keys");

  CLI11_PARSE(app, argc, argv);

  if (*formats) {
    std::cout << ghostlab::formats_documentation() << "\n" << ghostlab::config_documentation();
    return 0;
  }

  const std::string& path = *run ? run_path : validate_path;
  ghostlab::ExperimentConfig config;
  if (const int code = load(path, config)) return code;

  if (*validate) {
    std::cout << path << ": ok (kind " << ghostlab::kind_name(config.kind) << ")\n";
    return 0;
  }

  ghostlab::RunOptions options;
  options.config_dir = std::filesystem::path(path).parent_path();
  if (options.config_dir.empty()) options.config_dir = ".";
  options.threads = env_threads();
  options.flip_display = flip;
  try {
    const ghostlab::RunResult r = ghostlab::run_experiment(config, options);
    for (const auto& a : r.artifacts) std::cout << (r.directory / a.file).string() << "\n";
    std::cout << r.manifest.string() << "\n";
    for (const auto& [k, v] : r.derived) std::cout << "  " << k << " = " << v << "\n";
  } catch (const ghostlab::ValidationError& e) {
    report("invalid configuration", e.messages(), path);
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << path << ": run failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
