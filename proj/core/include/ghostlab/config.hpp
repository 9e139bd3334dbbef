#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghostlab/errors.hpp"

namespace ghostlab {

/// Syntax errors, unknown or missing sections and keys, malformed values.
class ParseError : public Error {
 public:
  explicit ParseError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

/// Well-formed configuration describing an impossible experiment.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

enum class ExperimentKind {
  ClassicalCoherent,
  ClassicalIncoherent,
  TypeOne,
  TypeTwoAnalytic,
  TypeTwoMonteCarlo,
  Hbt,
  SpeckleSim,
  BeamSim,
  TurbulenceProbe,
};

std::string_view kind_name(ExperimentKind kind);
std::optional<ExperimentKind> kind_from_name(std::string_view name);
/// True for kinds that always draw random numbers.
bool kind_is_stochastic(ExperimentKind kind);

enum class ValueType { Length, Angle, Integer, Real, String, Boolean };

struct ConfigValue {
  ValueType type = ValueType::String;
  std::string text;
  std::size_t line = 0;
  /// Lengths in metres, angles in radians, plain reals.
  double number = 0.0;
  std::int64_t integer = 0;
  bool boolean = false;
};

/// Parsed "[section]" / "key = value" file. Lengths take a unit suffix
/// (m, mm, um, µm, nm, km); angles take rad, mrad, urad, µrad or deg.
class ExperimentConfig {
 public:
  ExperimentKind kind = ExperimentKind::ClassicalIncoherent;
  std::string text;
  std::uint64_t hash = 0;
  std::map<std::string, std::map<std::string, ConfigValue>> sections;

  bool has(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  const ConfigValue& at(const std::string& section, const std::string& key) const;

  double length(const std::string& section, const std::string& key) const;
  double angle(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  const std::string& string(const std::string& section, const std::string& key) const;
  bool boolean(const std::string& section, const std::string& key) const;

  double length_or(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t integer_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  std::string string_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
  bool boolean_or(const std::string& section, const std::string& key, bool fallback) const;

  /// Seed from [source] seed; present whenever the run is stochastic.
  std::optional<std::uint64_t> seed() const;
  /// True when the run draws random numbers (stochastic kind or an [events] section).
  bool stochastic() const;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Throws ParseError listing every problem with its line number.
ExperimentConfig parse_config(std::string_view text);

/// Throws ValidationError when the parsed values describe an impossible setup
/// (non-positive lengths, s_o = f, virtual images, missing seed, ...).
void validate_config(const ExperimentConfig& config);

/// Length with unit, e.g. "1.5 mm"; nullopt when malformed.
std::optional<double> parse_length_text(std::string_view text);
/// Angle with unit, e.g. "9.25 mrad"; nullopt when malformed.
std::optional<double> parse_angle_text(std::string_view text);

/// Reference text of the configuration keys, per experiment kind.
std::string config_documentation();

}  // namespace ghostlab
