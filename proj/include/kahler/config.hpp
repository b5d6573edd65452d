#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "kahler/acceptance.hpp"
#include "kahler/error.hpp"

namespace kahler {

/// A config violates the schema; `key` is the offending "section.key".
class SchemaError : public Error {
 public:
  SchemaError(const std::string& key, const std::string& what) : Error(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Everything a run needs.  Invariants: ladders strictly increasing, all
/// tolerances > 0.
struct ExperimentConfig {
  std::string name;                      ///< empty: the subcommand name
  std::filesystem::path output = "out";
  bool plots = true;
  std::string dh_kind = "cp1";           ///< cp1 (criterion 3) or torus (flat point mass)
  SuiteOptions suite;
};

/// INI text with sections; every key optional, unknown keys rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& file);
/// Re-checks the invariants after command-line overrides.
void validate(const ExperimentConfig& c);

/// Rescales both ladders so the finest cp1 level is `finest` (entries are
/// multiplied by finest / ladder.back() and rounded).
void apply_resolution_override(ExperimentConfig& c, int finest);

/// Human-readable schema: every key with its type, default and meaning.
std::string schema_text();

}  // namespace kahler
