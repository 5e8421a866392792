#pragma once

#include "dpshdg/forms.hpp"
#include "dpshdg/mesh.hpp"
#include "dpshdg/mms.hpp"
#include "dpshdg/postproc.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpshdg {

enum class Scenario { Mms, WellboreVertical, WellboreHorizontal, RandomPerm };

std::string_view to_string(Scenario s);
/// Throws std::invalid_argument for unknown names.
Scenario parse_scenario(std::string_view name);

struct RunConfig {
  Scenario scenario = Scenario::Mms;
  int k = 2;
  std::optional<double> beta;  ///< default 10 k^2
  int levels = 5;              ///< mms refinement levels
  int n = 4;                   ///< intervals per unit length (mms: coarsest level)
  double mu = 1.0;
  double kappa_f = 1.0;
  double kappa_m = 1.0;
  double sigma = 0.5;
  double alpha = 1.0;
  double pressure_fracture = 0.0;  ///< wellbore trace pressure on Gamma^d
  double pressure_matrix = 0.0;
  std::uint64_t seed = 42;
  bool condense = false;
  bool write_fields = true;
  std::filesystem::path out = "out";

  /// Defaults of the scenario.
  static RunConfig defaults(Scenario s);
  [[nodiscard]] DiscretizationParams discretization() const;
  [[nodiscard]] UniformParams physical() const;
  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

/// Sets one `key = value` entry. Throws std::invalid_argument for unknown keys
/// or malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads a TOML-style file of `key = value` lines (comments with `#`, strings
/// optionally quoted). `[section]` headers are accepted; keys under `[build]`
/// are ignored so a written manifest can be read back.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Resolved configuration plus code version, as TOML.
void write_manifest(const RunConfig& config, std::ostream& out);

/// Per-cell log-uniform permeabilities: for every dual cell in index order,
/// kappa_f in [1e-2, 1] then kappa_m in [1e-6, 1e-4], each 10^(lo + u (hi - lo))
/// with u = (mt19937_64() >> 11) * 2^-53.
void sample_permeabilities(const Mesh& mesh, std::uint64_t seed, PhysicalParams& params);

struct LevelResult {
  ErrorReport errors;
  ConservationReport conservation;
  SolveReport solve;
  Index global_unknowns = 0;
};

struct MmsResult {
  std::vector<LevelResult> levels;
  std::optional<RateTable> table;
  std::vector<std::string> failures;  ///< threshold violations
};

struct FlowResult {
  ConservationReport conservation;
  SolveReport solve;
  Index global_unknowns = 0;
  Index cells = 0;
  double mean_speed = 0.0;         ///< |u_h| averaged over Omega
  double mean_matrix_speed = 0.0;  ///< |u_h^m| averaged over Omega^d
  std::vector<std::string> failures;
};

/// Thresholds on the final refinement interval (applied with >= 3 levels).
std::vector<std::string> check_rates(const RateTable& table, int k);

/// The runners write their files below config.out and throw std::runtime_error
/// on solver failure.
MmsResult run_mms(const RunConfig& config);
FlowResult run_wellbore(const RunConfig& config);
FlowResult run_random_perm(const RunConfig& config);

/// Version string and git revision compiled into the library.
std::string_view version();
std::string_view git_revision();

}  // namespace dpshdg
