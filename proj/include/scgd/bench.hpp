#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scgd/gradients.hpp"
#include "scgd/objectives.hpp"
#include "scgd/optimizer.hpp"
#include "scgd/policies.hpp"

namespace scgd {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class MuRule { OneOverN, Fixed };

struct ObjectiveConfig {
  ObjectiveKind kind = ObjectiveKind::Ridge;
  BlockStructureConfig data;       // Ridge / Logistic; label model follows kind
  std::filesystem::path data_file; // overrides the generator when set
  MuRule mu_rule = MuRule::OneOverN;
  double mu = 0.0;                 // Fixed only
  Index dim = 2;                   // toys only
};

/// Builds the objective (generating or loading data).
Objective build_objective(const ObjectiveConfig& cfg);

/// Resolved regularization for a given sample count.
double resolve_mu(const ObjectiveConfig& cfg, Index n);

/// Method tokens:
///   full                 every coordinate per step with the base estimator
///   nesterov             Gaussian smoothing, full vector
///   uniform, uniform-is  uniform single-coordinate sampling
///   musketeer-{avg,abs,sqr}[-is]
struct MethodChoice {
  std::string name;
  PolicyKind policy = PolicyKind::Uniform;
  GainVariant variant = GainVariant::Avg;
  bool smoothing = false;  // nesterov
};

MethodChoice parse_method(const std::string& token);

struct ExperimentConfig {
  ObjectiveConfig objective;
  EstimatorSpec estimator;  // FiniteDifference or FirstOrder
  std::vector<std::string> methods;
  MusketeerConfig musketeer;  // variant comes from the method token
  Schedule schedule;
  IsScaling is_scaling = IsScaling::Normalized;
  std::vector<std::uint64_t> seeds;
  Index budget_passes = 100;
  double checkpoint_growth = 1.05;
  std::optional<Vector> theta0;  // zeros when absent
  bool override_conditions = false;
  bool timing = false;  // wall_ms stays 0 unless set, keeping CSVs byte-stable

  void validate() const;
};

/// Steps in one normalized pass: p for single-coordinate and smoothing
/// methods, 1 for a full-vector estimate.
Index steps_per_pass(const MethodChoice& method, Index p);

/// Engine-level method: stride = steps per pass so the schedule index is the
/// pass count; smoothing steps are scaled by 1 / p.
MethodSpec resolve_method(const MethodChoice& method, const ExperimentConfig& cfg, Index p);

/// Normalized-pass grid: 0, then max(prev + 1, ceil(prev * growth)), and the
/// final budget.
std::vector<Index> checkpoint_passes(Index budget, double growth);

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct CheckpointRow {
  Index step = 0;
  std::int64_t queries = 0;
  double passes = 0.0;
  double gap = 0.0;
  double wall_ms = 0.0;
};

struct RunRecord {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<CheckpointRow> checkpoints;
  bool failed = false;
  std::string failure;
};

struct MethodReport {
  std::string method;
  ValidationReport conditions;
  nlohmann::json final_policy;  // first seed
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // ordered by (method, seed) as configured
  std::vector<MethodReport> methods;
  Optimum optimum;
  Index n = 0;
  Index p = 0;
  double mu = 0.0;

  bool any_failed() const;
};

/// Runs every (method, seed) pair on a pool of `parallel` workers (0 means
/// hardware concurrency). One dataset is shared by all runs; the seed only
/// drives the optimizer streams. Throws InvalidArgument when a method fails
/// validate_conditions and the config does not override.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned parallel = 0);

// ---------------------------------------------------------------------------
// Aggregation and artifacts
// ---------------------------------------------------------------------------

struct AggregatePoint {
  double passes = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one seed
};

struct AggregateCurve {
  std::string method;
  std::vector<AggregatePoint> points;
};

/// Pointwise statistics per method, methods in order of first appearance.
/// Throws InvalidArgument when records of one method have different grids.
std::vector<AggregateCurve> aggregate(const std::vector<RunRecord>& records);

inline constexpr const char* kRunsHeader = "method,seed,step,queries,passes,gap,wall_ms";
inline constexpr const char* kAggregateHeader = "method,passes,gap_mean,gap_median,gap_std";

std::string runs_csv(const std::vector<RunRecord>& records);
std::string aggregate_csv(const std::vector<AggregateCurve>& curves);
std::vector<RunRecord> parse_runs_csv(const std::string& text);
std::vector<AggregateCurve> parse_aggregate_csv(const std::string& text);

/// Log-y line chart of the mean gap, clipped below at 1e-12.
std::string render_svg(const std::vector<AggregateCurve>& curves, const std::string& title);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct PresetSetting {
  std::string name;  // file stem
  ExperimentConfig config;
};

/// Settings of a named profile; `scale` multiplies n (rounded, at least
/// 10). Throws InvalidArgument for unknown names.
std::vector<PresetSetting> preset(const std::string& profile, double scale = 1.0);

const std::vector<std::string>& preset_names();

struct ReproduceOptions {
  double scale = 1.0;
  std::optional<Index> seeds;          // replaces the preset seed count
  std::vector<std::string> methods;    // keep only these when non-empty
  std::vector<std::string> settings;   // keep only these setting names when non-empty
  unsigned parallel = 0;
};

struct ReproduceOutput {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> failures;  // one line per failed run
};

/// Runs every setting of a profile and writes <setting>.csv and <setting>.svg
/// into `out_dir`.
ReproduceOutput reproduce_figure(const std::string& profile, const std::filesystem::path& out_dir,
                                 const ReproduceOptions& options = {});

}  // namespace scgd
