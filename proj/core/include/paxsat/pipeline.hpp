#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paxsat/attribution.hpp"
#include "paxsat/effects.hpp"
#include "paxsat/smote.hpp"
#include "paxsat/synth.hpp"

namespace paxsat {

/// Model variants: the eight satisfaction-table columns plus the
/// interaction and delay-duration experiments.
enum class Variant {
  col1_baseline,
  col2_smote,
  col3_del30,
  col4_dissat,
  col5_full,
  col6_attribution,
  col7_board75,
  col8_board90,
  t4_interactions,
  t4_duration,
};
const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

enum class Stage {
  Generate,
  Ingest,
  Features,
  Smote,
  Attribute,
  Fit,
  Simulate,
  SmoteStudy,
  Report,
};

struct PipelineConfig {
  Variant variant = Variant::col5_full;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 1;

  bool generate = true;  // synthesize inputs; ingest mode when CSV paths are set
  SyntheticConfig synth;
  std::string surveys_path, flights_path, weather_path;

  FeatureSpec features;          // threshold/quantile/groups resolved by the variant
  std::optional<SmoteConfig> smote;
  PdsOptions lasso;
  FitOptions fit;
  bool delay_stage_random_intercept = true;

  std::vector<double> study_shares = {0.35, 0.40, 0.45, 0.50, 0.55};
  int study_replications = 20;
};

/// Key = value lines, '#' comments; dotted keys namespace the stages.
/// Unknown keys are a config error.
PipelineConfig load_config(const std::string& path);
/// Resolves variant-dependent fields (control groups, delay encoding inputs).
void apply_variant(PipelineConfig& cfg);
/// Delay-term layout implied by the variant.
DelayEncoding variant_encoding(Variant v);

struct PipelineResult {
  std::vector<std::string> artifacts;  // file names under out_dir
  std::string manifest_path;
  bool fit_converged = true;
};

/// Executes stages in order up to `upto`, writing per-stage artifacts and a
/// manifest (config hash + artifact checksums). In-progress artifacts keep a
/// .partial suffix when a stage fails.
PipelineResult run_pipeline(const PipelineConfig& cfg, Stage upto = Stage::Report);

/// FNV-1a 64 over a file's bytes, hex-encoded.
std::string file_checksum(const std::string& path);

// ---------------------------------------------------------------------------
// Reports

/// Per-variable mean/sd/min/max rows plus the grouped on-time-vs-delayed
/// mean-satisfaction CSV.
void emit_descriptives(const FeatureTable& table, const std::string& csv_path,
                       const std::string& groups_csv_path);

struct LabeledFit {
  std::string label;
  PostSelectionFit fit;
  std::string estimator = "Ordered Probit";
  bool smote = false;
  std::int64_t n = 0;
};

/// Side-by-side coefficient table with significance stars, "(lasso drop)"
/// markers, estimator and cluster lines, fit statistics and control-group
/// rows. The large date/airline/destination/time-to-flight dummy blocks are
/// summarized, not listed.
std::string emit_fit_table(const std::vector<LabeledFit>& fits);

/// Single-column delay-determinants report.
std::string emit_delay_table(const DelayStageFit& fit);

struct SmoteStudyRow {
  double share = 0;
  std::int64_t minority_size = 0;
  std::int64_t total_size = 0;
  double mean_estimate = 0;
  std::optional<double> se_estimate;  // absent for a single replication
};

/// Oversampling study: exact minority counts per share and the delay
/// coefficient's mean/SE over seeded replications.
std::vector<SmoteStudyRow> emit_smote_study(const DesignMatrix& design,
                                            const std::vector<double>& shares, int replications,
                                            std::uint64_t seed, const PdsOptions& pds,
                                            const FitOptions& fit, int threads,
                                            const std::string& csv_path);

}  // namespace paxsat
