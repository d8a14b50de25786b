#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "paxsat/data.hpp"

namespace paxsat {

/// How the satisfaction index responds to delays in the generated data.
enum class BlameMode : std::uint8_t {
  /// Latent index shifts by delay_effect_true * DEL (any delay).
  PooledDelay = 0,
  /// Latent index shifts by delay_effect_true * P(delay of internal origin);
  /// weather-driven delay risk has no effect. Used to exercise the
  /// internal/external attribution path.
  InternalOnly = 1,
};

struct SyntheticConfig {
  std::int64_t n_respondents = 2000;
  std::uint64_t seed = 1;

  /// Weight of the shared personality factor in domain ratings and in the
  /// global-rating latent index.
  double trait_loading = 0.75;
  /// True delay coefficient on the latent scale (unit-variance noise).
  double delay_effect_true = -0.25;
  /// How strongly hour-level congestion shifts the personality factor; this
  /// is the confounding channel between delay incidence and the error term.
  double confound_strength = 0.35;

  BlameMode blame_mode = BlameMode::PooledDelay;

  /// Marginal calibration targets, variable name -> (mean, sd). Defaults
  /// cover DEL, APTSAT and LOADFAC; unknown names are rejected.
  std::map<std::string, std::pair<double, double>> targets = default_targets();

  static std::map<std::string, std::pair<double, double>> default_targets();
};

/// Ground truth of a generated dataset. Scalars and the true coefficient
/// vector serialize to the truth file; per-row latents stay in memory for
/// validation.
struct TruthRecord {
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  double rho_true = 0;
  double trait_loading = 0;
  double confound_strength = 0;
  int blame_mode = 0;
  std::map<std::string, double> beta_true;   // latent-scale roster coefficients
  std::vector<double> cutpoints;             // satisfaction thresholds

  // Per-respondent latents (index-aligned with the survey vector).
  std::vector<double> composite_error;  // trait_loading*pi + idiosyncratic noise
  std::vector<double> personality;      // pi
  std::vector<double> congestion;       // hour-cell congestion driver
  std::vector<int> del;                 // realized >15-min delay dummy
  std::vector<double> internal_delay_prob;  // P(delay | congestion, no weather)
};

struct SyntheticDataset {
  std::vector<SurveyResponse> surveys;
  std::vector<FlightRecord> flights;
  std::vector<WeatherObservation> weather;
  TruthRecord truth;
};

/// Pure function of the config: same config => byte-identical tables.
SyntheticDataset synthesize_dataset(const SyntheticConfig& cfg);

void write_truth(const TruthRecord& truth, const std::string& path);

// CSV writers for the generated tables (schemas documented in the README).
void write_surveys_csv(const std::vector<SurveyResponse>& s, const std::string& path);
void write_flights_csv(const std::vector<FlightRecord>& f, const std::string& path);
void write_weather_csv(const std::vector<WeatherObservation>& w, const std::string& path);

}  // namespace paxsat
