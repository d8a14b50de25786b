#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "paxsat/data.hpp"

namespace paxsat {

/// Feature-construction knobs. Reference levels are fixed to the survey's
/// base cases (Generation X, college schooling, experienced flier, Terminal 2,
/// year 2018, business/other purpose).
struct FeatureSpec {
  int delay_threshold_min = 15;  // 15 default; 30 for the regulatory variant
  double board_quantile = 0.75;  // time-to-flight quantile splitting NOT vs CALL

  /// Penalized control groups to assemble; subset of
  /// {"dissat","termdis","pandemic","timetoflt","dest","airl","date"}.
  std::set<std::string> include_groups;

  enum class PeerGroupMode {
    MonthHour,  // same clock hour pooled across the calendar month
    DateHour,   // that specific hour on that date
  };
  PeerGroupMode peer_mode = PeerGroupMode::MonthHour;
  bool dissat_include_self = false;

  /// Time-to-flight bin edges in minutes; the last bin is the reference.
  std::vector<int> timetoflt_edges_min = {0, 20, 40, 60, 80, 100, 120};
};

enum class Board : std::uint8_t { Not = 0, Call, Now };

struct TerminalMetrics {
  double termden, termdis, busyday, busyhour;
};
struct RunwayMetrics {
  double runwaycong, runwaydis, cascad_dep, cascad_arr;
};
struct DelayOutcomes {
  double del, deldur, deldur2;
};
struct PandemicDummies {
  double pre, early, later;
};
struct RespondentClass {
  double gensilen, genboom, genmillen, genz;
  double schlelem, schlmidd, schlhigh;
  double firsttflier, freqflier, expercdflier;
  double lsrflier, bsnflier;
};

/// Mean of 0-5 ratings rescaled to [0,1]; 0 means a missing comment and is
/// kept at face value.
double rescale_unit(std::span<const int> ratings);
/// Dissatisfaction variant: (5 - mean)/5, used for price perception.
double rescale_unit_dissat(std::span<const int> ratings);

/// Relative dissatisfaction of member self_index within its interview-hour
/// peer group: (5 - own rating) divided by the peers' mean dissatisfaction
/// (leave-one-out by default). A zero peer mean yields 0.
double dissat_ratio(std::span<const int> group_ratings, std::size_t self_index,
                    bool include_self = false);

TerminalMetrics terminal_metrics(const TerminalHourStats& s);
RunwayMetrics runway_metrics(const TerminalHourStats& s);

/// Adverse-weather alert: ceiling < 600 ft, visibility < 1500 m, gust > 27 kt
/// on a wet runway or > 33 kt on a dry one, thunderstorm, or hail. A missing
/// observation is never adverse.
bool weather_flags(const std::optional<WeatherObservation>& obs);

/// Generation / schooling / flier-type / purpose dummies.
///
/// Age brackets map to birth years via the bracket midpoint:
///   bracket      midpoint  ->  generation at interview year y
///   up to 21        18         y-18
///   22 to 25        23.5       y-24
///   26 to 34        30         y-30
///   35 to 44        39.5       y-40
///   45 to 54        49.5       y-50
///   55 to 64        59.5       y-60
///   65 to 75        70         y-70
///   76 or more      80         y-80
/// Generations: Silent <=1945, Boomer 1946-64, X 1965-76,
/// Millennial 1977-95, Z 1996-2015.
RespondentClass classify_respondent(const SurveyResponse& s, int interview_year);

Board board_window(Minute interview_at, Minute sched_dep, DestScope scope,
                   double quantile_threshold_min);

/// Throws std::logic_error when the flight is canceled; filter_sample must
/// have removed those.
DelayOutcomes delay_outcomes(const FlightRecord& f, int threshold_min);

PandemicDummies pandemic_dummies(Date d);

// ---------------------------------------------------------------------------
// Design matrix

struct DesignMatrix {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  std::vector<std::uint8_t> penalized;
  std::vector<std::string> cluster_id;
  std::vector<std::uint8_t> synthetic;  // empty unless oversampled
  std::vector<std::string> notes;       // dropped-column notes etc.
  int outcome_categories = 10;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  /// Column index by name, -1 when absent.
  int col(const std::string& name) const;
};

/// Per-record computed features plus categorical labels; the intermediate
/// between raw joined records and any design-matrix layout.
struct FeatureTable {
  std::vector<std::string> numeric_names;
  Eigen::MatrixXd numeric;  // n x f, column order == numeric_names
  Eigen::VectorXd aptsat;
  std::vector<std::string> dest;
  std::vector<std::string> airl;
  std::vector<std::string> date_label;
  std::vector<int> timetoflt_bin;  // index into spec.timetoflt_edges_min bins
  std::vector<std::string> cluster_id;
  double board_threshold_min = 0;  // realized time-to-flight quantile

  int feature(const std::string& name) const;  // -1 when absent
};

FeatureTable compute_features(const std::vector<JoinedRecord>& records, const FeatureSpec& spec);

/// Delay-term layout of the satisfaction design.
enum class DelayEncoding {
  None,              // roster only
  Del,               // DEL dummy, unpenalized
  DelBoard,          // DEL x BOARD(NOT/CALL/NOW)
  DelFlier,          // DEL x flier type + DEL x 4/5-rating moderators
  DurationSegments,  // DELDUR, DELDUR2 interacted with trip purpose
  Duration,          // DELDUR + DELDUR2
};

struct AssembleOptions {
  DelayEncoding delay = DelayEncoding::Del;
};

/// Satisfaction design: the fixed covariate roster (unpenalized), the delay
/// terms per options, then the penalized control blocks from include_groups.
/// Zero-variance columns are dropped with a note; exact duplicate columns are
/// an error naming both.
DesignMatrix assemble_design(const std::vector<JoinedRecord>& records, const FeatureSpec& spec,
                             const AssembleOptions& opt = {});
DesignMatrix assemble_from_table(const FeatureTable& table, const FeatureSpec& spec,
                                 const AssembleOptions& opt);

/// Delay-determinants design (outcome DEL): weather, terminal, flight and
/// congestion covariates plus the pandemic dummies.
DesignMatrix assemble_delay_design(const std::vector<JoinedRecord>& records,
                                   const FeatureSpec& spec);
DesignMatrix assemble_delay_design_from_table(const FeatureTable& table, const FeatureSpec& spec);

/// Names of the 20 roster covariates, in column order.
const std::vector<std::string>& roster_names();
/// Names of the delay-stage covariates, in column order.
const std::vector<std::string>& delay_roster_names();

void write_design_csv(const DesignMatrix& m, const std::string& csv_path,
                      const std::string& meta_path);
DesignMatrix read_design_csv(const std::string& csv_path, const std::string& meta_path);

}  // namespace paxsat
