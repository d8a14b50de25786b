#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paxsat/csv.hpp"
#include "paxsat/timeutil.hpp"

namespace paxsat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Terminal : std::uint8_t { T1 = 0, T2 = 1, T3 = 2 };

const char* to_string(Terminal t);
Terminal parse_terminal(const std::string& s);

/// Questionnaire age alternatives, in questionnaire order.
enum class AgeBracket : std::uint8_t {
  UpTo21 = 0,
  A22to25,
  A26to34,
  A35to44,
  A45to54,
  A55to64,
  A65to75,
  A76plus,
};
constexpr int kNumAgeBrackets = 8;

/// Questionnaire schooling alternatives.
enum class Schooling : std::uint8_t {
  NoneOrUnfinishedElementary = 0,
  Elementary,
  MiddleSchool,
  HighSchool,
  UnfinishedCollege,
  College,
};
constexpr int kNumSchooling = 6;

enum class Purpose : std::uint8_t { Leisure = 0, Business, Other };
enum class DestScope : std::uint8_t { Domestic = 0, International };

const char* to_string(AgeBracket a);
const char* to_string(Schooling s);
const char* to_string(Purpose p);
const char* to_string(DestScope d);
AgeBracket parse_age_bracket(const std::string& s);
Schooling parse_schooling(const std::string& s);
Purpose parse_purpose(const std::string& s);
DestScope parse_dest_scope(const std::string& s);

/// Per-domain rating questions; order fixed, used as array index.
enum class Question : std::uint8_t {
  Curbside = 0,
  CheckinTime,
  Wayfinding,
  WalkDistance,
  FlightInfo,
  SecurityTime,
  AirlineStaff,
  ShopQuality,
  ShopVariety,
  FoodQuality,
  FoodVariety,
  ShopPrice,
  FoodPrice,
  Wifi,
};
constexpr int kNumQuestions = 14;
const char* question_column(Question q);

struct SurveyResponse {
  std::string respondent_id;
  Minute interview_at{};
  Terminal terminal = Terminal::T2;
  std::string flight_no;
  int global_rating = 0;                       // 1..10
  std::array<int, kNumQuestions> ratings{};    // 0..5, 0 = missing
  AgeBracket age_bracket = AgeBracket::A26to34;
  Schooling schooling = Schooling::College;
  int boardings_12m = 0;
  Purpose purpose = Purpose::Leisure;
  DestScope dest_scope = DestScope::Domestic;
  bool is_connecting = false;

  int rating(Question q) const { return ratings[static_cast<int>(q)]; }
};

struct FlightRecord {
  std::string flight_no;
  Date date{};
  Minute sched_dep{};
  std::optional<Minute> actual_dep;  // absent => canceled
  std::string airline;
  std::string destination;
  double distance_mi = 0;
  int seats = 0;
  int pax = 0;
  int connecting_pax = 0;
  double cargo_kg = 0;
  bool jetbridge = false;
  Terminal terminal = Terminal::T2;
  bool overcapacity_flag = false;  // pax > seats seen on input

  bool canceled() const { return !actual_dep.has_value(); }
};

struct WeatherObservation {
  std::string station;  // home airport code or a destination code
  Minute at{};
  std::optional<double> ceiling_ft;
  std::optional<double> visibility_m;
  std::optional<double> gust_kt;
  bool wet_runway = false;
  bool thunderstorm = false;
  bool hail = false;
};

struct TerminalHourStats {
  Terminal terminal = Terminal::T2;
  Minute hour{};  // truncated to the hour
  std::int64_t pax_hour = 0;
  std::int64_t pax_day = 0;
  std::int64_t pax_delayed_hour = 0;
  std::int64_t dep_total_3h = 0;
  std::int64_t dep_delayed_3h = 0;
  std::int64_t arr_total_3h = 0;
  std::int64_t arr_delayed_3h = 0;
  std::int64_t movements_hour = 0;
  std::int64_t declared_capacity = 57;
  std::int64_t disrupted_hour = 0;
  double terminal_area_m2 = 1.0;
};

struct JoinedRecord {
  SurveyResponse survey;
  FlightRecord flight;
  bool weather_org = false;  // adverse-weather flag at origin
  bool weather_dst = false;  // adverse-weather flag at destination
  TerminalHourStats terminal_hour;
};

/// Airport-level constants needed to build TerminalHourStats from the flight
/// table; the raw sources publish these separately from the flight feed.
struct AirportProfile {
  std::string home_code = "GRU";
  std::int64_t declared_capacity = 57;  // movements per hour
  std::array<double, 3> terminal_area_m2 = {100000.0, 205000.0, 120000.0};
};

// ---------------------------------------------------------------------------
// Loading

std::vector<SurveyResponse> load_surveys(const std::string& path);
std::vector<FlightRecord> load_flights(const std::string& path);
std::vector<WeatherObservation> load_weather(const std::string& path);

// ---------------------------------------------------------------------------
// Joining and filtering

enum class RejectReason : std::uint8_t {
  NoFlightMatch = 0,
  TimeWindow,
  Connecting,
  Canceled,
};
const char* to_string(RejectReason r);

struct RejectedSurvey {
  SurveyResponse survey;
  RejectReason reason;
};

struct JoinResult {
  std::vector<JoinedRecord> joined;
  std::vector<RejectedSurvey> rejects;  // surveys with no flight match
};

/// Matches each survey to the flight sharing its flight number whose scheduled
/// departure is nearest the interview timestamp, attaches the nearest weather
/// observation within +-90 minutes of scheduled departure per station, and
/// attaches terminal-hour statistics built from the full flight table.
/// Output is sorted by respondent_id.
JoinResult join_records(const std::vector<SurveyResponse>& surveys,
                        const std::vector<FlightRecord>& flights,
                        const std::vector<WeatherObservation>& weather,
                        const AirportProfile& profile = {});

struct FilterResult {
  std::vector<JoinedRecord> kept;
  std::vector<RejectedSurvey> dropped;
};

/// Sample filters: |interview - sched_dep| <= 2h, no connecting passengers,
/// no canceled flights.
FilterResult filter_sample(const std::vector<JoinedRecord>& joined);

/// Terminal-hour aggregation used by join_records; exposed for direct use.
/// Rows whose destination equals profile.home_code are treated as arrival
/// movements; all other rows are departures.
std::map<std::pair<int, std::int64_t>, TerminalHourStats> build_hour_stats(
    const std::vector<FlightRecord>& flights, const AirportProfile& profile);

}  // namespace paxsat
