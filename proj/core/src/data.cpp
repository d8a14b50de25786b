#include "paxsat/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "paxsat/features.hpp"

namespace paxsat {

namespace {

template <typename Enum>
struct LabelTable {
  const char* const* labels;
  int count;
  const char* what;

  const char* to_string(Enum e) const { return labels[static_cast<int>(e)]; }

  Enum parse(const std::string& s) const {
    for (int i = 0; i < count; ++i)
      if (s == labels[i]) return static_cast<Enum>(i);
    std::string msg = std::string("unknown ") + what + " '" + s + "'; valid labels:";
    for (int i = 0; i < count; ++i) msg += std::string(i ? ", '" : " '") + labels[i] + "'";
    throw DataError(msg);
  }
};

const char* const kTerminalLabels[] = {"T1", "T2", "T3"};
const LabelTable<Terminal> kTerminals{kTerminalLabels, 3, "terminal"};

const char* const kAgeLabels[] = {"up to 21", "22 to 25", "26 to 34", "35 to 44",
                                  "45 to 54", "55 to 64", "65 to 75", "76 or more"};
const LabelTable<AgeBracket> kAges{kAgeLabels, kNumAgeBrackets, "age bracket"};

const char* const kSchoolingLabels[] = {"illiterate or unfinished elementary",
                                        "elementary",
                                        "middle school",
                                        "high school",
                                        "unfinished college",
                                        "college"};
const LabelTable<Schooling> kSchoolings{kSchoolingLabels, kNumSchooling, "schooling"};

const char* const kPurposeLabels[] = {"leisure", "business", "other"};
const LabelTable<Purpose> kPurposes{kPurposeLabels, 3, "purpose"};

const char* const kScopeLabels[] = {"domestic", "international"};
const LabelTable<DestScope> kScopes{kScopeLabels, 2, "destination scope"};

const char* const kQuestionColumns[kNumQuestions] = {
    "curbside",      "checkin_time", "wayfinding",   "walk_distance", "flight_info",
    "security_time", "airline_staff", "shop_quality", "shop_variety",  "food_quality",
    "food_variety",  "shop_price",   "food_price",   "wifi"};

const char* const kRejectLabels[] = {"no-flight-match", "time-window", "connecting", "canceled"};

}  // namespace

const char* to_string(Terminal t) { return kTerminals.to_string(t); }
Terminal parse_terminal(const std::string& s) { return kTerminals.parse(s); }
const char* to_string(AgeBracket a) { return kAges.to_string(a); }
AgeBracket parse_age_bracket(const std::string& s) { return kAges.parse(s); }
const char* to_string(Schooling s) { return kSchoolings.to_string(s); }
Schooling parse_schooling(const std::string& s) { return kSchoolings.parse(s); }
const char* to_string(Purpose p) { return kPurposes.to_string(p); }
Purpose parse_purpose(const std::string& s) { return kPurposes.parse(s); }
const char* to_string(DestScope d) { return kScopes.to_string(d); }
DestScope parse_dest_scope(const std::string& s) { return kScopes.parse(s); }
const char* question_column(Question q) { return kQuestionColumns[static_cast<int>(q)]; }
const char* to_string(RejectReason r) { return kRejectLabels[static_cast<int>(r)]; }

// ---------------------------------------------------------------------------
// Loaders

std::vector<SurveyResponse> load_surveys(const std::string& path) {
  CsvTable t = read_csv(path);
  const std::size_t c_id = t.col("respondent_id");
  const std::size_t c_at = t.col("interview_at");
  const std::size_t c_term = t.col("terminal");
  const std::size_t c_fno = t.col("flight_no");
  const std::size_t c_glob = t.col("global_rating");
  std::array<std::size_t, kNumQuestions> c_q{};
  for (int q = 0; q < kNumQuestions; ++q) c_q[q] = t.col(kQuestionColumns[q]);
  const std::size_t c_age = t.col("age_bracket");
  const std::size_t c_sch = t.col("schooling");
  const std::size_t c_brd = t.col("boardings_12m");
  const std::size_t c_pur = t.col("purpose");
  const std::size_t c_scope = t.col("dest_scope");
  const std::size_t c_conn = t.col("is_connecting");

  std::vector<SurveyResponse> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t rowno = r + 1;
    SurveyResponse s;
    s.respondent_id = row[c_id];
    try {
      s.interview_at = parse_minute(row[c_at]);
    } catch (const std::exception& e) {
      throw DataError("row " + std::to_string(rowno) + ", column 'interview_at': " + e.what());
    }
    s.terminal = parse_terminal(row[c_term]);
    s.flight_no = row[c_fno];
    s.global_rating = static_cast<int>(parse_int_field(row[c_glob], rowno, "global_rating"));
    if (s.global_rating < 1 || s.global_rating > 10)
      throw DataError("row " + std::to_string(rowno) +
                      ", column 'global_rating': value " + std::to_string(s.global_rating) +
                      " outside 1..10");
    for (int q = 0; q < kNumQuestions; ++q) {
      const std::string& cell = row[c_q[q]];
      int v = cell.empty() ? 0  // missing comment, kept as zero on the original scale
                           : static_cast<int>(parse_int_field(cell, rowno, kQuestionColumns[q]));
      if (v < 0 || v > 5)
        throw DataError("row " + std::to_string(rowno) + ", column '" +
                        kQuestionColumns[q] + "': rating " + std::to_string(v) +
                        " outside 0..5");
      s.ratings[q] = v;
    }
    s.age_bracket = parse_age_bracket(row[c_age]);
    s.schooling = parse_schooling(row[c_sch]);
    s.boardings_12m = static_cast<int>(parse_int_field(row[c_brd], rowno, "boardings_12m"));
    if (s.boardings_12m < 0)
      throw DataError("row " + std::to_string(rowno) + ": negative boardings_12m");
    s.purpose = parse_purpose(row[c_pur]);
    s.dest_scope = parse_dest_scope(row[c_scope]);
    s.is_connecting = parse_int_field(row[c_conn], rowno, "is_connecting") != 0;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<FlightRecord> load_flights(const std::string& path) {
  CsvTable t = read_csv(path);
  const std::size_t c_fno = t.col("flight_no");
  const std::size_t c_date = t.col("date");
  const std::size_t c_sched = t.col("sched_dep");
  const std::size_t c_act = t.col("actual_dep");
  const std::size_t c_airl = t.col("airline");
  const std::size_t c_dest = t.col("destination");
  const std::size_t c_dist = t.col("distance_mi");
  const std::size_t c_seats = t.col("seats");
  const std::size_t c_pax = t.col("pax");
  const std::size_t c_conn = t.col("connecting_pax");
  const std::size_t c_cargo = t.col("cargo_kg");
  const std::size_t c_jb = t.col("jetbridge");
  const std::size_t c_term = t.col("terminal");

  std::vector<FlightRecord> out;
  out.reserve(t.rows.size());
  std::set<std::pair<std::string, std::int32_t>> keys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t rowno = r + 1;
    FlightRecord f;
    f.flight_no = row[c_fno];
    try {
      f.date = parse_date(row[c_date]);
      f.sched_dep = parse_minute(row[c_sched]);
      if (!row[c_act].empty()) f.actual_dep = parse_minute(row[c_act]);
    } catch (const std::exception& e) {
      throw DataError("row " + std::to_string(rowno) + ": " + e.what());
    }
    if (!keys.insert({f.flight_no, f.date.days}).second)
      throw DataError("row " + std::to_string(rowno) + ": duplicate flight key (" +
                      f.flight_no + ", " + format_date(f.date) + ")");
    f.airline = row[c_airl];
    f.destination = row[c_dest];
    f.distance_mi = parse_double_field(row[c_dist], rowno, "distance_mi");
    f.seats = static_cast<int>(parse_int_field(row[c_seats], rowno, "seats"));
    f.pax = static_cast<int>(parse_int_field(row[c_pax], rowno, "pax"));
    f.connecting_pax = static_cast<int>(parse_int_field(row[c_conn], rowno, "connecting_pax"));
    f.cargo_kg = parse_double_field(row[c_cargo], rowno, "cargo_kg");
    f.jetbridge = parse_int_field(row[c_jb], rowno, "jetbridge") != 0;
    f.terminal = parse_terminal(row[c_term]);
    if (f.distance_mi <= 0 || f.seats <= 0 || f.pax < 0 || f.cargo_kg < 0)
      throw DataError("row " + std::to_string(rowno) + ": non-positive distance/seats or negative pax/cargo");
    if (f.connecting_pax > f.pax)
      throw DataError("row " + std::to_string(rowno) + ": connecting_pax exceeds pax");
    f.overcapacity_flag = f.pax > f.seats;  // admissible; load factor caps at 1 downstream
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<WeatherObservation> load_weather(const std::string& path) {
  CsvTable t = read_csv(path);
  const std::size_t c_st = t.col("station");
  const std::size_t c_at = t.col("at");
  const std::size_t c_ceil = t.col("ceiling_ft");
  const std::size_t c_vis = t.col("visibility_m");
  const std::size_t c_gust = t.col("gust_kt");
  const std::size_t c_wet = t.col("wet_runway");
  const std::size_t c_ts = t.col("thunderstorm");
  const std::size_t c_hail = t.col("hail");

  auto opt_field = [](const std::string& s, std::size_t rowno,
                      const char* col) -> std::optional<double> {
    if (s.empty() || s == "-") return std::nullopt;  // sensor missing, never zero-filled
    return parse_double_field(s, rowno, col);
  };

  std::vector<WeatherObservation> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t rowno = r + 1;
    WeatherObservation w;
    w.station = row[c_st];
    try {
      w.at = parse_minute(row[c_at]);
    } catch (const std::exception& e) {
      throw DataError("row " + std::to_string(rowno) + ", column 'at': " + e.what());
    }
    w.ceiling_ft = opt_field(row[c_ceil], rowno, "ceiling_ft");
    w.visibility_m = opt_field(row[c_vis], rowno, "visibility_m");
    w.gust_kt = opt_field(row[c_gust], rowno, "gust_kt");
    w.wet_runway = parse_int_field(row[c_wet], rowno, "wet_runway") != 0;
    w.thunderstorm = parse_int_field(row[c_ts], rowno, "thunderstorm") != 0;
    w.hail = parse_int_field(row[c_hail], rowno, "hail") != 0;
    out.push_back(std::move(w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Terminal-hour statistics

namespace {

constexpr std::int64_t kDelayRuleMin = 15;  // fixed 15-minute rule for congestion metrics

bool is_delayed(const FlightRecord& f) {
  return f.actual_dep && (*f.actual_dep - f.sched_dep) > kDelayRuleMin;
}

}  // namespace

std::map<std::pair<int, std::int64_t>, TerminalHourStats> build_hour_stats(
    const std::vector<FlightRecord>& flights, const AirportProfile& profile) {
  struct HourAgg {
    std::int64_t dep_ops = 0, arr_ops = 0, dep_delayed = 0, arr_delayed = 0;
    std::int64_t scheduled = 0, disrupted = 0;
  };
  std::map<std::int64_t, HourAgg> airport;                       // hour -> counts
  std::map<std::pair<int, std::int64_t>, std::int64_t> pax_h;    // (term, hour) -> pax
  std::map<std::pair<int, std::int64_t>, std::int64_t> pax_h_d;  // delayed pax
  std::map<std::pair<int, std::int32_t>, std::int64_t> pax_d;    // (term, date) -> pax

  for (const auto& f : flights) {
    const bool arrival = f.destination == profile.home_code;
    const std::int64_t hour = floor_hour(f.sched_dep).v;
    auto& agg = airport[hour];
    agg.scheduled += 1;
    if (f.canceled()) {
      agg.disrupted += 1;
    } else {
      bool late = is_delayed(f);
      if (late) agg.disrupted += 1;
      if (arrival) {
        agg.arr_ops += 1;
        if (late) agg.arr_delayed += 1;
      } else {
        agg.dep_ops += 1;
        if (late) agg.dep_delayed += 1;
      }
    }
    if (!f.canceled()) {
      // Terminal pax counts cover passengers handled: departures and
      // arrivals alike.
      const int term = static_cast<int>(f.terminal);
      pax_h[{term, hour}] += f.pax;
      if (is_delayed(f)) pax_h_d[{term, hour}] += f.pax;
      pax_d[{term, date_of(f.sched_dep).days}] += f.pax;
    }
  }

  std::map<std::pair<int, std::int64_t>, TerminalHourStats> out;
  for (const auto& [hour, agg] : airport) {
    // 3-hour lookback over the airport-wide table.
    std::int64_t dep3 = 0, dep3d = 0, arr3 = 0, arr3d = 0;
    for (std::int64_t h = hour - 180; h < hour; h += 60) {
      auto it = airport.find(h);
      if (it == airport.end()) continue;
      dep3 += it->second.dep_ops;
      dep3d += it->second.dep_delayed;
      arr3 += it->second.arr_ops;
      arr3d += it->second.arr_delayed;
    }
    for (int term = 0; term < 3; ++term) {
      TerminalHourStats s;
      s.terminal = static_cast<Terminal>(term);
      s.hour = Minute{hour};
      auto ph = pax_h.find({term, hour});
      s.pax_hour = ph == pax_h.end() ? 0 : ph->second;
      auto phd = pax_h_d.find({term, hour});
      s.pax_delayed_hour = phd == pax_h_d.end() ? 0 : phd->second;
      auto pd = pax_d.find({term, date_of(Minute{hour}).days});
      s.pax_day = pd == pax_d.end() ? 0 : pd->second;
      s.dep_total_3h = dep3;
      s.dep_delayed_3h = dep3d;
      s.arr_total_3h = arr3;
      s.arr_delayed_3h = arr3d;
      // movements = runway slots scheduled in the hour, so the disrupted share
      // (late + canceled) stays a proportion.
      s.movements_hour = agg.scheduled;
      s.disrupted_hour = agg.disrupted;
      s.declared_capacity = profile.declared_capacity;
      s.terminal_area_m2 = profile.terminal_area_m2[term];
      out[{term, hour}] = s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Join and filter

JoinResult join_records(const std::vector<SurveyResponse>& surveys,
                        const std::vector<FlightRecord>& flights,
                        const std::vector<WeatherObservation>& weather,
                        const AirportProfile& profile) {
  std::map<std::string, std::vector<std::size_t>> by_flight_no;
  for (std::size_t i = 0; i < flights.size(); ++i)
    by_flight_no[flights[i].flight_no].push_back(i);

  std::map<std::string, std::vector<std::size_t>> obs_by_station;
  for (std::size_t i = 0; i < weather.size(); ++i)
    obs_by_station[weather[i].station].push_back(i);
  for (auto& [st, idx] : obs_by_station)
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return weather[a].at < weather[b].at; });

  auto hour_stats = build_hour_stats(flights, profile);

  // Nearest observation within +-90 minutes; absent => no adverse flag.
  auto nearest_obs = [&](const std::string& station,
                         Minute at) -> std::optional<WeatherObservation> {
    auto it = obs_by_station.find(station);
    if (it == obs_by_station.end()) return std::nullopt;
    const auto& idx = it->second;
    auto lb = std::lower_bound(idx.begin(), idx.end(), at, [&](std::size_t a, Minute t) {
      return weather[a].at < t;
    });
    std::optional<std::size_t> best;
    auto consider = [&](auto iter) {
      if (iter == idx.end()) return;
      std::int64_t d = std::llabs(weather[*iter].at - at);
      if (d > 90) return;
      if (!best || d < std::llabs(weather[*best].at - at)) best = *iter;
    };
    consider(lb);
    if (lb != idx.begin()) consider(std::prev(lb));
    if (!best) return std::nullopt;
    return weather[*best];
  };

  JoinResult result;
  for (const auto& s : surveys) {
    auto it = by_flight_no.find(s.flight_no);
    if (it == by_flight_no.end()) {
      result.rejects.push_back({s, RejectReason::NoFlightMatch});
      continue;
    }
    // A flight number can repeat on adjacent days; take the departure nearest
    // the interview timestamp.
    std::size_t best = it->second.front();
    std::int64_t best_d = std::llabs(flights[best].sched_dep - s.interview_at);
    for (std::size_t cand : it->second) {
      std::int64_t d = std::llabs(flights[cand].sched_dep - s.interview_at);
      if (d < best_d) {
        best = cand;
        best_d = d;
      }
    }
    JoinedRecord rec;
    rec.survey = s;
    rec.flight = flights[best];
    rec.weather_org = weather_flags(nearest_obs(profile.home_code, rec.flight.sched_dep));
    rec.weather_dst = weather_flags(nearest_obs(rec.flight.destination, rec.flight.sched_dep));
    auto cell = hour_stats.find(
        {static_cast<int>(s.terminal), floor_hour(rec.flight.sched_dep).v});
    if (cell != hour_stats.end()) {
      rec.terminal_hour = cell->second;
    } else {
      rec.terminal_hour.terminal = s.terminal;
      rec.terminal_hour.hour = floor_hour(rec.flight.sched_dep);
      rec.terminal_hour.declared_capacity = profile.declared_capacity;
      rec.terminal_hour.terminal_area_m2 =
          profile.terminal_area_m2[static_cast<int>(s.terminal)];
    }
    result.joined.push_back(std::move(rec));
  }

  auto by_id = [](const auto& a, const auto& b) {
    return a.survey.respondent_id < b.survey.respondent_id;
  };
  std::sort(result.joined.begin(), result.joined.end(), by_id);
  std::sort(result.rejects.begin(), result.rejects.end(), by_id);
  return result;
}

FilterResult filter_sample(const std::vector<JoinedRecord>& joined) {
  FilterResult r;
  for (const auto& rec : joined) {
    std::int64_t gap = std::llabs(rec.survey.interview_at - rec.flight.sched_dep);
    if (gap > 120)
      r.dropped.push_back({rec.survey, RejectReason::TimeWindow});
    else if (rec.survey.is_connecting)
      r.dropped.push_back({rec.survey, RejectReason::Connecting});
    else if (rec.flight.canceled())
      r.dropped.push_back({rec.survey, RejectReason::Canceled});
    else
      r.kept.push_back(rec);
  }
  return r;
}

}  // namespace paxsat
