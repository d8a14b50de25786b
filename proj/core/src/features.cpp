#include "paxsat/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "paxsat/csv.hpp"
#include "paxsat/stats.hpp"

namespace paxsat {

double rescale_unit(std::span<const int> ratings) {
  if (ratings.empty()) throw std::invalid_argument("rescale_unit: empty question list");
  double s = 0;
  for (int r : ratings) s += r;
  return s / static_cast<double>(ratings.size()) / 5.0;
}

double rescale_unit_dissat(std::span<const int> ratings) {
  if (ratings.empty()) throw std::invalid_argument("rescale_unit_dissat: empty question list");
  double s = 0;
  for (int r : ratings) s += r;
  return (5.0 - s / static_cast<double>(ratings.size())) / 5.0;
}

double dissat_ratio(std::span<const int> group_ratings, std::size_t self_index,
                    bool include_self) {
  if (self_index >= group_ratings.size())
    throw std::invalid_argument("dissat_ratio: self index outside group");
  double d_self = 5.0 - group_ratings[self_index];
  double sum = 0;
  for (int r : group_ratings) sum += 5.0 - r;
  double denom;
  if (include_self || group_ratings.size() == 1) {
    denom = sum / static_cast<double>(group_ratings.size());
  } else {
    denom = (sum - d_self) / static_cast<double>(group_ratings.size() - 1);
  }
  if (denom <= 0.0) return 0.0;
  return d_self / denom;
}

TerminalMetrics terminal_metrics(const TerminalHourStats& s) {
  TerminalMetrics m;
  m.termden = 10.0 * static_cast<double>(s.pax_hour) / s.terminal_area_m2;
  m.termdis = s.pax_hour > 0
                  ? static_cast<double>(s.pax_delayed_hour) / static_cast<double>(s.pax_hour)
                  : 0.0;
  m.busyday = static_cast<double>(s.pax_day) / 10000.0;
  m.busyhour = static_cast<double>(s.pax_hour) / 1000.0;
  return m;
}

RunwayMetrics runway_metrics(const TerminalHourStats& s) {
  if (s.declared_capacity <= 0) throw DataError("runway_metrics: declared capacity must be > 0");
  RunwayMetrics m;
  m.runwaycong = static_cast<double>(s.movements_hour) / static_cast<double>(s.declared_capacity);
  m.runwaydis = s.movements_hour > 0 ? static_cast<double>(s.disrupted_hour) /
                                           static_cast<double>(s.movements_hour)
                                     : 0.0;
  m.cascad_dep = s.dep_total_3h > 0 ? static_cast<double>(s.dep_delayed_3h) /
                                          static_cast<double>(s.dep_total_3h)
                                    : 0.0;
  m.cascad_arr = s.arr_total_3h > 0 ? static_cast<double>(s.arr_delayed_3h) /
                                          static_cast<double>(s.arr_total_3h)
                                    : 0.0;
  return m;
}

bool weather_flags(const std::optional<WeatherObservation>& obs) {
  if (!obs) return false;
  if (obs->ceiling_ft && *obs->ceiling_ft < 600.0) return true;
  if (obs->visibility_m && *obs->visibility_m < 1500.0) return true;
  if (obs->gust_kt) {
    double limit = obs->wet_runway ? 27.0 : 33.0;
    if (*obs->gust_kt > limit) return true;
  }
  return obs->thunderstorm || obs->hail;
}

namespace {

const double kBracketMidpoint[kNumAgeBrackets] = {18.0, 23.5, 30.0, 39.5, 49.5, 59.5, 70.0, 80.0};

}  // namespace

RespondentClass classify_respondent(const SurveyResponse& s, int interview_year) {
  RespondentClass c{};
  int birth = interview_year -
              static_cast<int>(std::lround(kBracketMidpoint[static_cast<int>(s.age_bracket)]));
  if (birth > 2015)
    throw DataError("respondent '" + s.respondent_id + "': age bracket '" +
                    to_string(s.age_bracket) + "' maps past the youngest generation in year " +
                    std::to_string(interview_year));
  if (birth <= 1945)
    c.gensilen = 1;
  else if (birth <= 1964)
    c.genboom = 1;
  else if (birth <= 1976)
    ;  // Generation X, reference
  else if (birth <= 1995)
    c.genmillen = 1;
  else
    c.genz = 1;

  switch (s.schooling) {
    case Schooling::NoneOrUnfinishedElementary:
    case Schooling::Elementary:
      c.schlelem = 1;
      break;
    case Schooling::MiddleSchool:
      c.schlmidd = 1;
      break;
    case Schooling::HighSchool:
      c.schlhigh = 1;
      break;
    case Schooling::UnfinishedCollege:
    case Schooling::College:
      break;  // reference
  }

  if (s.boardings_12m == 0)
    c.firsttflier = 1;
  else if (s.boardings_12m > 2)
    c.freqflier = 1;
  else
    c.expercdflier = 1;

  if (s.purpose == Purpose::Leisure) c.lsrflier = 1;
  if (s.purpose == Purpose::Business) c.bsnflier = 1;
  return c;
}

Board board_window(Minute interview_at, Minute sched_dep, DestScope scope,
                   double quantile_threshold_min) {
  double t = static_cast<double>(sched_dep - interview_at);
  double now_cut = scope == DestScope::International ? 60.0 : 40.0;
  if (t <= now_cut) return Board::Now;  // negative t (interview after sched) included
  if (t >= quantile_threshold_min) return Board::Not;
  return Board::Call;
}

DelayOutcomes delay_outcomes(const FlightRecord& f, int threshold_min) {
  if (f.canceled())
    throw std::logic_error("delay_outcomes: canceled flight reached delay computation");
  DelayOutcomes d{};
  std::int64_t late_min = *f.actual_dep - f.sched_dep;
  d.del = late_min > threshold_min ? 1.0 : 0.0;
  d.deldur = d.del > 0 ? std::max(0.0, static_cast<double>(late_min) / 60.0) : 0.0;
  d.deldur2 = d.deldur * d.deldur;
  return d;
}

PandemicDummies pandemic_dummies(Date d) {
  PandemicDummies p{};
  int y = year_of(d);
  int m = month_of(d);
  if (y == 2019)
    p.pre = 1;
  else if (y == 2020 && m >= 3)
    p.early = 1;
  else if (y == 2021)
    p.later = 1;
  // 2018 and Jan-Feb 2020 form the reference period.
  return p;
}

// ---------------------------------------------------------------------------
// Feature table

namespace {

const char* const kNumericNames[] = {
    // Covariate roster of the satisfaction model (order fixed).
    "GENSILEN", "GENBOOM", "GENMILLEN", "GENZ", "SCHLELEM", "SCHLMIDD", "SCHLHIGH",
    "FIRSTTFLIER", "FREQFLIER", "LSRFLIER", "INTNLDEST", "REDEYE", "SMALLTERM", "INTNLTERM",
    "TERMDEN", "JETBRIDGE", "SHOPS", "FOOD", "EXPENSIVE", "WIFI",
    // Delay outcomes.
    "DEL", "DELDUR", "DELDUR2",
    // Psychosituational controls.
    "DISSAT(CURBSID)", "DISSAT(CHECKIN)", "DISSAT(WAYFIND)", "DISSAT(WALKDST)",
    "DISSAT(FLTINFO)", "DISSAT(SECINSP)", "DISSAT(AIRLINE)", "TERMDIS",
    "PANDEMIC(PRE)", "PANDEMIC(EARLY)", "PANDEMIC(LATER)",
    // Boarding-period dummies.
    "BOARD(NOT)", "BOARD(CALL)", "BOARD(NOW)",
    // Top-rating moderators and extra profile dummies.
    "FOOD(4/5)", "SHOPS(4/5)", "WIFI(4/5)", "EXPERCDFLIER", "BSNFLIER",
    // Delay-determinant covariates.
    "WEATHER(ORG)", "WEATHER(DST)", "PRCONNECT", "LOADFAC", "AIRCSIZE", "CARGO", "DISTANCE",
    "BUSYDAY", "BUSYHOUR", "SECINSPTIME", "RUNWAYCONG", "RUNWAYDIS", "CASCAD(DEP)",
    "CASCAD(ARR)"};
constexpr int kNumNumeric = static_cast<int>(std::size(kNumericNames));

struct DissatSource {
  const char* name;
  Question q;
};
const DissatSource kDissatSources[] = {
    {"DISSAT(CURBSID)", Question::Curbside},     {"DISSAT(CHECKIN)", Question::CheckinTime},
    {"DISSAT(WAYFIND)", Question::Wayfinding},   {"DISSAT(WALKDST)", Question::WalkDistance},
    {"DISSAT(FLTINFO)", Question::FlightInfo},   {"DISSAT(SECINSP)", Question::SecurityTime},
    {"DISSAT(AIRLINE)", Question::AirlineStaff},
};

std::string peer_key(const SurveyResponse& s, FeatureSpec::PeerGroupMode mode) {
  Date d = date_of(s.interview_at);
  int hour = hour_of_day(s.interview_at);
  char buf[32];
  if (mode == FeatureSpec::PeerGroupMode::MonthHour)
    std::snprintf(buf, sizeof(buf), "%04d-%02d|%02d", year_of(d), month_of(d), hour);
  else
    std::snprintf(buf, sizeof(buf), "%s|%02d", format_date(d).c_str(), hour);
  return buf;
}

}  // namespace

int FeatureTable::feature(const std::string& name) const {
  for (std::size_t i = 0; i < numeric_names.size(); ++i)
    if (numeric_names[i] == name) return static_cast<int>(i);
  return -1;
}

int DesignMatrix::col(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

FeatureTable compute_features(const std::vector<JoinedRecord>& records, const FeatureSpec& spec) {
  const std::size_t n = records.size();
  FeatureTable t;
  t.numeric_names.assign(kNumericNames, kNumericNames + kNumNumeric);
  t.numeric.setZero(static_cast<Eigen::Index>(n), kNumNumeric);
  t.aptsat.resize(static_cast<Eigen::Index>(n));
  t.dest.resize(n);
  t.airl.resize(n);
  t.date_label.resize(n);
  t.timetoflt_bin.resize(n);
  t.cluster_id.resize(n);

  // Pass 1: immutable aggregates — interview-hour peer groups and the
  // time-to-flight quantile.
  std::map<std::string, std::vector<std::size_t>> peer_groups;
  std::vector<double> ttf(n);
  for (std::size_t i = 0; i < n; ++i) {
    peer_groups[peer_key(records[i].survey, spec.peer_mode)].push_back(i);
    ttf[i] = static_cast<double>(records[i].flight.sched_dep - records[i].survey.interview_at);
  }
  t.board_threshold_min = quantile(ttf, spec.board_quantile);

  // Leave-one-out ratios need per-group rating vectors per question.
  std::vector<std::array<double, std::size(kDissatSources)>> dissat(n);
  for (const auto& [key, members] : peer_groups) {
    (void)key;
    for (std::size_t qi = 0; qi < std::size(kDissatSources); ++qi) {
      std::vector<int> ratings(members.size());
      for (std::size_t m = 0; m < members.size(); ++m)
        ratings[m] = records[members[m]].survey.rating(kDissatSources[qi].q);
      for (std::size_t m = 0; m < members.size(); ++m)
        dissat[members[m]][qi] = dissat_ratio(ratings, m, spec.dissat_include_self);
    }
  }

  // Pass 2: per-record features.
  auto set = [&](std::size_t row, int col, double v) {
    t.numeric(static_cast<Eigen::Index>(row), col) = v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i];
    const auto& s = rec.survey;
    const auto& f = rec.flight;
    int c = 0;

    Date idate = date_of(s.interview_at);
    RespondentClass rc = classify_respondent(s, year_of(idate));
    set(i, c++, rc.gensilen);
    set(i, c++, rc.genboom);
    set(i, c++, rc.genmillen);
    set(i, c++, rc.genz);
    set(i, c++, rc.schlelem);
    set(i, c++, rc.schlmidd);
    set(i, c++, rc.schlhigh);
    set(i, c++, rc.firsttflier);
    set(i, c++, rc.freqflier);
    set(i, c++, rc.lsrflier);
    set(i, c++, s.dest_scope == DestScope::International ? 1.0 : 0.0);
    int dep_hour = hour_of_day(f.sched_dep);
    set(i, c++, (dep_hour >= 23 || dep_hour <= 5) ? 1.0 : 0.0);  // red-eye
    set(i, c++, s.terminal == Terminal::T1 ? 1.0 : 0.0);
    set(i, c++, s.terminal == Terminal::T3 ? 1.0 : 0.0);
    TerminalMetrics tm = terminal_metrics(rec.terminal_hour);
    set(i, c++, tm.termden);
    set(i, c++, f.jetbridge ? 1.0 : 0.0);
    const int shopq[] = {s.rating(Question::ShopQuality), s.rating(Question::ShopVariety)};
    const int foodq[] = {s.rating(Question::FoodQuality), s.rating(Question::FoodVariety)};
    const int priceq[] = {s.rating(Question::ShopPrice), s.rating(Question::FoodPrice)};
    const int wifiq[] = {s.rating(Question::Wifi)};
    set(i, c++, rescale_unit(shopq));
    set(i, c++, rescale_unit(foodq));
    set(i, c++, rescale_unit_dissat(priceq));
    set(i, c++, rescale_unit(wifiq));

    DelayOutcomes del = delay_outcomes(f, spec.delay_threshold_min);
    set(i, c++, del.del);
    set(i, c++, del.deldur);
    set(i, c++, del.deldur2);

    for (std::size_t qi = 0; qi < std::size(kDissatSources); ++qi) set(i, c++, dissat[i][qi]);
    set(i, c++, tm.termdis);

    PandemicDummies pd = pandemic_dummies(idate);
    set(i, c++, pd.pre);
    set(i, c++, pd.early);
    set(i, c++, pd.later);

    Board b = board_window(s.interview_at, f.sched_dep, s.dest_scope, t.board_threshold_min);
    set(i, c++, b == Board::Not ? 1.0 : 0.0);
    set(i, c++, b == Board::Call ? 1.0 : 0.0);
    set(i, c++, b == Board::Now ? 1.0 : 0.0);

    set(i, c++, std::min(foodq[0], foodq[1]) >= 4 ? 1.0 : 0.0);
    set(i, c++, std::min(shopq[0], shopq[1]) >= 4 ? 1.0 : 0.0);
    set(i, c++, wifiq[0] >= 4 ? 1.0 : 0.0);
    set(i, c++, rc.expercdflier);
    set(i, c++, rc.bsnflier);

    set(i, c++, rec.weather_org ? 1.0 : 0.0);
    set(i, c++, rec.weather_dst ? 1.0 : 0.0);
    set(i, c++, f.pax > 0 ? static_cast<double>(f.connecting_pax) / f.pax : 0.0);
    set(i, c++, std::min(1.0, static_cast<double>(f.pax) / f.seats));  // LOADFAC capped at 1
    set(i, c++, f.seats / 100.0);
    set(i, c++, f.cargo_kg / 10000.0);  // tons / 10
    set(i, c++, f.distance_mi / 1000.0);
    set(i, c++, tm.busyday);
    set(i, c++, tm.busyhour);
    set(i, c++, dissat[i][5]);  // security-inspection time, same construction
    RunwayMetrics rm = runway_metrics(rec.terminal_hour);
    set(i, c++, rm.runwaycong);
    set(i, c++, rm.runwaydis);
    set(i, c++, rm.cascad_dep);
    set(i, c++, rm.cascad_arr);

    t.aptsat(static_cast<Eigen::Index>(i)) = s.global_rating;
    t.dest[i] = f.destination;
    t.airl[i] = f.airline;
    t.date_label[i] = format_date(idate);
    t.cluster_id[i] = std::string(to_string(s.terminal)) + "|" + t.date_label[i];

    // Time-to-flight bin; anything at or past the last edge joins the last
    // bin, negative times the first.
    double tt = std::max(0.0, ttf[i]);
    int bin = 0;
    for (std::size_t e = 1; e < spec.timetoflt_edges_min.size(); ++e)
      if (tt >= spec.timetoflt_edges_min[e]) bin = static_cast<int>(e);
    bin = std::min<int>(bin, static_cast<int>(spec.timetoflt_edges_min.size()) - 2);
    t.timetoflt_bin[i] = bin;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Design assembly

namespace {

struct ColumnBuilder {
  DesignMatrix m;
  std::vector<Eigen::VectorXd> cols;

  void add(const std::string& name, const Eigen::VectorXd& v, bool penalized) {
    // Zero-variance columns cannot enter the model (the intercept lives in
    // the cutpoints); they are dropped with a note.
    double lo = v.minCoeff(), hi = v.maxCoeff();
    if (lo == hi) {
      m.notes.push_back("dropped constant column " + name);
      return;
    }
    cols.push_back(v);
    m.names.push_back(name);
    m.penalized.push_back(penalized ? 1 : 0);
  }

  DesignMatrix finish(const Eigen::VectorXd& y, std::vector<std::string> cluster,
                      int categories) {
    m.y = y;
    m.cluster_id = std::move(cluster);
    m.outcome_categories = categories;
    m.X.resize(y.size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m.X.col(static_cast<Eigen::Index>(j)) = cols[j];

    // Exact-duplicate detection via content hash, verified elementwise.
    std::map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the raw doubles
      const auto& v = cols[j];
      const unsigned char* bytes = reinterpret_cast<const unsigned char*>(v.data());
      for (std::size_t k = 0; k < sizeof(double) * static_cast<std::size_t>(v.size()); ++k)
        h = (h ^ bytes[k]) * 1099511628211ull;
      buckets[h].push_back(j);
    }
    for (const auto& [h, members] : buckets) {
      (void)h;
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
          if (cols[members[a]].cwiseEqual(cols[members[b]]).all())
            throw DataError("assembly produced duplicate columns '" + m.names[members[a]] +
                            "' and '" + m.names[members[b]] + "'");
    }
    return std::move(m);
  }
};

/// Dummy block for a label vector, dropping the most frequent level (ties
/// break lexicographically) as reference.
void add_label_block(ColumnBuilder& b, const std::string& prefix,
                     const std::vector<std::string>& labels, bool penalized) {
  std::map<std::string, int> counts;
  for (const auto& s : labels) counts[s] += 1;
  if (counts.size() <= 1) return;  // single level carries no contrast
  std::string reference = counts.begin()->first;
  for (const auto& [label, cnt] : counts)
    if (cnt > counts[reference]) reference = label;
  for (const auto& [label, cnt] : counts) {
    (void)cnt;
    if (label == reference) continue;
    Eigen::VectorXd v(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) v[static_cast<Eigen::Index>(i)] = labels[i] == label;
    b.add(prefix + "=" + label, v, penalized);
  }
}

Eigen::VectorXd table_col(const FeatureTable& t, const std::string& name) {
  int idx = t.feature(name);
  if (idx < 0) throw std::logic_error("unknown feature " + name);
  return t.numeric.col(idx);
}

}  // namespace

const std::vector<std::string>& roster_names() {
  static const std::vector<std::string> names(kNumericNames, kNumericNames + 20);
  return names;
}

const std::vector<std::string>& delay_roster_names() {
  static const std::vector<std::string> names = {
      "WEATHER(ORG)", "WEATHER(DST)", "SMALLTERM",  "INTNLTERM",      "JETBRIDGE",
      "PRCONNECT",    "LOADFAC",      "AIRCSIZE",   "CARGO",          "DISTANCE",
      "BUSYDAY",      "BUSYHOUR",     "SECINSPTIME", "RUNWAYCONG",    "RUNWAYDIS",
      "CASCAD(DEP)",  "CASCAD(ARR)",  "PANDEMIC(EARLY)", "PANDEMIC(LATER)"};
  return names;
}

DesignMatrix assemble_from_table(const FeatureTable& t, const FeatureSpec& spec,
                                 const AssembleOptions& opt) {
  ColumnBuilder b;
  for (const auto& name : roster_names()) b.add(name, table_col(t, name), false);

  auto product = [&](const std::string& a, const std::string& c) {
    return Eigen::VectorXd(table_col(t, a).cwiseProduct(table_col(t, c)));
  };
  switch (opt.delay) {
    case DelayEncoding::None:
      break;
    case DelayEncoding::Del:
      b.add("DEL", table_col(t, "DEL"), false);
      break;
    case DelayEncoding::DelBoard:
      b.add("DELxBOARD(NOT)", product("DEL", "BOARD(NOT)"), false);
      b.add("DELxBOARD(CALL)", product("DEL", "BOARD(CALL)"), false);
      b.add("DELxBOARD(NOW)", product("DEL", "BOARD(NOW)"), false);
      break;
    case DelayEncoding::DelFlier:
      b.add("DELxFIRSTTFLIER", product("DEL", "FIRSTTFLIER"), false);
      b.add("DELxEXPERCDFLIER", product("DEL", "EXPERCDFLIER"), false);
      b.add("DELxFREQFLIER", product("DEL", "FREQFLIER"), false);
      b.add("DELxFOOD(4/5)", product("DEL", "FOOD(4/5)"), false);
      b.add("DELxSHOPS(4/5)", product("DEL", "SHOPS(4/5)"), false);
      b.add("DELxWIFI(4/5)", product("DEL", "WIFI(4/5)"), false);
      break;
    case DelayEncoding::DurationSegments:
      b.add("DELDURxLSRFLIER", product("DELDUR", "LSRFLIER"), false);
      b.add("DELDURxBSNFLIER", product("DELDUR", "BSNFLIER"), false);
      b.add("DELDUR2xLSRFLIER", product("DELDUR2", "LSRFLIER"), false);
      b.add("DELDUR2xBSNFLIER", product("DELDUR2", "BSNFLIER"), false);
      break;
    case DelayEncoding::Duration:
      b.add("DELDUR", table_col(t, "DELDUR"), false);
      b.add("DELDUR2", table_col(t, "DELDUR2"), false);
      break;
  }

  if (spec.include_groups.count("dissat"))
    for (const auto& src : kDissatSources) b.add(src.name, table_col(t, src.name), true);
  if (spec.include_groups.count("termdis")) b.add("TERMDIS", table_col(t, "TERMDIS"), true);
  if (spec.include_groups.count("pandemic")) {
    b.add("PANDEMIC(PRE)", table_col(t, "PANDEMIC(PRE)"), true);
    b.add("PANDEMIC(EARLY)", table_col(t, "PANDEMIC(EARLY)"), true);
    b.add("PANDEMIC(LATER)", table_col(t, "PANDEMIC(LATER)"), true);
  }
  if (spec.include_groups.count("timetoflt")) {
    int nbins = static_cast<int>(spec.timetoflt_edges_min.size()) - 1;
    for (int bin = 0; bin + 1 < nbins; ++bin) {  // last bin is the reference
      Eigen::VectorXd v(t.numeric.rows());
      for (std::size_t i = 0; i < t.timetoflt_bin.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = t.timetoflt_bin[i] == bin;
      char name[64];
      std::snprintf(name, sizeof(name), "TIMETOFLT[%d,%d)", spec.timetoflt_edges_min[bin],
                    spec.timetoflt_edges_min[bin + 1]);
      b.add(name, v, true);
    }
  }
  if (spec.include_groups.count("dest")) add_label_block(b, "DEST", t.dest, true);
  if (spec.include_groups.count("airl")) add_label_block(b, "AIRL", t.airl, true);
  if (spec.include_groups.count("date")) add_label_block(b, "DATE", t.date_label, true);

  return b.finish(t.aptsat, t.cluster_id, 10);
}

DesignMatrix assemble_design(const std::vector<JoinedRecord>& records, const FeatureSpec& spec,
                             const AssembleOptions& opt) {
  return assemble_from_table(compute_features(records, spec), spec, opt);
}

DesignMatrix assemble_delay_design_from_table(const FeatureTable& t, const FeatureSpec& spec) {
  (void)spec;
  ColumnBuilder b;
  for (const auto& name : delay_roster_names()) b.add(name, table_col(t, name), false);
  return b.finish(table_col(t, "DEL"), t.cluster_id, 2);
}

DesignMatrix assemble_delay_design(const std::vector<JoinedRecord>& records,
                                   const FeatureSpec& spec) {
  return assemble_delay_design_from_table(compute_features(records, spec), spec);
}

// ---------------------------------------------------------------------------
// Serialization

void write_design_csv(const DesignMatrix& m, const std::string& csv_path,
                      const std::string& meta_path) {
  CsvWriter w(csv_path);
  std::vector<std::string> row;
  row.push_back("y");
  for (const auto& n : m.names) row.push_back(n);
  row.push_back("cluster_id");
  if (!m.synthetic.empty()) row.push_back("synthetic");
  w.write_row(row);
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    row.clear();
    row.push_back(format_double(m.y[i]));
    for (Eigen::Index j = 0; j < m.p(); ++j) row.push_back(format_double(m.X(i, j)));
    row.push_back(m.cluster_id[static_cast<std::size_t>(i)]);
    if (!m.synthetic.empty())
      row.push_back(m.synthetic[static_cast<std::size_t>(i)] ? "1" : "0");
    w.write_row(row);
  }
  w.close();

  nlohmann::json meta;
  meta["columns"] = m.names;
  std::vector<bool> pen(m.penalized.begin(), m.penalized.end());
  meta["penalized"] = pen;
  meta["outcome_categories"] = m.outcome_categories;
  meta["notes"] = m.notes;
  meta["reference_levels"] = {
      {"generation", "GENX"},       {"schooling", "SCHLCOLL"}, {"flier", "EXPERCDFLIER"},
      {"terminal", "T2"},           {"pandemic", "2018"},      {"purpose", "business/other"},
  };
  std::ofstream out(meta_path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + meta_path + "' for writing");
  out << meta.dump(2) << "\n";
}

DesignMatrix read_design_csv(const std::string& csv_path, const std::string& meta_path) {
  std::ifstream in(meta_path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + meta_path + "'");
  nlohmann::json meta = nlohmann::json::parse(in);

  DesignMatrix m;
  m.names = meta.at("columns").get<std::vector<std::string>>();
  for (bool p : meta.at("penalized").get<std::vector<bool>>()) m.penalized.push_back(p ? 1 : 0);
  m.outcome_categories = meta.at("outcome_categories").get<int>();
  if (meta.contains("notes")) m.notes = meta.at("notes").get<std::vector<std::string>>();

  CsvTable t = read_csv(csv_path);
  const std::size_t n = t.rows.size();
  const std::size_t p = m.names.size();
  bool has_synth = !t.header.empty() && t.header.back() == "synthetic";
  if (t.header.size() != p + 2 + (has_synth ? 1 : 0))
    throw DataError("design CSV width does not match metadata");
  m.y.resize(static_cast<Eigen::Index>(n));
  m.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  m.cluster_id.resize(n);
  if (has_synth) m.synthetic.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    m.y[static_cast<Eigen::Index>(i)] = parse_double_field(row[0], i + 1, "y");
    for (std::size_t j = 0; j < p; ++j)
      m.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double_field(row[j + 1], i + 1, m.names[j]);
    m.cluster_id[i] = row[p + 1];
    if (has_synth) m.synthetic[i] = row[p + 2] == "1";
  }
  return m;
}

}  // namespace paxsat
