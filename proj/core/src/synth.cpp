#include "paxsat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>
#include <cstdio>

#include "paxsat/features.hpp"
#include "paxsat/rng.hpp"
#include "paxsat/stats.hpp"

namespace paxsat {

std::map<std::string, std::pair<double, double>> SyntheticConfig::default_targets() {
  return {{"DEL", {0.17, 0.37}}, {"APTSAT", {8.07, 1.72}}, {"LOADFAC", {0.82, 0.17}}};
}

namespace {

constexpr std::uint64_t kCalibrationSeed = 0x5EED5EEDull;
constexpr std::int64_t kCalibrationSize = 20000;

const char* const kRosterOrder[20] = {"GENSILEN",    "GENBOOM",  "GENMILLEN", "GENZ",
                                      "SCHLELEM",    "SCHLMIDD", "SCHLHIGH",  "FIRSTTFLIER",
                                      "FREQFLIER",   "LSRFLIER", "INTNLDEST", "REDEYE",
                                      "SMALLTERM",   "INTNLTERM", "TERMDEN",  "JETBRIDGE",
                                      "SHOPS",       "FOOD",     "EXPENSIVE", "WIFI"};

// Latent-scale roster coefficients of the data-generating process.
const double kBetaTrue[20] = {0.10, -0.01, 0.13, 0.28, 0.70,  0.42, 0.23, 0.08,  -0.15, 0.04,
                              -0.06, -0.05, -0.04, 0.33, -0.19, 0.09, 0.13, 0.39, -0.05, 0.11};

// Delay-latent slopes: congestion and weather.
constexpr double kDelayCong = 1.9;
constexpr double kDelayWorg = 1.5;
constexpr double kDelayWdst = 0.9;

constexpr double kRatingNoiseSd = 0.5;

constexpr double kWorgRate = 0.03;
constexpr double kWdstRate = 0.09;

// Question means (stored scale, missing kept as 0) targeted by calibration,
// and per-question missing-comment rates.
struct QuestionSpec {
  double target_mean;
  double miss_rate;
  double trait_share;  // fraction of trait_loading carried by this question
};
// Process-stage questions carry the situational mood component in full;
// amenity evaluations load on it only weakly.
const QuestionSpec kQuestions[kNumQuestions] = {
    {3.40, 0.03, 1.00},  // curbside
    {3.60, 0.03, 1.00},  // checkin_time
    {3.90, 0.03, 1.00},  // wayfinding
    {3.30, 0.03, 1.00},  // walk_distance
    {3.80, 0.03, 1.00},  // flight_info
    {3.90, 0.03, 1.00},  // security_time
    {4.10, 0.03, 1.00},  // airline_staff
    {3.50, 0.06, 0.35},  // shop_quality
    {3.50, 0.06, 0.35},  // shop_variety
    {3.50, 0.06, 0.35},  // food_quality
    {3.50, 0.06, 0.35},  // food_variety
    {2.40, 0.10, 0.35},  // shop_price
    {2.40, 0.10, 0.35},  // food_price
    {2.25, 0.22, 0.35},  // wifi
};

const char* const kAirlines[] = {"AX", "BY", "CZ", "DW", "EV", "FU", "GT", "HS"};
const double kAirlineW[] = {0.28, 0.22, 0.16, 0.12, 0.08, 0.06, 0.05, 0.03};

struct DestSpec {
  const char* code;
  double dist_mi;
  bool intl;
  double weight;
};
const DestSpec kDests[] = {
    {"DM01", 220, false, 1.8}, {"DM02", 265, false, 1.6}, {"DM03", 340, false, 1.4},
    {"DM04", 430, false, 1.2}, {"DM05", 500, false, 1.1}, {"DM06", 590, false, 1.0},
    {"DM07", 680, false, 0.9}, {"DM08", 770, false, 0.8}, {"DM09", 860, false, 0.7},
    {"DM10", 980, false, 0.6}, {"DM11", 1150, false, 0.5}, {"DM12", 1320, false, 0.45},
    {"DM13", 1480, false, 0.4}, {"DM14", 1600, false, 0.35}, {"DM15", 1680, false, 0.3},
    {"DM16", 180, false, 0.9},
    {"IN01", 1840, true, 1.0}, {"IN02", 2200, true, 0.9}, {"IN03", 2900, true, 0.8},
    {"IN04", 3600, true, 0.6}, {"IN05", 4700, true, 0.6}, {"IN06", 5300, true, 0.5},
    {"IN07", 6100, true, 0.4}, {"IN08", 7590, true, 0.3},
};

const int kSeatOptions[] = {120, 144, 162, 186, 204, 220, 252, 310, 350};
const double kSeatW[] = {0.10, 0.12, 0.14, 0.16, 0.16, 0.12, 0.10, 0.06, 0.04};

// Hourly departure intensity profile (relative).
double dep_base(int hour) {
  if (hour >= 7 && hour <= 10) return 19.0;
  if (hour >= 17 && hour <= 21) return 19.0;
  if (hour >= 11 && hour <= 16) return 15.0;
  if (hour == 6 || hour == 22) return 10.0;
  if (hour == 23 || hour == 5) return 4.0;
  return 1.6;  // deep night
}

struct CalibratedParams {
  double delay_intercept = -1.6;
  std::array<double, kNumQuestions> question_mu{};
  std::vector<double> cutpoints;  // 9 thresholds for the 10-point scale
  double lf_alpha = 3.37, lf_beta = 0.74;
};

struct Targets {
  double del_mean = 0.17;
  double aptsat_mean = 8.07, aptsat_sd = 1.72;
  double lf_mean = 0.82, lf_sd = 0.17;
};

Targets parse_targets(const SyntheticConfig& cfg) {
  Targets t;
  for (const auto& [name, ms] : cfg.targets) {
    auto [m, s] = ms;
    if (name == "DEL") {
      if (!(m > 0 && m < 1)) throw ConfigError("calibration target DEL mean outside (0,1)");
      t.del_mean = m;
    } else if (name == "APTSAT") {
      if (!(m > 1 && m < 10) || !(s > 0))
        throw ConfigError("calibration target APTSAT outside the 10-point scale");
      t.aptsat_mean = m;
      t.aptsat_sd = s;
    } else if (name == "LOADFAC") {
      if (!(m > 0 && m < 1) || !(s > 0) || s * s >= m * (1 - m))
        throw ConfigError("calibration target LOADFAC infeasible for a load factor");
      t.lf_mean = m;
      t.lf_sd = s;
    } else {
      throw ConfigError("unknown calibration target '" + name + "'");
    }
  }
  return t;
}

/// Probability mass on 1..10 from a discretized normal matched to the target
/// mean and sd by fixed-point iteration.
std::vector<double> aptsat_pmf(double mean, double sd) {
  double mu = mean, sigma = sd;
  std::vector<double> p(10);
  for (int iter = 0; iter < 400; ++iter) {
    double total = 0;
    for (int k = 1; k <= 10; ++k) {
      double lo = k == 1 ? -1e30 : (k - 0.5 - mu) / sigma;
      double hi = k == 10 ? 1e30 : (k + 0.5 - mu) / sigma;
      p[k - 1] = norm_cdf(hi) - norm_cdf(lo);
      total += p[k - 1];
    }
    for (auto& v : p) v /= total;
    double m = 0, v2 = 0;
    for (int k = 1; k <= 10; ++k) m += k * p[k - 1];
    for (int k = 1; k <= 10; ++k) v2 += (k - m) * (k - m) * p[k - 1];
    double s = std::sqrt(v2);
    if (std::abs(m - mean) < 1e-10 && std::abs(s - sd) < 1e-10) break;
    mu += mean - m;
    sigma *= sd / s;
  }
  return p;
}

struct HourCell {
  double congestion = 0;  // airport-wide latent driver for the hour
  bool adverse_org = false;
};

struct DayPlan {
  Date date{};
  int year = 0;
  std::map<int, HourCell> hours;       // 4..23
  std::vector<int> interview_hours;    // the month's survey shift hours
};

struct World {
  std::vector<DayPlan> days;
  std::vector<std::size_t> day_of_year[4];  // indices into days per year bucket
};

int year_bucket(int year) { return year - 2018; }

/// Allowed interview months per year (no field work Apr-Dec 2020).
std::vector<std::pair<int, int>> allowed_months() {
  std::vector<std::pair<int, int>> ym;
  for (int m = 2; m <= 12; ++m) ym.push_back({2018, m});
  for (int m = 1; m <= 12; ++m) ym.push_back({2019, m});
  for (int m = 1; m <= 3; ++m) ym.push_back({2020, m});
  for (int m = 1; m <= 7; ++m) ym.push_back({2021, m});
  return ym;
}

World build_world(std::int64_t n_respondents, Rng& rng) {
  World w;
  const int kDaysOfMonth[] = {2, 5, 8, 11, 14, 17, 20, 23, 26, 29};
  std::vector<Date> pool;
  for (auto [y, m] : allowed_months())
    for (int d : kDaysOfMonth) pool.push_back(make_date(y, m, d));

  std::int64_t want = std::clamp<std::int64_t>(n_respondents / 25, 24, 380);
  // Year shares of the survey waves.
  const double share[4] = {0.34, 0.43, 0.09, 0.14};
  std::vector<Date> chosen;
  for (int b = 0; b < 4; ++b) {
    std::vector<Date> year_pool;
    for (Date d : pool)
      if (year_bucket(year_of(d)) == b) year_pool.push_back(d);
    std::int64_t k = std::max<std::int64_t>(2, std::llround(share[b] * static_cast<double>(want)));
    k = std::min<std::int64_t>(k, static_cast<std::int64_t>(year_pool.size()));
    // Deterministic partial Fisher-Yates.
    for (std::int64_t i = 0; i < k; ++i) {
      std::int64_t j = rng.uniform_int(i, static_cast<std::int64_t>(year_pool.size()) - 1);
      std::swap(year_pool[static_cast<std::size_t>(i)], year_pool[static_cast<std::size_t>(j)]);
      chosen.push_back(year_pool[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(chosen.begin(), chosen.end());

  // Survey shifts run in fixed clock hours per calendar month, so respondents
  // interviewed in the same month-hour form sizable peer groups.
  std::map<std::pair<int, int>, std::vector<int>> month_hours;
  for (Date d : chosen) {
    auto key = std::make_pair(year_of(d), month_of(d));
    if (month_hours.count(key)) continue;
    std::set<int> hours;
    while (hours.size() < 3) hours.insert(static_cast<int>(rng.uniform_int(8, 20)));
    month_hours[key].assign(hours.begin(), hours.end());
  }

  for (Date d : chosen) {
    DayPlan plan;
    plan.date = d;
    plan.year = year_of(d);
    for (int h = 4; h <= 23; ++h) {
      HourCell cell;
      cell.congestion = rng.normal();
      cell.adverse_org = rng.bernoulli(kWorgRate);
      plan.hours[h] = cell;
    }
    plan.interview_hours = month_hours[{year_of(d), month_of(d)}];
    w.day_of_year[year_bucket(plan.year)].push_back(w.days.size());
    w.days.push_back(std::move(plan));
  }
  return w;
}

struct RespondentDraw {
  std::size_t day_idx = 0;
  Terminal terminal = Terminal::T2;
  Minute interview{};
  Minute sched{};
  int dest_idx = 0;
  bool redeye = false;
  // filled later
  double congestion = 0;
  bool w_org = false, w_dst = false;
  double pi = 0;
  int del = 0;
};

Terminal draw_terminal(Rng& rng) {
  double u = rng.uniform();
  if (u < 0.08) return Terminal::T1;
  if (u < 0.78) return Terminal::T2;
  return Terminal::T3;
}

// Background operations spread wider across terminals than interviews do,
// keeping every terminal-hour cell populated.
Terminal draw_terminal_background(Rng& rng) {
  double u = rng.uniform();
  if (u < 0.22) return Terminal::T1;
  if (u < 0.72) return Terminal::T2;
  return Terminal::T3;
}

int draw_dest(Rng& rng, Terminal t) {
  // Terminal 3 is international-heavy, Terminal 1 almost purely domestic.
  double p_intl = t == Terminal::T3 ? 0.85 : (t == Terminal::T1 ? 0.02 : 0.18);
  bool intl = rng.bernoulli(p_intl);
  std::vector<double> wts;
  std::vector<int> idx;
  for (std::size_t i = 0; i < std::size(kDests); ++i)
    if (kDests[i].intl == intl) {
      wts.push_back(kDests[i].weight);
      idx.push_back(static_cast<int>(i));
    }
  return idx[rng.pick_weighted(wts)];
}

struct FlightDraw {
  int seats = 0;
  int pax = 0;
  int connecting = 0;
  double cargo_kg = 0;
  bool jetbridge = false;
};

FlightDraw draw_flight_body(Rng& rng, Terminal t, const CalibratedParams& cal, bool background) {
  FlightDraw f;
  if (background) {
    static const double heavy_w[] = {0.02, 0.04, 0.08, 0.12, 0.18, 0.18, 0.16, 0.12, 0.10};
    f.seats = kSeatOptions[rng.pick_weighted(heavy_w)];
  } else {
    f.seats = kSeatOptions[rng.pick_weighted(kSeatW)];
  }
  double x = rng.gamma(cal.lf_alpha, 1.0);
  double y = rng.gamma(cal.lf_beta, 1.0);
  double lf = x / (x + y);
  f.pax = std::max(1, std::min(f.seats, static_cast<int>(std::lround(lf * f.seats))));
  f.connecting = rng.bernoulli(0.55)
                     ? 0
                     : std::min(f.pax, static_cast<int>(std::lround(
                                           f.pax * std::min(1.0, rng.gamma(1.6, 0.07)))));
  f.cargo_kg = std::min(55000.0, std::exp(rng.normal(7.4, 1.0)));
  double p_jb = t == Terminal::T3 ? 0.90 : (t == Terminal::T1 ? 0.60 : 0.75);
  f.jetbridge = rng.bernoulli(p_jb);
  return f;
}

/// Departure delay in minutes given the latent; below-threshold lateness for
/// on-time flights.
int draw_delay_minutes(Rng& rng, bool delayed) {
  if (!delayed) return static_cast<int>(std::lround(rng.uniform(-10.0, 14.0)));
  double hours = std::min(5.9, 0.27 + rng.gamma(1.3, 0.38));
  return static_cast<int>(std::lround(hours * 60.0));
}

struct GenOutput {
  SyntheticDataset data;
  std::vector<double> delay_latent_sample;   // pre-intercept, surveyed flights
  std::array<std::vector<double>, kNumQuestions> question_shift;  // calibration samples
  std::vector<double> ystar_sample;          // latent satisfaction index
};

/// One full generation pass. During calibration the delay intercept, question
/// means and cutpoints may still be provisional; the returned samples let the
/// calibrator solve for them.
GenOutput generate_pass(const SyntheticConfig& cfg, const CalibratedParams& cal,
                        const Targets& targets, std::uint64_t seed, bool calibrating) {
  (void)targets;
  Rng rng = make_rng(seed);
  GenOutput out;
  SyntheticDataset& ds = out.data;
  const std::int64_t n = cfg.n_respondents;

  World world = build_world(n, rng);
  AirportProfile profile;  // defaults match the feature formulas downstream

  // --- background operations --------------------------------------------
  std::int64_t flight_seq = 0;
  auto flight_id = [&](const char* prefix) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s%06lld", prefix, static_cast<long long>(++flight_seq));
    return std::string(buf);
  };

  for (auto& day : world.days) {
    for (auto& [h, cell] : day.hours) {
      double intensity = dep_base(h) * (1.0 + 0.22 * cell.congestion);
      int n_dep = std::max(0, static_cast<int>(std::lround(intensity + rng.normal() * 0.8)));
      int n_arr = std::max(0, static_cast<int>(std::lround(intensity * 1.05 + rng.normal() * 0.8)));
      for (int k = 0; k < n_dep; ++k) {
        FlightRecord f;
        f.flight_no = flight_id("BG");
        f.date = day.date;
        f.terminal = draw_terminal_background(rng);
        f.sched_dep = Minute{static_cast<std::int64_t>(day.date.days) * 1440 + h * 60 +
                             rng.uniform_int(0, 59)};
        int dest = draw_dest(rng, f.terminal);
        f.destination = kDests[dest].code;
        f.distance_mi = kDests[dest].dist_mi;
        f.airline = kAirlines[rng.pick_weighted(kAirlineW)];
        FlightDraw body = draw_flight_body(rng, f.terminal, cal, true);
        f.seats = body.seats;
        f.pax = body.pax;
        f.connecting_pax = body.connecting;
        f.cargo_kg = body.cargo_kg;
        f.jetbridge = body.jetbridge;
        if (rng.bernoulli(0.012)) {
          // canceled
        } else {
          bool wdst = rng.bernoulli(kWdstRate);
          double latent = cal.delay_intercept + kDelayCong * cell.congestion +
                          kDelayWorg * (cell.adverse_org ? 1 : 0) + kDelayWdst * (wdst ? 1 : 0) +
                          rng.normal();
          f.actual_dep = f.sched_dep + draw_delay_minutes(rng, latent > 0);
        }
        ds.flights.push_back(std::move(f));
      }
      for (int k = 0; k < n_arr; ++k) {
        FlightRecord f;
        f.flight_no = flight_id("AR");
        f.date = day.date;
        f.terminal = draw_terminal_background(rng);
        f.sched_dep = Minute{static_cast<std::int64_t>(day.date.days) * 1440 + h * 60 +
                             rng.uniform_int(0, 59)};
        f.destination = profile.home_code;  // arrival movement
        f.distance_mi = 500 + 200 * static_cast<double>(rng.uniform_int(0, 10));
        f.airline = kAirlines[rng.pick_weighted(kAirlineW)];
        FlightDraw body = draw_flight_body(rng, f.terminal, cal, true);
        f.seats = body.seats;
        f.pax = body.pax;
        f.connecting_pax = 0;
        f.cargo_kg = body.cargo_kg;
        f.jetbridge = body.jetbridge;
        if (!rng.bernoulli(0.012)) {
          double latent = cal.delay_intercept + kDelayCong * cell.congestion +
                          kDelayWorg * (cell.adverse_org ? 1 : 0) + rng.normal();
          f.actual_dep = f.sched_dep + draw_delay_minutes(rng, latent > 0);
        }
        ds.flights.push_back(std::move(f));
      }
    }
  }

  // --- respondents: context, profile, flights ----------------------------
  const double year_share[4] = {0.34, 0.43, 0.09, 0.14};
  std::vector<RespondentDraw> ctx(static_cast<std::size_t>(n));
  std::vector<FlightRecord> survey_flights(static_cast<std::size_t>(n));
  std::vector<SurveyResponse> surveys(static_cast<std::size_t>(n));

  for (std::int64_t i = 0; i < n; ++i) {
    auto& c = ctx[static_cast<std::size_t>(i)];
    int bucket;
    do {
      bucket = static_cast<int>(rng.pick_weighted(year_share));
    } while (world.day_of_year[bucket].empty());
    const auto& days = world.day_of_year[bucket];
    c.day_idx = days[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(days.size()) - 1))];
    const DayPlan& day = world.days[c.day_idx];
    c.terminal = draw_terminal(rng);
    c.redeye = rng.bernoulli(0.12);
    double ttf = std::clamp(rng.normal(68.0, 28.0), 12.0, 115.0);
    std::int64_t day_min = static_cast<std::int64_t>(day.date.days) * 1440;
    if (c.redeye) {
      c.sched = Minute{day_min + 23 * 60 + rng.uniform_int(0, 55)};
      c.interview = c.sched - static_cast<std::int64_t>(std::lround(ttf));
    } else {
      int h = day.interview_hours[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(day.interview_hours.size()) - 1))];
      c.interview = Minute{day_min + h * 60 + rng.uniform_int(0, 59)};
      c.sched = c.interview + static_cast<std::int64_t>(std::lround(ttf));
    }
    c.dest_idx = draw_dest(rng, c.terminal);

    FlightRecord& f = survey_flights[static_cast<std::size_t>(i)];
    f.flight_no = flight_id("FS");
    f.date = day.date;
    f.sched_dep = c.sched;
    f.terminal = c.terminal;
    f.destination = kDests[c.dest_idx].code;
    f.distance_mi = kDests[c.dest_idx].dist_mi;
    f.airline = kAirlines[rng.pick_weighted(kAirlineW)];
    FlightDraw body = draw_flight_body(rng, c.terminal, cal, false);
    f.seats = body.seats;
    f.pax = body.pax;
    f.connecting_pax = body.connecting;
    f.cargo_kg = body.cargo_kg;
    f.jetbridge = body.jetbridge;

    SurveyResponse& s = surveys[static_cast<std::size_t>(i)];
    char rid[24];
    std::snprintf(rid, sizeof(rid), "R%07lld", static_cast<long long>(i + 1));
    s.respondent_id = rid;
    s.interview_at = c.interview;
    s.terminal = c.terminal;
    s.flight_no = f.flight_no;
    s.dest_scope = kDests[c.dest_idx].intl ? DestScope::International : DestScope::Domestic;
    s.is_connecting = false;

    // Generation/schooling/flier/purpose profile with survey-like shares.
    const double gen_w[5] = {0.04, 0.17, 0.32, 0.40, 0.07};  // silent..Z
    int gen = static_cast<int>(rng.pick_weighted(gen_w));
    int year = day.year;
    std::vector<int> candidates;
    for (int b = 0; b < kNumAgeBrackets; ++b) {
      static const double mid[kNumAgeBrackets] = {18.0, 23.5, 30.0, 39.5, 49.5, 59.5, 70.0, 80.0};
      int birth = year - static_cast<int>(std::lround(mid[b]));
      int g = birth <= 1945 ? 0 : birth <= 1964 ? 1 : birth <= 1976 ? 2 : birth <= 1995 ? 3 : 4;
      if (g == gen) candidates.push_back(b);
    }
    if (candidates.empty()) candidates.push_back(gen >= 3 ? 0 : kNumAgeBrackets - 1);
    s.age_bracket = static_cast<AgeBracket>(candidates[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))]);

    const double sch_w[6] = {0.01, 0.01, 0.03, 0.14, 0.10, 0.71};
    s.schooling = static_cast<Schooling>(rng.pick_weighted(sch_w));
    const double fly_w[3] = {0.31, 0.30, 0.39};  // first / experienced / frequent
    int fly = static_cast<int>(rng.pick_weighted(fly_w));
    s.boardings_12m = fly == 0 ? 0 : (fly == 1 ? static_cast<int>(rng.uniform_int(1, 2))
                                               : static_cast<int>(rng.uniform_int(3, 15)));
    const double purpose_w[3] = {0.6200, 0.3042, 0.0758};
    s.purpose = static_cast<Purpose>(rng.pick_weighted(purpose_w));
  }

  // --- destination weather for surveyed flights --------------------------
  std::set<std::tuple<std::string, std::int64_t>> dst_keys;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& f = survey_flights[static_cast<std::size_t>(i)];
    dst_keys.insert({f.destination, floor_hour(f.sched_dep).v});
  }
  std::map<std::pair<std::string, std::int64_t>, bool> dst_adverse;
  for (const auto& [dest, hour] : dst_keys) {
    bool adverse = rng.bernoulli(kWdstRate);
    dst_adverse[{dest, hour}] = adverse;
    WeatherObservation w;
    w.station = dest;
    w.at = Minute{hour + 25};
    if (adverse) {
      switch (rng.uniform_int(0, 3)) {
        case 0: w.ceiling_ft = rng.uniform(250.0, 580.0); w.visibility_m = rng.uniform(3000.0, 9000.0); break;
        case 1: w.visibility_m = rng.uniform(600.0, 1450.0); w.ceiling_ft = rng.uniform(900.0, 2500.0); break;
        case 2: w.thunderstorm = true; w.ceiling_ft = rng.uniform(800.0, 2200.0); w.visibility_m = rng.uniform(2000.0, 8000.0); break;
        default:
          w.wet_runway = true;
          w.gust_kt = rng.uniform(28.0, 40.0);
          w.ceiling_ft = rng.uniform(900.0, 2500.0);
          w.visibility_m = rng.uniform(2000.0, 8000.0);
          break;
      }
    } else {
      w.ceiling_ft = rng.uniform(2500.0, 12000.0);
      w.visibility_m = rng.uniform(5000.0, 10000.0);
      if (rng.bernoulli(0.2)) w.gust_kt = rng.uniform(5.0, 22.0);
      w.wet_runway = rng.bernoulli(0.12);
    }
    ds.weather.push_back(std::move(w));
  }

  // Home-station observations for every operating hour.
  for (const auto& day : world.days) {
    for (const auto& [h, cell] : day.hours) {
      WeatherObservation w;
      w.station = profile.home_code;
      w.at = Minute{static_cast<std::int64_t>(day.date.days) * 1440 + h * 60 + 25};
      if (cell.adverse_org) {
        if (rng.bernoulli(0.5)) {
          w.ceiling_ft = rng.uniform(250.0, 580.0);
          w.visibility_m = rng.uniform(3000.0, 9000.0);
        } else {
          w.thunderstorm = true;
          w.ceiling_ft = rng.uniform(800.0, 2200.0);
          w.visibility_m = rng.uniform(2000.0, 8000.0);
        }
      } else {
        w.ceiling_ft = rng.uniform(2500.0, 12000.0);
        w.visibility_m = rng.uniform(5000.0, 10000.0);
        if (rng.bernoulli(0.2)) w.gust_kt = rng.uniform(5.0, 20.0);
        w.wet_runway = rng.bernoulli(0.12);
      }
      ds.weather.push_back(std::move(w));
    }
  }

  // --- surveyed-flight delays and the personality factor -----------------
  for (std::int64_t i = 0; i < n; ++i) {
    auto& c = ctx[static_cast<std::size_t>(i)];
    auto& f = survey_flights[static_cast<std::size_t>(i)];
    const DayPlan& day = world.days[c.day_idx];
    int sched_hour = hour_of_day(f.sched_dep);
    auto cell_it = day.hours.find(sched_hour);
    const HourCell& cell = cell_it != day.hours.end() ? cell_it->second : day.hours.begin()->second;
    c.congestion = cell.congestion;
    c.w_org = cell.adverse_org;
    c.w_dst = dst_adverse[{f.destination, floor_hour(f.sched_dep).v}];

    double latent_core = kDelayCong * c.congestion + kDelayWorg * (c.w_org ? 1 : 0) +
                         kDelayWdst * (c.w_dst ? 1 : 0) + rng.normal();
    out.delay_latent_sample.push_back(latent_core);
    c.del = (cal.delay_intercept + latent_core) > 0 ? 1 : 0;
    f.actual_dep = f.sched_dep + draw_delay_minutes(rng, c.del == 1);

    c.pi = rng.normal() - cfg.confound_strength * c.congestion;
  }

  // --- domain ratings -----------------------------------------------------
  for (std::int64_t i = 0; i < n; ++i) {
    auto& c = ctx[static_cast<std::size_t>(i)];
    auto& s = surveys[static_cast<std::size_t>(i)];
    for (int q = 0; q < kNumQuestions; ++q) {
      double shift = kQuestions[q].trait_share * cfg.trait_loading * c.pi +
                     kRatingNoiseSd * rng.normal();
      if (calibrating) out.question_shift[static_cast<std::size_t>(q)].push_back(shift);
      if (rng.bernoulli(kQuestions[q].miss_rate)) {
        s.ratings[q] = 0;
      } else {
        int r = static_cast<int>(std::lround(cal.question_mu[static_cast<std::size_t>(q)] + shift));
        s.ratings[q] = std::clamp(r, 1, 5);
      }
    }
  }

  // --- aggregates shared with the downstream feature path -----------------
  ds.flights.insert(ds.flights.end(), survey_flights.begin(), survey_flights.end());
  auto stats = build_hour_stats(ds.flights, profile);

  // --- satisfaction index and the global rating ---------------------------
  TruthRecord& truth = ds.truth;
  truth.seed = cfg.seed;
  truth.n = n;
  truth.rho_true = cfg.delay_effect_true;
  truth.trait_loading = cfg.trait_loading;
  truth.confound_strength = cfg.confound_strength;
  truth.blame_mode = static_cast<int>(cfg.blame_mode);
  for (int k = 0; k < 20; ++k) truth.beta_true[kRosterOrder[k]] = kBetaTrue[k];
  truth.cutpoints = cal.cutpoints;
  truth.composite_error.resize(static_cast<std::size_t>(n));
  truth.personality.resize(static_cast<std::size_t>(n));
  truth.congestion.resize(static_cast<std::size_t>(n));
  truth.del.resize(static_cast<std::size_t>(n));
  truth.internal_delay_prob.resize(static_cast<std::size_t>(n));

  for (std::int64_t i = 0; i < n; ++i) {
    auto& c = ctx[static_cast<std::size_t>(i)];
    auto& s = surveys[static_cast<std::size_t>(i)];
    const auto& f = survey_flights[static_cast<std::size_t>(i)];

    RespondentClass rc = classify_respondent(s, year_of(date_of(s.interview_at)));
    auto cell = stats.find({static_cast<int>(s.terminal), floor_hour(f.sched_dep).v});
    TerminalMetrics tm = terminal_metrics(cell->second);
    const int shopq[] = {s.rating(Question::ShopQuality), s.rating(Question::ShopVariety)};
    const int foodq[] = {s.rating(Question::FoodQuality), s.rating(Question::FoodVariety)};
    const int priceq[] = {s.rating(Question::ShopPrice), s.rating(Question::FoodPrice)};
    const int wifiq[] = {s.rating(Question::Wifi)};

    double x[20] = {rc.gensilen, rc.genboom, rc.genmillen, rc.genz,
                    rc.schlelem, rc.schlmidd, rc.schlhigh, rc.firsttflier,
                    rc.freqflier, rc.lsrflier,
                    s.dest_scope == DestScope::International ? 1.0 : 0.0,
                    static_cast<double>(hour_of_day(f.sched_dep) >= 23 ||
                                        hour_of_day(f.sched_dep) <= 5),
                    s.terminal == Terminal::T1 ? 1.0 : 0.0,
                    s.terminal == Terminal::T3 ? 1.0 : 0.0,
                    tm.termden,
                    f.jetbridge ? 1.0 : 0.0,
                    rescale_unit(shopq), rescale_unit(foodq), rescale_unit_dissat(priceq),
                    rescale_unit(wifiq)};
    double eta = 0;
    for (int k = 0; k < 20; ++k) eta += kBetaTrue[k] * x[k];

    double delay_term;
    if (cfg.blame_mode == BlameMode::PooledDelay) {
      delay_term = cfg.delay_effect_true * c.del;
    } else {
      // Blame only lands on delays without an adverse-weather cause.
      bool external_cause = c.w_org || c.w_dst;
      delay_term = cfg.delay_effect_true * c.del * (external_cause ? 0.0 : 1.0);
    }

    double noise = rng.normal();
    double u = cfg.trait_loading * c.pi + noise;
    double ystar = eta + delay_term + u;
    if (calibrating) out.ystar_sample.push_back(ystar);

    int rating = 1;
    for (double kappa : cal.cutpoints)
      if (ystar > kappa) ++rating;
    s.global_rating = rating;

    truth.composite_error[static_cast<std::size_t>(i)] = u;
    truth.personality[static_cast<std::size_t>(i)] = c.pi;
    truth.congestion[static_cast<std::size_t>(i)] = c.congestion;
    truth.del[static_cast<std::size_t>(i)] = c.del;
    truth.internal_delay_prob[static_cast<std::size_t>(i)] =
        norm_cdf(cal.delay_intercept + kDelayCong * c.congestion);
  }

  ds.surveys = std::move(surveys);

  // Deterministic table order.
  std::sort(ds.flights.begin(), ds.flights.end(), [](const FlightRecord& a, const FlightRecord& b) {
    if (a.sched_dep != b.sched_dep) return a.sched_dep < b.sched_dep;
    return a.flight_no < b.flight_no;
  });
  std::sort(ds.weather.begin(), ds.weather.end(),
            [](const WeatherObservation& a, const WeatherObservation& b) {
              if (a.station != b.station) return a.station < b.station;
              return a.at < b.at;
            });
  return out;
}

struct CalibrationKey {
  double trait_loading, confound_strength, rho;
  int blame_mode;
  double del_mean, aptsat_mean, aptsat_sd, lf_mean, lf_sd;

  bool operator<(const CalibrationKey& o) const {
    auto tie = [](const CalibrationKey& k) {
      return std::tuple(k.trait_loading, k.confound_strength, k.rho, k.blame_mode, k.del_mean,
                        k.aptsat_mean, k.aptsat_sd, k.lf_mean, k.lf_sd);
    };
    return tie(*this) < tie(o);
  }
};

CalibratedParams calibrate(const SyntheticConfig& cfg, const Targets& targets) {
  static std::map<CalibrationKey, CalibratedParams> cache;
  static std::mutex mu;
  CalibrationKey key{cfg.trait_loading,
                     cfg.confound_strength,
                     cfg.delay_effect_true,
                     static_cast<int>(cfg.blame_mode),
                     targets.del_mean,
                     targets.aptsat_mean,
                     targets.aptsat_sd,
                     targets.lf_mean,
                     targets.lf_sd};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  CalibratedParams cal;
  // Load-factor Beta parameters from the target moments.
  double mu_lf = targets.lf_mean, var_lf = targets.lf_sd * targets.lf_sd;
  double nu = mu_lf * (1 - mu_lf) / var_lf - 1.0;
  cal.lf_alpha = mu_lf * nu;
  cal.lf_beta = (1 - mu_lf) * nu;
  for (auto& m : cal.question_mu) m = 3.5;
  cal.cutpoints.assign({-2.2, -1.8, -1.4, -1.0, -0.6, -0.2, 0.3, 0.9, 1.6});

  SyntheticConfig cal_cfg = cfg;
  cal_cfg.n_respondents = kCalibrationSize;
  cal_cfg.seed = kCalibrationSeed;

  // Pass 1: provisional parameters give the latent samples that pin the
  // delay intercept and the question means.
  GenOutput pass1 = generate_pass(cal_cfg, cal, targets, kCalibrationSeed, true);
  cal.delay_intercept = -quantile(pass1.delay_latent_sample, 1.0 - targets.del_mean);

  // Question means: bisection over each question's shift sample. The stored
  // value keeps missing comments at zero.
  for (int q = 0; q < kNumQuestions; ++q) {
    const auto& sample = pass1.question_shift[static_cast<std::size_t>(q)];
    double lo = 0.0, hi = 7.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      double acc = 0;
      for (double s : sample) acc += std::clamp(static_cast<int>(std::lround(mid + s)), 1, 5);
      double mean_stored =
          (1.0 - kQuestions[q].miss_rate) * acc / static_cast<double>(sample.size());
      if (mean_stored < kQuestions[q].target_mean)
        lo = mid;
      else
        hi = mid;
    }
    cal.question_mu[static_cast<std::size_t>(q)] = 0.5 * (lo + hi);
  }

  // Pass 2: with the intercept and question means in place, the satisfaction
  // index sample sets the cutpoints at the target category shares.
  GenOutput pass2 = generate_pass(cal_cfg, cal, targets, kCalibrationSeed, true);
  std::vector<double> pmf = aptsat_pmf(targets.aptsat_mean, targets.aptsat_sd);
  std::vector<double> ystar = pass2.ystar_sample;
  double cum = 0;
  cal.cutpoints.clear();
  for (int k = 0; k < 9; ++k) {
    cum += pmf[static_cast<std::size_t>(k)];
    cal.cutpoints.push_back(quantile(ystar, std::min(1.0, cum)));
  }

  std::lock_guard<std::mutex> lock(mu);
  cache[key] = cal;
  return cal;
}

}  // namespace

SyntheticDataset synthesize_dataset(const SyntheticConfig& cfg) {
  if (cfg.n_respondents <= 0) throw ConfigError("synthesize_dataset: n_respondents must be > 0");
  Targets targets = parse_targets(cfg);
  CalibratedParams cal = calibrate(cfg, targets);
  GenOutput out = generate_pass(cfg, cal, targets, cfg.seed, false);
  return std::move(out.data);
}

// ---------------------------------------------------------------------------
// Serialization

void write_truth(const TruthRecord& truth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "seed: " << truth.seed << "\n";
  out << "n: " << truth.n << "\n";
  out << "rho_true: " << format_double(truth.rho_true) << "\n";
  out << "trait_loading: " << format_double(truth.trait_loading) << "\n";
  out << "confound_strength: " << format_double(truth.confound_strength) << "\n";
  out << "blame_mode: " << (truth.blame_mode == 0 ? "pooled_delay" : "internal_only") << "\n";
  for (const auto& [name, value] : truth.beta_true)
    out << "beta." << name << ": " << format_double(value) << "\n";
  for (std::size_t k = 0; k < truth.cutpoints.size(); ++k)
    out << "cutpoint." << (k + 1) << ": " << format_double(truth.cutpoints[k]) << "\n";
}

void write_surveys_csv(const std::vector<SurveyResponse>& s, const std::string& path) {
  CsvWriter w(path);
  std::vector<std::string> head = {"respondent_id", "interview_at", "terminal", "flight_no",
                                   "global_rating"};
  for (int q = 0; q < kNumQuestions; ++q) head.push_back(question_column(static_cast<Question>(q)));
  for (const char* c : {"age_bracket", "schooling", "boardings_12m", "purpose", "dest_scope",
                        "is_connecting"})
    head.push_back(c);
  w.write_row(head);
  for (const auto& r : s) {
    std::vector<std::string> row = {r.respondent_id, format_minute(r.interview_at),
                                    to_string(r.terminal), r.flight_no,
                                    std::to_string(r.global_rating)};
    for (int q = 0; q < kNumQuestions; ++q) {
      int v = r.ratings[q];
      row.push_back(v == 0 ? "" : std::to_string(v));  // missing comments stay blank
    }
    row.push_back(to_string(r.age_bracket));
    row.push_back(to_string(r.schooling));
    row.push_back(std::to_string(r.boardings_12m));
    row.push_back(to_string(r.purpose));
    row.push_back(to_string(r.dest_scope));
    row.push_back(r.is_connecting ? "1" : "0");
    w.write_row(row);
  }
}

void write_flights_csv(const std::vector<FlightRecord>& flights, const std::string& path) {
  CsvWriter w(path);
  w.write_row({"flight_no", "date", "sched_dep", "actual_dep", "airline", "destination",
               "distance_mi", "seats", "pax", "connecting_pax", "cargo_kg", "jetbridge",
               "terminal"});
  for (const auto& f : flights) {
    w.write_row({f.flight_no, format_date(f.date), format_minute(f.sched_dep),
                 f.actual_dep ? format_minute(*f.actual_dep) : "", f.airline, f.destination,
                 format_double(f.distance_mi), std::to_string(f.seats), std::to_string(f.pax),
                 std::to_string(f.connecting_pax), format_double(f.cargo_kg),
                 f.jetbridge ? "1" : "0", to_string(f.terminal)});
  }
}

void write_weather_csv(const std::vector<WeatherObservation>& obs, const std::string& path) {
  CsvWriter w(path);
  w.write_row({"station", "at", "ceiling_ft", "visibility_m", "gust_kt", "wet_runway",
               "thunderstorm", "hail"});
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : ""; };
  for (const auto& o : obs) {
    w.write_row({o.station, format_minute(o.at), opt(o.ceiling_ft), opt(o.visibility_m),
                 opt(o.gust_kt), o.wet_runway ? "1" : "0", o.thunderstorm ? "1" : "0",
                 o.hail ? "1" : "0"});
  }
}

}  // namespace paxsat
