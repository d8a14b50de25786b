#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "paxsat/data.hpp"
#include "paxsat/features.hpp"

using namespace paxsat;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

const char* kSurveyHeader =
    "respondent_id,interview_at,terminal,flight_no,global_rating,curbside,checkin_time,"
    "wayfinding,walk_distance,flight_info,security_time,airline_staff,shop_quality,"
    "shop_variety,food_quality,food_variety,shop_price,food_price,wifi,age_bracket,"
    "schooling,boardings_12m,purpose,dest_scope,is_connecting\n";

std::string survey_row(const std::string& id, const std::string& at, const std::string& flight,
                       int global, const std::string& wifi = "4") {
  return id + "," + at + ",T2," + flight + "," + std::to_string(global) +
         ",4,4,4,4,4,4,4,4,4,4,4,3,3," + wifi + ",35 to 44,college,2,leisure,domestic,0\n";
}

const char* kFlightHeader =
    "flight_no,date,sched_dep,actual_dep,airline,destination,distance_mi,seats,pax,"
    "connecting_pax,cargo_kg,jetbridge,terminal\n";

const char* kWeatherHeader =
    "station,at,ceiling_ft,visibility_m,gust_kt,wet_runway,thunderstorm,hail\n";

}  // namespace

TEST_CASE("load_surveys maps fields and rejects bad rows") {
  SUBCASE("plain row") {
    auto p = write_temp("s_ok.csv", kSurveyHeader + survey_row("r1", "2019-03-07 10:12", "F100", 8));
    auto rows = load_surveys(p);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].global_rating == 8);
    CHECK(rows[0].rating(Question::ShopQuality) == 4);
    CHECK(rows[0].age_bracket == AgeBracket::A35to44);
  }
  SUBCASE("empty wifi cell stays zero") {
    auto p = write_temp("s_wifi.csv",
                        kSurveyHeader + survey_row("r1", "2019-03-07 10:12", "F100", 8, ""));
    auto rows = load_surveys(p);
    CHECK(rows[0].rating(Question::Wifi) == 0);
  }
  SUBCASE("out-of-range global rating") {
    auto p = write_temp("s_bad.csv",
                        kSurveyHeader + survey_row("r1", "2019-03-07 10:12", "F100", 11));
    CHECK_THROWS_WITH_AS(load_surveys(p), doctest::Contains("global_rating"), DataError);
  }
  SUBCASE("unknown enum lists the valid labels") {
    std::string row = survey_row("r1", "2019-03-07 10:12", "F100", 8);
    row.replace(row.find("leisure"), 7, "holiday");
    auto p = write_temp("s_enum.csv", kSurveyHeader + row);
    CHECK_THROWS_WITH_AS(load_surveys(p), doctest::Contains("business"), DataError);
  }
  SUBCASE("malformed rating names row and column") {
    std::string row = "r1,2019-03-07 10:12,T2,F100,8,4,4,x,4,4,4,4,4,4,4,4,3,3,4,35 to 44,"
                      "college,2,leisure,domestic,0\n";
    auto p = write_temp("s_mal.csv", kSurveyHeader + row);
    CHECK_THROWS_WITH_AS(load_surveys(p), doctest::Contains("wayfinding"), DataError);
  }
}

TEST_CASE("load_flights: cancellations and duplicate keys") {
  SUBCASE("blank actual_dep means canceled") {
    auto p = write_temp(
        "f_canc.csv",
        std::string(kFlightHeader) +
            "F1,2019-03-07,2019-03-07 11:00,,AX,DM01,220,144,120,0,800,1,T2\n");
    auto rows = load_flights(p);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].canceled());
  }
  SUBCASE("duplicate (flight_no, date) rejected") {
    auto p = write_temp(
        "f_dup.csv",
        std::string(kFlightHeader) +
            "F1,2019-03-07,2019-03-07 11:00,2019-03-07 11:05,AX,DM01,220,144,120,0,800,1,T2\n"
            "F1,2019-03-07,2019-03-07 15:00,2019-03-07 15:05,AX,DM01,220,144,120,0,800,1,T2\n");
    CHECK_THROWS_WITH_AS(load_flights(p), doctest::Contains("duplicate"), DataError);
  }
  SUBCASE("overcapacity is flagged, not rejected") {
    auto p = write_temp(
        "f_over.csv",
        std::string(kFlightHeader) +
            "F1,2019-03-07,2019-03-07 11:00,2019-03-07 11:05,AX,DM01,220,144,150,0,800,1,T2\n");
    CHECK(load_flights(p)[0].overcapacity_flag);
  }
}

TEST_CASE("load_weather keeps missing sensors absent") {
  auto p = write_temp("w.csv", std::string(kWeatherHeader) +
                                   "GRU,2019-03-07 11:00,-,9000,,0,0,0\n"
                                   "GRU,2019-03-07 12:00,550,,30,1,0,0\n");
  auto rows = load_weather(p);
  REQUIRE(rows.size() == 2);
  CHECK(!rows[0].ceiling_ft.has_value());
  CHECK(!rows[0].gust_kt.has_value());
  CHECK(rows[1].ceiling_ft == doctest::Approx(550));
}

namespace {

/// Fixture world: two flights sharing a number on adjacent days plus weather.
struct JoinFixture {
  std::vector<SurveyResponse> surveys;
  std::vector<FlightRecord> flights;
  std::vector<WeatherObservation> weather;

  JoinFixture() {
    auto mk_flight = [&](const std::string& no, Minute sched, bool canceled = false) {
      FlightRecord f;
      f.flight_no = no;
      f.date = date_of(sched);
      f.sched_dep = sched;
      if (!canceled) f.actual_dep = sched + 5;
      f.airline = "AX";
      f.destination = "DM01";
      f.distance_mi = 220;
      f.seats = 144;
      f.pax = 120;
      f.cargo_kg = 500;
      f.terminal = Terminal::T2;
      flights.push_back(f);
    };
    mk_flight("F1", make_minute(2019, 3, 7, 11, 0));
    mk_flight("F1", make_minute(2019, 3, 8, 11, 0));
    mk_flight("F2", make_minute(2019, 3, 7, 9, 30));

    auto mk_survey = [&](const std::string& id, Minute at, const std::string& no) {
      SurveyResponse s;
      s.respondent_id = id;
      s.interview_at = at;
      s.terminal = Terminal::T2;
      s.flight_no = no;
      s.global_rating = 8;
      s.ratings.fill(4);
      s.age_bracket = AgeBracket::A35to44;
      s.schooling = Schooling::College;
      s.boardings_12m = 2;
      surveys.push_back(s);
    };
    mk_survey("r1", make_minute(2019, 3, 7, 10, 12), "F1");
    mk_survey("r2", make_minute(2019, 3, 8, 10, 40), "F1");
    mk_survey("r3", make_minute(2019, 3, 7, 9, 0), "FX");  // no such flight
  }
};

}  // namespace

TEST_CASE("join matches the nearest departure and reports rejects") {
  JoinFixture fx;
  JoinResult r = join_records(fx.surveys, fx.flights, fx.weather);
  REQUIRE(r.joined.size() == 2);
  REQUIRE(r.rejects.size() == 1);
  CHECK(r.rejects[0].survey.respondent_id == "r3");
  CHECK(r.rejects[0].reason == RejectReason::NoFlightMatch);
  // r1 interviewed Mar 7 matches the Mar 7 departure, r2 the Mar 8 one.
  CHECK(r.joined[0].flight.sched_dep == make_minute(2019, 3, 7, 11, 0));
  CHECK(r.joined[1].flight.sched_dep == make_minute(2019, 3, 8, 11, 0));
}

TEST_CASE("weather attaches by nearest observation within 90 minutes") {
  JoinFixture fx;
  // Two observations straddle the scheduled hour; the nearer one is adverse.
  WeatherObservation far_obs;
  far_obs.station = "GRU";
  far_obs.at = make_minute(2019, 3, 7, 10, 0);
  far_obs.ceiling_ft = 5000;
  WeatherObservation near_obs = far_obs;
  near_obs.at = make_minute(2019, 3, 7, 11, 20);
  near_obs.ceiling_ft = 400;  // adverse
  fx.weather = {far_obs, near_obs};

  JoinResult r = join_records(fx.surveys, fx.flights, fx.weather);
  // Brute-force nearest for r1's flight (sched 11:00): |10:00| = 60, |11:20| = 20.
  std::int64_t sched = make_minute(2019, 3, 7, 11, 0).v;
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < fx.weather.size(); ++i)
    if (std::llabs(fx.weather[i].at.v - sched) < std::llabs(fx.weather[nearest].at.v - sched))
      nearest = i;
  CHECK(nearest == 1);
  CHECK(r.joined[0].weather_org == true);

  // Outside the 90-minute window no observation attaches.
  fx.weather[1].at = make_minute(2019, 3, 7, 13, 0);
  fx.weather[0].at = make_minute(2019, 3, 7, 8, 0);
  r = join_records(fx.surveys, fx.flights, fx.weather);
  CHECK(r.joined[0].weather_org == false);
}

TEST_CASE("filter_sample drops by reason and is idempotent") {
  JoinFixture fx;
  fx.surveys[0].interview_at = make_minute(2019, 3, 7, 8, 0);  // 3h before sched
  fx.surveys[1].is_connecting = true;
  // extra on-time respondent
  SurveyResponse ok = fx.surveys[1];
  ok.respondent_id = "r4";
  ok.is_connecting = false;
  ok.interview_at = make_minute(2019, 3, 8, 10, 0);
  fx.surveys.push_back(ok);

  JoinResult j = join_records(fx.surveys, fx.flights, fx.weather);
  FilterResult f = filter_sample(j.joined);
  REQUIRE(f.kept.size() == 1);
  CHECK(f.kept[0].survey.respondent_id == "r4");
  REQUIRE(f.dropped.size() == 2);
  CHECK(f.dropped[0].reason == RejectReason::TimeWindow);
  CHECK(f.dropped[1].reason == RejectReason::Connecting);

  FilterResult again = filter_sample(f.kept);
  CHECK(again.kept.size() == f.kept.size());
  CHECK(again.dropped.empty());
}

TEST_CASE("canceled flights are dropped with reason") {
  JoinFixture fx;
  fx.flights[0].actual_dep.reset();
  JoinResult j = join_records(fx.surveys, fx.flights, fx.weather);
  FilterResult f = filter_sample(j.joined);
  bool saw_cancel = false;
  for (const auto& d : f.dropped) saw_cancel |= d.reason == RejectReason::Canceled;
  CHECK(saw_cancel);
}

TEST_CASE("hour stats aggregate departures, arrivals and cascades") {
  std::vector<FlightRecord> flights;
  auto mk = [&](const std::string& no, Minute sched, int late_min, const std::string& dest,
                int pax) {
    FlightRecord f;
    f.flight_no = no;
    f.date = date_of(sched);
    f.sched_dep = sched;
    f.actual_dep = sched + late_min;
    f.airline = "AX";
    f.destination = dest;
    f.distance_mi = 200;
    f.seats = 150;
    f.pax = pax;
    f.cargo_kg = 100;
    f.terminal = Terminal::T2;
    flights.push_back(f);
  };
  // hour 10: two departures (one late), one arrival; hour 12: one departure
  mk("D1", make_minute(2019, 3, 7, 10, 10), 5, "DM01", 100);
  mk("D2", make_minute(2019, 3, 7, 10, 40), 40, "DM01", 50);
  mk("A1", make_minute(2019, 3, 7, 10, 20), 20, "GRU", 80);
  mk("D3", make_minute(2019, 3, 7, 12, 15), 0, "DM01", 60);

  AirportProfile profile;
  auto stats = build_hour_stats(flights, profile);
  const auto& cell10 = stats.at({static_cast<int>(Terminal::T2), make_minute(2019, 3, 7, 10, 0).v});
  CHECK(cell10.pax_hour == 230);          // all passengers handled
  CHECK(cell10.pax_delayed_hour == 130);  // D2 and the late arrival A1
  CHECK(cell10.movements_hour == 3);
  CHECK(cell10.disrupted_hour == 2);
  CHECK(cell10.pax_day == 290);

  const auto& cell12 = stats.at({static_cast<int>(Terminal::T2), make_minute(2019, 3, 7, 12, 0).v});
  // 3-hour lookback [9:00, 12:00) sees two departures, one delayed, one arrival delayed
  CHECK(cell12.dep_total_3h == 2);
  CHECK(cell12.dep_delayed_3h == 1);
  CHECK(cell12.arr_total_3h == 1);
  CHECK(cell12.arr_delayed_3h == 1);
}
