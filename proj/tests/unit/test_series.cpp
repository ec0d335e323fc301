#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "runclust/error.hpp"
#include "runclust/io.hpp"
#include "runclust/series.hpp"
#include "runclust/timeutil.hpp"

using namespace runclust;

namespace {
constexpr std::int64_t kT0 = 1577836800;  // 2020-01-01T00:00:00Z

std::string csv(std::initializer_list<std::pair<const char*, const char*>> rows) {
  std::string out = "timestamp,value\n";
  for (const auto& [t, v] : rows) out += std::string(t) + "," + v + "\n";
  return out;
}

std::string error_of(const std::string& text, std::int64_t dt = 600) {
  try {
    parse_series_text(text, "S", dt);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST_CASE("iso timestamps") {
  CHECK(parse_iso8601("2020-01-01T00:00:00Z") == kT0);
  CHECK(parse_iso8601("2020-01-01 00:10") == kT0 + 600);
  CHECK(parse_iso8601("2020-01-01T00:00:00.5+00:00") == kT0 + 0.5);
  CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
  CHECK_THROWS_AS(parse_iso8601("2020-01-01T00:00:00+01:00"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2020-13-01T00:00:00Z"), DataError);
  CHECK_THROWS_AS(parse_iso8601("yesterday"), DataError);
  CHECK(format_iso8601(kT0) == "2020-01-01T00:00:00Z");
  CHECK(format_iso8601(kT0 + 0.25) == "2020-01-01T00:00:00.250000Z");
  CHECK(parse_iso8601(format_iso8601(951782400.0 + 86399)) == 951782400.0 + 86399);
}

TEST_CASE("three regular rows give three samples") {
  const auto s = parse_series_text(
      csv({{"2020-01-01T00:00:00Z", "1.0"},
           {"2020-01-01T00:10:00Z", "2.0"},
           {"2020-01-01T00:20:00Z", "3.0"}}),
      "S", 600);
  CHECK(s.size() == 3);
  CHECK(s.missing_count() == 0);
  CHECK(s.t0() == kT0);
  CHECK(s.value(2) == 3.0);
}

TEST_CASE("absent slots are filled as missing") {
  const auto s = parse_series_text(
      csv({{"2020-01-01T00:00:00Z", "1.0"}, {"2020-01-01T00:30:00Z", "4.0"}}),
      "S", 600);
  REQUIRE(s.size() == 4);
  CHECK_FALSE(s.is_missing(0));
  CHECK(s.is_missing(1));
  CHECK(s.is_missing(2));
  CHECK_FALSE(s.is_missing(3));
  CHECK(s.gap_fraction() == doctest::Approx(0.5));
}

TEST_CASE("empty and NaN values are missing") {
  const auto s = parse_series_text(
      csv({{"2020-01-01T00:00:00Z", "1"},
           {"2020-01-01T00:10:00Z", ""},
           {"2020-01-01T00:20:00Z", "nan"}}),
      "S", 600);
  CHECK(s.missing_count() == 2);
}

TEST_CASE("small jitter snaps to the grid") {
  const auto s = parse_series_text(
      csv({{"2020-01-01T00:00:00Z", "1"}, {"2020-01-01T00:10:07Z", "2"}}), "S",
      600);
  CHECK(s.size() == 2);
  CHECK(s.time_at(1) == kT0 + 600);
}

TEST_CASE("malformed input is rejected with a line number") {
  CHECK(error_of(csv({{"2020-01-01T00:00:00Z", "1"},
                      {"2020-01-01T00:10:00Z", "-2.0"}}))
            .find(":3: negative value") != std::string::npos);
  CHECK(error_of("timestamp,value\n2020-01-01T00:00:00Z,1\n2020-01-01T00:10:00Z\n")
            .find(":3: malformed row") != std::string::npos);
  CHECK(error_of(csv({{"2020-01-01T00:00:00Z", "1"}, {"2020-01-01T00:00:00Z", "2"}}))
            .find(":3: duplicate timestamp") != std::string::npos);
  CHECK(error_of(csv({{"2020-01-01T00:00:00Z", "1"},
                      {"2020-01-01T00:20:00Z", "2"},
                      {"2020-01-01T00:10:00Z", "3"}}))
            .find(":4: timestamps not sorted") != std::string::npos);
  CHECK(error_of(csv({{"2020-01-01T00:00:00Z", "1"}, {"2020-01-01T00:05:00Z", "2"}}))
            .find(":3: timestamp") != std::string::npos);
  CHECK(error_of(csv({{"2020-01-01T00:00:00Z", "abc"}})).find(":2: malformed value") !=
        std::string::npos);
  CHECK(error_of(csv({{"2020-01-01T00:00:00+02:00", "1"}})).find(":2:") !=
        std::string::npos);
  CHECK(error_of("time,v\n").find(":1: expected header") != std::string::npos);
  CHECK(error_of("timestamp,value\n").find("no data rows") != std::string::npos);
  CHECK_THROWS_AS(parse_series_text(csv({{"2020-01-01T00:00:00Z", "1"}}), "S", 0),
                  InvalidArgument);
}

TEST_CASE("unreadable file is a data error") {
  CHECK_THROWS_AS(parse_series("/nonexistent/dir/x.csv", "S", 600), DataError);
}

TEST_CASE("parse from file matches parse from text") {
  const auto dir = testing::scratch("file");
  const std::string text =
      csv({{"2020-01-01T00:00:00Z", "1.5"}, {"2020-01-01T00:20:00Z", "0"}});
  write_file_atomic(dir / "S.csv", text);
  CHECK(parse_series(dir / "S.csv", "S", 600) == parse_series_text(text, "S", 600));
}

TEST_CASE("series round-trips through CSV") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 300;
    std::vector<double> v(n);
    for (auto& x : v) {
      x = (gen() % 5 == 0) ? testing::kMissing
                           : std::ldexp(static_cast<double>(gen() >> 11), -40);
    }
    v.front() = 1.0;  // the first row anchors the grid
    v.back() = 2.0;   // the last row fixes the length
    const std::int64_t dt = 60 * static_cast<std::int64_t>(1 + gen() % 20);
    const auto s = testing::make_series(v, kT0 + 3600 * static_cast<std::int64_t>(trial), dt);
    const auto back = parse_series_text(series_to_csv(s), "S", dt);
    CHECK(back == s);
    // Grid completeness: one slot per dt between first and last timestamp.
    CHECK(back.size() == static_cast<std::size_t>(
                             (back.time_at(back.size() - 1) - back.t0()) / dt + 1));
  }
}

TEST_CASE("station metadata") {
  const auto meta = parse_station_meta_text(
      "station_id,height,label\nWSLVSF,640,Vale\nWYN,422,\n");
  REQUIRE(meta.size() == 2);
  CHECK(meta[0].station_id == "WSLVSF");
  CHECK(meta[0].height_m == 640.0);
  CHECK(meta[0].label == "Vale");
  CHECK(meta[1].height_m == 422.0);
  CHECK_FALSE(meta[1].label.has_value());

  CHECK(parse_station_meta_text("station_id,height\n").empty());
  CHECK_THROWS_AS(parse_station_meta_text("station_id,height\nA,1\nA,2\n"), DataError);
  CHECK_THROWS_AS(parse_station_meta_text("station_id,elevation\nA,1\n"), DataError);
  CHECK_THROWS_AS(parse_station_meta_text("station_id,height\nA,high\n"), DataError);
  try {
    parse_station_meta_text("station_id,height\nA,1\nB,x\n", "meta.csv");
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("meta.csv:3") != std::string::npos);
  }
}

TEST_CASE("series constructor invariants") {
  CHECK_THROWS_AS(SampledSeries("S", 0, 600, {}, {}), DataError);
  CHECK_THROWS_AS(SampledSeries("S", 0, 600, {1.0}, {false, false}), DataError);
  CHECK_THROWS_AS(SampledSeries("S", 0, 600, {-1.0}, {false}), DataError);
  CHECK_NOTHROW(SampledSeries("S", 0, 600, {-1.0}, {true}));
}
