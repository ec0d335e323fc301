#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "runclust/error.hpp"
#include "runclust/quantile.hpp"
#include "runclust/runs.hpp"

using namespace runclust;
using testing::kMissing;
using testing::make_series;

namespace {
constexpr std::int64_t kT = 1577836800;

std::vector<double> one_to_hundred() {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

ThresholdSpec at(double value) { return ThresholdSpec{std::nullopt, value}; }
}  // namespace

TEST_CASE("percentile threshold uses rank interpolation") {
  const auto s = make_series(one_to_hundred());
  CHECK(compute_threshold(s, 0.95).value == doctest::Approx(95.05).epsilon(1e-12));
  CHECK(compute_threshold(s, 0.99).value == doctest::Approx(99.01).epsilon(1e-12));
  CHECK(compute_threshold(s, 0.95).percentile == 0.95);

  std::vector<double> flat(200, 3.0);
  CHECK(compute_threshold(make_series(flat), 0.95).value == 3.0);
}

TEST_CASE("threshold ignores missing samples") {
  auto v = one_to_hundred();
  v.insert(v.begin() + 10, 50, kMissing);
  CHECK(compute_threshold(make_series(v), 0.95).value == doctest::Approx(95.05));
}

TEST_CASE("threshold argument checks") {
  const auto s = make_series(one_to_hundred());
  CHECK_THROWS_AS(compute_threshold(s, 0.0), InvalidArgument);
  CHECK_THROWS_AS(compute_threshold(s, 1.0), InvalidArgument);
  CHECK_THROWS_AS(compute_threshold(s, 0.95, 101), InsufficientData);
  CHECK_NOTHROW(compute_threshold(s, 0.95, 100));
}

TEST_CASE("quantile matches the written-out estimator") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + gen() % 50);
    for (auto& x : v) x = static_cast<double>(gen() % 1000) / 7.0;
    std::sort(v.begin(), v.end());
    const double p = static_cast<double>(gen() % 999 + 1) / 1000.0;
    CHECK(quantile_sorted(v, p) == doctest::Approx(oracle::rank_quantile(v, p)));
  }
}

TEST_CASE("runs are maximal blocks strictly above threshold") {
  const auto pp = extract_runs(make_series({1, 5, 6, 2, 7, 1}, kT), at(4.0));
  REQUIRE(pp.size() == 2);
  CHECK(pp.events[0] == ExtremeEvent{kT + 600.0, 2});
  CHECK(pp.events[1] == ExtremeEvent{kT + 2400.0, 1});
  CHECK(pp.window_start == kT);
  CHECK(pp.window_end == kT + 3600.0);
  CHECK(pp.dt == 600.0);
}

TEST_CASE("no exceedance gives an empty process") {
  CHECK(extract_runs(make_series({1, 2, 3, 4}), at(4.0)).empty());
}

TEST_CASE("a missing sample breaks a run") {
  const auto pp = extract_runs(make_series({5, 5, kMissing, 5}, kT), at(4.0));
  REQUIRE(pp.size() == 2);
  CHECK(pp.events[0] == ExtremeEvent{double(kT), 2});
  CHECK(pp.events[1] == ExtremeEvent{kT + 1800.0, 1});
}

TEST_CASE("a run at the end of the record keeps its observed length") {
  const auto pp = extract_runs(make_series({1, 9, 9, 9}), at(4.0));
  REQUIRE(pp.size() == 1);
  CHECK(pp.events[0].length == 3);
}

TEST_CASE("values equal to the threshold are not extreme") {
  CHECK(extract_runs(make_series({4, 4, 4}), at(4.0)).empty());
}

TEST_CASE("minimum-length filter") {
  auto pp = testing::make_process({0, 10, 20, 30}, 0, 100, 1, {1, 3, 5, 2});
  auto f = filter_by_min_length(pp, 3);
  REQUIRE(f.size() == 2);
  CHECK(f.events[0] == ExtremeEvent{10, 3});
  CHECK(f.events[1] == ExtremeEvent{20, 5});
  CHECK(filter_by_min_length(pp, 1).events == pp.events);
  CHECK(filter_by_min_length(pp, 6).empty());
  CHECK(filter_by_min_length(pp, 6).window_end == 100);
  CHECK_THROWS_AS(filter_by_min_length(pp, 0), InvalidArgument);
}

TEST_CASE("extraction agrees with a naive scanner on random series") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen() % 400;
    std::vector<double> v(n);
    for (auto& x : v) x = (gen() % 10 == 0) ? kMissing : static_cast<double>(gen() % 8);
    const auto s = make_series(v, kT, 600);
    const double thr = static_cast<double>(gen() % 8) + 0.5 * (gen() % 2);
    const auto pp = extract_runs(s, at(thr));

    std::vector<bool> miss(n);
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = s.is_missing(i);
      vals[i] = miss[i] ? 0.0 : v[i];
    }
    const auto ref = oracle::naive_runs(vals, miss, thr);
    REQUIRE(pp.size() == ref.size());
    std::size_t covered = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(pp.events[i].time == static_cast<double>(s.time_at(ref[i].start)));
      CHECK(pp.events[i].length == ref[i].length);
      covered += static_cast<std::size_t>(ref[i].length);
    }
    // Runs partition the exceeding samples exactly.
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < n; ++i) exceed += (!miss[i] && vals[i] > thr);
    CHECK(covered == exceed);
    // Every filtered event is present unchanged in the unfiltered set.
    const int lm = 1 + static_cast<int>(gen() % 4);
    const auto f = filter_by_min_length(pp, lm);
    for (const auto& e : f.events) {
      CHECK(e.length >= lm);
      CHECK(std::find(pp.events.begin(), pp.events.end(), e) != pp.events.end());
    }
  }
}

TEST_CASE("higher thresholds only remove or shorten runs") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(500);
    for (auto& x : v) x = static_cast<double>(gen() % 1000);
    const auto s = make_series(v);
    const auto lo = extract_runs(s, at(600));
    const auto hi = extract_runs(s, at(800));
    for (const auto& e : hi.events) {
      // Each high run lies inside some low run.
      const bool inside = std::any_of(lo.events.begin(), lo.events.end(), [&](const auto& l) {
        return e.time >= l.time && e.time + e.length * 600.0 <= l.time + l.length * 600.0;
      });
      CHECK(inside);
    }
  }
}

TEST_CASE("events CSV and sidecar round-trip") {
  const auto s = make_series({1, 5, 6, 2, 7, 1, 9, 9}, kT);
  auto pp = extract_runs(s, compute_threshold(s, 0.5, 1));
  pp.gap_fraction = 0.125;
  const std::string csv = events_to_csv(pp);
  CHECK(csv.rfind("event_time,run_length\n", 0) == 0);
  CHECK(csv.find("2020-01-01T00:20:00Z,1\n2020-01-01T00:40:00Z,1\n2020-01-01T01:00:00Z,2\n") != std::string::npos);
  const auto back = events_from_csv(csv, events_sidecar_json(pp));
  CHECK(back.events == pp.events);
  CHECK(back.window_start == pp.window_start);
  CHECK(back.window_end == pp.window_end);
  CHECK(back.dt == pp.dt);
  CHECK(back.gap_fraction == pp.gap_fraction);
  REQUIRE(back.threshold.has_value());
  CHECK(back.threshold->value == pp.threshold->value);
  CHECK(back.threshold->percentile == 0.5);

  CHECK_THROWS_AS(events_from_csv("bad,header\n", events_sidecar_json(pp)), DataError);
  CHECK_THROWS_AS(events_from_csv(csv, "{"), DataError);
}
