#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "runclust/error.hpp"
#include "runclust/runs.hpp"
#include "runclust/stats.hpp"
#include "runclust/synth.hpp"

using namespace runclust;

namespace {
SynthSpec make_spec(SynthKind kind, double window, std::uint64_t seed) {
  SynthSpec spec;
  spec.kind = kind;
  spec.window = window;
  spec.seed = seed;
  return spec;
}

/// Round trip for the first seeds whose draw has no touching runs.
int round_trips(SynthKind kind, double window, std::int64_t dt, int wanted) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 200 && ok < wanted; ++seed) {
    auto spec = make_spec(kind, window, seed);
    spec.start = 1577836800.0;
    MarkedPointProcess gridded;
    try {
      gridded = generate_gridded(spec, dt);
    } catch (const DataError&) {
      continue;
    }
    const auto series = generate_series(spec, dt, 1.0, 10.0);
    const auto pp = extract_runs(series, ThresholdSpec{std::nullopt, 5.0});
    CHECK(pp.events == gridded.events);
    CHECK(pp.window_start == gridded.window_start);
    CHECK(pp.window_end == gridded.window_end);
    ++ok;
  }
  return ok;
}
}  // namespace

TEST_CASE("periodic events land on exact hours") {
  const auto pp = generate(make_spec(PeriodicLaw{3600, 0}, 86400, 1));
  REQUIRE(pp.size() == 24);
  for (std::size_t i = 0; i < 24; ++i) CHECK(pp.events[i].time == 3600.0 * i);
}

TEST_CASE("Poisson counts concentrate around the rate") {
  const double rate = 0.01, window = 1e5, mean = rate * window;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto n = static_cast<double>(generate(make_spec(PoissonLaw{rate}, window, seed)).size());
    CHECK(std::abs(n - mean) <= 4 * std::sqrt(mean));
  }
}

TEST_CASE("generation is deterministic per seed") {
  const SynthKind kinds[] = {PoissonLaw{0.01}, PeriodicLaw{100, 5},
                             MixedPeriodicLaw{10, 370, 0, 3, 0},
                             FractalRenewalLaw{0.6, 1.0}, BurstyLaw{0.001, 0.1, 4}};
  for (const auto& kind : kinds) {
    const auto a = generate(make_spec(kind, 1e5, 7));
    const auto b = generate(make_spec(kind, 1e5, 7));
    CHECK(a.events == b.events);
    for (const auto& e : a.events) {
      CHECK(e.time >= 0.0);
      CHECK(e.time < 1e5);
      CHECK(e.length >= 1);
    }
    CHECK(kind_name(kind).size() > 0);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(generate(make_spec(PoissonLaw{1.0}, 0.0, 1)), InvalidArgument);
  CHECK_THROWS_AS(generate(make_spec(PoissonLaw{-1.0}, 10.0, 1)), InvalidArgument);
  CHECK_THROWS_AS(generate(make_spec(PeriodicLaw{0.0, 0.0}, 10.0, 1)), InvalidArgument);
  CHECK_THROWS_AS(generate(make_spec(FractalRenewalLaw{0.05, 1.0}, 10.0, 1)),
                  InvalidArgument);
  CHECK_THROWS_AS(generate_series(make_spec(PoissonLaw{1.0}, 0.0, 1), 600, 0, 1),
                  InvalidArgument);
  CHECK_THROWS_AS(generate_series(make_spec(PoissonLaw{1.0}, 6000.0, 1), 600, 1, 1),
                  InvalidArgument);
}

TEST_CASE("series round trip for every generator kind") {
  CHECK(round_trips(PoissonLaw{1.0 / 36000.0}, 86400.0 * 100, 10, 5) == 5);
  CHECK(round_trips(PeriodicLaw{3600, 120}, 86400.0 * 30, 600, 5) == 5);
  CHECK(round_trips(MixedPeriodicLaw{3000, 86400, 0, 600, 0}, 86400.0 * 60, 600, 5) == 5);
  CHECK(round_trips(FractalRenewalLaw{0.6, 1200.0, 1e4}, 86400.0 * 365, 600, 5) == 5);
  CHECK(round_trips(BurstyLaw{1.0 / (5 * 86400), 1.0 / 7200, 3}, 86400.0 * 100, 10, 5) == 5);
}

TEST_CASE("touching runs are rejected") {
  // Two events in the same sample.
  auto pp = testing::make_process({0.0, 10.0}, 0.0, 6000.0, 1.0, {1, 1});
  CHECK_THROWS_AS(snap_to_grid(pp, 600, GeometricMarks{}, 1), DataError);
  // Adjacent samples would merge into one run.
  pp = testing::make_process({0.0, 600.0}, 0.0, 6000.0, 1.0, {1, 1});
  CHECK_THROWS_AS(snap_to_grid(pp, 600, GeometricMarks{}, 1), DataError);
  // Room for exactly one sample: a long first run is redrawn to length 1
  // when q = 0 makes every draw 1.
  pp = testing::make_process({0.0, 1200.0}, 0.0, 6000.0, 1.0, {5, 9});
  const auto g = snap_to_grid(pp, 600, GeometricMarks{0.0}, 1);
  CHECK(g.events[0].length == 1);
  CHECK(g.events[1].length == 8);  // truncated by the end of the grid
}

TEST_CASE("geometric marks survive the series round trip") {
  auto spec = make_spec(PeriodicLaw{20 * 600.0, 0}, 20 * 600.0 * 20000, 5);
  spec.marks.q = 0.4;
  const auto series = generate_series(spec, 600, 0.0, 1.0);
  const auto pp = extract_runs(series, ThresholdSpec{std::nullopt, 0.5});
  REQUIRE(pp.size() == 20000);
  const auto d = run_length_density(pp);
  const auto n = static_cast<double>(pp.size());
  for (int m = 1; m <= 30; ++m) {
    const double p = 0.6 * std::pow(0.4, m - 1);
    if (n * p < 10) break;
    CHECK(std::abs(d.at(m) - p) <= 3 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("fractal calibration table") {
  const auto& table = fractal_calibration_table();
  REQUIRE(table.size() >= 2);
  for (std::size_t i = 1; i < table.size(); ++i) {
    CHECK(table[i].gamma > table[i - 1].gamma);
    CHECK(table[i].alpha > table[i - 1].alpha);
  }
  const auto [lo, hi] = fractal_alpha_range();
  CHECK(lo <= 0.4);
  CHECK(hi >= 0.8);
  CHECK(fractal_tail_exponent(table[3].alpha) == doctest::Approx(table[3].gamma));
  const double mid = fractal_tail_exponent(0.6);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK_THROWS_AS(fractal_tail_exponent(0.1), InvalidArgument);
  CHECK_THROWS_AS(fractal_tail_exponent(0.99), InvalidArgument);
  CHECK(truncated_pareto_mean(0.5, 1.0, 100.0) == doctest::Approx(10.0));
}
