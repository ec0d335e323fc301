#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "runclust/error.hpp"
#include "runclust/rng.hpp"
#include "runclust/stats.hpp"
#include "runclust/synth.hpp"

using namespace runclust;
using testing::make_process;

namespace {
std::vector<double> exponential_gaps(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> t(n);
  for (auto& x : t) x = rng.exponential(1.0 / 600.0);
  return t;
}
}  // namespace

TEST_CASE("interevent times") {
  const auto t = interevent_times(make_process({0, 600, 1800}, 0, 3600));
  CHECK(t.intervals == std::vector<double>{600, 1200});
  CHECK_THROWS_AS(interevent_times(make_process({5}, 0, 10)), InsufficientData);
  CHECK_THROWS_AS(interevent_times(make_process({}, 0, 10)), InsufficientData);
  CHECK_THROWS_AS(interevent_times(make_process({5, 5}, 0, 10)), DataError);
}

TEST_CASE("run-length density") {
  const auto d = run_length_density(make_process({0, 1, 2}, 0, 10, 1, {1, 1, 2}));
  CHECK(d.at(1) == doctest::Approx(2.0 / 3.0));
  CHECK(d.at(2) == doctest::Approx(1.0 / 3.0));
  CHECK(d.at(3) == 0.0);
  CHECK(d.support_max() == 2);

  const auto point = run_length_density(make_process({0, 1, 2}, 0, 10, 1, {4, 4, 4}));
  CHECK(point.p.size() == 1);
  CHECK(point.at(4) == 1.0);
  CHECK_THROWS_AS(run_length_density(make_process({}, 0, 10)), InsufficientData);
  CHECK(density_to_csv(d).rfind("m,probability\n1,", 0) == 0);
}

TEST_CASE("density of geometric marks is within three standard errors") {
  SynthSpec spec;
  spec.kind = PeriodicLaw{10.0, 0.0};
  spec.window = 1e6;
  spec.seed = 42;
  spec.marks.q = 0.5;
  const auto pp = generate(spec);
  const auto n = static_cast<double>(pp.size());
  const auto d = run_length_density(pp);
  double total = 0.0;
  for (const auto& [m, prob] : d.p) total += prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (int m = 1; m <= 20; ++m) {
    const double p = 0.5 * std::pow(0.5, m - 1);
    if (n * p < 10) break;
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(d.at(m) - p) <= 3 * se);
  }
}

TEST_CASE("average density") {
  RunLengthDensity a, b, c;
  a.p = {{1, 0.5}, {2, 0.5}};
  b.p = {{1, 0.5}, {2, 0.5}};
  const std::vector<RunLengthDensity> same{a, b};
  CHECK(average_density(same).p == a.p);

  a.p = {{1, 1.0}};
  b.p = {{3, 1.0}};
  const std::vector<RunLengthDensity> two{a, b};
  const auto avg = average_density(two);
  CHECK(avg.at(1) == 0.5);
  CHECK(avg.at(2) == 0.0);
  CHECK(avg.at(3) == 0.5);

  c.p = {{1, 0.2}, {4, 0.8}};
  const std::vector<RunLengthDensity> three{a, b, c};
  double total = 0.0;
  for (const auto& [m, p] : average_density(three).p) total += p;
  CHECK(total == doctest::Approx(1.0));
  CHECK_THROWS_AS(average_density(std::span<const RunLengthDensity>{}), InsufficientData);
}

TEST_CASE("Cv examples") {
  CHECK(coefficient_of_variation(std::vector<double>{2, 2, 2}) == 0.0);
  CHECK(coefficient_of_variation(std::vector<double>{1, 3}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(coefficient_of_variation(std::vector<double>{1}), InsufficientData);
  const auto t = exponential_gaps(100000, 1);
  CHECK(coefficient_of_variation(t) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Lv examples") {
  CHECK(local_coefficient_of_variation(std::vector<double>{5, 5, 5}) == 0.0);
  CHECK(local_coefficient_of_variation(std::vector<double>{1, 3}) ==
        doctest::Approx(0.75));
  CHECK_THROWS_AS(local_coefficient_of_variation(std::vector<double>{1}),
                  InsufficientData);
  const auto t = exponential_gaps(100000, 2);
  CHECK(local_coefficient_of_variation(t) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Cv and Lv agree with direct formulas and are scale free") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> t(2 + gen() % 100);
    for (auto& x : t) x = 1.0 + static_cast<double>(gen() % 100000) / 10.0;
    const double cv = coefficient_of_variation(t);
    const double lv = local_coefficient_of_variation(t);
    CHECK(cv == doctest::Approx(static_cast<double>(oracle::cv(t))).epsilon(1e-9));
    CHECK(lv == doctest::Approx(static_cast<double>(oracle::lv(t))).epsilon(1e-9));
    const double c = 0.001 + static_cast<double>(gen() % 1000);
    std::vector<double> scaled = t;
    for (auto& x : scaled) x *= c;
    CHECK(coefficient_of_variation(scaled) == doctest::Approx(cv).epsilon(1e-9));
    CHECK(local_coefficient_of_variation(scaled) == doctest::Approx(lv).epsilon(1e-9));
  }
}

TEST_CASE("mean interevent time") {
  CHECK(mean_interevent_time(std::vector<double>{600, 1800}) == 1200);
  CHECK(mean_interevent_time(std::vector<double>{42}) == 42);
  CHECK_THROWS_AS(mean_interevent_time(std::vector<double>{}), InsufficientData);
}

TEST_CASE("mean interevent time does not fall as L_m rises") {
  // Holds for processes whose events stay inside one window: removing events
  // merges gaps, and the mean gap is (last - first)/(n - 1).
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> times;
    std::vector<int> lengths;
    double t = 0;
    for (int i = 0; i < 200; ++i) {
      t += 1 + static_cast<double>(gen() % 50);
      times.push_back(t);
      lengths.push_back(1 + static_cast<int>(gen() % 6));
    }
    // Keep the first and last events long so the span stays fixed.
    lengths.front() = lengths.back() = 6;
    const auto pp = make_process(times, 0, t + 1, 1, lengths);
    double prev = 0.0;
    for (int lm = 1; lm <= 6; ++lm) {
      const auto f = filter_by_min_length(pp, lm);
      const double m = mean_interevent_time(interevent_times(f));
      CHECK(m >= prev - 1e-9);
      prev = m;
    }
  }
}

TEST_CASE("mixed periodic trains are globally irregular and locally regular") {
  SynthSpec spec;
  spec.kind = MixedPeriodicLaw{600.0, 36000.0, 0.0, 0.0, 0.0};
  spec.window = 3.0e7;
  spec.seed = 1;
  const auto t = interevent_times(generate(spec));
  CHECK(coefficient_of_variation(t) > 1.5);
  CHECK(local_coefficient_of_variation(t) < 0.3);
}
