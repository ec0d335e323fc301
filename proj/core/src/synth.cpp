#include "runclust/synth.hpp"

#include <algorithm>
#include <cmath>

#include "runclust/error.hpp"
#include "runclust/io.hpp"
#include "runclust/rng.hpp"

namespace runclust {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kMarkStream = 0x6d61726b73ULL;  // "marks"
constexpr std::uint64_t kTimeStream = 0x74696d6573ULL;  // "times"
constexpr int kMaxMarkRedraws = 64;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

double tail_exponent_of(const FractalRenewalLaw& law) {
  return law.tail_exponent ? *law.tail_exponent
                           : fractal_tail_exponent(law.alpha);
}

std::vector<double> poisson_times(const PoissonLaw& law, double start,
                                  double end, Rng& rng) {
  std::vector<double> out;
  double t = start + rng.exponential(law.rate);
  while (t < end) {
    out.push_back(t);
    t += rng.exponential(law.rate);
  }
  return out;
}

void periodic_into(double period, double phase, double origin, double from,
                   double to, std::vector<double>& out) {
  // Events at origin + phase + k*period inside [from, to).
  double k = std::ceil((from - origin - phase) / period);
  if (k < 0.0) k = 0.0;
  for (;; k += 1.0) {
    const double t = origin + phase + k * period;
    if (t >= to) break;
    if (t >= from) out.push_back(t);
  }
}

std::vector<double> mixed_times(const MixedPeriodicLaw& law, double start,
                                double end) {
  const double regime = law.regime > 0.0 ? law.regime : (end - start) / 10.0;
  std::vector<double> out;
  std::size_t seg = 0;
  for (double from = start; from < end; ++seg) {
    const double to = std::min(end, start + static_cast<double>(seg + 1) * regime);
    if (seg % 2 == 0) {
      periodic_into(law.period1, law.phase1, start, from, to, out);
    } else {
      periodic_into(law.period2, law.phase2, start, from, to, out);
    }
    from = to;
  }
  return out;
}

std::vector<double> fractal_times(const FractalRenewalLaw& law, double start,
                                  double end, Rng& rng) {
  const double gamma = tail_exponent_of(law);
  const double hi = law.min_gap * law.cutoff_ratio;
  std::vector<double> out;
  double t = start + rng.truncated_pareto(gamma, law.min_gap, hi);
  while (t < end) {
    out.push_back(t);
    t += rng.truncated_pareto(gamma, law.min_gap, hi);
  }
  return out;
}

std::vector<double> bursty_times(const BurstyLaw& law, double start,
                                 double end, Rng& rng) {
  // Geometric cluster size on {1,2,...} with the requested mean.
  const double q = 1.0 - 1.0 / law.mean_cluster_size;
  std::vector<double> out;
  double c = start + rng.exponential(law.cluster_rate);
  while (c < end) {
    const int size = rng.geometric(q);
    double t = c;
    for (int k = 0; k < size && t < end; ++k) {
      out.push_back(t);
      t += rng.exponential(law.in_cluster_rate);
    }
    c += rng.exponential(law.cluster_rate);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  require_positive(window, "synthetic window");
  require_positive(dt, "synthetic dt");
  if (!(marks.q >= 0.0 && marks.q < 1.0)) {
    throw InvalidArgument("geometric mark parameter q must lie in [0,1)");
  }
  std::visit(
      overloaded{
          [](const PoissonLaw& l) { require_positive(l.rate, "poisson rate"); },
          [](const PeriodicLaw& l) {
            require_positive(l.period, "period");
            if (!(l.phase >= 0.0)) throw InvalidArgument("phase must be >= 0");
          },
          [](const MixedPeriodicLaw& l) {
            require_positive(l.period1, "period1");
            require_positive(l.period2, "period2");
            if (!(l.phase1 >= 0.0) || !(l.phase2 >= 0.0)) {
              throw InvalidArgument("phases must be >= 0");
            }
          },
          [](const FractalRenewalLaw& l) {
            require_positive(l.min_gap, "min_gap");
            if (!(l.cutoff_ratio > 1.0)) {
              throw InvalidArgument("cutoff_ratio must exceed 1");
            }
            if (l.tail_exponent) {
              require_positive(*l.tail_exponent, "tail exponent");
            } else {
              fractal_tail_exponent(l.alpha);  // range check
            }
          },
          [](const BurstyLaw& l) {
            require_positive(l.cluster_rate, "cluster_rate");
            require_positive(l.in_cluster_rate, "in_cluster_rate");
            if (!(l.mean_cluster_size >= 1.0)) {
              throw InvalidArgument("mean_cluster_size must be >= 1");
            }
          },
      },
      kind);
}

std::string_view kind_name(const SynthKind& kind) {
  return std::visit(
      overloaded{
          [](const PoissonLaw&) { return std::string_view("poisson"); },
          [](const PeriodicLaw&) { return std::string_view("periodic"); },
          [](const MixedPeriodicLaw&) {
            return std::string_view("mixed_periodic");
          },
          [](const FractalRenewalLaw&) {
            return std::string_view("fractal_renewal");
          },
          [](const BurstyLaw&) { return std::string_view("bursty"); },
      },
      kind);
}

MarkedPointProcess generate(const SynthSpec& spec) {
  spec.validate();
  const double start = spec.start;
  const double end = spec.start + spec.window;
  Rng time_rng = Rng::for_stream(spec.seed, kTimeStream);
  const std::vector<double> times = std::visit(
      overloaded{
          [&](const PoissonLaw& l) {
            return poisson_times(l, start, end, time_rng);
          },
          [&](const PeriodicLaw& l) {
            std::vector<double> out;
            periodic_into(l.period, l.phase, start, start, end, out);
            return out;
          },
          [&](const MixedPeriodicLaw& l) { return mixed_times(l, start, end); },
          [&](const FractalRenewalLaw& l) {
            return fractal_times(l, start, end, time_rng);
          },
          [&](const BurstyLaw& l) {
            return bursty_times(l, start, end, time_rng);
          },
      },
      spec.kind);

  Rng mark_rng = Rng::for_stream(spec.seed, kMarkStream);
  MarkedPointProcess pp;
  pp.window_start = start;
  pp.window_end = end;
  pp.dt = spec.dt;
  pp.station_id = spec.station_id;
  pp.events.reserve(times.size());
  for (double t : times) {
    pp.events.push_back({t, mark_rng.geometric(spec.marks.q)});
  }
  return pp;
}

MarkedPointProcess snap_to_grid(const MarkedPointProcess& pp, std::int64_t dt,
                                const GeometricMarks& marks,
                                std::uint64_t seed) {
  if (dt <= 0) throw InvalidArgument("dt must be positive");
  const auto step = static_cast<double>(dt);
  const auto n_slots =
      static_cast<std::int64_t>(std::ceil(pp.span() / step));
  if (n_slots < 1) throw InvalidArgument("empty synthetic window");

  std::vector<std::int64_t> slots;
  slots.reserve(pp.events.size());
  for (const auto& e : pp.events) {
    slots.push_back(static_cast<std::int64_t>(
        std::floor((e.time - pp.window_start) / step)));
  }

  Rng rng = Rng::for_stream(seed, kMarkStream + 1);
  MarkedPointProcess out;
  out.window_start = pp.window_start;
  out.window_end = pp.window_start + static_cast<double>(n_slots) * step;
  out.dt = step;
  out.station_id = pp.station_id;
  out.events.reserve(pp.events.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    int length = pp.events[i].length;
    if (i + 1 < slots.size()) {
      const std::int64_t room = slots[i + 1] - slots[i] - 1;
      if (room < 1) {
        throw DataError("overlapping runs: events at " +
                        format_number(pp.events[i].time) + " and " +
                        format_number(pp.events[i + 1].time) +
                        " s fall in the same or adjacent samples");
      }
      int tries = 0;
      while (length > room) {
        if (++tries > kMaxMarkRedraws) {
          throw DataError("overlapping runs: could not redraw a run length "
                          "that fits before the next event at " +
                          format_number(pp.events[i + 1].time) + " s");
        }
        length = rng.geometric(marks.q);
      }
    } else {
      length = static_cast<int>(
          std::min<std::int64_t>(length, n_slots - slots[i]));
    }
    out.events.push_back(
        {pp.window_start + static_cast<double>(slots[i]) * step, length});
  }
  return out;
}

SampledSeries render_series(const MarkedPointProcess& gridded,
                            double base_level, double extreme_level) {
  if (!(extreme_level > base_level)) {
    throw InvalidArgument("extreme_level must exceed base_level");
  }
  const double step = gridded.dt;
  const auto n = static_cast<std::size_t>(std::llround(gridded.span() / step));
  if (n == 0) throw InvalidArgument("empty synthetic window");
  std::vector<double> values(n, base_level);
  for (const auto& e : gridded.events) {
    const auto slot =
        static_cast<std::size_t>(std::llround((e.time - gridded.window_start) / step));
    for (int k = 0; k < e.length && slot + static_cast<std::size_t>(k) < n; ++k) {
      values[slot + static_cast<std::size_t>(k)] = extreme_level;
    }
  }
  return SampledSeries(gridded.station_id,
                       static_cast<std::int64_t>(gridded.window_start),
                       static_cast<std::int64_t>(step), std::move(values),
                       std::vector<bool>(n, false));
}

MarkedPointProcess generate_gridded(const SynthSpec& spec, std::int64_t dt) {
  if (!(spec.window >= static_cast<double>(dt))) {
    throw InvalidArgument("synthetic window shorter than one sample");
  }
  SynthSpec s = spec;
  s.dt = static_cast<double>(dt);
  return snap_to_grid(generate(s), dt, spec.marks, spec.seed);
}

SampledSeries generate_series(const SynthSpec& spec, std::int64_t dt,
                              double base_level, double extreme_level) {
  if (!(extreme_level > base_level)) {
    throw InvalidArgument("extreme_level must exceed base_level");
  }
  return render_series(generate_gridded(spec, dt), base_level, extreme_level);
}

double truncated_pareto_mean(double gamma, double lo, double hi) {
  const double r = std::pow(lo / hi, gamma);
  const double norm = gamma * std::pow(lo, gamma) / (1.0 - r);
  if (std::abs(gamma - 1.0) < 1e-12) return norm * std::log(hi / lo);
  return norm * (std::pow(hi, 1.0 - gamma) - std::pow(lo, 1.0 - gamma)) /
         (1.0 - gamma);
}

double fractal_mean_gap(const FractalRenewalLaw& law) {
  return truncated_pareto_mean(tail_exponent_of(law), law.min_gap,
                               law.min_gap * law.cutoff_ratio);
}

std::pair<double, double> fractal_scaling_range(const FractalRenewalLaw& law) {
  return {10.0 * law.min_gap, 1e4 * law.min_gap};
}

std::pair<double, double> fractal_alpha_range() {
  const auto& table = fractal_calibration_table();
  return {table.front().alpha, table.back().alpha};
}

double fractal_tail_exponent(double alpha) {
  const auto& table = fractal_calibration_table();
  if (!(alpha >= table.front().alpha && alpha <= table.back().alpha)) {
    throw InvalidArgument("fractal alpha " + format_number(alpha) +
                          " outside the calibrated range [" +
                          format_number(table.front().alpha) + ", " +
                          format_number(table.back().alpha) + "]");
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (alpha <= table[i].alpha) {
      const auto& a = table[i - 1];
      const auto& b = table[i];
      const double w = (alpha - a.alpha) / (b.alpha - a.alpha);
      return a.gamma + w * (b.gamma - a.gamma);
    }
  }
  return table.back().gamma;
}

}  // namespace runclust
