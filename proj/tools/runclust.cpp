// runclust: extreme-event run extraction and time-clustering analysis.
//
//   runclust analyze --series S.csv --seed 1 --out out/
//   runclust batch   --stations dir/ --meta meta.csv --seed 1 --out out/
//   runclust synth   --kind poisson --rate 0.001 --window 864000 --seed 1 --out ev.csv
//   runclust af      --events ev.csv --seed 1 --out af.csv
//
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 partial (some cells failed).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "runclust/analysis.hpp"
#include "runclust/error.hpp"
#include "runclust/io.hpp"
#include "runclust/runs.hpp"
#include "runclust/surrogates.hpp"
#include "runclust/synth.hpp"
#include "runclust/timeutil.hpp"

namespace fs = std::filesystem;
using namespace runclust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flags shared by every surrogate-bearing subcommand. Values are only
// applied when the flag was given, so a config file can supply the rest.
struct CommonFlags {
  std::string config_path;
  std::vector<double> percentiles;
  std::vector<int> l_m_values;
  std::optional<double> tau_lo, tau_hi;
  std::optional<std::size_t> tau_points;
  std::optional<std::size_t> n_surrogates;
  std::optional<std::uint64_t> seed;
  std::optional<double> dp_cutoff;
  std::optional<std::int64_t> dt;
  std::optional<unsigned> workers;
  std::optional<std::size_t> min_samples;
  std::vector<double> fit_range;
  std::string out;

  void attach(CLI::App* app, bool analysis) {
    app->add_option("--config", config_path, "JSON config file");
    if (analysis) {
      app->add_option("--percentiles", percentiles,
                      "threshold percentiles (default 0.95 0.975 0.99)");
      app->add_option("--min-samples", min_samples,
                      "minimum non-missing samples for a threshold");
    }
    app->add_option("--lm", l_m_values,
                    analysis ? "minimum run lengths (default 1..30)"
                             : "minimum run length (default 1)");
    app->add_option("--tau-lo", tau_lo, "smallest timescale, seconds");
    app->add_option("--tau-hi", tau_hi, "largest timescale, seconds");
    app->add_option("--tau-points", tau_points, "timescale grid points");
    app->add_option("--n-surrogates", n_surrogates, "Poisson surrogates");
    app->add_option("--seed", seed, "master seed (required)");
    app->add_option("--dp-cutoff", dp_cutoff,
                    "departure cutoff in seconds (default 12000)");
    app->add_option("--dt", dt, "sampling interval in seconds (default 600)");
    app->add_option("--workers", workers, "worker threads (0 = all cores)");
    app->add_option("--fit-range", fit_range, "power-law fit range lo hi")
        ->expected(2);
    app->add_option("--out", out, "output directory or file")->required();
  }

  AnalysisConfig build() const {
    AnalysisConfig c;
    if (!config_path.empty()) c = config_from_json(slurp(config_path), c);
    if (!percentiles.empty()) c.percentiles = percentiles;
    if (!l_m_values.empty()) c.l_m_values = l_m_values;
    if (tau_lo) c.tau_grid.lo = *tau_lo;
    if (tau_hi) c.tau_grid.hi = *tau_hi;
    if (tau_points) c.tau_grid.points = *tau_points;
    if (n_surrogates) c.n_surrogates = *n_surrogates;
    if (seed) c.seed = *seed;
    if (dp_cutoff) c.dp_cutoff = *dp_cutoff;
    if (dt) c.dt = *dt;
    if (workers) c.workers = *workers;
    if (min_samples) c.min_threshold_samples = *min_samples;
    if (fit_range.size() == 2) c.fit_range = std::make_pair(fit_range[0], fit_range[1]);
    if (!out.empty()) c.output_dir = out;
    return c;
  }
};

void print_station(const StationReport& r) {
  std::printf("%s: %zu samples, gap fraction %.4f\n", r.meta.station_id.c_str(),
              r.n_samples, r.gap_fraction);
  for (const auto& c : r.cells) {
    std::printf("  %s L_m=%-2d %-19s events=%zu", percentile_label(c.percentile).c_str(),
                c.l_m, std::string(to_string(c.status)).c_str(), c.n_events);
    if (c.cv) {
      std::printf(" Cv=%.3f (%s) Lv=%.3f (%s)", c.cv->value,
                  std::string(to_string(c.cv->classification)).c_str(), c.lv->value,
                  std::string(to_string(c.lv->classification)).c_str());
    }
    std::printf("\n");
  }
}

int cmd_analyze(const CommonFlags& flags, const std::string& series_path,
                std::string station_id, double height, const std::string& meta_path) {
  AnalysisConfig config = flags.build();
  config.validate();
  if (station_id.empty()) station_id = fs::path(series_path).stem().string();
  StationMeta meta{station_id, height, std::nullopt};
  if (!meta_path.empty()) {
    bool found = false;
    for (const auto& m : parse_station_meta(meta_path)) {
      if (m.station_id == station_id) {
        meta = m;
        found = true;
      }
    }
    if (!found) throw DataError("no metadata row for station '" + station_id + "'");
  }
  const SampledSeries series = parse_series(series_path, station_id, config.dt);
  write_file_atomic(config.output_dir / "config.json", config_to_json(config));
  const StationReport report = run_station(series, meta, config);
  print_station(report);
  return report.all_ok() ? kExitOk : kExitPartial;
}

int cmd_batch(const CommonFlags& flags, const std::string& stations,
              const std::string& meta_path) {
  AnalysisConfig config = flags.build();
  config.validate();
  write_file_atomic(config.output_dir / "config.json", config_to_json(config));
  const BatchReport report = run_batch(stations, meta_path, config);
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& s : report.stations) {
    if (s.error) {
      std::printf("%s: error: %s\n", s.meta.station_id.c_str(), s.error->c_str());
    } else {
      print_station(s);
    }
  }
  return report.all_ok() ? kExitOk : kExitPartial;
}

int cmd_af(const CommonFlags& flags, const std::string& events_path,
           std::string sidecar_path) {
  AnalysisConfig config = flags.build();
  if (!config.seed) throw InvalidArgument("a surrogate seed is required (--seed)");
  if (sidecar_path.empty()) {
    sidecar_path = fs::path(events_path).replace_extension(".json").string();
  }
  MarkedPointProcess pp = events_from_csv(slurp(events_path), slurp(sidecar_path));
  const int l_m = flags.l_m_values.empty() ? 1 : flags.l_m_values.front();
  pp = filter_by_min_length(pp, l_m);

  std::vector<double> grid;
  {
    const double lo = config.tau_grid.lo.value_or(2.0 * pp.dt);
    const double hi = config.tau_grid.hi.value_or(pp.span() / 10.0);
    grid = geometric_grid(lo, hi, config.tau_grid.points);
  }
  SurrogateConfig sc;
  sc.n_surrogates = config.n_surrogates;
  sc.seed = cell_seed(*config.seed, pp.station_id,
                      pp.threshold && pp.threshold->percentile ? *pp.threshold->percentile : 0.0,
                      l_m);
  sc.lo_quantile = config.lo_quantile;
  sc.hi_quantile = config.hi_quantile;
  sc.workers = config.workers;
  const AfCurve curve = af_curve(pp, grid, l_m);
  const AfBand band = af_band(pp, grid, sc);
  write_file_atomic(config.output_dir, af_table_to_csv(curve, band, config.dp_cutoff));
  std::printf("%zu events (L >= %d), %zu/%zu timescales defined\n", pp.size(), l_m,
              curve.taus.size(), grid.size());
  return curve.taus.empty() ? kExitPartial : kExitOk;
}

struct SynthFlags {
  std::string kind = "poisson";
  double rate = 1e-3, period = 3600, phase = 0, period2 = 0, phase2 = 0, regime = 0;
  double alpha = 0.5, min_gap = 600, cutoff_ratio = kFractalCutoffRatio;
  double cluster_rate = 1e-5, in_cluster_rate = 1e-3, cluster_size = 5;
  double window = 0, q = 0.5, dt = 600;
  std::string start = "0";
  std::uint64_t seed = 0;
  bool series = false;
  double base = 1.0, extreme = 10.0;
  std::string station_id = "synthetic";
  std::string out;
};

int cmd_synth(const SynthFlags& f) {
  SynthSpec spec;
  if (f.kind == "poisson") spec.kind = PoissonLaw{f.rate};
  else if (f.kind == "periodic") spec.kind = PeriodicLaw{f.period, f.phase};
  else if (f.kind == "mixed_periodic")
    spec.kind = MixedPeriodicLaw{f.period, f.period2 > 0 ? f.period2 : 100 * f.period,
                                 f.phase, f.phase2, f.regime};
  else if (f.kind == "fractal_renewal")
    spec.kind = FractalRenewalLaw{f.alpha, f.min_gap, f.cutoff_ratio, std::nullopt};
  else if (f.kind == "bursty")
    spec.kind = BurstyLaw{f.cluster_rate, f.in_cluster_rate, f.cluster_size};
  else throw InvalidArgument("unknown synth kind '" + f.kind + "'");
  spec.window = f.window;
  spec.seed = f.seed;
  spec.marks.q = f.q;
  spec.dt = f.dt;
  spec.station_id = f.station_id;
  double start = 0;
  if (!parse_double(f.start, start)) start = parse_iso8601(f.start);
  spec.start = start;

  if (f.series) {
    const auto dt = static_cast<std::int64_t>(f.dt);
    if (static_cast<double>(dt) != f.dt) throw InvalidArgument("--dt must be whole seconds");
    const SampledSeries s = generate_series(spec, dt, f.base, f.extreme);
    write_file_atomic(f.out, series_to_csv(s));
    std::printf("%zu samples written to %s\n", s.size(), f.out.c_str());
  } else {
    const MarkedPointProcess pp = generate(spec);
    write_file_atomic(f.out, events_to_csv(pp));
    write_file_atomic(fs::path(f.out).replace_extension(".json"), events_sidecar_json(pp));
    std::printf("%zu events written to %s\n", pp.size(), f.out.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme-event runs and time-clustering analysis"};
  app.require_subcommand(1);

  CommonFlags analyze_flags, batch_flags, af_flags;
  std::string series_path, station_id, meta_path, stations_dir, batch_meta;
  double height = 0.0;
  auto* analyze = app.add_subcommand("analyze", "analyse a single station series");
  analyze->add_option("--series", series_path, "timestamp,value CSV")->required();
  analyze->add_option("--station-id", station_id, "defaults to the file stem");
  analyze->add_option("--height", height, "station height, m a.s.l.");
  analyze->add_option("--meta", meta_path, "station_id,height CSV");
  analyze_flags.attach(analyze, true);

  auto* batch = app.add_subcommand("batch", "analyse a directory of stations");
  batch->add_option("--stations", stations_dir, "directory of <station_id>.csv")->required();
  batch->add_option("--meta", batch_meta, "station_id,height CSV")->required();
  batch_flags.attach(batch, true);

  std::string events_path, sidecar_path;
  auto* af = app.add_subcommand("af", "Allan Factor curve and band for an event CSV");
  af->add_option("--events", events_path, "event_time,run_length CSV")->required();
  af->add_option("--sidecar", sidecar_path, "JSON sidecar (default: <events>.json)");
  af_flags.attach(af, false);

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "generate a synthetic point process");
  synth->add_option("--kind", sf.kind,
                    "poisson|periodic|mixed_periodic|fractal_renewal|bursty");
  synth->add_option("--window", sf.window, "window length, seconds")->required();
  synth->add_option("--seed", sf.seed, "seed")->required();
  synth->add_option("--start", sf.start, "window start (ISO-8601 or epoch seconds)");
  synth->add_option("--rate", sf.rate, "poisson: events per second");
  synth->add_option("--period", sf.period, "periodic / mixed: period (train 1)");
  synth->add_option("--phase", sf.phase, "periodic / mixed: phase (train 1)");
  synth->add_option("--period2", sf.period2, "mixed: period of train 2");
  synth->add_option("--phase2", sf.phase2, "mixed: phase of train 2");
  synth->add_option("--regime", sf.regime, "mixed: regime length (default window/10)");
  synth->add_option("--alpha", sf.alpha, "fractal: target AF exponent");
  synth->add_option("--min-gap", sf.min_gap, "fractal: smallest interevent time");
  synth->add_option("--cutoff-ratio", sf.cutoff_ratio, "fractal: max/min interevent ratio");
  synth->add_option("--cluster-rate", sf.cluster_rate, "bursty: clusters per second");
  synth->add_option("--in-cluster-rate", sf.in_cluster_rate, "bursty: in-cluster rate");
  synth->add_option("--cluster-size", sf.cluster_size, "bursty: mean cluster size");
  synth->add_option("--q", sf.q, "geometric run-length parameter");
  synth->add_option("--dt", sf.dt, "sampling interval, seconds");
  synth->add_flag("--series", sf.series, "render a timestamp,value series instead of events");
  synth->add_option("--base", sf.base, "series: level outside runs");
  synth->add_option("--extreme", sf.extreme, "series: level inside runs");
  synth->add_option("--station-id", sf.station_id);
  synth->add_option("--out", sf.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_flags, series_path, station_id, height, meta_path);
    if (*batch) return cmd_batch(batch_flags, stations_dir, batch_meta);
    if (*af) return cmd_af(af_flags, events_path, sidecar_path);
    if (*synth) return cmd_synth(sf);
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
