#include "runclust/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include <json.hpp>

#include "runclust/error.hpp"
#include "runclust/io.hpp"
#include "runclust/parallel.hpp"
#include "runclust/rng.hpp"
#include "runclust/surrogates.hpp"

namespace runclust {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::string lm_label(int l_m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "Lm%02d", l_m);
  return buf;
}

ordered_json scalar_json(const ScalarResult& r) {
  ordered_json j;
  j["value"] = number_or_null(r.value);
  j["band_lo"] = r.band.lo;
  j["band_hi"] = r.band.hi;
  j["n_samples"] = r.band.n_samples;
  j["classification"] = std::string(to_string(r.classification));
  return j;
}

ordered_json cell_json(const std::string& station_id, const CellResult& c) {
  ordered_json j;
  j["station_id"] = station_id;
  j["percentile"] = c.percentile;
  j["l_m"] = c.l_m;
  j["status"] = std::string(to_string(c.status));
  if (!c.reason.empty()) j["reason"] = c.reason;
  j["threshold"] = c.threshold;
  j["n_events"] = c.n_events;
  j["surrogate_seed"] = c.seed;
  j["mean_interevent_s"] =
      c.mean_interevent ? ordered_json(*c.mean_interevent) : ordered_json(nullptr);
  j["cv"] = c.cv ? scalar_json(*c.cv) : ordered_json(nullptr);
  j["lv"] = c.lv ? scalar_json(*c.lv) : ordered_json(nullptr);
  if (c.af) {
    ordered_json af;
    af["defined_points"] = c.af->taus.size();
    ordered_json omitted = ordered_json::array();
    for (const auto& o : c.af->omitted) {
      omitted.push_back({{"tau_seconds", o.tau},
                         {"reason", std::string(to_string(o.reason))}});
    }
    af["omitted"] = omitted;
    std::size_t positive = 0;
    double max_dp = -INFINITY;
    for (const auto& d : c.dp) {
      if (d.dp > 0.0) ++positive;
      max_dp = std::max(max_dp, d.dp);
    }
    af["dp_points"] = c.dp.size();
    af["dp_positive_points"] = positive;
    af["dp_max"] = c.dp.empty() ? ordered_json(nullptr) : ordered_json(max_dp);
    j["allan_factor"] = af;
  } else {
    j["allan_factor"] = nullptr;
  }
  if (c.fit) {
    ordered_json f;
    f["alpha"] = c.fit->alpha;
    f["tau1_seconds"] = number_or_null(c.fit->tau1);
    f["fit_lo_seconds"] = c.fit->fit_lo;
    f["fit_hi_seconds"] = c.fit->fit_hi;
    f["r_squared"] = c.fit->r_squared;
    f["n_points"] = c.fit->n_points;
    f["n_excluded"] = c.fit->n_excluded;
    f["scaling_detected"] = c.fit->scaling_detected;
    if (!c.fit->scaling_detected) f["note"] = "no fractal scaling detected";
    j["power_law"] = f;
  } else {
    j["power_law"] = nullptr;
    if (!c.fit_note.empty()) j["power_law_note"] = c.fit_note;
  }
  j["cv_std"] = "population (divide by n)";
  j["quantile_estimator"] = "linear interpolation at rank p*(n-1)+1";
  return j;
}

std::vector<double> station_grid(const MarkedPointProcess& pp,
                                 const TauGridSpec& spec) {
  const double lo = spec.lo.value_or(2.0 * pp.dt);
  const double hi = spec.hi.value_or(pp.span() / 10.0);
  if (!(hi > lo)) {
    throw InsufficientData("observation window too short for the timescale "
                           "grid (upper timescale must exceed lower)");
  }
  return geometric_grid(lo, hi, spec.points);
}

CellResult analyse_cell(const MarkedPointProcess& all_runs,
                        const std::vector<double>& grid, double percentile,
                        int l_m, const AnalysisConfig& config,
                        unsigned surrogate_workers) {
  CellResult c;
  c.percentile = percentile;
  c.l_m = l_m;
  c.threshold = all_runs.threshold ? all_runs.threshold->value : 0.0;
  c.seed = cell_seed(*config.seed, all_runs.station_id, percentile, l_m);

  const MarkedPointProcess pp = filter_by_min_length(all_runs, l_m);
  c.n_events = pp.size();
  if (!pp.empty()) c.density = run_length_density(pp);
  if (pp.size() >= 2) c.mean_interevent = mean_interevent_time(interevent_times(pp));
  if (pp.size() < 3) {
    c.status = CellStatus::InsufficientEvents;
    c.reason = "insufficient events: " + std::to_string(pp.size()) +
               " runs with L >= " + std::to_string(l_m) + " (need 3)";
    return c;
  }

  SurrogateConfig sc;
  sc.n_surrogates = config.n_surrogates;
  sc.seed = c.seed;
  sc.lo_quantile = config.lo_quantile;
  sc.hi_quantile = config.hi_quantile;
  sc.workers = surrogate_workers;
  const SurrogateBands bands = surrogate_bands(pp, grid, sc);

  const IntereventSeries t = interevent_times(pp);
  const double cv = coefficient_of_variation(t);
  const double lv = local_coefficient_of_variation(t);
  c.cv = ScalarResult{cv, bands.cv, bands.cv.classify(cv)};
  c.lv = ScalarResult{lv, bands.lv, bands.lv.classify(lv)};

  c.af = af_curve(pp, grid, l_m);
  c.af_band = bands.af;
  c.dp = departure(*c.af, bands.af, config.dp_cutoff);
  if (c.af->taus.empty()) {
    c.status = CellStatus::UndefinedAf;
    c.reason = "Allan Factor undefined at every timescale";
    return c;
  }
  try {
    const auto range = config.fit_range.value_or(default_fit_range(*c.af));
    c.fit = fit_power_law(*c.af, range);
  } catch (const InsufficientData& e) {
    c.fit_note = e.what();
  }
  return c;
}

void write_station_outputs(const StationReport& report,
                           const std::vector<MarkedPointProcess>& runs,
                           const AnalysisConfig& config) {
  const auto dir = config.output_dir / report.meta.station_id;
  for (std::size_t p = 0; p < config.percentiles.size(); ++p) {
    const auto pdir = dir / percentile_label(config.percentiles[p]);
    write_file_atomic(pdir / "runs.csv", events_to_csv(runs[p]));
    write_file_atomic(pdir / "runs.json", events_sidecar_json(runs[p]));
    if (report.densities[p]) {
      write_file_atomic(pdir / "density.csv", density_to_csv(*report.densities[p]));
    }
  }
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    const auto cdir = dir / percentile_label(c.percentile) / lm_label(c.l_m);
    const ordered_json cj = cell_json(report.meta.station_id, c);
    write_file_atomic(cdir / "stats.json", cj.dump(2) + "\n");
    if (c.density) write_file_atomic(cdir / "density.csv", density_to_csv(*c.density));
    if (c.af && c.af_band) {
      write_file_atomic(cdir / "af.csv",
                        af_table_to_csv(*c.af, *c.af_band, config.dp_cutoff));
    }
    cells.push_back(cj);
  }
  ordered_json s;
  s["station_id"] = report.meta.station_id;
  s["height_m"] = report.meta.height_m;
  if (report.meta.label) s["label"] = *report.meta.label;
  s["n_samples"] = report.n_samples;
  s["gap_fraction"] = report.gap_fraction;
  ordered_json th = ordered_json::array();
  for (const auto& t : report.thresholds) {
    th.push_back({{"percentile", t.percentile.value_or(NAN)}, {"value", t.value}});
  }
  s["thresholds"] = th;
  s["tau_grid_seconds"] = report.tau_grid;
  s["cells"] = cells;
  write_file_atomic(dir / "summary.json", s.dump(2) + "\n");
}

std::size_t percentile_index(const AnalysisConfig& config, double p) {
  const auto it = std::find(config.percentiles.begin(), config.percentiles.end(), p);
  return static_cast<std::size_t>(it - config.percentiles.begin());
}

}  // namespace

std::vector<int> default_l_m_values() {
  std::vector<int> v(30);
  for (int i = 0; i < 30; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  return v;
}

void AnalysisConfig::validate() const {
  if (percentiles.empty()) throw InvalidArgument("percentiles must not be empty");
  if (l_m_values.empty()) throw InvalidArgument("l_m_values must not be empty");
  for (double p : percentiles) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("percentile outside (0,1)");
  }
  if (std::set<double>(percentiles.begin(), percentiles.end()).size() !=
      percentiles.size()) {
    throw InvalidArgument("duplicate percentile");
  }
  for (int l : l_m_values) {
    if (l < 1) throw InvalidArgument("L_m values must be >= 1");
  }
  if (std::set<int>(l_m_values.begin(), l_m_values.end()).size() !=
      l_m_values.size()) {
    throw InvalidArgument("duplicate L_m value");
  }
  if (tau_grid.points < 2) throw InvalidArgument("tau grid needs >= 2 points");
  if (tau_grid.lo && !(*tau_grid.lo > 0.0)) {
    throw InvalidArgument("tau grid lower bound must be positive");
  }
  if (!seed) throw InvalidArgument("a surrogate seed is required (--seed)");
  if (dt <= 0) throw InvalidArgument("dt must be positive");
  if (!(dp_cutoff >= 0.0)) throw InvalidArgument("dp cutoff must be >= 0");
  if (fit_range && !(fit_range->first > 0.0 && fit_range->second > fit_range->first)) {
    throw InvalidArgument("fit range must satisfy 0 < lo < hi");
  }
  SurrogateConfig sc;
  sc.n_surrogates = n_surrogates;
  sc.lo_quantile = lo_quantile;
  sc.hi_quantile = hi_quantile;
  sc.validate();
}

std::string config_to_json(const AnalysisConfig& config) {
  ordered_json j;
  j["percentiles"] = config.percentiles;
  j["l_m_values"] = config.l_m_values;
  j["tau_grid"] = {
      {"lo_seconds", config.tau_grid.lo ? ordered_json(*config.tau_grid.lo)
                                        : ordered_json("2*dt")},
      {"hi_seconds", config.tau_grid.hi ? ordered_json(*config.tau_grid.hi)
                                        : ordered_json("span/10")},
      {"points", config.tau_grid.points}};
  j["n_surrogates"] = config.n_surrogates;
  j["seed"] = config.seed ? ordered_json(*config.seed) : ordered_json(nullptr);
  j["band_quantiles"] = {config.lo_quantile, config.hi_quantile};
  j["dp_cutoff_seconds"] = config.dp_cutoff;
  j["dt_seconds"] = config.dt;
  j["min_threshold_samples"] = config.min_threshold_samples;
  j["fit_range_seconds"] =
      config.fit_range ? ordered_json({config.fit_range->first, config.fit_range->second})
                       : ordered_json("middle two log-decades of the AF curve");
  j["quantile_estimator"] = "linear interpolation at rank p*(n-1)+1";
  j["cv_std"] = "population (divide by n)";
  j["surrogates"] = "conditioned Poisson: N uniform times over the window, marks permuted";
  j["rng"] = "mt19937_64, per-surrogate seeds via splitmix64(master, index)";
  return j.dump(2) + "\n";
}

AnalysisConfig config_from_json(const std::string& json_text,
                                AnalysisConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "percentiles") {
        base.percentiles = value.get<std::vector<double>>();
      } else if (key == "l_m_values") {
        base.l_m_values = value.get<std::vector<int>>();
      } else if (key == "tau_grid") {
        for (const auto& [k, v] : value.items()) {
          if (k == "lo_seconds" && v.is_number()) base.tau_grid.lo = v.get<double>();
          else if (k == "hi_seconds" && v.is_number()) base.tau_grid.hi = v.get<double>();
          else if (k == "points") base.tau_grid.points = v.get<std::size_t>();
          else if (!(k == "lo_seconds" || k == "hi_seconds"))
            throw InvalidArgument("unknown tau_grid key '" + k + "'");
        }
      } else if (key == "n_surrogates") {
        base.n_surrogates = value.get<std::size_t>();
      } else if (key == "seed") {
        if (!value.is_null()) base.seed = value.get<std::uint64_t>();
      } else if (key == "band_quantiles") {
        const auto q = value.get<std::vector<double>>();
        if (q.size() != 2) throw InvalidArgument("band_quantiles needs 2 values");
        base.lo_quantile = q[0];
        base.hi_quantile = q[1];
      } else if (key == "dp_cutoff_seconds") {
        base.dp_cutoff = value.get<double>();
      } else if (key == "dt_seconds") {
        base.dt = value.get<std::int64_t>();
      } else if (key == "min_threshold_samples") {
        base.min_threshold_samples = value.get<std::size_t>();
      } else if (key == "fit_range_seconds") {
        if (value.is_array()) {
          const auto r = value.get<std::vector<double>>();
          if (r.size() != 2) throw InvalidArgument("fit_range_seconds needs 2 values");
          base.fit_range = std::make_pair(r[0], r[1]);
        }
      } else if (key == "workers") {
        base.workers = value.get<unsigned>();
      } else if (key == "output_dir") {
        base.output_dir = value.get<std::string>();
      } else if (key == "quantile_estimator" || key == "cv_std" ||
                 key == "surrogates" || key == "rng") {
        // informational keys echoed by config_to_json
      } else {
        throw InvalidArgument("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
  return base;
}

std::string_view to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Ok: return "ok";
    case CellStatus::InsufficientEvents: return "insufficient_events";
    case CellStatus::UndefinedAf: return "undefined_af";
  }
  return "?";
}

bool StationReport::all_ok() const {
  if (error) return false;
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) {
    return c.status == CellStatus::Ok;
  });
}

bool BatchReport::all_ok() const {
  return std::all_of(stations.begin(), stations.end(),
                     [](const StationReport& s) { return s.all_ok(); });
}

std::string percentile_label(double percentile) {
  return "p" + format_number(percentile);
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& station_id,
                        double percentile, int l_m) {
  const auto p_key = static_cast<std::uint64_t>(std::llround(percentile * 1e6));
  return derive_seed(derive_seed(master, stable_hash(station_id)),
                     (p_key << 16) | static_cast<std::uint64_t>(l_m));
}

StationReport run_station(const SampledSeries& series, const StationMeta& meta,
                          const AnalysisConfig& config) {
  config.validate();
  StationReport report;
  report.meta = meta;
  report.n_samples = series.size();
  report.gap_fraction = series.gap_fraction();
  report.thresholds = compute_thresholds(series, config.percentiles,
                                         config.min_threshold_samples);

  std::vector<MarkedPointProcess> runs;
  for (const auto& t : report.thresholds) {
    MarkedPointProcess pp = extract_runs(series, t);
    pp.station_id = meta.station_id;
    report.densities.push_back(pp.empty() ? std::nullopt
                                          : std::optional(run_length_density(pp)));
    runs.push_back(std::move(pp));
  }
  report.tau_grid = station_grid(runs.front(), config.tau_grid);

  struct CellKey {
    std::size_t p;
    int l_m;
  };
  std::vector<CellKey> keys;
  for (std::size_t p = 0; p < config.percentiles.size(); ++p) {
    for (int l : config.l_m_values) keys.push_back({p, l});
  }
  const unsigned workers = resolve_workers(config.workers);
  const unsigned cell_workers =
      static_cast<unsigned>(std::min<std::size_t>(workers, keys.size()));
  const unsigned surrogate_workers = std::max(1u, workers / std::max(1u, cell_workers));

  report.cells.resize(keys.size());
  parallel_for(keys.size(), cell_workers, [&](std::size_t i, unsigned) {
    report.cells[i] = analyse_cell(runs[keys[i].p], report.tau_grid,
                                   config.percentiles[keys[i].p], keys[i].l_m,
                                   config, surrogate_workers);
  });

  if (!config.output_dir.empty()) write_station_outputs(report, runs, config);
  return report;
}

BatchReport run_batch(const std::filesystem::path& station_dir,
                      const std::filesystem::path& meta_path,
                      const AnalysisConfig& config) {
  namespace fs = std::filesystem;
  config.validate();
  if (!fs::is_directory(station_dir)) {
    throw DataError("station directory '" + station_dir.string() + "' not found");
  }
  const auto metas = parse_station_meta(meta_path);
  std::map<std::string, StationMeta> by_id;
  for (const auto& m : metas) by_id[m.station_id] = m;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(station_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw DataError("no station CSV files in '" + station_dir.string() + "'");
  }

  BatchReport batch;
  std::set<std::string> seen;
  for (const auto& file : files) {
    const std::string id = file.stem().string();
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      batch.warnings.push_back("no metadata for station file '" +
                               file.filename().string() + "'; skipped");
      continue;
    }
    seen.insert(id);
    try {
      const SampledSeries series = parse_series(file, id, config.dt);
      batch.stations.push_back(run_station(series, it->second, config));
    } catch (const InvalidArgument&) {
      throw;
    } catch (const Error& e) {
      StationReport failed;
      failed.meta = it->second;
      failed.error = e.what();
      batch.stations.push_back(std::move(failed));
    }
  }
  for (const auto& m : metas) {
    if (!seen.count(m.station_id)) {
      batch.warnings.push_back("station '" + m.station_id +
                               "' has metadata but no series file");
    }
  }

  // Cross-station products.
  batch.mean_density.resize(config.percentiles.size());
  for (std::size_t p = 0; p < config.percentiles.size(); ++p) {
    std::vector<RunLengthDensity> ds;
    for (const auto& s : batch.stations) {
      if (!s.error && s.densities[p]) ds.push_back(*s.densities[p]);
    }
    if (!ds.empty()) batch.mean_density[p] = average_density(ds);
  }

  if (config.output_dir.empty()) return batch;
  const auto out = config.output_dir / "batch";
  for (std::size_t p = 0; p < config.percentiles.size(); ++p) {
    if (batch.mean_density[p]) {
      write_file_atomic(out / ("mean_density_" +
                               percentile_label(config.percentiles[p]) + ".csv"),
                        density_to_csv(*batch.mean_density[p]));
    }
  }

  std::string thresholds = "station_id,height_m,percentile,threshold\n";
  std::string interevent = "station_id,height_m,percentile,l_m,n_events,mean_interevent_s\n";
  std::map<std::pair<std::size_t, int>, std::vector<DepartureRow>> surfaces;
  for (const auto& s : batch.stations) {
    if (s.error) continue;
    for (const auto& t : s.thresholds) {
      thresholds += s.meta.station_id + "," + format_number(s.meta.height_m) +
                    "," + format_number(*t.percentile) + "," +
                    format_number(t.value) + "\n";
    }
    for (const auto& c : s.cells) {
      interevent += s.meta.station_id + "," + format_number(s.meta.height_m) +
                    "," + format_number(c.percentile) + "," +
                    std::to_string(c.l_m) + "," + std::to_string(c.n_events) +
                    "," +
                    (c.mean_interevent ? format_number(*c.mean_interevent) : "") +
                    "\n";
      auto& rows = surfaces[{percentile_index(config, c.percentile), c.l_m}];
      for (const auto& d : c.dp) {
        rows.push_back({s.meta.station_id, s.meta.height_m, d.tau, d.dp});
      }
    }
  }
  write_file_atomic(out / "thresholds_vs_height.csv", thresholds);
  write_file_atomic(out / "interevent_vs_height.csv", interevent);
  for (std::size_t p = 0; p < config.percentiles.size(); ++p) {
    for (int l : config.l_m_values) {
      const auto it = surfaces.find({p, l});
      const std::vector<DepartureRow> empty;
      const auto& rows = it == surfaces.end() ? empty : it->second;
      write_file_atomic(out / ("departure_" +
                               percentile_label(config.percentiles[p]) + "_" +
                               lm_label(l) + ".csv"),
                        departure_surface_to_csv(rows));
    }
  }

  ordered_json summary;
  ordered_json stations = ordered_json::array();
  for (const auto& s : batch.stations) {
    ordered_json sj;
    sj["station_id"] = s.meta.station_id;
    sj["height_m"] = s.meta.height_m;
    if (s.error) {
      sj["status"] = "error";
      sj["error"] = *s.error;
    } else {
      sj["status"] = s.all_ok() ? "ok" : "partial";
      ordered_json cells = ordered_json::array();
      for (const auto& c : s.cells) {
        ordered_json cj{{"percentile", c.percentile},
                        {"l_m", c.l_m},
                        {"status", std::string(to_string(c.status))}};
        if (!c.reason.empty()) cj["reason"] = c.reason;
        cells.push_back(cj);
      }
      sj["cells"] = cells;
    }
    stations.push_back(sj);
  }
  summary["stations"] = stations;
  summary["warnings"] = batch.warnings;
  write_file_atomic(out / "batch_summary.json", summary.dump(2) + "\n");
  return batch;
}

}  // namespace runclust
