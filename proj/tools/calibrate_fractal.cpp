// Regenerates the fractal-renewal calibration table: for each tail exponent
// gamma, the AF slope fitted over the generator's scaling range, averaged
// over independent long realizations.
//
//   calibrate_fractal [--events N] [--seeds K] [--cpp]
//
// The raw means wiggle by about 0.02 with the grid discretization, so a
// low-order polynomial in gamma is fitted and tabulated; the lookup inverts
// that smoothed column. The default options reproduce
// core/data/fractal_calibration.csv.

#include <cmath>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "runclust/allan.hpp"
#include "runclust/parallel.hpp"
#include "runclust/synth.hpp"

namespace {

// Least-squares polynomial coefficients, constant term first, from the
// normal equations (fine for degree <= 4 on gamma in (0, 2)).
std::vector<double> polyfit(const std::vector<double>& x,
                            const std::vector<double>& y, int degree) {
  const auto n = static_cast<std::size_t>(degree + 1);
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] += std::pow(x[i], static_cast<double>(r + c));
      }
      a[r][n] += y[i] * std::pow(x[i], static_cast<double>(r));
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> coef(n);
  for (std::size_t r = 0; r < n; ++r) coef[r] = a[r][n] / a[r][r];
  return coef;
}

double polyval(const std::vector<double>& coef, double x) {
  double v = 0.0;
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) v = v * x + *it;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the fractal-renewal generator"};
  double events = 1e6;
  int seeds = 8;
  double gamma_lo = 0.06, gamma_hi = 0.9, gamma_step = 0.04;
  int degree = 3;
  bool cpp = false;
  double ratio = runclust::kFractalCutoffRatio;
  std::vector<double> fit_decades;
  unsigned workers = 0;
  app.add_option("--events", events, "events per realization");
  app.add_option("--seeds", seeds, "realizations per exponent");
  app.add_option("--gamma-lo", gamma_lo);
  app.add_option("--gamma-hi", gamma_hi);
  app.add_option("--gamma-step", gamma_step);
  app.add_option("--workers", workers);
  app.add_option("--cutoff-ratio", ratio, "max/min interevent ratio");
  app.add_option("--fit-decades", fit_decades,
                 "fit range as decades above min_gap (default: scaling range)")
      ->expected(2);
  app.add_option("--degree", degree, "degree of the smoothing polynomial");
  app.add_flag("--cpp", cpp, "emit C++ initializer rows instead of CSV");
  CLI11_PARSE(app, argc, argv);

  std::vector<double> gammas;
  for (double g = gamma_lo; g <= gamma_hi + 1e-9; g += gamma_step) {
    gammas.push_back(std::round(g * 1e6) / 1e6);
  }
  struct Row {
    double mean = 0, sd = 0;
  };
  std::vector<Row> rows(gammas.size());

  runclust::parallel_for(gammas.size(), workers, [&](std::size_t gi, unsigned) {
    runclust::FractalRenewalLaw law;
    law.min_gap = 1.0;
    law.tail_exponent = gammas[gi];
    law.cutoff_ratio = ratio;
    auto range = runclust::fractal_scaling_range(law);
    if (fit_decades.size() == 2) {
      range = {std::pow(10.0, fit_decades[0]), std::pow(10.0, fit_decades[1])};
    }
    std::vector<double> alphas;
    for (int s = 0; s < seeds; ++s) {
      runclust::SynthSpec spec;
      spec.kind = law;
      spec.window = events * runclust::fractal_mean_gap(law);
      spec.seed = 1000 + static_cast<std::uint64_t>(s);
      spec.dt = law.min_gap / 2.0;
      const auto pp = runclust::generate(spec);
      const auto grid = runclust::default_tau_grid(pp);
      const auto curve = runclust::af_curve(pp, grid);
      const auto fit =
          runclust::fit_power_law(curve, range);
      alphas.push_back(fit.alpha);
    }
    double m = 0;
    for (double a : alphas) m += a;
    m /= static_cast<double>(alphas.size());
    double v = 0;
    for (double a : alphas) v += (a - m) * (a - m);
    rows[gi] = {m, std::sqrt(v / static_cast<double>(alphas.size()))};
  });

  std::vector<double> means;
  for (const auto& r : rows) means.push_back(r.mean);
  const auto coef = polyfit(gammas, means, degree);

  if (!cpp) {
    std::printf("# Empirical Allan-factor slope of the fractal renewal generator.\n");
    std::printf("# min_gap=1, cutoff_ratio=%g, dt=0.5, 60-point default tau grid,\n", ratio);
    std::printf("# fit range [10, 1e4], %g events, %d seeds per gamma.\n", events, seeds);
    std::printf("# alpha_smooth is a degree-%d least-squares fit of alpha over gamma and is\n",
                degree);
    std::printf("# the column used for inversion.\n");
    std::printf("gamma,alpha,alpha_sd,alpha_smooth\n");
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const double smooth = polyval(coef, gammas[i]);
    if (cpp) {
      std::printf("      {%.2f, %.4f},\n", gammas[i], smooth);
    } else {
      std::printf("%.2f,%.4f,%.4f,%.4f\n", gammas[i], rows[i].mean, rows[i].sd, smooth);
    }
  }
  return 0;
}
