// Generated from data/fractal_calibration.csv (alpha_smooth column).
// Regenerate with tools/calibrate_fractal; do not edit by hand.
#include "runclust/synth.hpp"

namespace runclust {

const std::vector<FractalCalibrationRow>& fractal_calibration_table() {
  static const std::vector<FractalCalibrationRow> table = {
      {0.06, 0.3880},
      {0.10, 0.4018},
      {0.14, 0.4182},
      {0.18, 0.4371},
      {0.22, 0.4580},
      {0.26, 0.4807},
      {0.30, 0.5049},
      {0.34, 0.5303},
      {0.38, 0.5566},
      {0.42, 0.5835},
      {0.46, 0.6107},
      {0.50, 0.6379},
      {0.54, 0.6648},
      {0.58, 0.6911},
      {0.62, 0.7166},
      {0.66, 0.7409},
      {0.70, 0.7637},
      {0.74, 0.7848},
      {0.78, 0.8038},
      {0.82, 0.8205},
      {0.86, 0.8345},
      {0.90, 0.8456},
  };
  return table;
}

}  // namespace runclust
