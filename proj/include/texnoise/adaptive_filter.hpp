#pragma once

#include "texnoise/image.hpp"

namespace texnoise {

struct FilterParams {
  int window_side = 5;
  double noise_variance = 0.0;
  /// Caps the noise-to-local variance ratio at 1.
  bool ratio_clamp = true;

  /// Throws std::invalid_argument on an even or too small window, or a
  /// negative noise variance.
  void validate() const;
};

struct LocalStats {
  Field mean;
  /// Population variance over the window.
  Field variance;
};

/// Mean and variance over a centered square window with replicated edges.
template <typename Derived>
LocalStats local_statistics(const Eigen::ArrayBase<Derived>& image, int window_side) {
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  const int half = window_side / 2;
  const double count = static_cast<double>(window_side) * window_side;
  LocalStats out{Field(rows, cols), Field(rows, cols)};
  auto clamp_index = [](Eigen::Index i, Eigen::Index n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      double sum = 0.0;
      for (int dy = -half; dy <= half; ++dy) {
        const Eigen::Index yy = clamp_index(y + dy, rows);
        for (int dx = -half; dx <= half; ++dx) {
          sum += static_cast<double>(image(yy, clamp_index(x + dx, cols)));
        }
      }
      const double mean = sum / count;
      double sq = 0.0;
      for (int dy = -half; dy <= half; ++dy) {
        const Eigen::Index yy = clamp_index(y + dy, rows);
        for (int dx = -half; dx <= half; ++dx) {
          const double d = static_cast<double>(image(yy, clamp_index(x + dx, cols))) - mean;
          sq += d * d;
        }
      }
      out.mean(y, x) = mean;
      out.variance(y, x) = sq / count;
    }
  }
  return out;
}

/// Adaptive local noise reduction:
///   f_c = I - r (I - mu_L),  r = sigma_eta^2 / sigma_L^2
/// with r = 0 on flat windows and r <= 1 when clamped.
Field adaptive_filter(const Field& image, const FilterParams& params);
Field adaptive_filter(const GrayImage& image, const FilterParams& params);

/// eta = I - f_c.
Field residual_noise(const GrayImage& image, const Field& filtered);

/// f_d = I + eta, rounded half away from zero and clamped to the bit depth.
GrayImage distort(const GrayImage& image, const Field& eta);

}  // namespace texnoise
