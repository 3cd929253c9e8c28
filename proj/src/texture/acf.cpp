#include <algorithm>
#include <cmath>

#include "texnoise/texture_features.hpp"

namespace texnoise {

namespace {

std::string signed_label(int v) { return v < 0 ? "m" + std::to_string(-v) : std::to_string(v); }

}  // namespace

double normalized_autocovariance(const Field& image, Offset lag) {
  const Eigen::Index rows = image.rows(), cols = image.cols();
  if (std::abs(lag.dx) >= cols || std::abs(lag.dy) >= rows) throw std::invalid_argument("lag exceeds ROI size");
  const double mean = image.mean();
  const double variance = (image - mean).square().mean();
  if (!(variance > 0.0)) return 0.0;
  double sum = 0.0;
  Eigen::Index valid = 0;
  for (Eigen::Index y = 0; y < rows; ++y) {
    const Eigen::Index y2 = y + lag.dy;
    if (y2 < 0 || y2 >= rows) continue;
    for (Eigen::Index x = 0; x < cols; ++x) {
      const Eigen::Index x2 = x + lag.dx;
      if (x2 < 0 || x2 >= cols) continue;
      sum += (image(y, x) - mean) * (image(y2, x2) - mean);
      ++valid;
    }
  }
  // Partial overlaps can push the ratio marginally past 1.
  return std::clamp(sum / (static_cast<double>(valid) * variance), -1.0, 1.0);
}

FeatureVector acf_features(const GrayImage& roi) {
  if (roi.width() < 3 || roi.height() < 3) throw FeatureError(TextureMethod::ACF, "ROI side must be at least 3");
  const Field f = roi.to_field();
  FeatureVector out;
  out.method = TextureMethod::ACF;
  out.values.resize(kAcfLags.size());
  out.degenerate = !((f - f.mean()).square().sum() > 0.0);
  for (std::size_t k = 0; k < kAcfLags.size(); ++k) {
    const Offset lag = kAcfLags[k];
    out.names.push_back("acf_rho_" + signed_label(lag.dx) + "_" + signed_label(lag.dy));
    out.values(static_cast<Eigen::Index>(k)) = normalized_autocovariance(f, lag);
  }
  return out;
}

}  // namespace texnoise
