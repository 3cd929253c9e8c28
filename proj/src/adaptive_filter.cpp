#include "texnoise/adaptive_filter.hpp"

#include <stdexcept>
#include <string>

namespace texnoise {

void FilterParams::validate() const {
  if (window_side < 3 || window_side % 2 == 0) {
    throw std::invalid_argument("filter window side must be odd and >= 3, got " + std::to_string(window_side));
  }
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
}

Field adaptive_filter(const Field& image, const FilterParams& params) {
  params.validate();
  if (image.rows() < params.window_side || image.cols() < params.window_side) {
    throw std::invalid_argument("image smaller than the filter window");
  }
  if (params.noise_variance == 0.0) return image;

  const LocalStats stats = local_statistics(image, params.window_side);
  Field out(image.rows(), image.cols());
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const double local_var = stats.variance.data()[i];
    double ratio = local_var > 0.0 ? params.noise_variance / local_var : 0.0;
    if (params.ratio_clamp && ratio > 1.0) ratio = 1.0;
    const double v = image.data()[i];
    out.data()[i] = v - ratio * (v - stats.mean.data()[i]);
  }
  return out;
}

Field adaptive_filter(const GrayImage& image, const FilterParams& params) {
  return adaptive_filter(image.to_field(), params);
}

Field residual_noise(const GrayImage& image, const Field& filtered) {
  if (filtered.rows() != image.height() || filtered.cols() != image.width()) {
    throw std::invalid_argument("residual_noise: dimension mismatch");
  }
  return image.to_field() - filtered;
}

GrayImage distort(const GrayImage& image, const Field& eta) {
  if (eta.rows() != image.height() || eta.cols() != image.width()) {
    throw std::invalid_argument("distort: dimension mismatch");
  }
  return GrayImage::from_field(image.to_field() + eta, image.bit_depth());
}

}  // namespace texnoise
