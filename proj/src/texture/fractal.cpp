#include <algorithm>
#include <bit>
#include <cmath>

#include "texnoise/texture_features.hpp"

namespace texnoise {

std::vector<BoxCount> differential_box_counts(const Field& image) {
  const Eigen::Index side = image.rows();
  if (image.cols() != side || side < 1 || !std::has_single_bit(static_cast<std::size_t>(side))) {
    throw std::invalid_argument("box counting expects a square power-of-two field");
  }
  const double lo = image.minCoeff();
  const double range = image.maxCoeff() - lo;
  std::vector<BoxCount> counts;
  for (int s = 2; s <= 16 && s <= side / 2; s *= 2) {
    const Eigen::Index blocks = side / s;
    double n = 0.0;
    if (range == 0.0) {
      n = static_cast<double>(blocks * blocks);
    } else {
      const double h = s * range / static_cast<double>(side);
      for (Eigen::Index by = 0; by < blocks; ++by) {
        for (Eigen::Index bx = 0; bx < blocks; ++bx) {
          const auto block = image.block(by * s, bx * s, s, s);
          n += std::ceil((block.maxCoeff() - lo) / h) - std::ceil((block.minCoeff() - lo) / h) + 1.0;
        }
      }
    }
    counts.push_back({s, n});
  }
  if (counts.size() < 2) throw std::invalid_argument("fewer than two usable box sizes");
  return counts;
}

double box_counting_dimension(const Field& image) {
  const auto counts = differential_box_counts(image);
  if (image.minCoeff() == image.maxCoeff()) return 2.0;
  const auto n = static_cast<double>(counts.size());
  double sx = 0, sy = 0;
  for (const auto& c : counts) {
    sx += -std::log(static_cast<double>(c.box_size));
    sy += std::log(c.count);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (const auto& c : counts) {
    const double dx = -std::log(static_cast<double>(c.box_size)) - mx;
    sxy += dx * (std::log(c.count) - my);
    sxx += dx * dx;
  }
  return std::clamp(sxy / sxx, 2.0, 3.0);
}

namespace {

Field pad_power_of_two(const Field& f) {
  const auto side = static_cast<Eigen::Index>(std::bit_ceil(static_cast<std::size_t>(std::max(f.rows(), f.cols()))));
  if (side == f.rows() && side == f.cols()) return f;
  Field out(side, side);
  for (Eigen::Index y = 0; y < side; ++y) {
    for (Eigen::Index x = 0; x < side; ++x) out(y, x) = f(std::min(y, f.rows() - 1), std::min(x, f.cols() - 1));
  }
  return out;
}

Field smooth3(const Field& f, bool horizontal) {
  Field out(f.rows(), f.cols());
  const Eigen::Index rows = f.rows(), cols = f.cols();
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      double sum = 0.0;
      for (int d = -1; d <= 1; ++d) {
        const Eigen::Index xx = horizontal ? std::clamp<Eigen::Index>(x + d, 0, cols - 1) : x;
        const Eigen::Index yy = horizontal ? y : std::clamp<Eigen::Index>(y + d, 0, rows - 1);
        sum += f(yy, xx);
      }
      out(y, x) = sum / 3.0;
    }
  }
  return out;
}

}  // namespace

FeatureVector fd_features(const GrayImage& roi) {
  if (roi.width() < 8 || roi.height() < 8) throw FeatureError(TextureMethod::FD, "ROI side must be at least 8");
  // Centering first makes every derived image shift invariant.
  const Field raw = roi.to_field();
  const Field f = pad_power_of_two(raw - raw.mean());
  const double sigma = std::sqrt(f.square().mean() - std::pow(f.mean(), 2));
  const double lo = f.minCoeff(), hi = f.maxCoeff();
  const double upper = std::clamp(f.mean() + sigma, lo, hi);
  const double lower = std::clamp(f.mean() - sigma, lo, hi);

  const std::array<Field, 5> derived = {
      f,
      (f - upper).max(0.0).eval(),
      f.min(lower).eval(),
      smooth3(f, true),
      smooth3(f, false),
  };
  static constexpr std::array<std::string_view, 5> kNames = {"original", "high", "low", "hsmooth", "vsmooth"};

  FeatureVector out;
  out.method = TextureMethod::FD;
  out.values.resize(5);
  try {
    for (int k = 0; k < 5; ++k) {
      out.names.push_back("fd_dimension_" + std::string(kNames[k]));
      out.values(k) = box_counting_dimension(derived[k]);
    }
  } catch (const std::invalid_argument& e) {
    throw FeatureError(TextureMethod::FD, e.what());
  }
  return out;
}

}  // namespace texnoise
