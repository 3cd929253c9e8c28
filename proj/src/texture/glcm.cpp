#include <cmath>

#include "texnoise/texture_features.hpp"

namespace texnoise {

int degrees(Direction d) {
  switch (d) {
    case Direction::Deg0: return 0;
    case Direction::Deg45: return 45;
    case Direction::Deg90: return 90;
    case Direction::Deg135: return 135;
  }
  return 0;
}

Offset direction_offset(Direction d, int distance) {
  switch (d) {
    case Direction::Deg0: return {distance, 0};
    case Direction::Deg45: return {distance, -distance};
    case Direction::Deg90: return {0, -distance};
    case Direction::Deg135: return {-distance, -distance};
  }
  return {};
}

namespace {

void check_levels(const LevelPlane& levels, int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("number of gray levels must be positive");
  if (levels.size() > 0 && (levels.minCoeff() < 0 || levels.maxCoeff() >= n_levels)) {
    throw std::invalid_argument("gray level outside [0, levels)");
  }
}

}  // namespace

GlcmMatrix glcm_matrix(const LevelPlane& levels, int n_levels, Direction direction, int distance) {
  check_levels(levels, n_levels);
  if (distance < 1) throw std::invalid_argument("GLCM distance must be positive");
  const Offset off = direction_offset(direction, distance);
  const Eigen::Index rows = levels.rows(), cols = levels.cols();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_levels, n_levels);
  double pairs = 0.0;
  for (Eigen::Index y = 0; y < rows; ++y) {
    const Eigen::Index y2 = y + off.dy;
    if (y2 < 0 || y2 >= rows) continue;
    for (Eigen::Index x = 0; x < cols; ++x) {
      const Eigen::Index x2 = x + off.dx;
      if (x2 < 0 || x2 >= cols) continue;
      const auto i = levels(y, x), j = levels(y2, x2);
      counts(i, j) += 1.0;
      counts(j, i) += 1.0;
      pairs += 2.0;
    }
  }
  if (pairs == 0.0) {
    throw std::invalid_argument("ROI too small for GLCM at " + std::to_string(degrees(direction)) + " degrees");
  }
  return {n_levels, direction, distance, counts / pairs};
}

Eigen::Matrix<double, 8, 1> haralick_features(const GlcmMatrix& glcm) {
  const Eigen::MatrixXd& p = glcm.probs;
  const Eigen::Index n = p.rows();
  const Eigen::VectorXd marginal = p.rowwise().sum();
  const Eigen::VectorXd level = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  const double mu = marginal.dot(level);
  const double var = marginal.dot((level.array() - mu).square().matrix());

  double energy = 0, contrast = 0, cov = 0, homogeneity = 0, entropy = 0, dissimilarity = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = p(i, j);
      if (v == 0.0) continue;
      const double d = static_cast<double>(i - j);
      energy += v * v;
      contrast += d * d * v;
      cov += (i - mu) * (j - mu) * v;
      homogeneity += v / (1.0 + d * d);
      entropy -= v * std::log(v);
      dissimilarity += std::abs(d) * v;
    }
  }
  // A single occupied level is perfectly correlated with itself.
  const double correlation = var > 0.0 ? cov / var : 1.0;
  Eigen::Matrix<double, 8, 1> f;
  f << energy, contrast, correlation, homogeneity, entropy, var, 2.0 * mu, dissimilarity;
  return f;
}

FeatureVector glcm_features(const GrayImage& roi, int levels, int distance) {
  FeatureVector out;
  out.method = TextureMethod::GLCM;
  out.values.resize(32);
  try {
    const LevelPlane q = quantize(roi, levels).pixels();
    int slot = 0;
    for (auto dir : kDirections) {
      const auto f = haralick_features(glcm_matrix(q, levels, dir, distance));
      for (int k = 0; k < 8; ++k) {
        out.names.push_back("glcm_" + std::string(kGlcmFeatureNames[k]) + "_" + std::to_string(degrees(dir)));
        out.values(slot++) = f(k);
      }
    }
  } catch (const std::invalid_argument& e) {
    throw FeatureError(TextureMethod::GLCM, e.what());
  }
  return out;
}

}  // namespace texnoise
