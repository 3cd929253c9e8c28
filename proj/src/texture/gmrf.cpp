#include <Eigen/Eigenvalues>

#include "texnoise/texture_features.hpp"

namespace texnoise {

namespace {

constexpr int kReach = 2;

std::string signed_label(int v) { return v < 0 ? "m" + std::to_string(-v) : std::to_string(v); }

}  // namespace

GmrfFit fit_gmrf(const Field& image) {
  const Eigen::Index rows = image.rows(), cols = image.cols();
  if (rows < 2 * kReach + 1 || cols < 2 * kReach + 1) {
    throw std::invalid_argument("ROI has no interior pixels for the GMRF neighborhood");
  }
  const Field centered = image - image.mean();
  using Vec12 = Eigen::Matrix<double, 12, 1>;
  using Mat12 = Eigen::Matrix<double, 12, 12>;
  Mat12 normal = Mat12::Zero();
  Vec12 rhs = Vec12::Zero();
  Eigen::Index samples = 0;
  Vec12 q;
  for (Eigen::Index y = kReach; y < rows - kReach; ++y) {
    for (Eigen::Index x = kReach; x < cols - kReach; ++x) {
      for (int r = 0; r < 12; ++r) {
        const Offset o = kGmrfOffsets[r];
        q(r) = centered(y + o.dy, x + o.dx) + centered(y - o.dy, x - o.dx);
      }
      normal.selfadjointView<Eigen::Lower>().rankUpdate(q);
      rhs += q * centered(y, x);
      ++samples;
    }
  }
  normal = normal.selfadjointView<Eigen::Lower>();

  const Eigen::SelfAdjointEigenSolver<Mat12> eig(normal, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * top) {
    throw SingularSystemError("GMRF normal matrix is singular");
  }
  GmrfFit fit;
  fit.theta = normal.ldlt().solve(rhs);
  fit.samples = samples;

  double rss = 0.0;
  for (Eigen::Index y = kReach; y < rows - kReach; ++y) {
    for (Eigen::Index x = kReach; x < cols - kReach; ++x) {
      double pred = 0.0;
      for (int r = 0; r < 12; ++r) {
        const Offset o = kGmrfOffsets[r];
        pred += fit.theta(r) * (centered(y + o.dy, x + o.dx) + centered(y - o.dy, x - o.dx));
      }
      const double e = centered(y, x) - pred;
      rss += e * e;
    }
  }
  fit.residual_variance = rss / static_cast<double>(samples);
  return fit;
}

FeatureVector gmrf_features(const GrayImage& roi) {
  if (roi.width() < 7 || roi.height() < 7) throw FeatureError(TextureMethod::GMRF, "ROI side must be at least 7");
  FeatureVector out;
  out.method = TextureMethod::GMRF;
  for (const Offset o : kGmrfOffsets) out.names.push_back("gmrf_theta_" + signed_label(o.dx) + "_" + signed_label(o.dy));
  out.names.push_back("gmrf_residual_variance");
  out.values = Eigen::VectorXd::Zero(13);

  const Field f = roi.to_field();
  if (f.minCoeff() == f.maxCoeff()) {
    out.degenerate = true;
    return out;
  }
  try {
    const GmrfFit fit = fit_gmrf(f);
    out.values.head<12>() = fit.theta;
    out.values(12) = fit.residual_variance;
  } catch (const std::exception& e) {
    throw FeatureError(TextureMethod::GMRF, e.what());
  }
  return out;
}

}  // namespace texnoise
