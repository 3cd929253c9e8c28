#include <algorithm>

#include "texnoise/texture_features.hpp"

namespace texnoise {

RunLengthMatrix run_length_matrix(const LevelPlane& levels, int n_levels, Direction direction) {
  if (n_levels < 1) throw std::invalid_argument("number of gray levels must be positive");
  if (levels.size() == 0) throw std::invalid_argument("empty ROI");
  if (levels.minCoeff() < 0 || levels.maxCoeff() >= n_levels) {
    throw std::invalid_argument("gray level outside [0, levels)");
  }
  const int rows = static_cast<int>(levels.rows()), cols = static_cast<int>(levels.cols());
  const Offset step = direction_offset(direction, 1);
  RunLengthMatrix rlm;
  rlm.levels = n_levels;
  rlm.direction = direction;
  rlm.max_run = std::max(rows, cols);
  rlm.counts = decltype(rlm.counts)::Zero(n_levels, rlm.max_run);

  auto inside = [&](int x, int y) { return x >= 0 && x < cols && y >= 0 && y < rows; };
  // A pixel starts a scan line when its predecessor along the step is outside.
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (inside(x - step.dx, y - step.dy)) continue;
      int cx = x, cy = y, run = 0;
      std::int32_t current = levels(cy, cx);
      while (inside(cx, cy)) {
        const auto v = levels(cy, cx);
        if (v != current) {
          ++rlm.counts(current, run - 1);
          current = v;
          run = 0;
        }
        ++run;
        cx += step.dx;
        cy += step.dy;
      }
      ++rlm.counts(current, run - 1);
    }
  }
  return rlm;
}

Eigen::Vector4d run_length_features(const RunLengthMatrix& rlm) {
  const Eigen::MatrixXd p = rlm.counts.cast<double>();
  const double runs = p.sum();
  if (!(runs > 0.0)) throw std::invalid_argument("run-length matrix has no runs");
  const Eigen::RowVectorXd length = Eigen::RowVectorXd::LinSpaced(p.cols(), 1.0, static_cast<double>(p.cols()));
  const Eigen::RowVectorXd len2 = length.array().square();
  const Eigen::VectorXd per_level = p.rowwise().sum();
  const Eigen::RowVectorXd per_length = p.colwise().sum();
  Eigen::Vector4d f;
  f << (per_length.array() / len2.array()).sum() / runs, (per_length.array() * len2.array()).sum() / runs,
      per_level.squaredNorm() / runs, per_length.squaredNorm() / runs;
  return f;
}

FeatureVector rlm_features(const GrayImage& roi, int levels) {
  static constexpr std::array<std::string_view, 4> kNames = {"sre", "lre", "gln", "rln"};
  FeatureVector out;
  out.method = TextureMethod::RLM;
  out.values.resize(16);
  try {
    if (roi.empty()) throw std::invalid_argument("empty ROI");
    const LevelPlane q = quantize(roi, levels).pixels();
    int slot = 0;
    for (auto dir : kDirections) {
      const Eigen::Vector4d f = run_length_features(run_length_matrix(q, levels, dir));
      for (int k = 0; k < 4; ++k) {
        out.names.push_back("rlm_" + std::string(kNames[k]) + "_" + std::to_string(degrees(dir)));
        out.values(slot++) = f(k);
      }
    }
  } catch (const std::invalid_argument& e) {
    throw FeatureError(TextureMethod::RLM, e.what());
  }
  return out;
}

}  // namespace texnoise
