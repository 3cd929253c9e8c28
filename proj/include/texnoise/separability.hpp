#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "texnoise/texture_features.hpp"

namespace texnoise {

/// Feature samples of one image condition; one row per case.
struct FeatureClass {
  std::string label;
  TextureMethod method = TextureMethod::ACF;
  Eigen::MatrixXd samples;

  Eigen::Index dim() const { return samples.cols(); }
  Eigen::Index size() const { return samples.rows(); }

  static FeatureClass from_vectors(std::string label, const std::vector<FeatureVector>& vectors);
};

struct ClassStats {
  Eigen::VectorXd mean;
  /// Divisor n - 1.
  Eigen::MatrixXd covariance;
  /// Sum of outer products of deviations.
  Eigen::MatrixXd scatter;
};

/// Per-feature z-score with mean and population stdev pooled over all
/// classes; zero-stdev features map to 0.
std::vector<FeatureClass> normalize(std::vector<FeatureClass> classes);

ClassStats class_stats(const FeatureClass& c);

/// Generalized Rayleigh quotient w^T S_B w / w^T S_W w.
template <typename DerivedW, typename DerivedB, typename DerivedS>
double rayleigh_quotient(const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedB>& between,
                         const Eigen::MatrixBase<DerivedS>& within) {
  return (w.transpose() * between * w).value() / (w.transpose() * within * w).value();
}

/// Two-class maximum of the Fisher criterion: dmu^T (S_1 + S_2 + ridge I)^-1 dmu.
double fisher_criterion(const FeatureClass& c1, const FeatureClass& c2, double ridge = 1e-8);

/// Bhattacharyya distance between Gaussian class models; -inf when either
/// class covariance is singular.
double bhattacharyya_bound(const FeatureClass& c1, const FeatureClass& c2);

struct SeparabilityReport {
  TextureMethod method = TextureMethod::ACF;
  int features = 0;
  double fisher_oc = 0.0;
  double fisher_on = 0.0;
  double bhatt_oc = 0.0;
  double bhatt_on = 0.0;
};

/// Normalizes the three classes jointly, then compares original against
/// clean (oc) and noisy (on).
SeparabilityReport build_report(const FeatureClass& original, const FeatureClass& clean, const FeatureClass& noisy,
                                double ridge = 1e-8);

}  // namespace texnoise
