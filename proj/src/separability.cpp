#include "texnoise/separability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace texnoise {

FeatureClass FeatureClass::from_vectors(std::string label, const std::vector<FeatureVector>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("feature class needs samples");
  FeatureClass c{std::move(label), vectors.front().method, {}};
  const Eigen::Index dim = vectors.front().values.size();
  c.samples.resize(static_cast<Eigen::Index>(vectors.size()), dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].method != c.method || vectors[i].values.size() != dim) {
      throw std::invalid_argument("feature class samples must share method and dimension");
    }
    c.samples.row(static_cast<Eigen::Index>(i)) = vectors[i].values.transpose();
  }
  return c;
}

std::vector<FeatureClass> normalize(std::vector<FeatureClass> classes) {
  if (classes.empty()) return classes;
  const Eigen::Index dim = classes.front().dim();
  Eigen::Index total = 0;
  for (const auto& c : classes) {
    if (c.dim() != dim) throw std::invalid_argument("normalize: classes differ in dimension");
    total += c.size();
  }
  if (total == 0) return classes;

  Eigen::MatrixXd pooled(total, dim);
  Eigen::Index row = 0;
  for (const auto& c : classes) {
    pooled.middleRows(row, c.size()) = c.samples;
    row += c.size();
  }
  const Eigen::RowVectorXd mean = pooled.colwise().mean();
  const Eigen::RowVectorXd stdev =
      ((pooled.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(total)).sqrt();
  const Eigen::RowVectorXd span = pooled.colwise().maxCoeff() - pooled.colwise().minCoeff();

  for (auto& c : classes) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (span(j) == 0.0 || !(stdev(j) > 0.0)) {
        c.samples.col(j).setZero();
      } else {
        c.samples.col(j) = (c.samples.col(j).array() - mean(j)) / stdev(j);
      }
    }
  }
  return classes;
}

ClassStats class_stats(const FeatureClass& c) {
  if (c.size() < 2) throw std::invalid_argument("class statistics need at least two samples");
  ClassStats s;
  s.mean = c.samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = c.samples.rowwise() - s.mean.transpose();
  s.scatter = centered.transpose() * centered;
  s.covariance = s.scatter / static_cast<double>(c.size() - 1);
  return s;
}

double fisher_criterion(const FeatureClass& c1, const FeatureClass& c2, double ridge) {
  if (c1.dim() != c2.dim()) throw std::invalid_argument("fisher_criterion: dimension mismatch");
  if (!(ridge >= 0.0)) throw std::invalid_argument("fisher_criterion: ridge must be nonnegative");
  const ClassStats s1 = class_stats(c1);
  const ClassStats s2 = class_stats(c2);
  const Eigen::VectorXd diff = s1.mean - s2.mean;
  if (diff.isZero(0.0)) return 0.0;
  Eigen::MatrixXd within = s1.scatter + s2.scatter;
  within.diagonal().array() += ridge;
  const Eigen::VectorXd w = within.ldlt().solve(diff);
  return std::max(0.0, diff.dot(w));
}

namespace {

struct Spectrum {
  bool singular = true;
  double log_det = -std::numeric_limits<double>::infinity();
};

Spectrum spectrum_of(const Eigen::MatrixXd& cov) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  Spectrum s;
  if (!(top > 0.0) || lambda.minCoeff() <= 1e-12 * top) return s;
  s.singular = false;
  s.log_det = lambda.array().log().sum();
  return s;
}

}  // namespace

double bhattacharyya_bound(const FeatureClass& c1, const FeatureClass& c2) {
  if (c1.dim() != c2.dim()) throw std::invalid_argument("bhattacharyya_bound: dimension mismatch");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const ClassStats s1 = class_stats(c1);
  const ClassStats s2 = class_stats(c2);
  const Spectrum sp1 = spectrum_of(s1.covariance);
  const Spectrum sp2 = spectrum_of(s2.covariance);
  if (sp1.singular || sp2.singular) return kNegInf;

  const Eigen::MatrixXd average = 0.5 * (s1.covariance + s2.covariance);
  const Spectrum spa = spectrum_of(average);
  // The log term diverges; the Mahalanobis term stays finite.
  if (spa.singular) return kNegInf;

  const Eigen::VectorXd diff = s1.mean - s2.mean;
  const double mahalanobis = diff.dot(average.ldlt().solve(diff));
  return mahalanobis / 8.0 + 0.5 * (spa.log_det - 0.5 * (sp1.log_det + sp2.log_det));
}

SeparabilityReport build_report(const FeatureClass& original, const FeatureClass& clean, const FeatureClass& noisy,
                                double ridge) {
  if (original.dim() != clean.dim() || original.dim() != noisy.dim()) {
    throw std::invalid_argument("build_report: classes differ in dimension");
  }
  const auto norm = normalize({original, clean, noisy});
  SeparabilityReport r;
  r.method = original.method;
  r.features = static_cast<int>(original.dim());
  r.fisher_oc = fisher_criterion(norm[0], norm[1], ridge);
  r.fisher_on = fisher_criterion(norm[0], norm[2], ridge);
  r.bhatt_oc = bhattacharyya_bound(norm[0], norm[1]);
  r.bhatt_on = bhattacharyya_bound(norm[0], norm[2]);
  return r;
}

}  // namespace texnoise
