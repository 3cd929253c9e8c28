#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "texnoise/config.hpp"
#include "texnoise/noise_model.hpp"
#include "texnoise/separability.hpp"
#include "texnoise/texture_features.hpp"

namespace texnoise {

inline constexpr std::string_view kVersion = "1.0.0";

using FeatureSet = std::map<TextureMethod, FeatureVector>;

/// Everything one case produces. `noise` is empty when the uniform region is
/// perfectly flat, in which case the noise variance is zero.
struct CaseResult {
  std::string label;
  bool ok = false;
  std::string error;

  Histogram uniform_histogram;
  Moments uniform_moments;
  std::optional<NoiseClassification> noise;
  double noise_variance = 0.0;

  GrayImage original;
  GrayImage clean;
  GrayImage noisy;
  GrayImage clean_acquired;
  GrayImage noisy_acquired;

  GrayImage original_roi;
  GrayImage clean_roi;
  GrayImage noisy_roi;

  FeatureSet original_features;
  FeatureSet clean_features;
  FeatureSet noisy_features;
};

/// Stage errors are captured in the result rather than thrown.
CaseResult run_case(const CaseConfig& config, const RunConfig& run);

/// One row of the Matusita distance table.
struct NoiseRow {
  std::string label;
  /// Gaussian, Rayleigh, Erlang; NaN where the case had no measurable noise.
  std::array<double, 3> distances{};
  /// Winning kind, or "none".
  std::string best;
  double mean = 0.0;
  double variance = 0.0;
};

/// Measured histogram against the fitted PDFs on a common support.
struct PlotSeries {
  std::string label;
  std::int64_t origin = 0;
  Eigen::VectorXd measured;
  std::array<Eigen::VectorXd, 3> fitted;
};

struct CaseFailure {
  std::string label;
  std::string error;
};

struct CorpusResult {
  /// Sorted by label.
  std::vector<CaseResult> cases;
  std::vector<NoiseRow> noise_table;
  std::vector<SeparabilityReport> separability;
  std::vector<PlotSeries> plots;
  std::vector<CaseFailure> failures;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws CorpusError when fewer than two cases succeed.
CorpusResult run_corpus(const RunConfig& run);

NoiseRow noise_row(const CaseResult& result);

/// Writes noise_distances.csv, separability.csv, separability.json,
/// failures.csv, plots/<label>.csv, cases/<label>/... and manifest.json.
void emit_reports(const CorpusResult& result, const RunConfig& run, const std::filesystem::path& dir);

/// Shortest round-trip text; infinities render as "Inf" / "-Inf".
std::string format_real(double v);
double parse_real(const std::string& text);

std::vector<NoiseRow> read_noise_csv(const std::filesystem::path& path);
std::vector<SeparabilityReport> read_separability_csv(const std::filesystem::path& path);

}  // namespace texnoise
