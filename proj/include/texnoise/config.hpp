#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "texnoise/adaptive_filter.hpp"
#include "texnoise/ct_sim.hpp"
#include "texnoise/image.hpp"

namespace texnoise {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CaseConfig {
  std::string label;
  std::filesystem::path image_path;
  /// Absent: any P5 file.
  std::optional<ImageFormat> format;
  std::optional<RawDims> dims;
  RoiSpec tumor_roi;
  /// Flat region used to measure the noise.
  RoiSpec uniform_roi;
};

struct RunConfig {
  std::vector<CaseConfig> cases;
  /// noise_variance is estimated per case.
  FilterParams filter;
  ScanGeometry geometry;
  ReconFilter recon_filter = ReconFilter::Hann;
  int quantization = 32;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "texnoise_out";
  bool skip_recon = false;
  double ridge = 1e-8;
  /// Concurrent cases; 0 picks the hardware concurrency.
  int threads = 0;

  /// Throws ConfigError: fewer than two cases, duplicate labels, overlapping
  /// ROIs or invalid filter/geometry settings.
  void validate() const;
};

/// Line-oriented key = value text with [filter], [geometry] and repeated
/// [[case]] sections. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Inverse of parse_run_config; paths are written as stored.
std::string format_run_config(const RunConfig& config);

}  // namespace texnoise
