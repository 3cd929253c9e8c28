#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "texnoise/image.hpp"

namespace texnoise {

/// Parallel-beam geometry. Angles are spread uniformly over [0, pi);
/// detector k sits at offset (k - (n_detectors - 1) / 2) * spacing.
struct ScanGeometry {
  int n_angles = 360;
  /// 0 selects the image diagonal, rounded up to the parity of the side.
  int n_detectors = 0;
  double detector_spacing = 1.0;

  void validate() const;
  /// Resolves the automatic detector count for a square image.
  ScanGeometry resolved_for(int side) const;
  double angle(int i) const;
  double detector_offset(int k) const;
};

struct Sinogram {
  ScanGeometry geometry;
  /// n_angles x n_detectors line integrals.
  Eigen::MatrixXd data;
};

enum class ReconFilter { RamLak, Hann };

std::optional<ReconFilter> parse_recon_filter(std::string_view name);
std::string_view to_string(ReconFilter filter);

/// Line integral of a square field along the ray at angle `theta` and signed
/// offset `s`. Pixels are unit squares centered on the image center; the
/// integral is the exact sum of value x chord length over crossed cells.
double ray_integral(const Field& image, double theta, double s);

/// Non-square inputs are zero-padded to a centered square.
Sinogram forward_project(const Field& image, const ScanGeometry& geometry);
Sinogram forward_project(const GrayImage& image, const ScanGeometry& geometry);

/// Ramp-filtered back-projection onto an out_side x out_side grid, before any
/// rescaling or clamping. Linear in the sinogram.
Field filtered_backprojection(const Sinogram& sinogram, int out_side, ReconFilter filter);

/// Intensity pair that the 1st and 99th percentiles of a reconstruction are
/// mapped onto.
struct IntensityWindow {
  double low = 0.0;
  double high = 0.0;
};

IntensityWindow percentile_window(const Field& values, double low_q = 0.01, double high_q = 0.99);

/// Filtered back-projection followed by an affine rescale onto `target`
/// (identity when absent or degenerate), rounding and clamping to the bit depth.
GrayImage reconstruct_fbp(const Sinogram& sinogram, int out_side, ReconFilter filter, int bit_depth,
                          std::optional<IntensityWindow> target = std::nullopt);

/// Projects and reconstructs at the original side length, preserving the
/// input's 1st-99th percentile range.
GrayImage acquire(const GrayImage& image, const ScanGeometry& geometry, ReconFilter filter);

/// Text header ("TNSINO 1", angles, detectors, spacing, "data") followed by
/// row-major float32 little-endian samples.
void write_sinogram(const Sinogram& sinogram, const std::filesystem::path& path);
Sinogram read_sinogram(const std::filesystem::path& path);

}  // namespace texnoise
