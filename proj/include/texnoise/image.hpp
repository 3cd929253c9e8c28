#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace texnoise {

/// Row-major 2D plane of scalars; row index is y, column index is x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Real-valued image field (filter output, noise residual, reconstruction).
using Field = Plane<double>;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer-intensity image with a declared bit depth of 8, 12 or 16.
class GrayImage {
 public:
  using Pixels = Plane<std::int32_t>;

  GrayImage() = default;
  /// Throws std::invalid_argument if the bit depth is unsupported or any
  /// intensity falls outside [0, 2^bit_depth - 1].
  GrayImage(Pixels pixels, int bit_depth);

  static GrayImage zeros(int width, int height, int bit_depth);
  /// Rounds half away from zero and clamps to the bit-depth range.
  static GrayImage from_field(const Field& field, int bit_depth);

  int width() const { return static_cast<int>(pixels_.cols()); }
  int height() const { return static_cast<int>(pixels_.rows()); }
  int bit_depth() const { return bit_depth_; }
  std::int32_t max_intensity() const { return (std::int32_t{1} << bit_depth_) - 1; }
  bool empty() const { return pixels_.size() == 0; }

  std::int32_t operator()(int x, int y) const { return pixels_(y, x); }
  const Pixels& pixels() const { return pixels_; }
  Field to_field() const { return pixels_.cast<double>(); }

  friend bool operator==(const GrayImage& a, const GrayImage& b) {
    return a.bit_depth_ == b.bit_depth_ && a.pixels_.rows() == b.pixels_.rows() &&
           a.pixels_.cols() == b.pixels_.cols() && (a.pixels_ == b.pixels_).all();
  }

 private:
  Pixels pixels_;
  int bit_depth_ = 8;
};

bool is_supported_bit_depth(int bit_depth);

/// Square region anchored at its top-left pixel.
struct RoiSpec {
  int x0 = 0;
  int y0 = 0;
  int side = 32;

  bool fits(int width, int height) const {
    return side >= 2 && x0 >= 0 && y0 >= 0 && x0 + side <= width && y0 + side <= height;
  }
  bool overlaps(const RoiSpec& o) const {
    return x0 < o.x0 + o.side && o.x0 < x0 + side && y0 < o.y0 + o.side && o.y0 < y0 + side;
  }
  friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

/// Parses "x,y,side".
RoiSpec parse_roi(const std::string& text);
std::string to_string(const RoiSpec& roi);

enum class ImageFormat { Pgm8, Pgm16, Raw16 };

struct RawDims {
  int width = 0;
  int height = 0;
};

std::optional<ImageFormat> parse_image_format(std::string_view name);
std::string_view to_string(ImageFormat format);

/// Raw16 requires dims; PGM formats ignore them. Throws IoError.
GrayImage load_image(const std::filesystem::path& path, ImageFormat format,
                     std::optional<RawDims> dims = std::nullopt);
/// Loads a P5 file with any maxval.
GrayImage load_pgm(const std::filesystem::path& path);
void save_image(const GrayImage& img, const std::filesystem::path& path, ImageFormat format);
/// Writes P5 with the sample width implied by the bit depth.
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Pixel (i, j) of the result is source pixel (x0 + i, y0 + j).
GrayImage extract_roi(const GrayImage& img, const RoiSpec& roi);

/// floor(v * levels / 2^bit_depth), clamped to levels - 1. Bit depth is kept.
GrayImage quantize(const GrayImage& img, int levels);

/// Weighted counts over consecutive integer intensities starting at `origin`.
/// Measured histograms hold integer tallies; model histograms hold
/// probabilities.
struct Histogram {
  std::int64_t origin = 0;
  Eigen::VectorXd counts;

  Eigen::Index bins() const { return counts.size(); }
  std::int64_t last() const { return origin + counts.size() - 1; }
  double total() const { return counts.sum(); }
  double at(std::int64_t z) const {
    return (z < origin || z > last()) ? 0.0 : counts(static_cast<Eigen::Index>(z - origin));
  }
  Eigen::VectorXd normalized() const;

  /// One bin per integer in [min, max] of the values.
  static Histogram tally(std::span<const std::int64_t> values);
};

Histogram histogram(const GrayImage& img, const RoiSpec& region);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Population moments; throws std::invalid_argument on an empty histogram.
Moments moments(const Histogram& h);

/// Peak signal-to-noise ratio in dB, peak = maximum of the reference.
double psnr(const Field& reference, const Field& test);

}  // namespace texnoise
