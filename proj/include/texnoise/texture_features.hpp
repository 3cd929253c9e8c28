#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "texnoise/image.hpp"

namespace texnoise {

/// Listed in report order.
enum class TextureMethod { ACF, FD, RLM, GMRF, GLCM };

inline constexpr std::array<TextureMethod, 5> kTextureMethods = {
    TextureMethod::ACF, TextureMethod::FD, TextureMethod::RLM, TextureMethod::GMRF, TextureMethod::GLCM};

std::string_view to_string(TextureMethod method);
std::optional<TextureMethod> parse_texture_method(std::string_view name);
/// ACF 8, FD 5, RLM 16, GMRF 13, GLCM 32.
int feature_count(TextureMethod method);

struct FeatureVector {
  TextureMethod method = TextureMethod::ACF;
  /// "<method>_<feature>_<direction|lag|offset>"
  std::vector<std::string> names;
  Eigen::VectorXd values;
  /// Set when the ROI was flat and the values are the defined fallbacks.
  bool degenerate = false;
};

/// Raised by an extractor on unusable input; carries the failing method.
class FeatureError : public std::runtime_error {
 public:
  FeatureError(TextureMethod method, const std::string& what)
      : std::runtime_error(std::string(to_string(method)) + ": " + what), method_(method) {}
  TextureMethod method() const { return method_; }

 private:
  TextureMethod method_;
};

/// Pixel displacement; dy < 0 points up the image.
struct Offset {
  int dx = 0;
  int dy = 0;
};

enum class Direction { Deg0, Deg45, Deg90, Deg135 };
inline constexpr std::array<Direction, 4> kDirections = {Direction::Deg0, Direction::Deg45, Direction::Deg90,
                                                        Direction::Deg135};

int degrees(Direction d);
/// 0: (d, 0), 45: (d, -d), 90: (0, -d), 135: (-d, -d).
Offset direction_offset(Direction d, int distance = 1);

using LevelPlane = Plane<std::int32_t>;

// ---- GLCM -----------------------------------------------------------------

struct GlcmMatrix {
  int levels = 0;
  Direction direction = Direction::Deg0;
  int distance = 1;
  /// Symmetric, sums to 1.
  Eigen::MatrixXd probs;
};

/// Pairs are counted in both orders. Values must lie in [0, levels).
GlcmMatrix glcm_matrix(const LevelPlane& levels, int n_levels, Direction direction, int distance = 1);

/// energy, contrast, correlation, homogeneity, entropy, variance,
/// sum-average, dissimilarity
inline constexpr std::array<std::string_view, 8> kGlcmFeatureNames = {
    "energy", "contrast", "correlation", "homogeneity", "entropy", "variance", "sumavg", "dissimilarity"};

Eigen::Matrix<double, 8, 1> haralick_features(const GlcmMatrix& glcm);

/// Quantizes the ROI to `levels` from its bit depth, then 8 features for each
/// of the four directions.
FeatureVector glcm_features(const GrayImage& roi, int levels = 32, int distance = 1);

// ---- Run length -----------------------------------------------------------

struct RunLengthMatrix {
  int levels = 0;
  Direction direction = Direction::Deg0;
  int max_run = 0;
  /// counts(g, r - 1) = number of maximal runs of level g and length r.
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
};

RunLengthMatrix run_length_matrix(const LevelPlane& levels, int n_levels, Direction direction);

/// Short-run emphasis, long-run emphasis, gray-level nonuniformity and
/// run-length nonuniformity, each divided by the number of runs.
Eigen::Vector4d run_length_features(const RunLengthMatrix& rlm);

FeatureVector rlm_features(const GrayImage& roi, int levels = 32);

// ---- Autocovariance ---------------------------------------------------------

inline constexpr std::array<Offset, 8> kAcfLags = {
    Offset{0, 1}, Offset{1, 0}, Offset{1, 1}, Offset{1, -1}, Offset{0, 2}, Offset{2, 0}, Offset{2, 2}, Offset{2, -2}};

/// sum over valid overlaps of (I(x,y) - mu)(I(x+dx, y+dy) - mu) / (N_valid sigma^2),
/// clamped to [-1, 1]. Zero-variance input returns 0.
double normalized_autocovariance(const Field& image, Offset lag);

FeatureVector acf_features(const GrayImage& roi);

// ---- Gaussian Markov random field ---------------------------------------------

inline constexpr std::array<Offset, 12> kGmrfOffsets = {
    Offset{0, 1}, Offset{1, 0}, Offset{1, 1}, Offset{1, -1}, Offset{0, 2},  Offset{2, 0},
    Offset{2, 2}, Offset{2, -2}, Offset{1, 2}, Offset{2, 1}, Offset{1, -2}, Offset{2, -1}};

struct GmrfFit {
  Eigen::Matrix<double, 12, 1> theta;
  double residual_variance = 0.0;
  /// Interior pixels used in the fit.
  Eigen::Index samples = 0;
};

/// Least squares over interior pixels of the mean-subtracted field; each
/// regressor is the sum of the pixel pair at +/- offset. Throws
/// SingularSystemError when the normal matrix is singular.
GmrfFit fit_gmrf(const Field& image);

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 12 neighbor weights plus the residual variance.
FeatureVector gmrf_features(const GrayImage& roi);

// ---- Fractal dimension ----------------------------------------------------------

struct BoxCount {
  int box_size = 0;
  double count = 0.0;
};

/// Differential box counting over s in {2, 4, 8, 16} with s <= side / 2. The
/// field must be square with a power-of-two side.
std::vector<BoxCount> differential_box_counts(const Field& image);

/// Least-squares slope of log N(s) against log(1/s), clamped to [2, 3].
double box_counting_dimension(const Field& image);

FeatureVector fd_features(const GrayImage& roi);

// ---- All methods ------------------------------------------------------------

struct TextureOptions {
  int levels = 32;
  int glcm_distance = 1;
};

/// Keyed by method; throws FeatureError naming the first method that fails.
std::map<TextureMethod, FeatureVector> extract_all(const GrayImage& roi, const TextureOptions& options = {});

FeatureVector extract(TextureMethod method, const GrayImage& roi, const TextureOptions& options = {});

}  // namespace texnoise
