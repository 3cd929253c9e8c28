#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "texnoise/image.hpp"

namespace texnoise {

enum class NoiseKind { Gaussian, Rayleigh, Erlang };

/// Classification tie-break order.
inline constexpr std::array<NoiseKind, 3> kNoiseKinds = {NoiseKind::Gaussian, NoiseKind::Rayleigh,
                                                        NoiseKind::Erlang};

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

/// Parameters follow the textbook PDFs:
///   Gaussian  p(z) = exp(-(z-a)^2 / 2b^2) / (sqrt(2 pi) b)
///   Rayleigh  p(z) = (2/b)(z-a) exp(-(z-a)^2 / b),   z >= a
///   Erlang    p(z) = a^b z^(b-1) exp(-a z) / (b-1)!,  z >= 0, integer b
/// `mean` and `variance` are the moments implied by (a, b).
struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  double a = 0.0;
  double b = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

/// Validates (a, b) for the kind and fills in the implied moments.
NoiseModel make_noise_model(NoiseKind kind, double a, double b);

/// Inverts the moment relations. Throws std::invalid_argument for a
/// nonpositive variance, or an Erlang fit with nonpositive mean.
NoiseModel fit_from_moments(NoiseKind kind, double mean, double variance);

double pdf(const NoiseModel& model, double z);
double cdf(const NoiseModel& model, double z);

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// Smallest convenient integer range holding at least `coverage` of the mass.
IntRange covering_support(const NoiseModel& model, double coverage = 0.9999);

/// PDF evaluated at each integer of `support`, renormalized to unit mass.
/// Throws std::invalid_argument if the support misses the mode or holds
/// less than 99.9% of the model's mass.
Histogram pdf_histogram(const NoiseModel& model, IntRange support);

/// sqrt(sum_i (sqrt(p_i) - sqrt(q_i))^2) over the union of both supports.
/// Inputs must be normalized to within 1e-9.
double matusita_distance(const Histogram& p, const Histogram& q);

struct NoiseClassification {
  NoiseKind kind = NoiseKind::Gaussian;
  NoiseModel model;
  /// Indexed like kNoiseKinds; +inf where a kind could not be fitted.
  std::array<double, 3> distances{};
  std::array<std::optional<NoiseModel>, 3> fitted;
  /// Generated PDF histograms used for scoring (plot data).
  std::array<std::optional<Histogram>, 3> generated;
  Moments measured;
};

NoiseClassification classify_noise(const Histogram& measured);

/// Deterministic for a fixed seed.
Field sample_field(const NoiseModel& model, int width, int height, std::uint64_t seed);

}  // namespace texnoise
