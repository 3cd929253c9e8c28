#include "texnoise/noise_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/SpecialFunctions>

namespace texnoise {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Gaussian: return "Gaussian";
    case NoiseKind::Rayleigh: return "Rayleigh";
    case NoiseKind::Erlang: return "Erlang";
  }
  return "?";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  for (auto kind : kNoiseKinds) {
    const auto label = to_string(kind);
    if (name.size() == label.size() &&
        std::equal(name.begin(), name.end(), label.begin(),
                   [](char x, char y) { return std::tolower(x) == std::tolower(y); })) {
      return kind;
    }
  }
  return std::nullopt;
}

NoiseModel make_noise_model(NoiseKind kind, double a, double b) {
  using std::numbers::pi;
  NoiseModel m{kind, a, b, 0.0, 0.0};
  switch (kind) {
    case NoiseKind::Gaussian:
      if (!(b > 0.0)) throw std::invalid_argument("Gaussian noise needs b > 0");
      m.mean = a;
      m.variance = b * b;
      break;
    case NoiseKind::Rayleigh:
      if (!(b > 0.0)) throw std::invalid_argument("Rayleigh noise needs b > 0");
      m.mean = a + std::sqrt(pi * b / 4.0);
      m.variance = b * (4.0 - pi) / 4.0;
      break;
    case NoiseKind::Erlang:
      if (!(a > 0.0)) throw std::invalid_argument("Erlang noise needs a > 0");
      if (!(b >= 1.0) || b != std::floor(b)) throw std::invalid_argument("Erlang shape b must be a positive integer");
      m.mean = b / a;
      m.variance = b / (a * a);
      break;
  }
  return m;
}

NoiseModel fit_from_moments(NoiseKind kind, double mean, double variance) {
  using std::numbers::pi;
  if (!(variance > 0.0)) throw std::invalid_argument("noise fit needs a positive variance");
  switch (kind) {
    case NoiseKind::Gaussian:
      return make_noise_model(kind, mean, std::sqrt(variance));
    case NoiseKind::Rayleigh: {
      const double b = 4.0 * variance / (4.0 - pi);
      return make_noise_model(kind, mean - std::sqrt(pi * b / 4.0), b);
    }
    case NoiseKind::Erlang: {
      if (!(mean > 0.0)) throw std::invalid_argument("Erlang fit needs a positive mean");
      const double shape = std::max(1.0, std::round(mean * mean / variance));
      return make_noise_model(kind, mean / variance, shape);
    }
  }
  throw std::invalid_argument("unknown noise kind");
}

double pdf(const NoiseModel& m, double z) {
  using std::numbers::pi;
  switch (m.kind) {
    case NoiseKind::Gaussian: {
      const double u = (z - m.a) / m.b;
      return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * pi) * m.b);
    }
    case NoiseKind::Rayleigh: {
      if (z < m.a) return 0.0;
      const double d = z - m.a;
      return 2.0 / m.b * d * std::exp(-d * d / m.b);
    }
    case NoiseKind::Erlang: {
      if (z < 0.0) return 0.0;
      if (z == 0.0) return m.b == 1.0 ? m.a : 0.0;
      return std::exp(m.b * std::log(m.a) + (m.b - 1.0) * std::log(z) - m.a * z - std::lgamma(m.b));
    }
  }
  return 0.0;
}

double cdf(const NoiseModel& m, double z) {
  switch (m.kind) {
    case NoiseKind::Gaussian:
      return 0.5 * std::erfc(-(z - m.a) / (m.b * std::numbers::sqrt2));
    case NoiseKind::Rayleigh: {
      if (z <= m.a) return 0.0;
      const double d = z - m.a;
      return -std::expm1(-d * d / m.b);
    }
    case NoiseKind::Erlang:
      if (z <= 0.0) return 0.0;
      return Eigen::numext::igamma(m.b, m.a * z);
  }
  return 0.0;
}

namespace {

double mode_of(const NoiseModel& m) {
  switch (m.kind) {
    case NoiseKind::Gaussian: return m.a;
    case NoiseKind::Rayleigh: return m.a + std::sqrt(m.b / 2.0);
    case NoiseKind::Erlang: return (m.b - 1.0) / m.a;
  }
  return m.mean;
}

double quantile(const NoiseModel& m, double q) {
  const double sd = std::sqrt(m.variance);
  double lo = m.mean - 60.0 * sd;
  double hi = m.mean + 60.0 * sd;
  for (int i = 0; i < 200 && hi - lo > 1e-9 * std::max(1.0, sd); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(m, mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

IntRange covering_support(const NoiseModel& model, double coverage) {
  const double tail = 0.5 * (1.0 - coverage);
  return {static_cast<std::int64_t>(std::floor(quantile(model, tail))),
          static_cast<std::int64_t>(std::ceil(quantile(model, 1.0 - tail)))};
}

Histogram pdf_histogram(const NoiseModel& model, IntRange support) {
  if (support.hi < support.lo) throw std::invalid_argument("empty support");
  const double mode = mode_of(model);
  if (mode < static_cast<double>(support.lo) - 0.5 || mode > static_cast<double>(support.hi) + 0.5) {
    throw std::invalid_argument("support excludes the mode of the " + std::string(to_string(model.kind)) +
                                " model");
  }
  const double covered = cdf(model, support.hi + 0.5) - cdf(model, support.lo - 0.5);
  if (covered < 0.999) {
    throw std::invalid_argument("support holds only " + std::to_string(covered) + " of the model mass");
  }
  Histogram h;
  h.origin = support.lo;
  h.counts.resize(support.hi - support.lo + 1);
  for (Eigen::Index i = 0; i < h.counts.size(); ++i) h.counts(i) = pdf(model, static_cast<double>(support.lo + i));
  const double total = h.counts.sum();
  if (!(total > 0.0)) throw std::invalid_argument("model has no mass at integer points of the support");
  h.counts /= total;
  return h;
}

double matusita_distance(const Histogram& p, const Histogram& q) {
  if (p.bins() == 0 || q.bins() == 0) throw std::invalid_argument("matusita: empty histogram");
  if (std::abs(p.total() - 1.0) > 1e-9 || std::abs(q.total() - 1.0) > 1e-9) {
    throw std::invalid_argument("matusita: histograms must be normalized");
  }
  const std::int64_t lo = std::min(p.origin, q.origin);
  const std::int64_t hi = std::max(p.last(), q.last());
  double sum = 0.0;
  for (std::int64_t z = lo; z <= hi; ++z) {
    const double d = std::sqrt(p.at(z)) - std::sqrt(q.at(z));
    sum += d * d;
  }
  return std::sqrt(sum);
}

NoiseClassification classify_noise(const Histogram& measured) {
  NoiseClassification out;
  out.measured = moments(measured);
  if (!(out.measured.variance > 0.0)) throw std::invalid_argument("measured noise has zero variance");

  Histogram p = measured;
  p.counts = measured.normalized();

  double best = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best_index;
  for (std::size_t i = 0; i < kNoiseKinds.size(); ++i) {
    out.distances[i] = std::numeric_limits<double>::infinity();
    try {
      const NoiseModel model = fit_from_moments(kNoiseKinds[i], out.measured.mean, out.measured.variance);
      const IntRange cover = covering_support(model);
      const IntRange support{std::min(cover.lo, measured.origin), std::max(cover.hi, measured.last())};
      Histogram q = pdf_histogram(model, support);
      out.distances[i] = matusita_distance(p, q);
      out.fitted[i] = model;
      out.generated[i] = std::move(q);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (out.distances[i] < best) {
      best = out.distances[i];
      best_index = i;
    }
  }
  if (!best_index) throw std::invalid_argument("no noise model could be fitted");
  out.kind = kNoiseKinds[*best_index];
  out.model = *out.fitted[*best_index];
  return out;
}

Field sample_field(const NoiseModel& model, int width, int height, std::uint64_t seed) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative field size");
  std::mt19937_64 rng(seed);
  Field field(height, width);
  double* out = field.data();
  const Eigen::Index n = field.size();
  switch (model.kind) {
    case NoiseKind::Gaussian: {
      std::normal_distribution<double> dist(model.a, model.b);
      for (Eigen::Index i = 0; i < n; ++i) out[i] = dist(rng);
      break;
    }
    case NoiseKind::Rayleigh: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) out[i] = model.a + std::sqrt(-model.b * std::log1p(-unit(rng)));
      break;
    }
    case NoiseKind::Erlang: {
      std::gamma_distribution<double> dist(model.b, 1.0 / model.a);
      for (Eigen::Index i = 0; i < n; ++i) out[i] = dist(rng);
      break;
    }
  }
  return field;
}

}  // namespace texnoise
