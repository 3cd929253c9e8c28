#include "texnoise/ct_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace texnoise {

void ScanGeometry::validate() const {
  if (n_angles < 1) throw std::invalid_argument("scan geometry needs at least one angle");
  if (n_detectors < 0) throw std::invalid_argument("detector count must be positive (0 = auto)");
  if (!(detector_spacing > 0.0)) throw std::invalid_argument("detector spacing must be positive");
}

ScanGeometry ScanGeometry::resolved_for(int side) const {
  validate();
  ScanGeometry g = *this;
  if (g.n_detectors == 0) {
    int n = static_cast<int>(std::ceil(side * std::numbers::sqrt2 / detector_spacing));
    // Matching parity keeps the theta = 0 rays on pixel centers.
    if ((n - side) % 2 != 0) ++n;
    g.n_detectors = std::max(n, 1);
  }
  return g;
}

double ScanGeometry::angle(int i) const { return std::numbers::pi * i / n_angles; }

double ScanGeometry::detector_offset(int k) const {
  return (k - 0.5 * (n_detectors - 1)) * detector_spacing;
}

std::optional<ReconFilter> parse_recon_filter(std::string_view name) {
  if (name == "ram-lak" || name == "ramlak") return ReconFilter::RamLak;
  if (name == "hann") return ReconFilter::Hann;
  return std::nullopt;
}

std::string_view to_string(ReconFilter filter) {
  return filter == ReconFilter::RamLak ? "ram-lak" : "hann";
}

namespace {

// Runs fn(i) for i in [0, n) over a few threads; each index writes only its
// own output slot, so results do not depend on scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 8);
  if (workers == 1 || n < 16) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

Field pad_to_square(const Field& image) {
  const Eigen::Index side = std::max(image.rows(), image.cols());
  if (image.rows() == image.cols()) return image;
  Field out = Field::Zero(side, side);
  out.block((side - image.rows()) / 2, (side - image.cols()) / 2, image.rows(), image.cols()) = image;
  return out;
}

}  // namespace

double ray_integral(const Field& image, double theta, double s) {
  const auto n = image.rows();
  if (n == 0) return 0.0;
  const double half = 0.5 * static_cast<double>(n);
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  // Ray: p(t) = s * (c, sn) + t * (-sn, c).
  const double px = s * c, py = s * sn;
  const double dx = -sn, dy = c;
  constexpr double kParallel = 1e-12;

  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  auto clip = [&](double p, double d) {
    if (std::abs(d) < kParallel) return p >= -half && p <= half;
    double a = (-half - p) / d, b = (half - p) / d;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
    return true;
  };
  if (!clip(px, dx) || !clip(py, dy) || !(t_hi > t_lo)) return 0.0;

  // Grid-line crossings along each axis, in increasing t.
  auto crossings = [&](double p, double d, std::vector<double>& out) {
    out.clear();
    if (std::abs(d) < kParallel) return;
    for (Eigen::Index k = 0; k <= n; ++k) {
      const double t = (static_cast<double>(k) - half - p) / d;
      if (t > t_lo && t < t_hi) out.push_back(t);
    }
    if (d < 0) std::reverse(out.begin(), out.end());
  };
  thread_local std::vector<double> tx, ty, ts;
  crossings(px, dx, tx);
  crossings(py, dy, ty);
  ts.resize(tx.size() + ty.size() + 2);
  ts.front() = t_lo;
  std::merge(tx.begin(), tx.end(), ty.begin(), ty.end(), ts.begin() + 1);
  ts.back() = t_hi;

  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double len = ts[i + 1] - ts[i];
    if (len <= 0.0) continue;
    const double tm = 0.5 * (ts[i] + ts[i + 1]);
    const auto col = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(px + tm * dx + half)), 0, n - 1);
    const auto row = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(py + tm * dy + half)), 0, n - 1);
    sum += image(row, col) * len;
  }
  return sum;
}

Sinogram forward_project(const Field& image, const ScanGeometry& geometry) {
  const Field square = pad_to_square(image);
  const ScanGeometry g = geometry.resolved_for(static_cast<int>(square.rows()));
  Sinogram sino{g, Eigen::MatrixXd::Zero(g.n_angles, g.n_detectors)};
  parallel_for(g.n_angles, [&](int i) {
    const double theta = g.angle(i);
    for (int k = 0; k < g.n_detectors; ++k) sino.data(i, k) = ray_integral(square, theta, g.detector_offset(k));
  });
  return sino;
}

Sinogram forward_project(const GrayImage& image, const ScanGeometry& geometry) {
  return forward_project(image.to_field(), geometry);
}

namespace {

// Frequency response of the band-limited ramp: the transform of the sampled
// spatial kernel h(0) = 1/4t^2, h(odd n) = -1/(pi n t)^2, h(even n) = 0.
std::vector<std::complex<double>> ramp_response(std::size_t padded, double spacing, ReconFilter filter) {
  std::vector<std::complex<double>> kernel(padded, 0.0);
  const double t2 = spacing * spacing;
  kernel[0] = 1.0 / (4.0 * t2);
  for (std::size_t n = 1; n < padded / 2; n += 2) {
    const double v = -1.0 / (std::numbers::pi * std::numbers::pi * static_cast<double>(n * n) * t2);
    kernel[n] = v;
    kernel[padded - n] = v;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> response;
  fft.fwd(response, kernel);
  for (std::size_t j = 0; j < padded; ++j) {
    double r = response[j].real();
    if (filter == ReconFilter::Hann) {
      const double j_signed = j <= padded / 2 ? static_cast<double>(j) : static_cast<double>(j) - padded;
      const double omega = 2.0 * std::numbers::pi * j_signed / static_cast<double>(padded);
      r *= 0.5 * (1.0 + std::cos(omega));
    }
    response[j] = r;
  }
  return response;
}

}  // namespace

Field filtered_backprojection(const Sinogram& sinogram, int out_side, ReconFilter filter) {
  const ScanGeometry& g = sinogram.geometry;
  g.validate();
  if (g.n_angles < 2) throw std::invalid_argument("filtered back-projection needs at least two angles");
  if (sinogram.data.rows() != g.n_angles || sinogram.data.cols() != g.n_detectors) {
    throw std::invalid_argument("sinogram data does not match its geometry");
  }
  if (out_side < 1) throw std::invalid_argument("output side must be positive");

  const std::size_t padded = std::bit_ceil(static_cast<std::size_t>(2 * g.n_detectors));
  const auto response = ramp_response(padded, g.detector_spacing, filter);

  Eigen::MatrixXd filtered(g.n_angles, g.n_detectors);
  parallel_for(g.n_angles, [&](int i) {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> row(padded, 0.0), spectrum, back;
    for (int k = 0; k < g.n_detectors; ++k) row[k] = sinogram.data(i, k);
    fft.fwd(spectrum, row);
    for (std::size_t j = 0; j < padded; ++j) spectrum[j] *= response[j];
    fft.inv(back, spectrum);
    for (int k = 0; k < g.n_detectors; ++k) filtered(i, k) = back[k].real() * g.detector_spacing;
  });

  std::vector<double> cosines(g.n_angles), sines(g.n_angles);
  for (int i = 0; i < g.n_angles; ++i) {
    cosines[i] = std::cos(g.angle(i));
    sines[i] = std::sin(g.angle(i));
  }
  const double half = 0.5 * out_side;
  const double centre = 0.5 * (g.n_detectors - 1);
  Field out(out_side, out_side);
  parallel_for(out_side, [&](int row) {
    const double y = row + 0.5 - half;
    for (int col = 0; col < out_side; ++col) {
      const double x = col + 0.5 - half;
      double acc = 0.0;
      for (int i = 0; i < g.n_angles; ++i) {
        const double u = (x * cosines[i] + y * sines[i]) / g.detector_spacing + centre;
        const double fl = std::floor(u);
        const auto k = static_cast<long>(fl);
        if (k < -1 || k >= g.n_detectors) continue;
        const double w = u - fl;
        const double lo = k >= 0 ? filtered(i, k) : 0.0;
        const double hi = k + 1 < g.n_detectors ? filtered(i, k + 1) : 0.0;
        acc += (1.0 - w) * lo + w * hi;
      }
      out(row, col) = acc * std::numbers::pi / g.n_angles;
    }
  });
  return out;
}

IntensityWindow percentile_window(const Field& values, double low_q, double high_q) {
  if (values.size() == 0) return {};
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::llround(q * static_cast<double>(sorted.size() - 1)));
    return sorted[std::min(idx, sorted.size() - 1)];
  };
  return {at(low_q), at(high_q)};
}

GrayImage reconstruct_fbp(const Sinogram& sinogram, int out_side, ReconFilter filter, int bit_depth,
                          std::optional<IntensityWindow> target) {
  if (!is_supported_bit_depth(bit_depth)) throw std::invalid_argument("unsupported bit depth");
  Field recon = filtered_backprojection(sinogram, out_side, filter);
  if (target) {
    const IntensityWindow source = percentile_window(recon);
    const double src_span = source.high - source.low;
    const double dst_span = target->high - target->low;
    if (src_span > 1e-12 && dst_span > 0.0) {
      recon = (recon - source.low) * (dst_span / src_span) + target->low;
    }
  }
  return GrayImage::from_field(recon, bit_depth);
}

GrayImage acquire(const GrayImage& image, const ScanGeometry& geometry, ReconFilter filter) {
  if (image.width() != image.height()) throw std::invalid_argument("acquire expects a square image");
  const Field original = image.to_field();
  const Sinogram sino = forward_project(original, geometry);
  return reconstruct_fbp(sino, image.width(), filter, image.bit_depth(), percentile_window(original));
}

void write_sinogram(const Sinogram& sinogram, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  std::ostringstream header;
  header.precision(17);
  header << "TNSINO 1\nangles " << sinogram.geometry.n_angles << "\ndetectors " << sinogram.geometry.n_detectors
         << "\nspacing " << sinogram.geometry.detector_spacing << "\ndata\n";
  out << header.str();
  for (Eigen::Index i = 0; i < sinogram.data.rows(); ++i) {
    for (Eigen::Index k = 0; k < sinogram.data.cols(); ++k) {
      const auto v = static_cast<float>(sinogram.data(i, k));
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      const unsigned char le[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                                   static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
      out.write(reinterpret_cast<const char*>(le), 4);
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Sinogram read_sinogram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic, version, key;
  Sinogram s;
  in >> magic >> version;
  if (magic != "TNSINO" || version != "1") throw IoError(path.string() + ": not a sinogram file");
  in >> key >> s.geometry.n_angles;
  if (key != "angles") throw IoError("sinogram header: expected angles");
  in >> key >> s.geometry.n_detectors;
  if (key != "detectors") throw IoError("sinogram header: expected detectors");
  in >> key >> s.geometry.detector_spacing;
  if (key != "spacing") throw IoError("sinogram header: expected spacing");
  in >> key;
  if (key != "data" || in.get() != '\n') throw IoError("sinogram header: expected data marker");
  s.geometry.validate();
  s.data.resize(s.geometry.n_angles, s.geometry.n_detectors);
  for (Eigen::Index i = 0; i < s.data.size(); ++i) {
    unsigned char le[4];
    if (!in.read(reinterpret_cast<char*>(le), 4)) throw IoError(path.string() + ": truncated sinogram");
    const std::uint32_t bits = le[0] | (le[1] << 8) | (le[2] << 16) | (std::uint32_t{le[3]} << 24);
    float v;
    std::memcpy(&v, &bits, sizeof v);
    s.data(i / s.data.cols(), i % s.data.cols()) = v;
  }
  return s;
}

}  // namespace texnoise
