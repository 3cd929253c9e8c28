#include "texnoise/synth.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace texnoise {

namespace {

constexpr int kSide = 128;
constexpr int kBandTop = 96;
constexpr double kBandLevel = 96.0;
constexpr double kTextureLow = 50.0;
constexpr double kTextureHigh = 220.0;

std::mt19937_64 case_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Bilinear value noise over a random lattice with the given cell size.
Field value_noise(int width, int height, int cell, std::mt19937_64& rng) {
  const int gx = width / cell + 2, gy = height / cell + 2;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::ArrayXXd lattice(gy, gx);
  for (int j = 0; j < gy; ++j) {
    for (int i = 0; i < gx; ++i) lattice(j, i) = u(rng);
  }
  Field out(height, width);
  for (int y = 0; y < height; ++y) {
    const int j = y / cell;
    const double ty = smoothstep(static_cast<double>(y % cell) / cell);
    for (int x = 0; x < width; ++x) {
      const int i = x / cell;
      const double tx = smoothstep(static_cast<double>(x % cell) / cell);
      const double top = lattice(j, i) * (1 - tx) + lattice(j, i + 1) * tx;
      const double bottom = lattice(j + 1, i) * (1 - tx) + lattice(j + 1, i + 1) * tx;
      out(y, x) = top * (1 - ty) + bottom * ty;
    }
  }
  return out;
}

Field rescale_unit(const Field& f) {
  const double lo = f.minCoeff(), hi = f.maxCoeff();
  if (hi <= lo) return Field::Zero(f.rows(), f.cols());
  return (f - lo) / (hi - lo);
}

// Deviation from the mean scaled by k; the result is again a member of the
// same family.
NoiseModel scaled_model(const NoiseModel& m, double k) {
  switch (m.kind) {
    case NoiseKind::Gaussian:
      return make_noise_model(m.kind, m.a, m.b * k);
    case NoiseKind::Rayleigh:
      return make_noise_model(m.kind, m.mean - k * (m.mean - m.a), m.b * k * k);
    case NoiseKind::Erlang:
      break;
  }
  throw std::invalid_argument("noise scaling is not closed for Erlang noise");
}

GrayImage with_noise(const Field& base, const NoiseModel& model, double k, std::uint64_t seed) {
  const Field n = sample_field(model, static_cast<int>(base.cols()), static_cast<int>(base.rows()), seed);
  return GrayImage::from_field(base + model.mean + k * (n - model.mean), 8);
}

Field textured_base(std::uint64_t seed, int variant) {
  Field base = Field::Constant(kSide, kSide, kBandLevel);
  base.topRows(kBandTop) =
      kTextureLow + (kTextureHigh - kTextureLow) * procedural_texture(kSide, kBandTop, seed, variant);
  return base;
}

std::string case_label(const char* prefix, int i) {
  std::string n = std::to_string(i + 1);
  return prefix + std::string(2 - std::min<std::size_t>(2, n.size()), '0') + n;
}

const RoiSpec kTumor{48, 32, 32};
const RoiSpec kUniform{48, 96, 32};

}  // namespace

Field procedural_texture(int width, int height, std::uint64_t seed, int variant) {
  if (width < 1 || height < 1) throw std::invalid_argument("texture size must be positive");
  auto rng = case_rng(seed, static_cast<std::uint64_t>(variant), 0x7e47);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  Field fbm = Field::Zero(height, width);
  double amp = 1.0;
  for (int cell : {32, 16, 8, 4}) {
    fbm += amp * value_noise(width, height, cell, rng);
    amp *= 0.55;
  }

  const double phi = std::numbers::pi * u(rng);
  const double period = 6.0 + 10.0 * u(rng);
  const int cell = 4 + (variant % 3) * 2;
  Field grating(height, width), checker(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      grating(y, x) = std::sin(2.0 * std::numbers::pi * (x * std::cos(phi) + y * std::sin(phi)) / period);
      checker(y, x) = ((x / cell + y / cell) % 2) ? 1.0 : -1.0;
    }
  }

  const double wf = 0.5 + u(rng), wg = 0.2 + 0.6 * u(rng), wc = 0.1 + 0.4 * u(rng);
  return rescale_unit(wf * rescale_unit(fbm) + wg * 0.5 * (grating + 1.0) + wc * 0.5 * (checker + 1.0));
}

Field shepp_logan(int side) {
  if (side < 2) throw std::invalid_argument("phantom side must be at least 2");
  struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
  };
  static constexpr Ellipse kEllipses[] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},         {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},     {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},        {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  Field out = Field::Zero(side, side);
  for (int row = 0; row < side; ++row) {
    const double wy = 1.0 - 2.0 * (row + 0.5) / side;
    for (int col = 0; col < side; ++col) {
      const double wx = 2.0 * (col + 0.5) / side - 1.0;
      double v = 0.0;
      for (const auto& e : kEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = wx - e.x0, dy = wy - e.y0;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) v += e.value;
      }
      out(row, col) = std::max(v, 0.0);
    }
  }
  return out;
}

const std::vector<std::string>& synth_presets() {
  static const std::vector<std::string> names = {"acceptance", "flat-gaussian", "noise-free", "phantom"};
  return names;
}

std::vector<SynthCase> synth_corpus(const std::string& preset, const SynthOptions& options) {
  if (!(options.noise_scale >= 0.0)) throw std::invalid_argument("noise scale must be nonnegative");
  const double k = options.noise_scale;
  std::vector<SynthCase> out;

  if (preset == "acceptance") {
    for (int i = 0; i < 11; ++i) {
      auto rng = case_rng(options.seed, static_cast<std::uint64_t>(i), 0x401e);
      std::uniform_real_distribution<double> mean_d(13.2, 17.4), var_d(24.7, 65.9);
      const double mu = mean_d(rng), var = var_d(rng);
      const NoiseKind kind = (i % 2 == 0) ? NoiseKind::Gaussian : NoiseKind::Rayleigh;
      const NoiseModel model = fit_from_moments(kind, mu, var);
      const std::uint64_t noise_seed = rng();
      SynthCase c{case_label("case", i), with_noise(textured_base(options.seed, i), model, k, noise_seed), kTumor,
                  kUniform, std::nullopt};
      if (k > 0.0) c.noise = scaled_model(model, k);
      out.push_back(std::move(c));
    }
  } else if (preset == "flat-gaussian") {
    for (int i = 0; i < 2; ++i) {
      auto rng = case_rng(options.seed, static_cast<std::uint64_t>(i), 0xf1a7);
      const NoiseModel model = make_noise_model(NoiseKind::Gaussian, 0.0, std::sqrt(40.0));
      SynthCase c{case_label("flat", i), with_noise(Field::Constant(kSide, kSide, 100.0), model, k, rng()),
                  kTumor, kUniform, std::nullopt};
      if (k > 0.0) c.noise = scaled_model(model, k);
      out.push_back(std::move(c));
    }
  } else if (preset == "noise-free") {
    for (int i = 0; i < 2; ++i) {
      out.push_back({case_label("clean", i), GrayImage::from_field(textured_base(options.seed, i), 8), kTumor,
                     kUniform, std::nullopt});
    }
  } else if (preset == "phantom") {
    out.push_back({"phantom", GrayImage::from_field(200.0 * shepp_logan(kSide), 8), RoiSpec{40, 56, 16},
                   RoiSpec{4, 4, 16}, std::nullopt});
  } else {
    throw std::invalid_argument("unknown synth preset '" + preset + "'");
  }
  return out;
}

RunConfig write_corpus(const std::vector<SynthCase>& cases, const std::filesystem::path& dir, RunConfig base) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  base.cases.clear();
  for (const auto& c : cases) {
    const std::string name = c.label + ".pgm";
    save_pgm(c.image, dir / name);
    base.cases.push_back({c.label, name, ImageFormat::Pgm8, std::nullopt, c.tumor_roi, c.uniform_roi});
  }
  if (cases.size() < 2) {
    for (auto& c : base.cases) c.image_path = dir / c.image_path;
    return base;
  }
  if (base.output_dir.is_absolute()) base.output_dir = std::filesystem::relative(base.output_dir, dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    if (!cfg) throw IoError("cannot write " + (dir / "run.cfg").string());
    cfg << format_run_config(base);
  }
  return load_run_config(dir / "run.cfg");
}

}  // namespace texnoise
