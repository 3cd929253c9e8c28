#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "texnoise/config.hpp"
#include "texnoise/image.hpp"
#include "texnoise/noise_model.hpp"

namespace texnoise {

/// Mix of seeded value-noise fBm, an oriented sinusoid grating and a
/// checkerboard, rescaled to [0, 1]. `variant` picks weights and periods.
Field procedural_texture(int width, int height, std::uint64_t seed, int variant);

/// Modified Shepp-Logan head phantom on a side x side grid, values in [0, 1].
Field shepp_logan(int side);

struct SynthCase {
  std::string label;
  GrayImage image;
  RoiSpec tumor_roi;
  RoiSpec uniform_roi;
  /// Noise added to the image; empty for noise-free cases.
  std::optional<NoiseModel> noise;
};

struct SynthOptions {
  std::uint64_t seed = 0;
  /// Multiplies the deviation of the injected noise from its mean.
  double noise_scale = 1.0;
};

/// "acceptance": 11 textured 128x128 cases with a flat table band and
///   alternating Gaussian / Rayleigh noise.
/// "flat-gaussian": two flat phantoms with Gaussian noise of known variance.
/// "noise-free": two textured cases without noise.
/// "phantom": a single noise-free Shepp-Logan case.
std::vector<SynthCase> synth_corpus(const std::string& preset, const SynthOptions& options);
const std::vector<std::string>& synth_presets();

/// Writes <label>.pgm per case and, when there are at least two cases, a
/// run.cfg using `base` for the run-level settings. Returns that config.
RunConfig write_corpus(const std::vector<SynthCase>& cases, const std::filesystem::path& dir,
                       RunConfig base = {});

}  // namespace texnoise
