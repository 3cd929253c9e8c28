// texnoise command line front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "texnoise/pipeline.hpp"
#include "texnoise/synth.hpp"

using namespace texnoise;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCaseFailure = 1;
constexpr int kExitConfig = 2;

struct ImageArgs {
  std::string path;
  std::string format;
  int width = 0;
  int height = 0;
};

void add_image_options(CLI::App* cmd, ImageArgs& args) {
  cmd->add_option("--image", args.path, "Input image")->required();
  cmd->add_option("--format", args.format, "pgm8, pgm16 or raw16 (default: any P5 file)");
  cmd->add_option("--width", args.width, "Width for raw16 input");
  cmd->add_option("--height", args.height, "Height for raw16 input");
}

GrayImage load(const ImageArgs& args) {
  if (args.format.empty()) return load_pgm(args.path);
  const auto format = parse_image_format(args.format);
  if (!format) throw ConfigError("unknown image format '" + args.format + "'");
  std::optional<RawDims> dims;
  if (args.width > 0 || args.height > 0) dims = RawDims{args.width, args.height};
  return load_image(args.path, *format, dims);
}

RoiSpec roi_arg(const std::string& text) {
  try {
    return parse_roi(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  const RunConfig run = load_run_config(config_path);
  const std::filesystem::path out = output_override.empty() ? run.output_dir : std::filesystem::path(output_override);
  const CorpusResult result = run_corpus(run);
  emit_reports(result, run, out);

  std::printf("%-12s %12s %12s %12s  %s\n", "case", "Gaussian", "Rayleigh", "Erlang", "best");
  for (const auto& r : result.noise_table) {
    std::printf("%-12s %12.6g %12.6g %12.6g  %s\n", r.label.c_str(), r.distances[0], r.distances[1],
                r.distances[2], r.best.c_str());
  }
  std::printf("\n%-6s %8s %14s %14s %14s %14s\n", "method", "features", "F_oc", "F_on", "B_oc", "B_on");
  for (const auto& s : result.separability) {
    std::printf("%-6s %8d %14s %14s %14s %14s\n", std::string(to_string(s.method)).c_str(), s.features,
                format_real(s.fisher_oc).c_str(), format_real(s.fisher_on).c_str(),
                format_real(s.bhatt_oc).c_str(), format_real(s.bhatt_on).c_str());
  }
  for (const auto& f : result.failures) std::fprintf(stderr, "case %s failed: %s\n", f.label.c_str(), f.error.c_str());
  std::printf("\nreports written to %s\n", out.string().c_str());
  return result.failures.empty() ? kExitOk : kExitCaseFailure;
}

int cmd_classify(const ImageArgs& image, const std::string& roi_text) {
  const GrayImage img = load(image);
  const RoiSpec roi = roi_arg(roi_text);
  if (!roi.fits(img.width(), img.height())) throw ConfigError("ROI " + roi_text + " outside the image");
  const Histogram h = histogram(img, roi);
  const Moments m = moments(h);
  std::cout << "mean," << format_real(m.mean) << "\nvariance," << format_real(m.variance) << "\n";
  if (!(m.variance > 0.0)) {
    std::cout << "best,none\n";
    return kExitOk;
  }
  const NoiseClassification c = classify_noise(h);
  for (std::size_t k = 0; k < kNoiseKinds.size(); ++k) {
    std::cout << to_string(kNoiseKinds[k]) << ',' << format_real(c.distances[k]) << '\n';
  }
  std::cout << "best," << to_string(c.kind) << "\na," << format_real(c.model.a) << "\nb," << format_real(c.model.b)
            << "\nnoise_variance," << format_real(c.measured.variance) << '\n';
  return kExitOk;
}

int cmd_features(const ImageArgs& image, const std::string& roi_text, const std::string& method, int levels) {
  const GrayImage img = load(image);
  const RoiSpec roi = roi_arg(roi_text);
  if (!roi.fits(img.width(), img.height())) throw ConfigError("ROI " + roi_text + " outside the image");
  const GrayImage patch = extract_roi(img, roi);
  const TextureOptions options{levels, 1};

  std::map<TextureMethod, FeatureVector> set;
  if (method == "all") {
    set = extract_all(patch, options);
  } else {
    const auto m = parse_texture_method(method);
    if (!m) throw ConfigError("unknown texture method '" + method + "'");
    set.emplace(*m, extract(*m, patch, options));
  }
  std::cout << "name,value\n";
  for (auto m : kTextureMethods) {
    const auto it = set.find(m);
    if (it == set.end()) continue;
    for (Eigen::Index k = 0; k < it->second.values.size(); ++k) {
      std::cout << it->second.names[k] << ',' << format_real(it->second.values(k)) << '\n';
    }
  }
  return kExitOk;
}

int cmd_synth(const std::string& preset, std::uint64_t seed, double noise_scale, const std::string& out) {
  const auto cases = synth_corpus(preset, SynthOptions{seed, noise_scale});
  RunConfig base;
  base.seed = seed;
  write_corpus(cases, out, base);
  std::cout << "wrote " << cases.size() << " case(s) to " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Texture noise susceptibility analysis"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, output_dir;
  auto* run = app.add_subcommand("run", "Run the full pipeline over a corpus");
  run->add_option("--config", config_path, "Run configuration file")->required();
  run->add_option("--output", output_dir, "Override the configured output directory");

  ImageArgs classify_image;
  std::string classify_roi;
  auto* classify = app.add_subcommand("classify-noise", "Classify the noise in a flat region");
  add_image_options(classify, classify_image);
  classify->add_option("--roi", classify_roi, "x,y,side")->required();

  ImageArgs feature_image;
  std::string feature_roi, method = "all";
  int levels = 32;
  auto* features = app.add_subcommand("features", "Texture features of one ROI as CSV");
  add_image_options(features, feature_image);
  features->add_option("--roi", feature_roi, "x,y,side")->required();
  features->add_option("--method", method, "acf, fd, rlm, gmrf, glcm or all");
  features->add_option("--levels", levels, "Gray levels for GLCM and RLM");

  std::string preset = "acceptance", synth_out = "synth";
  std::uint64_t seed = 0;
  double noise_scale = 1.0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and its run.cfg");
  synth->add_option("--preset", preset, "acceptance, flat-gaussian, noise-free or phantom");
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--noise-scale", noise_scale, "Noise amplitude multiplier");
  synth->add_option("--out", synth_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, output_dir);
    if (*classify) return cmd_classify(classify_image, classify_roi);
    if (*features) return cmd_features(feature_image, feature_roi, method, levels);
    if (*synth) return cmd_synth(preset, seed, noise_scale, synth_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCaseFailure;
  }
  return kExitOk;
}
