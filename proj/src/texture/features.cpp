#include <algorithm>
#include <cctype>

#include "texnoise/texture_features.hpp"

namespace texnoise {

std::string_view to_string(TextureMethod method) {
  switch (method) {
    case TextureMethod::ACF: return "ACF";
    case TextureMethod::FD: return "FD";
    case TextureMethod::RLM: return "RLM";
    case TextureMethod::GMRF: return "GMRF";
    case TextureMethod::GLCM: return "GLCM";
  }
  return "?";
}

std::optional<TextureMethod> parse_texture_method(std::string_view name) {
  for (auto m : kTextureMethods) {
    const auto label = to_string(m);
    if (name.size() == label.size() && std::equal(name.begin(), name.end(), label.begin(), [](char a, char b) {
          return std::toupper(static_cast<unsigned char>(a)) == b;
        })) {
      return m;
    }
  }
  return std::nullopt;
}

int feature_count(TextureMethod method) {
  switch (method) {
    case TextureMethod::ACF: return 8;
    case TextureMethod::FD: return 5;
    case TextureMethod::RLM: return 16;
    case TextureMethod::GMRF: return 13;
    case TextureMethod::GLCM: return 32;
  }
  return 0;
}

FeatureVector extract(TextureMethod method, const GrayImage& roi, const TextureOptions& options) {
  switch (method) {
    case TextureMethod::ACF: return acf_features(roi);
    case TextureMethod::FD: return fd_features(roi);
    case TextureMethod::RLM: return rlm_features(roi, options.levels);
    case TextureMethod::GMRF: return gmrf_features(roi);
    case TextureMethod::GLCM: return glcm_features(roi, options.levels, options.glcm_distance);
  }
  throw std::invalid_argument("unknown texture method");
}

std::map<TextureMethod, FeatureVector> extract_all(const GrayImage& roi, const TextureOptions& options) {
  std::map<TextureMethod, FeatureVector> out;
  for (auto m : kTextureMethods) {
    FeatureVector fv = extract(m, roi, options);
    if (!fv.values.allFinite()) throw FeatureError(m, "non-finite feature value");
    out.emplace(m, std::move(fv));
  }
  return out;
}

}  // namespace texnoise
