#include "texnoise/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace texnoise {

void RunConfig::validate() const {
  if (cases.size() < 2) throw ConfigError("at least two cases are required");
  std::set<std::string> labels;
  for (const auto& c : cases) {
    if (c.label.empty()) throw ConfigError("case without a label");
    if (!labels.insert(c.label).second) throw ConfigError("duplicate case label '" + c.label + "'");
    if (c.image_path.empty()) throw ConfigError("case '" + c.label + "' has no image");
    if (c.tumor_roi.side < 2 || c.uniform_roi.side < 2) throw ConfigError("case '" + c.label + "': ROI side < 2");
    if (c.tumor_roi.overlaps(c.uniform_roi)) throw ConfigError("case '" + c.label + "': ROIs overlap");
    if (c.format == ImageFormat::Raw16 && !c.dims) throw ConfigError("case '" + c.label + "': raw16 needs dims");
    if (c.dims && (c.dims->width <= 0 || c.dims->height <= 0)) {
      throw ConfigError("case '" + c.label + "': width and height must both be positive");
    }
  }
  try {
    filter.validate();
    geometry.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (quantization < 2) throw ConfigError("quantization must be at least 2");
  if (!(ridge >= 0.0)) throw ConfigError("ridge must be nonnegative");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v, int line_no) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  if (!v.empty() && v.front() == '"') throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
  return v;
}

template <typename T>
T parse_number(const std::string& v, int line_no) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("line " + std::to_string(line_no) + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v, int line_no) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("line " + std::to_string(line_no) + ": expected true or false, got '" + v + "'");
}

RoiSpec parse_roi_value(const std::string& v, int line_no) {
  std::string s = v;
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  try {
    return parse_roi(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  return (p.is_relative() && !base.empty()) ? base / p : p;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  enum class Section { Top, Filter, Geometry, Case } section = Section::Top;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  bool output_set = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line == "[[case]]") {
      section = Section::Case;
      cfg.cases.emplace_back();
      continue;
    }
    if (line == "[filter]") {
      section = Section::Filter;
      continue;
    }
    if (line == "[geometry]") {
      section = Section::Geometry;
      continue;
    }
    if (line.front() == '[') throw ConfigError("line " + std::to_string(line_no) + ": unknown section " + line);

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = unquote(trim(std::string_view(line).substr(eq + 1)), line_no);
    auto unknown = [&] { return ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'"); };

    switch (section) {
      case Section::Top:
        if (key == "seed") cfg.seed = parse_number<std::uint64_t>(value, line_no);
        else if (key == "output_dir") { cfg.output_dir = resolve(base_dir, value); output_set = true; }
        else if (key == "quantization") cfg.quantization = parse_number<int>(value, line_no);
        else if (key == "skip_recon") cfg.skip_recon = parse_bool(value, line_no);
        else if (key == "ridge") cfg.ridge = parse_number<double>(value, line_no);
        else if (key == "threads") cfg.threads = parse_number<int>(value, line_no);
        else if (key == "recon_filter") {
          const auto f = parse_recon_filter(value);
          if (!f) throw ConfigError("line " + std::to_string(line_no) + ": unknown recon filter '" + value + "'");
          cfg.recon_filter = *f;
        } else throw unknown();
        break;
      case Section::Filter:
        if (key == "window_side") cfg.filter.window_side = parse_number<int>(value, line_no);
        else if (key == "ratio_clamp") cfg.filter.ratio_clamp = parse_bool(value, line_no);
        else throw unknown();
        break;
      case Section::Geometry:
        if (key == "n_angles") cfg.geometry.n_angles = parse_number<int>(value, line_no);
        else if (key == "n_detectors") cfg.geometry.n_detectors = parse_number<int>(value, line_no);
        else if (key == "detector_spacing") cfg.geometry.detector_spacing = parse_number<double>(value, line_no);
        else throw unknown();
        break;
      case Section::Case: {
        CaseConfig& c = cfg.cases.back();
        if (key == "label") c.label = value;
        else if (key == "image") c.image_path = resolve(base_dir, value);
        else if (key == "format") {
          c.format = parse_image_format(value);
          if (!c.format) throw ConfigError("line " + std::to_string(line_no) + ": unknown format '" + value + "'");
        } else if (key == "width") {
          if (!c.dims) c.dims = RawDims{};
          c.dims->width = parse_number<int>(value, line_no);
        } else if (key == "height") {
          if (!c.dims) c.dims = RawDims{};
          c.dims->height = parse_number<int>(value, line_no);
        } else if (key == "tumor_roi") c.tumor_roi = parse_roi_value(value, line_no);
        else if (key == "uniform_roi") c.uniform_roi = parse_roi_value(value, line_no);
        else throw unknown();
        break;
      }
    }
  }
  if (!output_set) cfg.output_dir = resolve(base_dir, cfg.output_dir.string());
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

std::string format_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "seed = " << cfg.seed << "\n"
      << "output_dir = \"" << cfg.output_dir.generic_string() << "\"\n"
      << "quantization = " << cfg.quantization << "\n"
      << "skip_recon = " << (cfg.skip_recon ? "true" : "false") << "\n"
      << "recon_filter = \"" << to_string(cfg.recon_filter) << "\"\n"
      << "ridge = " << cfg.ridge << "\n"
      << "threads = " << cfg.threads << "\n\n"
      << "[filter]\nwindow_side = " << cfg.filter.window_side << "\n"
      << "ratio_clamp = " << (cfg.filter.ratio_clamp ? "true" : "false") << "\n\n"
      << "[geometry]\nn_angles = " << cfg.geometry.n_angles << "\n"
      << "n_detectors = " << cfg.geometry.n_detectors << "\n"
      << "detector_spacing = " << cfg.geometry.detector_spacing << "\n";
  for (const auto& c : cfg.cases) {
    out << "\n[[case]]\nlabel = \"" << c.label << "\"\n"
        << "image = \"" << c.image_path.generic_string() << "\"\n";
    if (c.format) out << "format = \"" << to_string(*c.format) << "\"\n";
    if (c.dims) out << "width = " << c.dims->width << "\nheight = " << c.dims->height << "\n";
    out << "tumor_roi = \"" << to_string(c.tumor_roi) << "\"\n"
        << "uniform_roi = \"" << to_string(c.uniform_roi) << "\"\n";
  }
  return out.str();
}

}  // namespace texnoise
