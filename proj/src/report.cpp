#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "texnoise/pipeline.hpp"

namespace texnoise {

using nlohmann::json;

std::string format_real(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v < 0 ? "-Inf" : "Inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_real(const std::string& text) {
  if (text == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (text == "Inf") return std::numeric_limits<double>::infinity();
  if (text == "-Inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string safe_name(std::string label) {
  for (char& c : label) {
    if (c == '/' || c == '\\' || c == ':' || c == ' ') c = '_';
  }
  return label;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json noise_model_json(const NoiseModel& m) {
  return {{"kind", to_string(m.kind)}, {"a", m.a}, {"b", m.b}, {"mean", m.mean}, {"variance", m.variance}};
}

void write_case(const CaseResult& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (!c.ok) {
    write_text(dir / "error.txt", c.error + "\n");
    return;
  }
  save_pgm(c.clean, dir / "clean.pgm");
  save_pgm(c.noisy, dir / "noisy.pgm");
  save_pgm(c.clean_acquired, dir / "clean_acquired.pgm");
  save_pgm(c.noisy_acquired, dir / "noisy_acquired.pgm");
  save_pgm(c.original_roi, dir / "original_roi.pgm");
  save_pgm(c.clean_roi, dir / "clean_roi.pgm");
  save_pgm(c.noisy_roi, dir / "noisy_roi.pgm");

  std::ostringstream features;
  features << "name,original,clean,noisy\n";
  for (auto method : kTextureMethods) {
    const auto& o = c.original_features.at(method);
    const auto& cl = c.clean_features.at(method);
    const auto& no = c.noisy_features.at(method);
    for (Eigen::Index k = 0; k < o.values.size(); ++k) {
      features << o.names[k] << ',' << format_real(o.values(k)) << ',' << format_real(cl.values(k)) << ','
               << format_real(no.values(k)) << '\n';
    }
  }
  write_text(dir / "features.csv", features.str());

  json noise = {{"uniform_mean", c.uniform_moments.mean},
                {"uniform_variance", c.uniform_moments.variance},
                {"noise_variance", c.noise_variance}};
  if (c.noise) {
    noise["classified"] = to_string(c.noise->kind);
    json fits = json::array();
    for (std::size_t k = 0; k < kNoiseKinds.size(); ++k) {
      json entry = {{"kind", to_string(kNoiseKinds[k])}, {"matusita", real_or_null(c.noise->distances[k])}};
      if (c.noise->fitted[k]) entry["model"] = noise_model_json(*c.noise->fitted[k]);
      fits.push_back(entry);
    }
    noise["fits"] = fits;
  } else {
    noise["classified"] = nullptr;
  }
  write_text(dir / "noise.json", noise.dump(2) + "\n");
}

json config_json(const RunConfig& run) {
  json cases = json::array();
  for (const auto& c : run.cases) {
    json e = {{"label", c.label},
              {"image", c.image_path.generic_string()},
              {"tumor_roi", to_string(c.tumor_roi)},
              {"uniform_roi", to_string(c.uniform_roi)}};
    e["format"] = c.format ? json(std::string(to_string(*c.format))) : json("pgm");
    if (c.dims) e["dims"] = {c.dims->width, c.dims->height};
    cases.push_back(e);
  }
  return {{"seed", run.seed},
          {"output_dir", run.output_dir.generic_string()},
          {"quantization", run.quantization},
          {"skip_recon", run.skip_recon},
          {"recon_filter", to_string(run.recon_filter)},
          {"ridge", run.ridge},
          {"threads", run.threads},
          {"filter", {{"window_side", run.filter.window_side}, {"ratio_clamp", run.filter.ratio_clamp}}},
          {"geometry",
           {{"n_angles", run.geometry.n_angles},
            {"n_detectors", run.geometry.n_detectors},
            {"detector_spacing", run.geometry.detector_spacing}}},
          {"cases", cases}};
}

}  // namespace

void emit_reports(const CorpusResult& result, const RunConfig& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "plots", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream noise;
  noise << "case,Gaussian,Rayleigh,Erlang,best,mean,variance\n";
  for (const auto& r : result.noise_table) {
    noise << r.label;
    for (double d : r.distances) noise << ',' << format_real(d);
    noise << ',' << r.best << ',' << format_real(r.mean) << ',' << format_real(r.variance) << '\n';
  }
  write_text(dir / "noise_distances.csv", noise.str());

  std::ostringstream sep;
  sep << "method,features,F_oc,F_on,B_oc,B_on\n";
  json methods = json::array();
  for (const auto& s : result.separability) {
    sep << to_string(s.method) << ',' << s.features << ',' << format_real(s.fisher_oc) << ','
        << format_real(s.fisher_on) << ',' << format_real(s.bhatt_oc) << ',' << format_real(s.bhatt_on) << '\n';
    methods.push_back({{"method", to_string(s.method)},
                       {"features", s.features},
                       {"F_oc", real_or_null(s.fisher_oc)},
                       {"F_on", real_or_null(s.fisher_on)},
                       {"B_oc", real_or_null(s.bhatt_oc)},
                       {"B_oc_neg_inf", std::isinf(s.bhatt_oc) && s.bhatt_oc < 0},
                       {"B_on", real_or_null(s.bhatt_on)},
                       {"B_on_neg_inf", std::isinf(s.bhatt_on) && s.bhatt_on < 0}});
  }
  write_text(dir / "separability.csv", sep.str());
  write_text(dir / "separability.json", json{{"methods", methods}}.dump(2) + "\n");

  std::ostringstream failures;
  failures << "case,error\n";
  for (const auto& f : result.failures) {
    std::string msg = f.error;
    for (char& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    failures << f.label << ',' << msg << '\n';
  }
  write_text(dir / "failures.csv", failures.str());

  for (const auto& p : result.plots) {
    std::ostringstream plot;
    plot << "z,measured,Gaussian,Rayleigh,Erlang\n";
    for (Eigen::Index i = 0; i < p.measured.size(); ++i) {
      plot << (p.origin + i) << ',' << format_real(p.measured(i));
      for (const auto& f : p.fitted) plot << ',' << format_real(f(i));
      plot << '\n';
    }
    write_text(dir / "plots" / (safe_name(p.label) + ".csv"), plot.str());
  }

  json case_status = json::array();
  for (const auto& c : result.cases) {
    write_case(c, dir / "cases" / safe_name(c.label));
    case_status.push_back({{"label", c.label}, {"ok", c.ok}, {"error", c.error}});
  }

  const json manifest = {{"program", "texnoise"},
                         {"version", kVersion},
                         {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                               std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                               std::to_string(EIGEN_MINOR_VERSION)},
                         {"seed", run.seed},
                         {"config", config_json(run)},
                         {"cases", case_status}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<NoiseRow> read_noise_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().size() != 7 || rows.front()[0] != "case") {
    throw IoError(path.string() + ": unexpected noise table header");
  }
  std::vector<NoiseRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 7) throw IoError(path.string() + ": malformed row " + std::to_string(i));
    NoiseRow row;
    row.label = r[0];
    for (int k = 0; k < 3; ++k) row.distances[k] = parse_real(r[1 + k]);
    row.best = r[4];
    row.mean = parse_real(r[5]);
    row.variance = parse_real(r[6]);
    out.push_back(row);
  }
  return out;
}

std::vector<SeparabilityReport> read_separability_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"method", "features", "F_oc", "F_on", "B_oc", "B_on"}) {
    throw IoError(path.string() + ": unexpected separability header");
  }
  std::vector<SeparabilityReport> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 6) throw IoError(path.string() + ": malformed row " + std::to_string(i));
    const auto method = parse_texture_method(r[0]);
    if (!method) throw IoError(path.string() + ": unknown method " + r[0]);
    out.push_back({*method, std::stoi(r[1]), parse_real(r[2]), parse_real(r[3]), parse_real(r[4]), parse_real(r[5])});
  }
  return out;
}

}  // namespace texnoise
