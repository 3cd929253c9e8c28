#include "texnoise/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace texnoise {

namespace {

GrayImage load_case_image(const CaseConfig& c) {
  if (c.format) return load_image(c.image_path, *c.format, c.dims);
  return load_pgm(c.image_path);
}

}  // namespace

CaseResult run_case(const CaseConfig& config, const RunConfig& run) {
  CaseResult r;
  r.label = config.label;
  try {
    r.original = load_case_image(config);
    const GrayImage& img = r.original;
    for (const RoiSpec* roi : {&config.tumor_roi, &config.uniform_roi}) {
      if (!roi->fits(img.width(), img.height())) {
        throw std::out_of_range("ROI " + to_string(*roi) + " outside the image");
      }
    }

    r.uniform_histogram = histogram(img, config.uniform_roi);
    r.uniform_moments = moments(r.uniform_histogram);
    if (r.uniform_moments.variance > 0.0) {
      r.noise = classify_noise(r.uniform_histogram);
      // Measured, not r.noise->model.variance: Erlang shape rounding can inflate the latter.
      r.noise_variance = r.uniform_moments.variance;
    }

    FilterParams params = run.filter;
    params.noise_variance = r.noise_variance;
    const Field filtered = adaptive_filter(img, params);
    const Field eta = residual_noise(img, filtered);
    r.clean = GrayImage::from_field(filtered, img.bit_depth());
    r.noisy = distort(img, eta);

    if (run.skip_recon) {
      r.clean_acquired = r.clean;
      r.noisy_acquired = r.noisy;
    } else {
      r.clean_acquired = acquire(r.clean, run.geometry, run.recon_filter);
      r.noisy_acquired = acquire(r.noisy, run.geometry, run.recon_filter);
    }

    r.original_roi = extract_roi(img, config.tumor_roi);
    r.clean_roi = extract_roi(r.clean_acquired, config.tumor_roi);
    r.noisy_roi = extract_roi(r.noisy_acquired, config.tumor_roi);

    const TextureOptions options{run.quantization, 1};
    r.original_features = extract_all(r.original_roi, options);
    r.clean_features = extract_all(r.clean_roi, options);
    r.noisy_features = extract_all(r.noisy_roi, options);
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

NoiseRow noise_row(const CaseResult& result) {
  NoiseRow row;
  row.label = result.label;
  row.mean = result.uniform_moments.mean;
  row.variance = result.uniform_moments.variance;
  if (result.noise) {
    row.distances = result.noise->distances;
    row.best = std::string(to_string(result.noise->kind));
  } else {
    row.distances.fill(std::numeric_limits<double>::quiet_NaN());
    row.best = "none";
  }
  return row;
}

namespace {

PlotSeries plot_series(const CaseResult& r) {
  PlotSeries s;
  s.label = r.label;
  std::int64_t lo = r.uniform_histogram.origin, hi = r.uniform_histogram.last();
  for (const auto& g : r.noise->generated) {
    if (!g) continue;
    lo = std::min(lo, g->origin);
    hi = std::max(hi, g->last());
  }
  s.origin = lo;
  const auto n = static_cast<Eigen::Index>(hi - lo + 1);
  const Histogram measured{r.uniform_histogram.origin, r.uniform_histogram.normalized()};
  s.measured.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.measured(i) = measured.at(lo + i);
  for (std::size_t k = 0; k < 3; ++k) {
    s.fitted[k] = Eigen::VectorXd::Zero(n);
    if (!r.noise->generated[k]) continue;
    for (Eigen::Index i = 0; i < n; ++i) s.fitted[k](i) = r.noise->generated[k]->at(lo + i);
  }
  return s;
}

}  // namespace

CorpusResult run_corpus(const RunConfig& run) {
  run.validate();
  CorpusResult out;
  const std::size_t n = run.cases.size();
  out.cases.resize(n);

  unsigned workers = run.threads > 0 ? static_cast<unsigned>(run.threads) : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) out.cases[i] = run_case(run.cases[i], run);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::sort(out.cases.begin(), out.cases.end(),
            [](const CaseResult& a, const CaseResult& b) { return a.label < b.label; });

  std::vector<const CaseResult*> good;
  for (const auto& c : out.cases) {
    if (c.ok) {
      good.push_back(&c);
    } else {
      out.failures.push_back({c.label, c.error});
    }
  }
  if (good.size() < 2) {
    throw CorpusError("only " + std::to_string(good.size()) + " case(s) succeeded; at least two are required");
  }

  for (const auto* c : good) {
    out.noise_table.push_back(noise_row(*c));
    if (c->noise) out.plots.push_back(plot_series(*c));
  }

  for (auto method : kTextureMethods) {
    std::vector<FeatureVector> orig, clean, noisy;
    for (const auto* c : good) {
      orig.push_back(c->original_features.at(method));
      clean.push_back(c->clean_features.at(method));
      noisy.push_back(c->noisy_features.at(method));
    }
    out.separability.push_back(build_report(FeatureClass::from_vectors("original", orig),
                                            FeatureClass::from_vectors("clean", clean),
                                            FeatureClass::from_vectors("noisy", noisy), run.ridge));
  }
  return out;
}

}  // namespace texnoise
