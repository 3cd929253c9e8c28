// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "texnoise/adaptive_filter.hpp"
#include "texnoise/ct_sim.hpp"
#include "texnoise/noise_model.hpp"
#include "texnoise/pipeline.hpp"
#include "texnoise/separability.hpp"
#include "texnoise/synth.hpp"
#include "texnoise/texture_features.hpp"

using namespace texnoise;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Histogram tally_rounded(const Field& f) {
  std::vector<std::int64_t> v(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) v[i] = std::llround(f(i));
  return Histogram::tally(v);
}

// ---------------------------------------------------------------------------

Outcome noise_classification() {
  const auto t0 = Clock::now();
  const NoiseModel truth[] = {make_noise_model(NoiseKind::Gaussian, 16.0, std::sqrt(40.0)),
                              fit_from_moments(NoiseKind::Rayleigh, 13.70, 41.15),
                              make_noise_model(NoiseKind::Erlang, 0.4, 6.0)};
  int hits[3] = {0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Field f = sample_field(truth[k], 1000, 100, 1000 * (k + 1) + seed);
      if (classify_noise(tally_rounded(f)).kind == truth[k].kind) ++hits[k];
    }
  }
  const double t = seconds_since(t0);
  const bool pass = hits[0] >= 95 && hits[1] >= 95 && hits[2] >= 95 && t < 5.0;
  return {pass, fmt("Gaussian %d/100, Rayleigh %d/100, Erlang %d/100 correct; %.2f s", hits[0], hits[1], hits[2], t)};
}

Outcome matusita_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> origin(-30, 30), bins(1, 60);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  auto random_hist = [&] {
    Histogram h;
    h.origin = origin(rng);
    h.counts.resize(bins(rng));
    for (Eigen::Index i = 0; i < h.bins(); ++i) h.counts(i) = w(rng) < 0.25 ? 0.0 : w(rng);
    if (h.counts.sum() == 0.0) h.counts(0) = 1.0;
    h.counts /= h.counts.sum();
    return h;
  };
  double worst = 0.0;
  bool identical_zero = true;
  for (int i = 0; i < 1000; ++i) {
    const Histogram p = random_hist(), q = random_hist();
    worst = std::max(worst, std::abs(matusita_distance(p, q) - oracle::matusita(p, q)));
    identical_zero = identical_zero && matusita_distance(p, p) == 0.0 && matusita_distance(q, q) == 0.0;
  }
  return {worst <= 1e-12 && identical_zero,
          fmt("max |impl - brute force| = %.3g over 1000 pairs; identical inputs exactly 0: %s", worst,
              identical_zero ? "yes" : "no")};
}

Outcome adaptive_filter_contracts() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(0, 255);
  GrayImage::Pixels px(40, 40);
  for (Eigen::Index i = 0; i < px.size(); ++i) px(i) = d(rng);
  const GrayImage img(px, 8);
  const bool identity = (adaptive_filter(img, FilterParams{5, 0.0, true}) == img.to_field()).all();

  // Two-level checkerboard: every interior 5x5 window has the same variance.
  Field checker(24, 24);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) checker(y, x) = ((x + y) % 2) ? 140.0 : 60.0;
  }
  const LocalStats cs = local_statistics(checker, 5);
  const double target = cs.variance(12, 12);
  const Field cf = adaptive_filter(checker, FilterParams{5, target, true});
  double worst = 0.0;
  int checked = 0;
  for (Eigen::Index i = 0; i < checker.size(); ++i) {
    if (std::abs(cs.variance(i) - target) > 1e-12 * target) continue;
    worst = std::max(worst, std::abs(cf(i) - cs.mean(i)));
    ++checked;
  }
  const LocalStats rs = local_statistics(img.to_field(), 5);
  Eigen::Index ar, ac;
  rs.variance.maxCoeff(&ar, &ac);
  const Field rf = adaptive_filter(img, FilterParams{5, rs.variance(ar, ac), false});
  worst = std::max(worst, std::abs(rf(ar, ac) - rs.mean(ar, ac)));
  ++checked;

  const Field phantom = 200.0 * shepp_logan(128);
  const NoiseModel noise = make_noise_model(NoiseKind::Gaussian, 0.0, 10.0);
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Field noisy = phantom + sample_field(noise, 128, 128, 500 + seed);
    const Field out = adaptive_filter(noisy, FilterParams{5, noise.variance, true});
    if ((out - phantom).square().mean() < (noisy - phantom).square().mean()) ++improved;
  }
  return {identity && worst <= 1e-9 && checked > 300 && improved == 100,
          fmt("zero variance bit-identical: %s; |f_c - window mean| <= %.3g on %d pixels; MSE reduced in %d/100",
              identity ? "yes" : "no", worst, checked, improved)};
}

Outcome distortion_exactness() {
  GrayImage::Pixels px(513, 256);
  Field eta(513, 256);
  for (int y = 0; y < 513; ++y) {
    for (int x = 0; x < 256; ++x) {
      px(y, x) = x;
      eta(y, x) = y - 256;
    }
  }
  const GrayImage out = distort(GrayImage(px, 8), eta);
  long mismatches = 0;
  for (int y = 0; y < 513; ++y) {
    for (int x = 0; x < 256; ++x) {
      if (out(x, y) != std::clamp(x + y - 256, 0, 255)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%ld mismatches over %d value/eta pairs", mismatches, 256 * 513)};
}

Outcome glcm_rlm_oracles() {
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> side_d(2, 16), value(0, 255);
  const int level_choices[] = {2, 4, 8, 32};
  int glcm_bad = 0, rlm_bad = 0, matrices = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int side = side_d(rng);
    const int levels = level_choices[trial % 4];
    GrayImage::Pixels px(side, side);
    for (Eigen::Index i = 0; i < px.size(); ++i) px(i) = value(rng);
    const LevelPlane q = quantize(GrayImage(px, 8), levels).pixels();
    LevelPlane expect(side, side);
    for (Eigen::Index i = 0; i < px.size(); ++i) expect(i) = px(i) * levels / 256;
    if (!(q == expect).all()) ++glcm_bad;
    for (auto dir : kDirections) {
      ++matrices;
      const Eigen::MatrixXd counts = oracle::glcm_counts(expect, levels, direction_offset(dir, 1));
      const GlcmMatrix g = glcm_matrix(q, levels, dir, 1);
      if (!(g.probs.array() == (counts / counts.sum()).array()).all()) ++glcm_bad;
      if (!(run_length_matrix(q, levels, dir).counts == oracle::run_counts(expect, levels, direction_offset(dir, 1)))) {
        ++rlm_bad;
      }
    }
  }
  return {glcm_bad == 0 && rlm_bad == 0,
          fmt("%d GLCM and %d run-length mismatches over %d direction matrices on 100 ROIs", glcm_bad, rlm_bad,
              matrices)};
}

Outcome gmrf_recovery() {
  Eigen::Matrix<double, 12, 1> theta;
  theta << 0.15, 0.12, 0.05, -0.04, 0.03, 0.02, 0.0, 0.0, 0.01, 0.0, 0.0, 0.0;
  int recovered = 0;
  double worst_path = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Field f = oracle::gibbs_car(64, theta, 1.0, 60, 9000 + seed);
    const GmrfFit fit = fit_gmrf(f);
    if ((fit.theta - theta).cwiseAbs().maxCoeff() <= 0.1) ++recovered;
    worst_path = std::max(worst_path, (fit.theta - oracle::gmrf_pinv(f).theta).cwiseAbs().maxCoeff());
  }
  return {recovered >= 45 && worst_path <= 1e-6,
          fmt("theta within 0.1 on %d/50 seeds; normal equations vs pseudo-inverse max diff %.3g", recovered,
              worst_path)};
}

Outcome fd_contracts() {
  bool flat_exact = true;
  for (int side : {8, 16, 32, 64}) {
    for (int v : {0, 17, 255}) {
      const FeatureVector f = fd_features(GrayImage(GrayImage::Pixels::Constant(side, side, v), 8));
      flat_exact = flat_exact && (f.values.array() == 2.0).all();
    }
  }
  int in_range = 0;
  double lo = 3.0, hi = 2.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(300 + seed);
    std::uniform_int_distribution<int> d(0, 255);
    GrayImage::Pixels px(64, 64);
    for (Eigen::Index i = 0; i < px.size(); ++i) px(i) = d(rng);
    const double fd = fd_features(GrayImage(px, 8)).values(0);
    lo = std::min(lo, fd);
    hi = std::max(hi, fd);
    if (fd >= 2.4 && fd <= 3.0) ++in_range;
  }
  return {flat_exact && in_range == 50, fmt("constant ROI FD exactly 2: %s; uniform noise FD in [2.4, 3.0] on %d/50 "
                                            "(observed %.4f to %.4f)",
                                            flat_exact ? "yes" : "no", in_range, lo, hi)};
}

Outcome separability_closed_forms() {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto gaussian = [&](int n, int dim, double shift) {
    FeatureClass c{"c", TextureMethod::ACF, Eigen::MatrixXd(n, dim)};
    for (Eigen::Index i = 0; i < c.samples.size(); ++i) c.samples(i) = n01(rng);
    for (int k = 1; k < dim; ++k) c.samples.col(k) += 0.7 * c.samples.col(k - 1);
    c.samples.col(0).array() += shift;
    return c;
  };

  const FeatureClass same = gaussian(15, 4, 0.0);
  const bool identical = fisher_criterion(same, same) == 0.0 && bhattacharyya_bound(same, same) == 0.0;

  FeatureClass a{"a", TextureMethod::ACF, Eigen::MatrixXd(3, 1)}, b = a;
  a.samples << -1, 0, 1;
  b.samples << 1, 2, 3;
  const double b1 = bhattacharyya_bound(a, b);

  double worst = 0.0;
  for (int fixture = 0; fixture < 3; ++fixture) {
    const FeatureClass c1 = gaussian(20, 3, 0.0), c2 = gaussian(20, 3, 1.0 + fixture);
    const ClassStats s1 = class_stats(c1), s2 = class_stats(c2);
    const Eigen::VectorXd dmu = s1.mean - s2.mean;
    const Eigen::MatrixXd sb = dmu * dmu.transpose();
    const Eigen::MatrixXd sw = s1.scatter + s2.scatter + 1e-8 * Eigen::MatrixXd::Identity(3, 3);
    double best = 0.0;
    Eigen::Vector3d w_best = Eigen::Vector3d::UnitX();
    for (int i = 0; i < 20000; ++i) {
      const Eigen::Vector3d w(n01(rng), n01(rng), n01(rng));
      const double q = rayleigh_quotient(w, sb, sw);
      if (q > best) best = q, w_best = w;
    }
    double step = 0.1;
    for (int i = 0; i < 40000; ++i) {
      const Eigen::Vector3d w = w_best.normalized() + step * Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
      const double q = rayleigh_quotient(w, sb, sw);
      if (q > best) {
        best = q;
        w_best = w;
      } else {
        step = std::max(step * 0.999, 1e-7);
      }
    }
    const double closed = fisher_criterion(c1, c2);
    worst = std::max(worst, std::abs(closed - best) / closed);
  }

  const FeatureClass big1 = gaussian(11, 32, 0.0), big2 = gaussian(11, 32, 1.0);
  const double bbig = bhattacharyya_bound(big1, big2);
  const bool neg_inf = bbig == -std::numeric_limits<double>::infinity();
  return {identical && std::abs(b1 - 0.5) <= 1e-9 && worst <= 1e-4 && neg_inf,
          fmt("identical classes J = B = 0: %s; 1-D B = %.12f; closed form vs direction search rel. diff %.3g; "
              "32-dim/11-sample B = %s",
              identical ? "yes" : "no", b1, worst, format_real(bbig).c_str())};
}

Outcome ct_fidelity() {
  const Field phantom = shepp_logan(128);
  const auto t0 = Clock::now();
  const Sinogram sino = forward_project(phantom, ScanGeometry{360, 0, 1.0});
  const Field recon = filtered_backprojection(sino, 128, ReconFilter::RamLak);
  const double t = seconds_since(t0);
  const double p = psnr(phantom, recon);
  const double mass = phantom.sum();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sino.data.rows(); ++i) {
    worst = std::max(worst, std::abs(sino.data.row(i).sum() * sino.geometry.detector_spacing - mass) / mass);
  }
  const double p_hann = psnr(phantom, filtered_backprojection(sino, 128, ReconFilter::Hann));
  return {p >= 25.0 && worst <= 0.01 && t < 10.0,
          fmt("PSNR %.2f dB (ram-lak; hann %.2f dB); worst per-angle mass error %.3g%%; %.2f s", p, p_hann,
              100.0 * worst, t)};
}

struct CorpusRun {
  CorpusResult result;
  RunConfig config;
  double seconds = 0.0;
};

CorpusRun run_synthetic(const fs::path& dir, std::uint64_t seed, double k, bool skip_recon = true) {
  RunConfig base;
  base.seed = seed;
  base.skip_recon = skip_recon;
  const RunConfig run = write_corpus(synth_corpus("acceptance", {seed, k}), dir, base);
  const auto t0 = Clock::now();
  CorpusRun out{run_corpus(run), run, 0.0};
  out.seconds = seconds_since(t0);
  return out;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = testutil::slurp(e.path());
  }
  return out;
}

Outcome end_to_end_trend() {
  testutil::TempDir dir("acceptance_trend");
  const std::uint64_t seeds[] = {1, 2, 3, 4, 5};
  const double scales[] = {1.0, 2.0, 4.0};
  // f_on[method][scale] summed over seeds; per-seed monotone counts.
  double f_on[5][3] = {};
  int per_seed[5] = {};
  double slowest = 0.0;
  for (auto seed : seeds) {
    double row[5][3];
    for (int s = 0; s < 3; ++s) {
      const auto r = run_synthetic(dir / fmt("s%llu_k%g", static_cast<unsigned long long>(seed), scales[s]),
                                   seed, scales[s]);
      slowest = std::max(slowest, r.seconds);
      for (int m = 0; m < 5; ++m) {
        row[m][s] = r.result.separability[m].fisher_on;
        f_on[m][s] += row[m][s] / std::size(seeds);
      }
    }
    for (int m = 0; m < 5; ++m) per_seed[m] += (row[m][0] <= row[m][1] && row[m][1] <= row[m][2]);
  }
  bool monotone = true;
  std::ostringstream trend;
  for (int m = 0; m < 5; ++m) {
    monotone = monotone && f_on[m][0] <= f_on[m][1] && f_on[m][1] <= f_on[m][2];
    trend << to_string(kTextureMethods[m]) << ' ' << fmt("%.3g/%.3g/%.3g", f_on[m][0], f_on[m][1], f_on[m][2])
          << fmt(" (%d/5 seeds individually)", per_seed[m]) << (m < 4 ? "; " : "");
  }

  // Determinism: the same seed twice, reports compared byte for byte.
  const auto first = run_synthetic(dir / "det_a", 9, 1.0);
  emit_reports(first.result, first.config, dir / "det_a" / "reports");
  const auto second = run_synthetic(dir / "det_b", 9, 1.0);
  emit_reports(second.result, second.config, dir / "det_b" / "reports");
  auto a = tree(dir / "det_a" / "reports"), b = tree(dir / "det_b" / "reports");
  // The manifest records the corpus location, which differs by directory.
  a.erase("manifest.json");
  b.erase("manifest.json");
  const bool identical = !a.empty() && a == b;
  // Timed with the CT stage enabled at the default geometry.
  const auto t0 = Clock::now();
  const auto with_ct = run_synthetic(dir / "full", 9, 1.0, false);
  emit_reports(with_ct.result, with_ct.config, dir / "full" / "reports");
  const double full = seconds_since(t0);

  return {monotone && identical && full < 60.0,
          fmt("seed-averaged F_on at x1/x2/x4 over 5 seeds: %s; reruns byte-identical: %s; slowest run without CT %.2f s; "
              "full run with CT and reports %.2f s",
              trend.str().c_str(), identical ? "yes" : "no", slowest, full)};
}

Outcome report_shape() {
  testutil::TempDir dir("acceptance_shape");
  const auto r = run_synthetic(dir.path(), 21, 1.0);
  emit_reports(r.result, r.config, dir / "reports");
  const auto noise = read_noise_csv(dir / "reports" / "noise_distances.csv");
  const auto sep = read_separability_csv(dir / "reports" / "separability.csv");
  bool finite = noise.size() == 11;
  for (const auto& row : noise) {
    for (double d : row.distances) finite = finite && std::isfinite(d);
  }
  std::vector<int> features;
  for (const auto& s : sep) features.push_back(s.features);
  const bool shape = finite && sep.size() == 5 && features == std::vector<int>{8, 5, 16, 13, 32};
  std::ostringstream f;
  for (std::size_t i = 0; i < features.size(); ++i) f << (i ? "," : "") << features[i];
  return {shape, fmt("noise table %zux3 with finite distances: %s; separability rows %zu, features {%s}",
                     noise.size(), finite ? "yes" : "no", sep.size(), f.str().c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"noise classification recovery", noise_classification},
      {"Matusita oracle equivalence", matusita_oracle},
      {"adaptive filter contracts", adaptive_filter_contracts},
      {"distortion round-and-clamp exactness", distortion_exactness},
      {"GLCM/RLM oracle equivalence", glcm_rlm_oracles},
      {"GMRF recovery", gmrf_recovery},
      {"FD contracts", fd_contracts},
      {"Fisher/Bhattacharyya closed forms", separability_closed_forms},
      {"CT stage fidelity", ct_fidelity},
      {"end-to-end trend and determinism", end_to_end_trend},
      {"report shape", report_shape},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
