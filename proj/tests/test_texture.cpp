#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "texnoise/texture_features.hpp"

using namespace texnoise;

namespace {

GrayImage random_roi(int side, int bit_depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, (1 << bit_depth) - 1);
  GrayImage::Pixels px(side, side);
  for (Eigen::Index i = 0; i < px.size(); ++i) px(i) = d(rng);
  return GrayImage(px, bit_depth);
}

LevelPlane rotate90(const LevelPlane& p) { return p.transpose().colwise().reverse(); }

}  // namespace

TEST_CASE("method names and feature counts") {
  const int expected[] = {8, 5, 16, 13, 32};
  for (std::size_t i = 0; i < kTextureMethods.size(); ++i) {
    CHECK(feature_count(kTextureMethods[i]) == expected[i]);
    CHECK(parse_texture_method(to_string(kTextureMethods[i])) == kTextureMethods[i]);
  }
  CHECK(parse_texture_method("glcm") == TextureMethod::GLCM);
  CHECK_FALSE(parse_texture_method("lbp").has_value());
}

TEST_CASE("GLCM accumulation equals pair enumeration") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int levels = (int[]){2, 4, 8, 32}[trial % 4];
    const LevelPlane img = oracle::random_levels(3 + trial % 9, 2 + trial % 11, levels, rng);
    for (auto dir : kDirections) {
      for (int d : {1, 2}) {
        const Offset off = direction_offset(dir, d);
        const Eigen::MatrixXd counts = oracle::glcm_counts(img, levels, off);
        if (counts.sum() == 0.0) {
          CHECK_THROWS_AS(glcm_matrix(img, levels, dir, d), std::invalid_argument);
          continue;
        }
        const GlcmMatrix g = glcm_matrix(img, levels, dir, d);
        CHECK((g.probs.array() == (counts / counts.sum()).array()).all());
        CHECK((g.probs - g.probs.transpose()).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("GLCM under transpose and rotation") {
  std::mt19937_64 rng(52);
  const LevelPlane img = oracle::random_levels(9, 9, 8, rng);
  const LevelPlane t = img.transpose();
  const LevelPlane r = rotate90(img);
  auto probs = [](const LevelPlane& p, Direction d) { return glcm_matrix(p, 8, d).probs; };
  // Transposing swaps the axes and leaves both diagonals in place.
  CHECK(probs(t, Direction::Deg0) == probs(img, Direction::Deg90));
  CHECK(probs(t, Direction::Deg45) == probs(img, Direction::Deg45));
  CHECK(probs(t, Direction::Deg135) == probs(img, Direction::Deg135));
  // A quarter turn swaps the diagonals.
  CHECK(probs(r, Direction::Deg45) == probs(img, Direction::Deg135));
  CHECK(probs(r, Direction::Deg135) == probs(img, Direction::Deg45));
  CHECK(probs(r, Direction::Deg0) == probs(img, Direction::Deg90));
}

TEST_CASE("Haralick features of a two-level stripe pattern") {
  LevelPlane img(2, 2);
  img << 0, 1, 0, 1;
  const auto f = haralick_features(glcm_matrix(img, 2, Direction::Deg0));
  CHECK(f(0) == doctest::Approx(0.5));
  CHECK(f(1) == doctest::Approx(1.0));
  CHECK(f(2) == doctest::Approx(-1.0));
  CHECK(f(3) == doctest::Approx(0.5));
  CHECK(f(4) == doctest::Approx(std::log(2.0)));
  CHECK(f(5) == doctest::Approx(0.25));
  CHECK(f(6) == doctest::Approx(1.0));
  CHECK(f(7) == doctest::Approx(1.0));

  const LevelPlane flat = LevelPlane::Constant(4, 4, 3);
  const auto g = haralick_features(glcm_matrix(flat, 4, Direction::Deg45));
  CHECK(g(0) == 1.0);
  CHECK(g(1) == 0.0);
  CHECK(g(2) == 1.0);
  CHECK(g(4) == 0.0);
  CHECK(g(6) == 6.0);
}

TEST_CASE("glcm_features layout and errors") {
  const FeatureVector f = glcm_features(random_roi(16, 8, 1));
  CHECK(f.values.size() == 32);
  CHECK(f.names.front() == "glcm_energy_0");
  CHECK(f.names.back() == "glcm_dissimilarity_135");
  const GrayImage tiny(GrayImage::Pixels::Constant(1, 1, 4), 8);
  CHECK_THROWS_AS(glcm_features(tiny), FeatureError);
}

TEST_CASE("run-length matrix equals run enumeration") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const int levels = (int[]){2, 4, 8, 32}[trial % 4];
    const LevelPlane img = oracle::random_levels(1 + trial % 13, 1 + (trial * 7) % 16, levels, rng);
    for (auto dir : kDirections) {
      const RunLengthMatrix m = run_length_matrix(img, levels, dir);
      const auto ref = oracle::run_counts(img, levels, direction_offset(dir, 1));
      CHECK(m.counts == ref);
      // Every pixel belongs to exactly one run.
      Eigen::Index covered = 0;
      for (Eigen::Index r = 0; r < m.counts.cols(); ++r) covered += m.counts.col(r).sum() * (r + 1);
      CHECK(covered == img.size());
    }
  }
}

TEST_CASE("run-length features on simple images") {
  const LevelPlane flat = LevelPlane::Constant(4, 4, 1);
  const auto f = run_length_features(run_length_matrix(flat, 2, Direction::Deg0));
  // Four runs of length 4.
  CHECK(f(0) == doctest::Approx(1.0 / 16));
  CHECK(f(1) == doctest::Approx(16.0));
  CHECK(f(2) == doctest::Approx(4.0));
  CHECK(f(3) == doctest::Approx(4.0));

  LevelPlane checker(4, 4);
  for (int i = 0; i < 16; ++i) checker(i / 4, i % 4) = (i / 4 + i % 4) % 2;
  const auto c = run_length_features(run_length_matrix(checker, 2, Direction::Deg0));
  CHECK(c(0) == doctest::Approx(1.0));
  CHECK(c(1) == doctest::Approx(1.0));
  CHECK(c(3) == doctest::Approx(16.0));

  const FeatureVector v = rlm_features(random_roi(8, 12, 2));
  CHECK(v.values.size() == 16);
  CHECK(v.names.front() == "rlm_sre_0");
  CHECK(v.names.back() == "rlm_rln_135");
}

TEST_CASE("autocovariance equals the direct double loop") {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 10; ++trial) {
    Field f(5 + trial, 7 + trial);
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = u(rng) + 3.0 * (i % 5);
    for (auto lag : kAcfLags) {
      CHECK(normalized_autocovariance(f, lag) == doctest::Approx(oracle::autocovariance(f, lag)).epsilon(1e-12));
    }
  }
  CHECK(normalized_autocovariance(Field::Constant(6, 6, 3.0), Offset{1, 0}) == 0.0);
  CHECK_THROWS_AS(normalized_autocovariance(Field::Zero(2, 2), Offset{2, 0}), std::invalid_argument);

  const FeatureVector flat = acf_features(GrayImage(GrayImage::Pixels::Constant(8, 8, 9), 8));
  CHECK(flat.degenerate);
  CHECK(flat.values.isZero());
  CHECK(acf_features(random_roi(8, 8, 3)).names[3] == "acf_rho_1_m1");
}

TEST_CASE("GMRF normal equations match the pseudo-inverse") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0, 255);
  for (int trial = 0; trial < 5; ++trial) {
    Field f(16 + trial, 20);
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = u(rng);
    const GmrfFit fit = fit_gmrf(f);
    const auto ref = oracle::gmrf_pinv(f);
    CHECK((fit.theta - ref.theta).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fit.residual_variance == doctest::Approx(ref.residual_variance).epsilon(1e-9));
    CHECK(fit.samples == (f.rows() - 4) * (f.cols() - 4));
  }
}

TEST_CASE("GMRF recovers CAR parameters") {
  Eigen::Matrix<double, 12, 1> theta;
  theta << 0.15, 0.12, 0.05, -0.04, 0.03, 0.02, 0.0, 0.0, 0.01, 0.0, 0.0, 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Field f = oracle::gibbs_car(64, theta, 1.0, 60, seed);
    const GmrfFit fit = fit_gmrf(f);
    CHECK((fit.theta - theta).cwiseAbs().maxCoeff() < 0.1);
    CHECK(fit.residual_variance == doctest::Approx(1.0).epsilon(0.15));
  }
}

TEST_CASE("GMRF degenerate and singular inputs") {
  const FeatureVector flat = gmrf_features(GrayImage(GrayImage::Pixels::Constant(8, 8, 40), 8));
  CHECK(flat.degenerate);
  CHECK(flat.values.isZero());
  CHECK(flat.names.back() == "gmrf_residual_variance");
  CHECK(flat.names[3] == "gmrf_theta_1_m1");

  // Rows constant along x: offsets sharing dy give identical regressors.
  std::mt19937_64 rng(56);
  std::uniform_int_distribution<int> d(0, 255);
  GrayImage::Pixels px(12, 12);
  for (int y = 0; y < 12; ++y) px.row(y).setConstant(d(rng));
  CHECK_THROWS_AS(fit_gmrf(px.cast<double>()), SingularSystemError);
  CHECK_THROWS_AS(gmrf_features(GrayImage(px, 8)), FeatureError);
  CHECK_THROWS_AS(gmrf_features(random_roi(6, 8, 1)), FeatureError);
}

TEST_CASE("differential box counting on flat and rough surfaces") {
  const Field flat = Field::Constant(32, 32, 77.0);
  for (const auto& bc : differential_box_counts(flat)) CHECK(bc.count == (32.0 / bc.box_size) * (32.0 / bc.box_size));
  CHECK(box_counting_dimension(flat) == 2.0);

  const FeatureVector f = fd_features(GrayImage(GrayImage::Pixels::Constant(16, 16, 5), 8));
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(f.values(k) == 2.0);

  const GrayImage noise = random_roi(64, 8, 4);
  const double fd = fd_features(noise).values(0);
  CHECK(fd >= 2.4);
  CHECK(fd <= 3.0);

  // Box counting sees only differences.
  const FeatureVector a = fd_features(random_roi(32, 8, 5));
  GrayImage::Pixels shifted = random_roi(32, 8, 5).pixels() / 2 + 10;
  GrayImage::Pixels base = random_roi(32, 8, 5).pixels() / 2;
  CHECK((fd_features(GrayImage(shifted, 8)).values - fd_features(GrayImage(base, 8)).values).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(a.names[2] == "fd_dimension_low");

  CHECK_THROWS_AS(differential_box_counts(Field::Zero(12, 12)), std::invalid_argument);
  CHECK_THROWS_AS(differential_box_counts(Field::Zero(2, 2)), std::invalid_argument);
  CHECK_NOTHROW(fd_features(random_roi(12, 8, 6)));
  CHECK_THROWS_AS(fd_features(random_roi(7, 8, 6)), FeatureError);
}

TEST_CASE("extract_all returns every method in order") {
  const auto all = extract_all(random_roi(32, 8, 7));
  REQUIRE(all.size() == 5);
  for (auto m : kTextureMethods) {
    CHECK(all.at(m).method == m);
    CHECK(all.at(m).values.size() == feature_count(m));
    CHECK(all.at(m).names.size() == static_cast<std::size_t>(feature_count(m)));
    CHECK(all.at(m).values.allFinite());
    CHECK((extract(m, random_roi(32, 8, 7)).values.array() == all.at(m).values.array()).all());
  }
  CHECK_THROWS_AS(extract_all(random_roi(6, 8, 7)), FeatureError);
}
