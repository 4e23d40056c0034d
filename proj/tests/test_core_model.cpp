#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blocksel/core_model.hpp"
#include "blocksel/rng.hpp"
#include "test_util.hpp"

using namespace blocksel;

namespace {

RegressionData scaled_identity_data() {
  // X'X = 4 I_2, with x1'y/4 = 1 and x2'y/4 = 0.5.
  RegressionData d;
  d.X = Matrix::Zero(4, 2);
  d.X(0, 0) = 2.0;
  d.X(1, 1) = 2.0;
  d.y = Vector::Zero(4);
  d.y[0] = 2.0;
  d.y[1] = 1.0;
  return d;
}

}  // namespace

TEST_CASE("fit_mle basics") {
  RegressionData d = scaled_identity_data();

  SUBCASE("empty model") {
    const auto fit = fit_mle(d, ModelSet::empty());
    CHECK(fit.beta.size() == 0);
    CHECK(fit.fitted_norm_sq == 0.0);
  }
  SUBCASE("single orthogonal column") {
    const auto fit = fit_mle(d, ModelSet::of({0}, 2));
    CHECK(fit.beta[0] == doctest::Approx(1.0));
    CHECK(fit.fitted_norm_sq == doctest::Approx(4.0));
  }
  SUBCASE("hand-solved 2x2 normal equations") {
    const auto fit = fit_mle(d, ModelSet::of({0, 1}, 2));
    CHECK(fit.beta[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.beta[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.fitted_norm_sq == doctest::Approx(5.0).epsilon(1e-12));
  }
  SUBCASE("normal-equation residual is tiny on random data") {
    Rng rng(7);
    RegressionData r;
    r.X = testutil::gaussian_matrix(30, 6, rng);
    r.y = testutil::gaussian_vector(30, rng);
    const auto m = ModelSet::of({0, 2, 5}, 6);
    const auto fit = fit_mle(r, m);
    const Matrix Xm = submatrix(r.X, m);
    const Vector resid =
        Xm.transpose() * (r.y - Xm * fit.beta);
    CHECK(resid.norm() / r.y.norm() <= 1e-10);
  }
  SUBCASE("rank deficiency raises") {
    RegressionData r;
    r.X = Matrix::Zero(5, 2);
    r.X.col(0).setOnes();
    r.X.col(1).setOnes();  // duplicate column
    r.y = Vector::Ones(5);
    CHECK_THROWS_AS((void)fit_mle(r, ModelSet::full(2)), Error);
    // the zellner ridge keeps it solvable
    CHECK_NOTHROW((void)fit_mle(r, ModelSet::full(2), FitVariant::zellner));
  }
  SUBCASE("dimension mismatch raises") {
    RegressionData r = scaled_identity_data();
    r.y = Vector::Ones(3);
    CHECK_THROWS_AS((void)fit_mle(r, ModelSet::empty()), Error);
  }
}

TEST_CASE("score matches hand enumeration on the orthogonal instance") {
  RegressionData d = scaled_identity_data();
  const auto part = BlockPartition::single_block(2);
  const auto pen = PenaltySpec::uniform(1, 1.0);

  CHECK(score(d, ModelSet::empty(), part, pen) == 0.0);
  CHECK(score(d, ModelSet::of({0}, 2), part, pen) == doctest::Approx(1.0));
  CHECK(score(d, ModelSet::of({1}, 2), part, pen) == doctest::Approx(-0.5));
  CHECK(score(d, ModelSet::of({0, 1}, 2), part, pen) == doctest::Approx(0.5));

  // argmax over all four models is {1} (1-based)
  double best = -1e300;
  ModelSet argmax;
  for (const auto& m :
       {ModelSet::empty(), ModelSet::of({0}, 2), ModelSet::of({1}, 2),
        ModelSet::of({0, 1}, 2)}) {
    const double c = score(d, m, part, pen);
    if (c > best) {
      best = c;
      argmax = m;
    }
  }
  CHECK(argmax == ModelSet::of({0}, 2));
}

TEST_CASE("equal per-block penalties reduce to a single block") {
  Rng rng(11);
  RegressionData d;
  d.X = testutil::gaussian_matrix(25, 6, rng);
  d.y = testutil::gaussian_vector(25, rng);
  const auto one = BlockPartition::single_block(6);
  const auto two = BlockPartition::contiguous({3, 3});
  const auto pen1 = PenaltySpec::uniform(1, 1.3);
  const auto pen2 = PenaltySpec::uniform(2, 1.3);
  for (const auto& m : {ModelSet::empty(), ModelSet::of({1, 4}, 6),
                        ModelSet::of({0, 1, 2}, 6), ModelSet::full(6)}) {
    CHECK(score(d, m, one, pen1) ==
          doctest::Approx(score(d, m, two, pen2)).epsilon(1e-14));
  }
}

TEST_CASE("scale consistency: scaling y and sigma together changes nothing") {
  Rng rng(13);
  RegressionData d;
  d.X = testutil::gaussian_matrix(40, 5, rng);
  d.y = testutil::gaussian_vector(40, rng);
  d.sigma = 1.0;
  RegressionData scaled = d;
  const double c = 3.7;
  scaled.y *= c;
  scaled.sigma *= c;
  const auto part = BlockPartition::contiguous({2, 3});
  PenaltySpec pen;
  pen.kappas = {0.8, 2.2};
  for (const auto& m : {ModelSet::empty(), ModelSet::of({0}, 5),
                        ModelSet::of({1, 3}, 5), ModelSet::full(5)}) {
    CHECK(score(d, m, part, pen) ==
          doctest::Approx(score(scaled, m, part, pen)).epsilon(1e-12));
  }
}

TEST_CASE("normalized_scores") {
  SUBCASE("single model") {
    const auto out = normalized_scores({{ModelSet::empty(), 3.0}});
    CHECK(out.size() == 1);
    CHECK(out[0].second == doctest::Approx(1.0));
  }
  SUBCASE("two equal scores split evenly") {
    const auto out = normalized_scores(
        {{ModelSet::empty(), 1.0}, {ModelSet::of({0}, 1), 1.0}});
    CHECK(out[0].second == doctest::Approx(0.5));
    CHECK(out[1].second == doctest::Approx(0.5));
  }
  SUBCASE("softmax of (1, 0.5, 0, -1) against a long-double oracle") {
    const std::vector<double> c = {1.0, 0.5, 0.0, -1.0};
    std::vector<std::pair<ModelSet, double>> raw;
    for (std::size_t i = 0; i < c.size(); ++i)
      raw.emplace_back(ModelSet::of({static_cast<int>(i)}, 4), c[i]);
    const auto out = normalized_scores(raw);
    long double denom = 0;
    for (double v : c) denom += std::exp(static_cast<long double>(v));
    double total = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double expect =
          static_cast<double>(std::exp(static_cast<long double>(c[i])) / denom);
      CHECK(out[i].second == doctest::Approx(expect).epsilon(1e-14));
      total += out[i].second;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    // order preserved
    CHECK(out[0].second > out[1].second);
    CHECK(out[1].second > out[2].second);
    CHECK(out[2].second > out[3].second);
  }
  SUBCASE("huge scores do not overflow") {
    const auto out = normalized_scores(
        {{ModelSet::empty(), 1e4}, {ModelSet::of({0}, 1), 1e4 - 2.0}});
    CHECK(out[0].second + out[1].second == doctest::Approx(1.0));
    CHECK(out[0].second > out[1].second);
  }
  SUBCASE("empty input raises") {
    CHECK_THROWS_AS((void)normalized_scores({}), Error);
  }
}

TEST_CASE("delta_penalty") {
  const auto part = BlockPartition::contiguous({2, 2});
  PenaltySpec pen;
  pen.kappas = {2.0, 3.0};
  const auto M = ModelSet::of({0, 1}, 4);  // |M| = (2, 0)
  const auto T = ModelSet::of({2}, 4);     // |T| = (0, 1)
  CHECK(delta_penalty(M, M, part, pen) == 0.0);
  CHECK(delta_penalty(M, T, part, pen) == doctest::Approx(1.0));
  CHECK(delta_penalty(T, M, part, pen) == doctest::Approx(-1.0));
  // single-element difference costs that block's kappa
  const auto T2 = M.with(3);
  CHECK(delta_penalty(T2, M, part, pen) == doctest::Approx(3.0));
}

TEST_CASE("likelihood_gap") {
  Rng rng(17);
  RegressionData d;
  d.X = testutil::gaussian_matrix(20, 5, rng);
  d.y = testutil::gaussian_vector(20, rng);

  SUBCASE("gap to itself is zero") {
    const auto m = ModelSet::of({1, 2}, 5);
    CHECK(likelihood_gap(d, m, m) == 0.0);
  }
  SUBCASE("nested gap equals the projection-difference oracle") {
    const auto M = ModelSet::of({1, 3}, 5);
    const auto Q = ModelSet::of({0, 1, 3, 4}, 5);
    const auto PQ = testutil::projection_matrix(d.X, {0, 1, 3, 4});
    const auto PM = testutil::projection_matrix(d.X, {1, 3});
    const double oracle = ((PQ - PM) * d.y).squaredNorm();
    CHECK(likelihood_gap(d, Q, M) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(likelihood_gap(d, M, Q) ==
          doctest::Approx(-oracle).epsilon(1e-9));
  }
  SUBCASE("nesting monotonicity on random pairs") {
    for (int rep = 0; rep < 25; ++rep) {
      Rng r2(100 + rep);
      RegressionData dd;
      dd.X = testutil::gaussian_matrix(15, 6, r2);
      dd.y = testutil::gaussian_vector(15, r2);
      const auto M = ModelSet::of({2, 4}, 6);
      const auto Q = M.with(static_cast<int>(r2.uniform_index(2)) * 5);
      CHECK(likelihood_gap(dd, Q, M) >= -1e-10);
    }
  }
}

TEST_CASE("noncentrality") {
  Rng rng(19);
  RegressionData d;
  d.X = testutil::gaussian_matrix(30, 6, rng);
  d.y = testutil::gaussian_vector(30, rng);

  SUBCASE("zero extra coefficients give zero") {
    Vector beta = Vector::Zero(6);
    beta[1] = 2.0;  // inside M
    const auto M = ModelSet::of({1}, 6);
    const auto Q = ModelSet::of({1, 4}, 6);
    CHECK(noncentrality(d, Q, M, beta) == doctest::Approx(0.0));
  }
  SUBCASE("empty M on an orthonormal design") {
    RegressionData o;
    o.X = Matrix::Zero(4, 2);
    o.X(0, 0) = 2.0;
    o.X(1, 1) = 2.0;  // X'X = 4 I
    o.y = Vector::Ones(4);
    Vector beta(2);
    beta << 1.5, -0.5;
    const double expect = 4.0 * beta.squaredNorm();
    CHECK(noncentrality(o, ModelSet::full(2), ModelSet::empty(), beta) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("matches the explicit projection oracle") {
    Vector beta = Vector::Zero(6);
    beta[0] = 1.0;
    beta[5] = -2.0;
    const auto M = ModelSet::of({1, 2}, 6);
    const auto Q = ModelSet::of({0, 1, 2, 5}, 6);
    const auto PM = testutil::projection_matrix(d.X, {1, 2});
    const Vector v = d.X.col(0) * 1.0 + d.X.col(5) * (-2.0);
    const double oracle =
        ((Matrix::Identity(30, 30) - PM) * v).squaredNorm();
    CHECK(noncentrality(d, Q, M, beta) ==
          doctest::Approx(oracle).epsilon(1e-9));
  }
  SUBCASE("not nested raises") {
    Vector beta = Vector::Zero(6);
    CHECK_THROWS_AS(
        (void)noncentrality(d, ModelSet::of({0}, 6), ModelSet::of({1}, 6), beta),
        Error);
  }
}

TEST_CASE("orthogonal decoupling of score increments") {
  // On X'X = n I designs, adding column i changes the score by
  // n beta~_i^2 / 2 - kappa_j(i), no matter the current model.
  Rng rng(23);
  const long n = 50, p = 6;
  Matrix raw = testutil::gaussian_matrix(n, p, rng);
  // exact orthonormalization, rescaled so X'X = n I
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix X = qr.householderQ() * Matrix::Identity(n, p);
  X *= std::sqrt(static_cast<double>(n));
  RegressionData d;
  d.X = X;
  d.y = testutil::gaussian_vector(n, rng);
  const Vector beta_tilde = X.transpose() * d.y / static_cast<double>(n);
  const auto part = BlockPartition::contiguous({3, 3});
  PenaltySpec pen;
  pen.kappas = {0.7, 1.9};

  const auto base_models = {ModelSet::empty(), ModelSet::of({1}, 6),
                            ModelSet::of({3, 4}, 6)};
  for (const auto& m : base_models) {
    for (int i = 0; i < p; ++i) {
      if (m.contains(i)) continue;
      const double gain = score(d, m.with(i), part, pen) - score(d, m, part, pen);
      const double expect = n * beta_tilde[i] * beta_tilde[i] / 2.0 -
                            pen.kappas[part.block_of(i)];
      CHECK(gain == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("zellner approaches plain on well-conditioned data") {
  Rng rng(29);
  RegressionData d;
  d.X = testutil::gaussian_matrix(500, 4, rng);
  d.y = testutil::gaussian_vector(500, rng);
  const auto m = ModelSet::full(4);
  const auto plain = fit_mle(d, m, FitVariant::plain);
  const auto zell = fit_mle(d, m, FitVariant::zellner);
  CHECK(std::abs(plain.fitted_norm_sq - zell.fitted_norm_sq) /
            plain.fitted_norm_sq <=
        1e-6);
}
