#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "bridgebound/measures.hpp"
#include "bridgebound/moments.hpp"
#include "bridgebound/rng.hpp"

using namespace bridgebound;

namespace {

GridSupport line_support(std::initializer_list<double> xs) {
  Eigen::MatrixXd pts(static_cast<int>(xs.size()), 1);
  int i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return make_grid_support(pts);
}

GaussianMeasure gauss(Eigen::VectorXd m, Eigen::MatrixXd c) {
  return make_gaussian_measure(std::move(m), std::move(c));
}

// ||| Ax+b |||_{2,mu}^2 = ||A m + b||^2 + Tr(A Sigma A') for mu = N(m, Sigma).
double affine_norm_sq_closed_form(const AffineField& f, const GaussianMeasure& mu) {
  const Eigen::VectorXd at_mean = f.linear * mu.mean + f.offset;
  return at_mean.squaredNorm() + (f.linear * mu.cov * f.linear.transpose()).trace();
}

}  // namespace

TEST_CASE("conditional moments of an identity kernel") {
  const GridSupport s = line_support({0.0, 1.0});
  const GridKernel id = make_grid_kernel(s, s, Eigen::MatrixXd::Identity(2, 2));
  const MatrixField m = cond_mean(id);
  REQUIRE(m.values.size() == 2);
  CHECK(m.values[0](0, 0) == 0.0);
  CHECK(m.values[1](0, 0) == 1.0);
  const MatrixField c = cond_cov(id);
  CHECK(c.values[0](0, 0) == 0.0);  // point rows carry no spread
  CHECK(c.values[1](0, 0) == 0.0);
}

TEST_CASE("grid conditional moments match direct row sums") {
  Rng rng(101);
  Eigen::MatrixXd px(4, 2), py(6, 2);
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 2; ++a) px(i, a) = rng.uniform(-2.0, 2.0);
  for (int j = 0; j < 6; ++j)
    for (int a = 0; a < 2; ++a) py(j, a) = rng.uniform(-2.0, 2.0);
  const GridSupport sx = make_grid_support(px);
  const GridSupport sy = make_grid_support(py);
  Eigen::MatrixXd rows(4, 6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) rows(i, j) = 0.1 + rng.uniform();
    rows.row(i) /= rows.row(i).sum();
  }
  const GridKernel k = make_grid_kernel(sx, sy, rows);
  const MatrixField m = cond_mean(k);
  const MatrixField c = cond_cov(k);
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    for (int j = 0; j < 6; ++j) mean += rows(i, j) * py.row(j).transpose();
    CHECK((m.values[i] - mean).cwiseAbs().maxCoeff() <= 1e-14);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    for (int j = 0; j < 6; ++j) {
      const Eigen::VectorXd z = py.row(j).transpose() - mean;
      cov += rows(i, j) * z * z.transpose();
    }
    CHECK((c.values[i] - cov).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("gaussian conditional moments are the kernel parameters") {
  Eigen::VectorXd alpha(2);
  alpha << 0.5, -1.0;
  Eigen::MatrixXd beta(2, 2), tau(2, 2);
  beta << 1.0, 0.2, -0.1, 0.8;
  tau << 1.0, 0.3, 0.3, 0.7;
  const GaussianKernel k = make_gaussian_kernel(alpha, beta, tau);
  const AffineField m = cond_mean(k);
  CHECK((m.linear - beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.offset - alpha).cwiseAbs().maxCoeff() == 0.0);
  const ConstantField c = cond_cov(k);
  CHECK((c.value - tau).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cross covariance of a gaussian product is Sigma beta-transpose") {
  Eigen::VectorXd mu_mean(2);
  mu_mean << 0.3, -0.7;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.2, 0.4, 0.4, 0.9;
  Eigen::VectorXd alpha(2);
  alpha << -0.2, 0.1;
  Eigen::MatrixXd beta(2, 2), tau(2, 2);
  beta << 0.9, -0.3, 0.2, 1.1;
  tau << 0.8, 0.1, 0.1, 0.6;
  const GaussianMeasure mu = gauss(mu_mean, sigma);
  const GaussianKernel k = make_gaussian_kernel(alpha, beta, tau);
  const Eigen::MatrixXd cc = cross_cov(product(mu, k));
  CHECK((cc - sigma * beta.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("discrete cross covariance matches the double sum") {
  Rng rng(202);
  Eigen::MatrixXd px(5, 1), py(4, 1);
  for (int i = 0; i < 5; ++i) px(i, 0) = rng.uniform(-2.0, 2.0);
  for (int j = 0; j < 4; ++j) py(j, 0) = rng.uniform(-2.0, 2.0);
  Eigen::MatrixXd mass(5, 4);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) mass(i, j) = 0.05 + rng.uniform();
  mass /= mass.sum();
  const DiscreteJoint p =
      make_discrete_joint(make_grid_support(px), make_grid_support(py), mass);
  double ex = 0.0, ey = 0.0, exy = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      ex += mass(i, j) * px(i, 0);
      ey += mass(i, j) * py(j, 0);
      exy += mass(i, j) * px(i, 0) * py(j, 0);
    }
  CHECK(cross_cov(p)(0, 0) == doctest::Approx(exy - ex * ey).epsilon(1e-13));
}

TEST_CASE("constant field norm is the frobenius norm, independent of the measure") {
  Eigen::MatrixXd v(2, 2);
  v << 3.0, 0.0, 0.0, 4.0;
  const ConstantField f{v};
  const GaussianMeasure mu = gauss(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  CHECK(field_norm(f, 1.0, mu) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(field_norm(f, 2.0, mu) == doctest::Approx(5.0).epsilon(1e-15));
  const GaussianMeasure nu = gauss(Eigen::VectorXd::Ones(2) * 3.0,
                                   2.0 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(field_norm(f, 2.0, nu) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("affine field norm matches the closed form and a quadrature oracle") {
  Eigen::MatrixXd a(1, 1);
  a << 0.7;
  Eigen::VectorXd b(1);
  b << -0.4;
  const AffineField f{a, b};
  Eigen::VectorXd m(1);
  m << 0.5;
  Eigen::MatrixXd c(1, 1);
  c << 1.3;
  const GaussianMeasure mu = gauss(m, c);
  const double closed = std::sqrt(affine_norm_sq_closed_form(f, mu));
  CHECK(field_norm(f, 2.0, mu) == doctest::Approx(closed).epsilon(1e-14));

  // Quadrature route: restrict mu to a wide grid and integrate the
  // materialized field there.
  const GridGeometry geometry = default_geometry(mu, 2001, 9.0);
  const GridMeasure mud = discretize(mu, geometry);
  const MatrixField fd = materialize(f, mud.support.points);
  CHECK(field_norm(fd, 2.0, mud) == doctest::Approx(closed).epsilon(1e-7));

  CHECK_THROWS_AS(field_norm(f, 1.0, mu), DomainError);
}

TEST_CASE("two-dimensional affine norms agree with the closed form") {
  Rng rng(303);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::MatrixXd a(2, 2), base(2, 2);
    Eigen::VectorXd b(2), m(2);
    for (int i = 0; i < 2; ++i) {
      b(i) = rng.uniform(-1.0, 1.0);
      m(i) = rng.uniform(-1.0, 1.0);
      for (int j = 0; j < 2; ++j) {
        a(i, j) = rng.uniform(-1.0, 1.0);
        base(i, j) = rng.uniform(-1.0, 1.0);
      }
    }
    const Eigen::MatrixXd cov =
        base * base.transpose() + 0.4 * Eigen::MatrixXd::Identity(2, 2);
    const AffineField f{a, b};
    const GaussianMeasure mu = gauss(m, cov);
    CHECK(field_norm(f, 2.0, mu) ==
          doctest::Approx(std::sqrt(affine_norm_sq_closed_form(f, mu))).epsilon(1e-12));
  }
}

TEST_CASE("grid field norms match hand-expanded sums") {
  const GridSupport s = line_support({0.0, 1.0, 2.0});
  Eigen::VectorXd w(3);
  w << 0.2, 0.3, 0.5;
  const GridMeasure mu = make_grid_measure(s, w);
  MatrixField f;
  f.support = s.points;
  Eigen::MatrixXd v0(1, 1), v1(1, 1), v2(1, 1);
  v0 << 1.0;
  v1 << -2.0;
  v2 << 3.0;
  f.values = {v0, v1, v2};
  // p=1: 0.2*1 + 0.3*2 + 0.5*3 = 2.3 ; p=2: sqrt(0.2 + 1.2 + 4.5)
  CHECK(field_norm(f, 1.0, mu) == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(field_norm(f, 2.0, mu) == doctest::Approx(std::sqrt(5.9)).epsilon(1e-15));
  CHECK_THROWS_AS(field_norm(f, 0.5, mu), DomainError);
}

TEST_CASE("field difference subtracts pointwise and checks supports") {
  const GridSupport s = line_support({0.0, 1.0});
  const GridKernel id = make_grid_kernel(s, s, Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const GridKernel perm = make_grid_kernel(s, s, swap);
  const MatrixField diff = field_difference(cond_mean(id), cond_mean(perm));
  CHECK(diff.values[0](0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(diff.values[1](0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  MatrixField other = cond_mean(id);
  other.support = Eigen::MatrixXd::Zero(3, 1);
  other.values.push_back(Eigen::MatrixXd::Zero(1, 1));
  CHECK_THROWS_AS(field_difference(cond_mean(id), other), DimensionError);
}

TEST_CASE("trace constant is the root mean conditional trace") {
  Eigen::VectorXd alpha(2);
  alpha << 0.0, 0.0;
  Eigen::MatrixXd beta = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd tau(2, 2);
  tau << 1.5, 0.2, 0.2, 2.5;
  const GaussianKernel k = make_gaussian_kernel(alpha, beta, tau);
  const GaussianMeasure mu = gauss(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  CHECK(trace_constant(mu, k) == doctest::Approx(2.0).epsilon(1e-15));  // sqrt(4.0)

  // Grid route: weighted row traces.
  Rng rng(404);
  const GridSupport s = line_support({0.0, 0.5, 1.0, 1.5});
  Eigen::VectorXd w(4);
  for (int i = 0; i < 4; ++i) w(i) = 0.1 + rng.uniform();
  w /= w.sum();
  Eigen::MatrixXd rows(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) rows(i, j) = 0.1 + rng.uniform();
    rows.row(i) /= rows.row(i).sum();
  }
  const GridMeasure mud = make_grid_measure(s, w);
  const GridKernel kd = make_grid_kernel(s, s, rows);
  const MatrixField cc = cond_cov(kd);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) acc += w(i) * cc.values[i].trace();
  CHECK(trace_constant(mud, kd) == doctest::Approx(std::sqrt(acc)).epsilon(1e-13));
}

TEST_CASE("materialized fields evaluate the symbols pointwise") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  Eigen::VectorXd b(2);
  b << -1.0, 1.0;
  Eigen::MatrixXd pts(3, 2);
  pts << 0.0, 0.0, 1.0, 0.0, 0.5, -0.5;
  const MatrixField f = materialize(AffineField{a, b}, pts);
  REQUIRE(f.values.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd expect = a * pts.row(i).transpose() + b;
    CHECK((f.values[i] - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }
  const MatrixField g = materialize(ConstantField{a}, pts);
  for (int i = 0; i < 3; ++i) CHECK((g.values[i] - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("measure moments match direct sums") {
  Rng rng(505);
  Eigen::MatrixXd pts(7, 2);
  for (int i = 0; i < 7; ++i)
    for (int a = 0; a < 2; ++a) pts(i, a) = rng.uniform(-3.0, 3.0);
  Eigen::VectorXd w(7);
  for (int i = 0; i < 7; ++i) w(i) = 0.05 + rng.uniform();
  w /= w.sum();
  const GridMeasure mu = make_grid_measure(make_grid_support(pts), w);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < 7; ++i) mean += w(i) * pts.row(i).transpose();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 7; ++i) {
    const Eigen::VectorXd z = pts.row(i).transpose() - mean;
    cov += w(i) * z * z.transpose();
  }
  CHECK((measure_mean(mu) - mean).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((measure_cov(mu) - cov).cwiseAbs().maxCoeff() <= 1e-14);
}
