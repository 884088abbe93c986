#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "bridgebound/measures.hpp"
#include "bridgebound/metrics.hpp"
#include "bridgebound/rng.hpp"
#include "bridgebound/sinkhorn.hpp"

using namespace bridgebound;

namespace {

GaussianMeasure n1(double mean, double var) {
  Eigen::VectorXd m(1);
  m << mean;
  Eigen::MatrixXd c(1, 1);
  c << var;
  return make_gaussian_measure(m, c);
}

GaussianKernel k1(double alpha, double beta, double tau) {
  Eigen::VectorXd a(1);
  a << alpha;
  Eigen::MatrixXd b(1, 1), t(1, 1);
  b << beta;
  t << tau;
  return make_gaussian_kernel(a, b, t);
}

// Modest shared-box discretization of the 1-d test problem: standard source,
// shifted tighter target, unit random-walk reference step.
GridModel small_grid_model(int n) {
  const GaussianMeasure mu = n1(0.0, 1.0);
  const GaussianMeasure eta = n1(2.0, 0.5);
  const GaussianKernel k = k1(0.0, 1.0, 1.0);
  Eigen::VectorXd lo(1), hi(1);
  lo << -7.0;
  hi << 9.0;  // covers mu, eta, and the pushforward N(0,2) with room to spare
  const GridGeometry g = make_grid_geometry(lo, hi, {n});
  const GridMeasure mud = discretize(mu, g);
  const GridMeasure etad = discretize(eta, g);
  return make_grid_model(mud, etad, discretize_kernel(k, mud.support, etad.support));
}

double tv(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

}  // namespace

TEST_CASE("start state is the reference product with the base potentials") {
  const GridModel m = small_grid_model(120);
  const GridSinkhornState s0 = sinkhorn_start(m);
  CHECK(s0.n == 0);
  CHECK((s0.u - m.u_base).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s0.v.cwiseAbs().maxCoeff() == 0.0);
  const DiscreteJoint p0 = state_joint(m, s0);
  const DiscreteJoint ref = product(m.mu, m.k0);
  CHECK((p0.mass - ref.mass).cwiseAbs().maxCoeff() <= 1e-14);
  // transition of the start state is the reference kernel itself
  const GridKernel back = transition_of(p0, Parity::Even);
  CHECK((back.rows - m.k0.rows).cwiseAbs().maxCoeff() <= 1e-12);

  const GaussianModel gm = make_gaussian_model(n1(0.0, 1.0), n1(2.0, 0.5), k1(0.0, 1.0, 1.0));
  const GaussianSinkhornState g0 = sinkhorn_start(gm);
  CHECK((g0.u.a - gm.u_base.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g0.v.a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g0.v.b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a matched-marginal model is already a fixed point") {
  // eta equal to the pushforward of mu: every step is the identity.
  Eigen::MatrixXd pts(5, 1);
  pts << -1.0, 0.0, 1.0, 2.0, 3.0;
  const GridSupport s = make_grid_support(pts);
  Rng rng(7);
  Eigen::VectorXd w(5);
  for (int i = 0; i < 5; ++i) w(i) = 0.1 + rng.uniform();
  w /= w.sum();
  Eigen::MatrixXd rows(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) rows(i, j) = 0.05 + rng.uniform();
    rows.row(i) /= rows.row(i).sum();
  }
  const GridMeasure mu = make_grid_measure(s, w);
  const GridKernel k = make_grid_kernel(s, s, rows);
  const GridModel m = make_grid_model(mu, push(mu, k), k);
  const std::vector<GridSinkhornState> states = run_sinkhorn(m, 4);
  const DiscreteJoint p0 = state_joint(m, states[0]);
  for (int n = 1; n <= 4; ++n) {
    const DiscreteJoint pn = state_joint(m, states[n]);
    CHECK((pn.mass - p0.mass).cwiseAbs().maxCoeff() <= 1e-12);
  }

  const GaussianMeasure gmu = n1(0.3, 1.1);
  const GaussianKernel gk = k1(-0.2, 0.9, 0.8);
  const GaussianModel gm = make_gaussian_model(gmu, push(gmu, gk), gk);
  const std::vector<GaussianSinkhornState> gs = run_sinkhorn(gm, 4);
  for (int n = 1; n <= 4; ++n) {
    CHECK((gs[n].joint.mean - gs[0].joint.mean).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((gs[n].joint.cov - gs[0].joint.cov).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("odd states pin the target marginal, even states pin the source") {
  const GridModel m = small_grid_model(150);
  const std::vector<GridSinkhornState> states = run_sinkhorn(m, 6);
  for (int n = 1; n <= 6; ++n) {
    const DiscreteJoint p = state_joint(m, states[n]);
    if (n % 2 == 1) {
      CHECK(tv(second_marginal(p).weights, m.eta.weights) <= 1e-12);
    } else {
      CHECK(tv(first_marginal(p).weights, m.mu.weights) <= 1e-12);
      // free marginal recorded in the state is the pushforward mu K_n
      CHECK(tv(states[n].pi.weights, second_marginal(p).weights) <= 1e-12);
      // the joint factors exactly through its own transition kernel
      const DiscreteJoint refit = product(m.mu, transition_of(p, Parity::Even));
      CHECK((refit.mass - p.mass).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  const GaussianModel gm = make_gaussian_model(n1(0.0, 1.0), n1(2.0, 0.5), k1(0.0, 1.0, 1.0));
  const std::vector<GaussianSinkhornState> gs = run_sinkhorn(gm, 6);
  for (int n = 1; n <= 6; ++n) {
    if (n % 2 == 1) {
      const GaussianMeasure sm = second_marginal(gs[n].joint);
      CHECK((sm.mean - gm.eta.mean).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((sm.cov - gm.eta.cov).cwiseAbs().maxCoeff() <= 1e-12);
    } else {
      const GaussianMeasure fm = first_marginal(gs[n].joint);
      CHECK((fm.mean - gm.mu.mean).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((fm.cov - gm.mu.cov).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("potential recursion reproduces the joint route") {
  const GridModel m = small_grid_model(100);
  const std::vector<GridSinkhornState> states = run_sinkhorn(m, 5);
  for (int n = 0; n <= 5; ++n) {
    const auto [u, v] = potentials_update(m, n);
    const Eigen::MatrixXd lm = product_form_log_mass(m, u, v);
    const DiscreteJoint direct = state_joint(m, states[n]);
    CHECK((lm.array().exp().matrix() - direct.mass).cwiseAbs().maxCoeff() <= 1e-9);
    // the state carries the same potentials
    CHECK((states[n].u - u).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((states[n].v - v).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("gaussian potentials and joint stay in lockstep") {
  const GaussianModel m = make_gaussian_model(n1(0.0, 1.0), n1(2.0, 0.5), k1(0.0, 1.0, 1.0));
  const std::vector<GaussianSinkhornState> states = run_sinkhorn(m, 6);
  for (int n = 0; n <= 6; ++n) {
    const GaussianJoint refit = joint_from_potentials(m, states[n].u, states[n].v);
    CHECK((refit.mean - states[n].joint.mean).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((refit.cov - states[n].joint.cov).cwiseAbs().maxCoeff() <= 1e-10);
    // replayed recursion matches the stored potentials
    const auto [u, v] = potentials_update(m, n);
    CHECK((u.a - states[n].u.a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((v.a - states[n].v.a).cwiseAbs().maxCoeff() <= 1e-12);
  }
  // the solved pair integrates to one
  const GaussianBridge bridge = solve_bridge(m);
  CHECK(normalization_residual(m, bridge.u_star, bridge.v_star) <= 1e-9);
}

TEST_CASE("solved one-dimensional bridge matches the closed form") {
  // For source N(0,1), target N(2,1/2) and a unit random-walk step, the
  // stationary precision blocks solve p = D/2, q = D with D = pq - 1, giving
  // D = 1 + sqrt(3) and cross covariance 1/D = (sqrt(3)-1)/2.
  const double gamma = 0.5 * (std::sqrt(3.0) - 1.0);
  const GaussianModel m = make_gaussian_model(n1(0.0, 1.0), n1(2.0, 0.5), k1(0.0, 1.0, 1.0));
  const GaussianBridge bridge = solve_bridge(m, 1e-13);
  CHECK(std::abs(bridge.p_star.mean(0)) <= 1e-10);
  CHECK(bridge.p_star.mean(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(bridge.p_star.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bridge.p_star.cov(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bridge.p_star.cov(0, 1) == doctest::Approx(gamma).epsilon(1e-11));
  CHECK(bridge.u_star.a(0, 0) == doctest::Approx(gamma).epsilon(1e-11));
  CHECK(bridge.residual <= 1e-13);

  // Both marginals of the solved bridge are the prescribed ones, and the
  // forward transition pushes mu onto eta.
  const GaussianKernel l = transition_of(bridge.p_star, Parity::Even);
  const GaussianMeasure pushed = push(m.mu, l);
  CHECK((pushed.mean - m.eta.mean).cwiseAbs().maxCoeff() <= 1e-11);
  CHECK((pushed.cov - m.eta.cov).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("grid bridge converges and re-stepping no longer moves it") {
  const GridModel m = small_grid_model(100);
  const GridBridge bridge = solve_bridge(m, 1e-12);
  CHECK(bridge.residual <= 1e-12);
  CHECK(marginal_residual(m, Eigen::MatrixXd(bridge.p_star.mass.array().log().matrix())) <= 1e-12);

  // Replay the same deterministic iteration and push one step past the
  // stopping index: the joint must stay put.
  const std::vector<GridSinkhornState> states = run_sinkhorn(m, bridge.iterations_used + 1);
  const DiscreteJoint at_stop = state_joint(m, states[bridge.iterations_used]);
  const DiscreteJoint one_more = state_joint(m, states[bridge.iterations_used + 1]);
  CHECK((at_stop.mass - bridge.p_star.mass).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((one_more.mass - bridge.p_star.mass).cwiseAbs().maxCoeff() <= 1e-11);

  // push of mu through the even transition reproduces eta
  const GridKernel l = transition_of(bridge.p_star, Parity::Even);
  CHECK(tv(push(m.mu, l).weights, m.eta.weights) <= 1e-11);
}

TEST_CASE("relative entropy to the bridge decreases along the iterates") {
  const GridModel m = small_grid_model(100);
  const GridBridge bridge = solve_bridge(m, 1e-12);
  const std::vector<GridSinkhornState> states = run_sinkhorn(m, 10);
  double prev = kl(bridge.p_star, state_joint(m, states[0]));
  CHECK(prev > 0.0);
  for (int n = 1; n <= 10; ++n) {
    const double cur = kl(bridge.p_star, state_joint(m, states[n]));
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("finite-difference stencils are exact on quadratics inside the box") {
  Eigen::VectorXd lo(2), hi(2);
  lo << -1.0, -2.0;
  hi << 1.0, 2.0;
  const GridGeometry g = make_grid_geometry(lo, hi, {9, 11});
  Eigen::MatrixXd a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd b(2);
  b << -0.3, 0.7;
  const Eigen::MatrixXd pts = g.points();
  Eigen::VectorXd values(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const Eigen::VectorXd x = pts.row(i).transpose();
    values(i) = 0.5 * x.dot(a * x) + b.dot(x);
  }
  const MatrixField grad = grad_potential(values, g);
  const MatrixField hess = hess_potential(values, g);
  for (int i0 = 1; i0 + 1 < 9; ++i0)
    for (int i1 = 1; i1 + 1 < 11; ++i1) {
      const int i = i0 * 11 + i1;
      const Eigen::VectorXd x = pts.row(i).transpose();
      CHECK((grad.values[i] - (a * x + b)).cwiseAbs().maxCoeff() <= 1e-11);
    }
  // Hessian needs interior-of-interior points for double differencing.
  for (int i0 = 2; i0 + 2 < 9; ++i0)
    for (int i1 = 2; i1 + 2 < 11; ++i1) {
      const int i = i0 * 11 + i1;
      CHECK((hess.values[i] - a).cwiseAbs().maxCoeff() <= 1e-10);
    }
  // constant fields have zero gradient everywhere, boundary included
  const MatrixField zero_grad = grad_potential(Eigen::VectorXd::Constant(g.size(), 3.7), g);
  for (const Eigen::MatrixXd& v : zero_grad.values)
    CHECK(v.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("quadratic helpers evaluate and compose correctly") {
  Eigen::MatrixXd a(1, 1);
  a << 2.0;
  Eigen::VectorXd b(1);
  b << -1.0;
  const Quadratic q{a, b, 0.5};
  Eigen::VectorXd x(1);
  x << 2.0;
  CHECK(q.eval(x) == doctest::Approx(4.0 - 2.0 + 0.5).epsilon(1e-15));
  const Quadratic s = quadratic_sum(q, Quadratic::zero(1));
  CHECK(s.eval(x) == doctest::Approx(q.eval(x)).epsilon(1e-15));
  const AffineField gf = grad_potential(q);
  CHECK(gf.linear(0, 0) == 2.0);
  CHECK(gf.offset(0) == -1.0);
  CHECK(hess_potential(q).value(0, 0) == 2.0);
}

TEST_CASE("gaussian log-integral identities hold against the pushforward") {
  // exp(-q) with q the negative log density of eta integrates W against a
  // Gaussian; validate via the 0-state: integral over y of K(x,dy) is 1, so
  // the quadratic must vanish when q = 0 up to the cost normalizer.
  const GaussianKernel k = k1(0.4, 1.2, 0.9);
  const Quadratic none = log_kw_exp_neg(k, Quadratic::zero(1));
  Eigen::VectorXd x0(1), x1(1);
  x0 << 0.0;
  x1 << 1.5;
  // Row integrals of a Markov kernel are constant in x (here: the Gaussian
  // normalizer of W), so the quadratic is flat.
  CHECK(none.eval(x0) == doctest::Approx(none.eval(x1)).epsilon(1e-12));
  CHECK(none.a.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(none.b.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("iteration budget exhaustion reports the last residual") {
  const GridModel m = small_grid_model(80);
  CHECK_THROWS_AS(solve_bridge(m, 1e-12, 2), ConvergenceError);
  try {
    solve_bridge(m, 1e-12, 2);
  } catch (const ConvergenceError& e) {
    CHECK(std::isfinite(e.last_residual));
    CHECK(e.last_residual > 1e-12);
  }
}

TEST_CASE("model factories reject unusable inputs") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0.0, 1.0, 2.0;
  const GridSupport s = make_grid_support(pts);
  Eigen::VectorXd w(3), wz(3);
  w << 0.2, 0.3, 0.5;
  wz << 0.5, 0.5, 0.0;
  Eigen::MatrixXd rows(3, 3);
  rows.setConstant(1.0 / 3.0);
  const GridKernel k = make_grid_kernel(s, s, rows);
  CHECK_THROWS_AS(make_grid_model(make_grid_measure(s, wz), make_grid_measure(s, w), k),
                  SupportError);
  Eigen::MatrixXd other(4, 1);
  other << 0.0, 1.0, 2.0, 3.0;
  const GridSupport s4 = make_grid_support(other);
  Eigen::VectorXd w4 = Eigen::VectorXd::Constant(4, 0.25);
  CHECK_THROWS_AS(make_grid_model(make_grid_measure(s4, w4), make_grid_measure(s, w), k),
                  DimensionError);
}
