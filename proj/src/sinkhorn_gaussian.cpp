#include <cmath>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"
#include "bridgebound/sinkhorn.hpp"

namespace bridgebound {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// Gaussian integral of exp(-x'Mx/2 + h'x): (2pi)^{d/2} det(M)^{-1/2}
// exp(h'M^{-1}h/2).  Collect the pieces as a quadratic in the outer variable.
struct GaussIntegral {
  Eigen::MatrixXd minv;
  double logdet_m;
};

GaussIntegral factor(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(m));
  if (llt.info() != Eigen::Success)
    throw DomainError(std::string(what) + ": potential recursion lost positive definiteness");
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return GaussIntegral{llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols())), logdet};
}

// Marginal-pinning step: replace one marginal of a Gaussian joint, keeping
// the conditional of the other coordinate.
GaussianJoint pin_second(const GaussianJoint& p, const GaussianMeasure& eta) {
  const int d = p.dim();
  const Eigen::MatrixXd cxx = p.cov.topLeftCorner(d, d);
  const Eigen::MatrixXd cxy = p.cov.topRightCorner(d, d);
  const Eigen::MatrixXd cyy = p.cov.bottomRightCorner(d, d);
  const Eigen::MatrixXd b = cxy * inverse_spd(cyy, "joint second-block covariance");
  const Eigen::MatrixXd cond = cxx - b * cxy.transpose();

  Eigen::VectorXd mean(2 * d);
  mean.tail(d) = eta.mean;
  mean.head(d) = p.mean.head(d) + b * (eta.mean - p.mean.tail(d));
  Eigen::MatrixXd cov(2 * d, 2 * d);
  cov.bottomRightCorner(d, d) = eta.cov;
  cov.topRightCorner(d, d) = b * eta.cov;
  cov.bottomLeftCorner(d, d) = cov.topRightCorner(d, d).transpose();
  cov.topLeftCorner(d, d) = symmetrize(b * eta.cov * b.transpose() + cond);
  return GaussianJoint{std::move(mean), symmetrize(cov)};
}

GaussianJoint pin_first(const GaussianJoint& p, const GaussianMeasure& mu) {
  return flip(pin_second(flip(p), mu));
}

GaussianMeasure free_marginal(const GaussianJoint& joint, int n) {
  return n % 2 == 0 ? second_marginal(joint) : first_marginal(joint);
}

double expectation(const Quadratic& q, const GaussianMeasure& g) {
  return 0.5 * (q.a * g.cov).trace() + 0.5 * g.mean.dot(q.a * g.mean) +
         q.b.dot(g.mean) + q.c;
}

// One recursion step to odd index: V <- V_base + log K_Wflat(exp(-U)).
void potential_step_odd(const GaussianModel& m, const Quadratic& u, Quadratic& v) {
  v = quadratic_sum(m.v_base, log_kw_flat_exp_neg(m.k0, u));
}

// One recursion step to even index, then gauge centering mu(U - U_base) = 0.
void potential_step_even(const GaussianModel& m, Quadratic& u, Quadratic& v) {
  u = quadratic_sum(m.u_base, log_kw_exp_neg(m.k0, v));
  const double gauge = expectation(u, m.mu) - expectation(m.u_base, m.mu);
  u.c -= gauge;
  v.c += gauge;
}

}  // namespace

Quadratic quadratic_sum(const Quadratic& p, const Quadratic& q) {
  return Quadratic{p.a + q.a, p.b + q.b, p.c + q.c};
}

Quadratic log_kw_exp_neg(const GaussianKernel& k, const Quadratic& q) {
  // Integrate over y: exponent -(y - alpha - beta x)'tau^{-1}(...)/2 - q(y)
  // - logdet(2 pi tau)/2.  Quadratic in y with matrix M = tau^{-1} + q.a and
  // linear part h(x) = tau^{-1}(alpha + beta x) - q.b = h0 + H x.
  const Eigen::MatrixXd prec = inverse_spd(k.tau, "kernel tau");
  const GaussIntegral gi = factor(prec + q.a, "log_kw_exp_neg");
  const Eigen::MatrixXd h = prec * k.beta;
  const Eigen::VectorXd h0 = prec * k.alpha - q.b;
  const double logdet_tau = logdet_spd(k.tau, "kernel tau");

  Quadratic out;
  out.a = symmetrize(h.transpose() * gi.minv * h - k.beta.transpose() * prec * k.beta);
  out.b = h.transpose() * gi.minv * h0 - k.beta.transpose() * prec * k.alpha;
  out.c = 0.5 * h0.dot(gi.minv * h0) - 0.5 * k.alpha.dot(prec * k.alpha) - q.c -
          0.5 * (logdet_tau + gi.logdet_m);
  return out;
}

Quadratic log_kw_flat_exp_neg(const GaussianKernel& k, const Quadratic& q) {
  // Integrate over x: exponent quadratic in x with M = beta'tau^{-1}beta + q.a
  // and linear part g(y) = beta'tau^{-1}(y - alpha) - q.b = G y + g0.
  const Eigen::MatrixXd prec = inverse_spd(k.tau, "kernel tau");
  const GaussIntegral gi = factor(k.beta.transpose() * prec * k.beta + q.a,
                                  "log_kw_flat_exp_neg");
  const Eigen::MatrixXd g = k.beta.transpose() * prec;
  const Eigen::VectorXd g0 = -k.beta.transpose() * prec * k.alpha - q.b;
  const double logdet_tau = logdet_spd(k.tau, "kernel tau");

  Quadratic out;
  out.a = symmetrize(g.transpose() * gi.minv * g - prec);
  out.b = g.transpose() * gi.minv * g0 + prec * k.alpha;
  out.c = 0.5 * g0.dot(gi.minv * g0) - 0.5 * k.alpha.dot(prec * k.alpha) - q.c -
          0.5 * (logdet_tau + gi.logdet_m);
  return out;
}

GaussianModel make_gaussian_model(GaussianMeasure mu, GaussianMeasure eta,
                                  GaussianKernel k0) {
  const int d = mu.dim();
  if (eta.dim() != d || k0.dim() != d)
    throw DimensionError("gaussian model: dimensions disagree");
  auto base = [d](const GaussianMeasure& g) {
    const Eigen::MatrixXd prec = inverse_spd(g.cov, "model covariance");
    Quadratic q;
    q.a = prec;
    q.b = -prec * g.mean;
    q.c = 0.5 * g.mean.dot(prec * g.mean) +
          0.5 * (d * std::log(kTwoPi) + logdet_spd(g.cov, "model covariance"));
    return q;
  };
  GaussianModel m{std::move(mu), std::move(eta), std::move(k0), {}, {}};
  m.u_base = base(m.mu);
  m.v_base = base(m.eta);
  return m;
}

GaussianSinkhornState sinkhorn_start(const GaussianModel& m) {
  GaussianSinkhornState s;
  s.n = 0;
  s.joint = product(m.mu, m.k0);
  s.u = m.u_base;
  s.v = Quadratic::zero(m.eta.dim());
  s.pi = free_marginal(s.joint, 0);
  return s;
}

GaussianSinkhornState sinkhorn_step(const GaussianModel& m, const GaussianSinkhornState& s) {
  GaussianSinkhornState next;
  next.n = s.n + 1;
  next.u = s.u;
  next.v = s.v;
  if (next.n % 2 == 1) {
    next.joint = pin_second(s.joint, m.eta);
    potential_step_odd(m, next.u, next.v);
  } else {
    next.joint = pin_first(s.joint, m.mu);
    potential_step_even(m, next.u, next.v);
  }
  next.pi = free_marginal(next.joint, next.n);
  return next;
}

std::pair<Quadratic, Quadratic> potentials_update(const GaussianModel& m, int n) {
  Quadratic u = m.u_base;
  Quadratic v = Quadratic::zero(m.eta.dim());
  for (int k = 1; k <= n; ++k) {
    if (k % 2 == 1)
      potential_step_odd(m, u, v);
    else
      potential_step_even(m, u, v);
  }
  return {std::move(u), std::move(v)};
}

GaussianJoint joint_from_potentials(const GaussianModel& m, const Quadratic& u,
                                    const Quadratic& v) {
  // exp(-u(x) - W(x,y) - v(y)) has precision blocks
  //   [u.a + beta'tau^{-1}beta, -beta'tau^{-1}; -tau^{-1}beta, v.a + tau^{-1}]
  // and linear coefficient (u.b + beta'tau^{-1}alpha, v.b - tau^{-1}alpha).
  const int d = m.mu.dim();
  const Eigen::MatrixXd prec = inverse_spd(m.k0.tau, "kernel tau");
  Eigen::MatrixXd lam(2 * d, 2 * d);
  lam.topLeftCorner(d, d) = u.a + m.k0.beta.transpose() * prec * m.k0.beta;
  lam.topRightCorner(d, d) = -m.k0.beta.transpose() * prec;
  lam.bottomLeftCorner(d, d) = -prec * m.k0.beta;
  lam.bottomRightCorner(d, d) = v.a + prec;
  Eigen::VectorXd lin(2 * d);
  lin.head(d) = u.b + m.k0.beta.transpose() * prec * m.k0.alpha;
  lin.tail(d) = v.b - prec * m.k0.alpha;

  const Eigen::MatrixXd cov = inverse_spd(lam, "potential precision");
  return GaussianJoint{-cov * lin, symmetrize(cov)};
}

double normalization_residual(const GaussianModel& m, const Quadratic& u,
                              const Quadratic& v) {
  const int d = m.mu.dim();
  const Eigen::MatrixXd prec = inverse_spd(m.k0.tau, "kernel tau");
  Eigen::MatrixXd lam(2 * d, 2 * d);
  lam.topLeftCorner(d, d) = u.a + m.k0.beta.transpose() * prec * m.k0.beta;
  lam.topRightCorner(d, d) = -m.k0.beta.transpose() * prec;
  lam.bottomLeftCorner(d, d) = -prec * m.k0.beta;
  lam.bottomRightCorner(d, d) = v.a + prec;
  Eigen::VectorXd lin(2 * d);
  lin.head(d) = u.b + m.k0.beta.transpose() * prec * m.k0.alpha;
  lin.tail(d) = v.b - prec * m.k0.alpha;

  const double c_total = u.c + v.c + 0.5 * m.k0.alpha.dot(prec * m.k0.alpha) +
                         0.5 * (d * std::log(kTwoPi) + logdet_spd(m.k0.tau, "kernel tau"));
  const Eigen::MatrixXd lam_inv = inverse_spd(lam, "potential precision");
  const double log_z = d * std::log(kTwoPi) - 0.5 * logdet_spd(lam, "potential precision") +
                       0.5 * lin.dot(lam_inv * lin);
  return std::abs(c_total - log_z);
}

double marginal_residual(const GaussianModel& m, const GaussianJoint& joint) {
  auto param_dist = [](const GaussianMeasure& a, const GaussianMeasure& b) {
    return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(),
                    (a.cov - b.cov).cwiseAbs().maxCoeff());
  };
  return std::max(param_dist(first_marginal(joint), m.mu),
                  param_dist(second_marginal(joint), m.eta));
}

GaussianBridge solve_bridge(const GaussianModel& m, double tol, int max_iter) {
  GaussianSinkhornState s = sinkhorn_start(m);
  double res = marginal_residual(m, s.joint);
  while (res >= tol) {
    if (s.n >= max_iter)
      throw ConvergenceError("solve_bridge: iteration budget exhausted", res);
    s = sinkhorn_step(m, s);
    res = marginal_residual(m, s.joint);
  }
  return GaussianBridge{s.joint, s.u, s.v, s.n, res};
}

GaussianKernel transition_of(const GaussianJoint& p, Parity parity) {
  if (parity == Parity::Odd) return disintegrate(p, Coordinate::Second).kernel;
  return disintegrate(p, Coordinate::First).kernel;
}

AffineField grad_potential(const Quadratic& q) { return AffineField{q.a, q.b}; }

ConstantField hess_potential(const Quadratic& q) { return ConstantField{q.a}; }

std::vector<GaussianSinkhornState> run_sinkhorn(const GaussianModel& m, int n_steps) {
  std::vector<GaussianSinkhornState> states;
  states.reserve(n_steps + 1);
  states.push_back(sinkhorn_start(m));
  for (int k = 0; k < n_steps; ++k) states.push_back(sinkhorn_step(m, states.back()));
  return states;
}

}  // namespace bridgebound
