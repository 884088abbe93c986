#include "bridgebound/metrics.hpp"

#include <cmath>
#include <limits>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"

namespace bridgebound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double discrete_kl(const Eigen::VectorXd& nu, const Eigen::VectorXd& mu) {
  double acc = 0.0;
  for (int i = 0; i < nu.size(); ++i) {
    if (nu(i) == 0.0) continue;
    if (mu(i) == 0.0) return kInf;
    acc += nu(i) * std::log(nu(i) / mu(i));
  }
  return std::max(0.0, acc);
}

double gaussian_kl(const Eigen::VectorXd& m1, const Eigen::MatrixXd& s1,
                   const Eigen::VectorXd& m2, const Eigen::MatrixXd& s2) {
  const int d = static_cast<int>(m1.size());
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(s2));
  if (llt.info() != Eigen::Success)
    throw DomainError("kl: second covariance is not SPD");
  const Eigen::MatrixXd sol = llt.solve(s1);
  const Eigen::VectorXd dm = m2 - m1;
  const double quad = dm.dot(llt.solve(dm));
  const double tr = sol.trace();
  const double logdet = logdet_spd(s2, "kl covariance") - logdet_spd(s1, "kl covariance");
  return std::max(0.0, 0.5 * (tr + quad - d + logdet));
}

}  // namespace

double kl(const GridMeasure& nu, const GridMeasure& mu) {
  if (!support_equal(nu.support, mu.support))
    throw DimensionError("kl: grid measures live on different supports");
  return discrete_kl(nu.weights, mu.weights);
}

double kl(const GaussianMeasure& nu, const GaussianMeasure& mu) {
  if (nu.dim() != mu.dim()) throw DimensionError("kl: dimension mismatch");
  return gaussian_kl(nu.mean, nu.cov, mu.mean, mu.cov);
}

double kl(const DiscreteJoint& nu, const DiscreteJoint& mu) {
  if (!support_equal(nu.x, mu.x) || !support_equal(nu.y, mu.y))
    throw DimensionError("kl: joints live on different supports");
  return discrete_kl(Eigen::Map<const Eigen::VectorXd>(nu.mass.data(), nu.mass.size()),
                     Eigen::Map<const Eigen::VectorXd>(mu.mass.data(), mu.mass.size()));
}

double kl(const GaussianJoint& nu, const GaussianJoint& mu) {
  if (nu.dim() != mu.dim()) throw DimensionError("kl: dimension mismatch");
  return gaussian_kl(nu.mean, nu.cov, mu.mean, mu.cov);
}

double kl_disintegrated(const GridMeasure& mu, const GridKernel& l, const GridKernel& k) {
  if (!support_equal(mu.support, l.source) || !support_equal(mu.support, k.source))
    throw DimensionError("kl_disintegrated: kernel sources do not match measure");
  if (!support_equal(l.target, k.target))
    throw DimensionError("kl_disintegrated: kernel targets disagree");
  double acc = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    if (mu.weights(i) == 0.0) continue;
    const double h = discrete_kl(l.rows.row(i).transpose(), k.rows.row(i).transpose());
    if (h == kInf) return kInf;
    acc += mu.weights(i) * h;
  }
  return acc;
}

double kl_disintegrated(const GaussianMeasure& mu, const GaussianKernel& l,
                        const GaussianKernel& k) {
  const int d = mu.dim();
  if (l.dim() != d || k.dim() != d)
    throw DimensionError("kl_disintegrated: dimension mismatch");
  // H(N(a_l + B_l x, tau_l) | N(a_k + B_k x, tau_k)) integrated over x ~ mu:
  // the quadratic term E[(delta(x))' tau_k^{-1} delta(x)] with affine
  // delta(x) has an exact Gaussian value.
  Eigen::LLT<Eigen::MatrixXd> llt(k.tau);
  if (llt.info() != Eigen::Success) throw DomainError("kl_disintegrated: tau not SPD");
  const double tr = llt.solve(l.tau).trace();
  const double logdet =
      logdet_spd(k.tau, "kl tau") - logdet_spd(l.tau, "kl tau");
  const Eigen::MatrixXd db = l.beta - k.beta;
  const Eigen::VectorXd da = l.alpha - k.alpha;
  const Eigen::VectorXd dm = da + db * mu.mean;
  const Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const double quad = (db.transpose() * prec * db * mu.cov).trace() + dm.dot(prec * dm);
  return std::max(0.0, 0.5 * (tr + quad - d + logdet));
}

double fisher(const GridMeasure& nu, const GridMeasure& mu) {
  if (!support_equal(nu.support, mu.support))
    throw DimensionError("fisher: grid measures live on different supports");
  if (!nu.support.geometry)
    throw DomainError("fisher: grid measure needs regular grid geometry");
  const GridGeometry& g = *nu.support.geometry;
  const int n = nu.size(), d = g.dim();

  Eigen::VectorXd logratio(n);
  for (int i = 0; i < n; ++i) {
    if (nu.weights(i) > 0.0 && mu.weights(i) == 0.0) return kInf;
    logratio(i) = (nu.weights(i) > 0.0 && mu.weights(i) > 0.0)
                      ? std::log(nu.weights(i) / mu.weights(i))
                      : -kInf;
  }

  // Central differences inside, one-sided at the boundary; spacing h per axis.
  auto axis_derivative = [&](int flat, int axis, int stride, int coord,
                             int extent) -> double {
    const double h = g.spacing(axis);
    const double fm = coord > 0 ? logratio(flat - stride) : kInf;
    const double fp = coord < extent - 1 ? logratio(flat + stride) : kInf;
    const double f0 = logratio(flat);
    if (coord > 0 && coord < extent - 1 && std::isfinite(fm) && std::isfinite(fp))
      return (fp - fm) / (2.0 * h);
    if (coord < extent - 1 && std::isfinite(fp) && std::isfinite(f0))
      return (fp - f0) / h;
    if (coord > 0 && std::isfinite(fm) && std::isfinite(f0))
      return (f0 - fm) / h;
    return 0.0;  // isolated point of the support: no usable stencil
  };

  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (nu.weights(i) == 0.0 || !std::isfinite(logratio(i))) continue;
    double sq = 0.0;
    if (d == 1) {
      const double gx = axis_derivative(i, 0, 1, i, g.shape[0]);
      sq = gx * gx;
    } else {
      const int n1 = g.shape[1];
      const int i0 = i / n1, i1 = i % n1;
      const double g0 = axis_derivative(i, 0, n1, i0, g.shape[0]);
      const double g1 = axis_derivative(i, 1, 1, i1, n1);
      sq = g0 * g0 + g1 * g1;
    }
    acc += nu.weights(i) * sq;
  }
  return acc;
}

double fisher(const GaussianMeasure& nu, const GaussianMeasure& mu) {
  if (nu.dim() != mu.dim()) throw DimensionError("fisher: dimension mismatch");
  // grad log dnu/dmu (x) = Sigma_mu^{-1}(x - m_mu) - Sigma_nu^{-1}(x - m_nu);
  // an affine map, so the nu-expectation of its squared norm is exact.
  const Eigen::MatrixXd pn = inverse_spd(nu.cov, "fisher nu covariance");
  const Eigen::MatrixXd pm = inverse_spd(mu.cov, "fisher mu covariance");
  const Eigen::MatrixXd a = pm - pn;
  const Eigen::VectorXd at_mean = pm * (nu.mean - mu.mean);
  return (a * nu.cov * a.transpose()).trace() + at_mean.squaredNorm();
}

KernelFisherBound fisher_kernel_lipschitz(const GaussianKernel& k,
                                          const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y) {
  if (x.size() != k.dim() || y.size() != k.dim())
    throw DimensionError("fisher_kernel_lipschitz: point dimension mismatch");
  const Eigen::MatrixXd chi = k.chi();
  const double value = (chi * (x - y)).squaredNorm();
  const double kappa = spectral_norm(chi);
  return KernelFisherBound{value, kappa * kappa * (x - y).squaredNorm()};
}

}  // namespace bridgebound
