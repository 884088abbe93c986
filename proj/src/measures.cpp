#include "bridgebound/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"

namespace bridgebound {

namespace {

// Pairwise-distinct check via lexicographic sort of row indices.
void require_distinct_points(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](int a, int b) {
    for (int k = 0; k < pts.cols(); ++k) {
      if (pts(a, k) < pts(b, k)) return true;
      if (pts(a, k) > pts(b, k)) return false;
    }
    return false;
  };
  std::sort(idx.begin(), idx.end(), less);
  for (int i = 0; i + 1 < n; ++i) {
    if (pts.row(idx[i]) == pts.row(idx[i + 1]))
      throw DomainError("grid support: points are not pairwise distinct");
  }
}

Eigen::MatrixXd block(const Eigen::MatrixXd& m, int i, int j, int d) {
  return m.block(i * d, j * d, d, d);
}

}  // namespace

Eigen::MatrixXd GaussianKernel::chi() const {
  return inverse_spd(tau, "kernel tau") * beta;
}

GridSupport make_grid_support(Eigen::MatrixXd points, double cell_volume,
                              std::optional<GridGeometry> geometry) {
  if (points.rows() < 1) throw DimensionError("grid support: no points");
  const int d = static_cast<int>(points.cols());
  if (d < 1 || d > 2)
    throw DimensionError("grid support: only dimensions 1 and 2 are supported");
  if (!points.allFinite()) throw DomainError("grid support: non-finite point");
  if (!(cell_volume > 0.0)) throw DomainError("grid support: cell volume must be positive");
  require_distinct_points(points);
  if (geometry) {
    if (geometry->dim() != d || geometry->size() != points.rows())
      throw DimensionError("grid support: geometry does not match points");
  }
  return GridSupport{std::move(points), cell_volume, std::move(geometry)};
}

GridMeasure make_grid_measure(GridSupport support, Eigen::VectorXd weights) {
  if (weights.size() != support.size())
    throw DimensionError("grid measure: weight count does not match support");
  if (!weights.allFinite() || weights.minCoeff() < 0.0)
    throw DomainError("grid measure: weights must be finite and nonnegative");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw DomainError("grid measure: weights must sum to 1");
  return GridMeasure{std::move(support), std::move(weights)};
}

GaussianMeasure make_gaussian_measure(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw DimensionError("gaussian measure: covariance shape does not match mean");
  if (!mean.allFinite()) throw DomainError("gaussian measure: non-finite mean");
  Eigen::MatrixXd s = require_spd(cov, "gaussian measure covariance");
  return GaussianMeasure{std::move(mean), std::move(s)};
}

GridKernel make_grid_kernel(GridSupport source, GridSupport target, Eigen::MatrixXd rows) {
  if (rows.rows() != source.size() || rows.cols() != target.size())
    throw DimensionError("grid kernel: row matrix shape does not match supports");
  if (!rows.allFinite() || rows.minCoeff() < 0.0)
    throw DomainError("grid kernel: entries must be finite and nonnegative");
  for (int i = 0; i < rows.rows(); ++i) {
    if (std::abs(rows.row(i).sum() - 1.0) > 1e-12)
      throw DomainError("grid kernel: rows must sum to 1");
  }
  return GridKernel{std::move(source), std::move(target), std::move(rows)};
}

GaussianKernel make_gaussian_kernel(Eigen::VectorXd alpha, Eigen::MatrixXd beta,
                                    Eigen::MatrixXd tau) {
  const int d = static_cast<int>(alpha.size());
  if (beta.rows() != d || beta.cols() != d || tau.rows() != d || tau.cols() != d)
    throw DimensionError("gaussian kernel: alpha/beta/tau dimensions disagree");
  if (!alpha.allFinite() || !beta.allFinite())
    throw DomainError("gaussian kernel: non-finite parameter");
  require_invertible(beta, "gaussian kernel beta");
  Eigen::MatrixXd t = require_spd(tau, "gaussian kernel tau");
  return GaussianKernel{std::move(alpha), std::move(beta), std::move(t)};
}

DiscreteJoint make_discrete_joint(GridSupport x, GridSupport y, Eigen::MatrixXd mass) {
  if (mass.rows() != x.size() || mass.cols() != y.size())
    throw DimensionError("discrete joint: mass shape does not match supports");
  if (!mass.allFinite() || mass.minCoeff() < 0.0)
    throw DomainError("discrete joint: mass must be finite and nonnegative");
  if (std::abs(mass.sum() - 1.0) > 1e-12)
    throw DomainError("discrete joint: total mass must be 1");
  return DiscreteJoint{std::move(x), std::move(y), std::move(mass)};
}

GaussianJoint make_gaussian_joint(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                                  bool allow_singular) {
  if (mean.size() % 2 != 0)
    throw DimensionError("gaussian joint: mean length must be even");
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw DimensionError("gaussian joint: covariance shape does not match mean");
  Eigen::MatrixXd s = symmetrize(cov);
  if (allow_singular) {
    // Optimal couplings are supported on a graph; allow PSD up to roundoff.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    const double lmax = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, lmax))
      throw DomainError("gaussian joint: covariance is not positive semidefinite");
  } else {
    s = require_spd(cov, "gaussian joint covariance");
  }
  return GaussianJoint{std::move(mean), std::move(s)};
}

bool support_equal(const GridSupport& a, const GridSupport& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  if ((a.points - b.points).cwiseAbs().maxCoeff() > 1e-12) return false;
  return std::abs(a.cell_volume - b.cell_volume) <= 1e-12 * std::max(1.0, a.cell_volume);
}

DiscreteJoint product(const GridMeasure& mu, const GridKernel& k) {
  if (!support_equal(mu.support, k.source))
    throw DimensionError("product: kernel source does not match the measure support");
  Eigen::MatrixXd mass = mu.weights.asDiagonal() * k.rows;
  return DiscreteJoint{mu.support, k.target, std::move(mass)};
}

GaussianJoint product(const GaussianMeasure& mu, const GaussianKernel& k) {
  const int d = mu.dim();
  if (k.dim() != d) throw DimensionError("product: kernel dimension does not match measure");
  Eigen::VectorXd mean(2 * d);
  mean.head(d) = mu.mean;
  mean.tail(d) = k.alpha + k.beta * mu.mean;
  Eigen::MatrixXd cov(2 * d, 2 * d);
  cov.topLeftCorner(d, d) = mu.cov;
  cov.topRightCorner(d, d) = mu.cov * k.beta.transpose();
  cov.bottomLeftCorner(d, d) = k.beta * mu.cov;
  cov.bottomRightCorner(d, d) = k.tau + k.beta * mu.cov * k.beta.transpose();
  return GaussianJoint{std::move(mean), symmetrize(cov)};
}

GridMeasure push(const GridMeasure& mu, const GridKernel& k) {
  if (!support_equal(mu.support, k.source))
    throw DimensionError("push: kernel source does not match the measure support");
  Eigen::VectorXd w = k.rows.transpose() * mu.weights;
  return GridMeasure{k.target, std::move(w)};
}

GaussianMeasure push(const GaussianMeasure& mu, const GaussianKernel& k) {
  if (k.dim() != mu.dim())
    throw DimensionError("push: kernel dimension does not match measure");
  return GaussianMeasure{k.alpha + k.beta * mu.mean,
                         symmetrize(k.tau + k.beta * mu.cov * k.beta.transpose())};
}

DiscreteJoint flip(const DiscreteJoint& p) {
  return DiscreteJoint{p.y, p.x, p.mass.transpose()};
}

GaussianJoint flip(const GaussianJoint& p) {
  const int d = p.dim();
  Eigen::VectorXd mean(2 * d);
  mean.head(d) = p.mean.tail(d);
  mean.tail(d) = p.mean.head(d);
  Eigen::MatrixXd cov(2 * d, 2 * d);
  cov.topLeftCorner(d, d) = block(p.cov, 1, 1, d);
  cov.topRightCorner(d, d) = block(p.cov, 1, 0, d);
  cov.bottomLeftCorner(d, d) = block(p.cov, 0, 1, d);
  cov.bottomRightCorner(d, d) = block(p.cov, 0, 0, d);
  return GaussianJoint{std::move(mean), std::move(cov)};
}

GridDisintegration disintegrate(const DiscreteJoint& p, Coordinate coord) {
  if (coord == Coordinate::Second) return disintegrate(flip(p), Coordinate::First);
  const int nx = p.x.size(), ny = p.y.size();
  Eigen::VectorXd w = p.mass.rowwise().sum();
  Eigen::MatrixXd rows(nx, ny);
  std::vector<int> zero_rows;
  for (int i = 0; i < nx; ++i) {
    if (w(i) > 0.0) {
      rows.row(i) = p.mass.row(i) / w(i);
    } else {
      rows.row(i).setConstant(1.0 / ny);  // conventional choice off the marginal support
      zero_rows.push_back(i);
      w(i) = 0.0;
    }
  }
  return GridDisintegration{GridMeasure{p.x, std::move(w)},
                            GridKernel{p.x, p.y, std::move(rows)},
                            std::move(zero_rows)};
}

GaussianDisintegration disintegrate(const GaussianJoint& p, Coordinate coord) {
  if (coord == Coordinate::Second) return disintegrate(flip(p), Coordinate::First);
  const int d = p.dim();
  Eigen::MatrixXd cxx = block(p.cov, 0, 0, d);
  Eigen::MatrixXd cyx = block(p.cov, 1, 0, d);
  Eigen::MatrixXd cyy = block(p.cov, 1, 1, d);
  Eigen::MatrixXd cxx_inv = inverse_spd(cxx, "joint first-block covariance");
  Eigen::MatrixXd beta = cyx * cxx_inv;
  Eigen::VectorXd alpha = p.mean.tail(d) - beta * p.mean.head(d);
  Eigen::MatrixXd tau = symmetrize(cyy - beta * cyx.transpose());
  return GaussianDisintegration{GaussianMeasure{p.mean.head(d), std::move(cxx)},
                                GaussianKernel{std::move(alpha), std::move(beta),
                                               std::move(tau)}};
}

GridMeasure first_marginal(const DiscreteJoint& p) {
  return GridMeasure{p.x, p.mass.rowwise().sum()};
}

GridMeasure second_marginal(const DiscreteJoint& p) {
  return GridMeasure{p.y, p.mass.colwise().sum().transpose()};
}

GaussianMeasure first_marginal(const GaussianJoint& p) {
  const int d = p.dim();
  return GaussianMeasure{p.mean.head(d), block(p.cov, 0, 0, d)};
}

GaussianMeasure second_marginal(const GaussianJoint& p) {
  const int d = p.dim();
  return GaussianMeasure{p.mean.tail(d), block(p.cov, 1, 1, d)};
}

GridMeasure discretize(const GaussianMeasure& g, const GridGeometry& geometry) {
  Eigen::MatrixXd prec = inverse_spd(g.cov, "gaussian covariance");
  const Eigen::VectorXd mean = g.mean;
  return discretize_potential(geometry, [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd c = x - mean;
    return 0.5 * c.dot(prec * c);
  });
}

GridMeasure discretize_potential(
    const GridGeometry& geometry,
    const std::function<double(const Eigen::VectorXd&)>& potential) {
  Eigen::MatrixXd pts = geometry.points();
  const int n = static_cast<int>(pts.rows());
  Eigen::VectorXd logw(n);
  for (int i = 0; i < n; ++i) logw(i) = -potential(pts.row(i).transpose());
  const double shift = logw.maxCoeff();
  Eigen::VectorXd w = (logw.array() - shift).exp();
  w /= w.sum();
  GridSupport support{std::move(pts), geometry.cell_volume(), geometry};
  return GridMeasure{std::move(support), std::move(w)};
}

GridKernel discretize_kernel(const GaussianKernel& k, const GridSupport& source,
                             const GridSupport& target) {
  if (source.dim() != k.dim() || target.dim() != k.dim())
    throw DimensionError("discretize kernel: support dimension does not match kernel");
  Eigen::MatrixXd prec = inverse_spd(k.tau, "kernel tau");
  const int ns = source.size(), nt = target.size();
  Eigen::MatrixXd rows(ns, nt);
  for (int i = 0; i < ns; ++i) {
    Eigen::VectorXd center = k.alpha + k.beta * source.points.row(i).transpose();
    Eigen::VectorXd logr(nt);
    for (int j = 0; j < nt; ++j) {
      Eigen::VectorXd c = target.points.row(j).transpose() - center;
      logr(j) = -0.5 * c.dot(prec * c);
    }
    const double shift = logr.maxCoeff();
    Eigen::VectorXd r = (logr.array() - shift).exp();
    rows.row(i) = r.transpose() / r.sum();
  }
  return GridKernel{source, target, std::move(rows)};
}

GridGeometry default_geometry(const GaussianMeasure& g, int points_per_axis,
                              double sigmas) {
  const int d = g.dim();
  Eigen::VectorXd lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    const double s = std::sqrt(g.cov(k, k));
    lo(k) = g.mean(k) - sigmas * s;
    hi(k) = g.mean(k) + sigmas * s;
  }
  return make_grid_geometry(lo, hi, std::vector<int>(d, points_per_axis));
}

}  // namespace bridgebound
