#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bridgebound/measures.hpp"

namespace bridgebound {

// ---------------------------------------------------------------------------
// Matrix-valued fields over a support, and the weighted norms
// |||v|||_{p,mu}^p = sum_i w_i ||v(x_i)||_F^p used by every bound.
// Gaussian-backend fields stay symbolic (affine or constant) so that their
// weighted norms come out in closed form; they are materialized on a support
// only for cross-backend comparisons.
// ---------------------------------------------------------------------------

struct MatrixField {
  Eigen::MatrixXd support;             // N x d evaluation points
  std::vector<Eigen::MatrixXd> values;  // one p x q matrix per point
};

/// x -> linear * x + offset, as a (column-vector valued) field.
struct AffineField {
  Eigen::MatrixXd linear;
  Eigen::VectorXd offset;
};

struct ConstantField {
  Eigen::MatrixXd value;
};

MatrixField field_difference(const MatrixField& a, const MatrixField& b);
AffineField field_difference(const AffineField& a, const AffineField& b);
ConstantField field_difference(const ConstantField& a, const ConstantField& b);

/// Conditional mean x -> m_K(x) of a kernel (d x 1 values on the grid;
/// symbolically affine for Gaussian kernels).
MatrixField cond_mean(const GridKernel& k);
AffineField cond_mean(const GaussianKernel& k);

/// Conditional covariance x -> sigma_K(x) (d x d PSD values; constant tau
/// for Gaussian kernels).
MatrixField cond_cov(const GridKernel& k);
ConstantField cond_cov(const GaussianKernel& k);

/// Cross-covariance matrix Cov(X, Y) of a joint.
Eigen::MatrixXd cross_cov(const DiscreteJoint& p);
Eigen::MatrixXd cross_cov(const GaussianJoint& p);

/// Weighted field norm |||v|||_{p,mu}; p must be >= 1.  The Gaussian affine
/// overload supports p = 2 only (that is the exactly integrable case).
double field_norm(const MatrixField& f, double p, const GridMeasure& mu);
double field_norm(const AffineField& f, double p, const GaussianMeasure& mu);
double field_norm(const ConstantField& f, double p, const GaussianMeasure& mu);

/// c_{mu,K} := sqrt( integral of Tr(sigma_K(x)) mu(dx) ).
double trace_constant(const GridMeasure& mu, const GridKernel& k);
double trace_constant(const GaussianMeasure& mu, const GaussianKernel& k);

MatrixField materialize(const AffineField& f, const Eigen::MatrixXd& support);
MatrixField materialize(const ConstantField& f, const Eigen::MatrixXd& support);

/// Mean and covariance of a measure.
Eigen::VectorXd measure_mean(const GridMeasure& mu);
Eigen::MatrixXd measure_cov(const GridMeasure& mu);
inline Eigen::VectorXd measure_mean(const GaussianMeasure& mu) { return mu.mean; }
inline Eigen::MatrixXd measure_cov(const GaussianMeasure& mu) { return mu.cov; }

}  // namespace bridgebound
