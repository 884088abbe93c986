#pragma once

#include <Eigen/Dense>

#include "bridgebound/measures.hpp"

namespace bridgebound {

// ---------------------------------------------------------------------------
// Information metrics.  Conventions: 0 log 0 = 0; relative entropy is +inf
// when absolute continuity fails.  Grid measures compare weights directly and
// therefore must live on the same support.
// ---------------------------------------------------------------------------

/// Relative entropy H(nu | mu).
double kl(const GridMeasure& nu, const GridMeasure& mu);
double kl(const GaussianMeasure& nu, const GaussianMeasure& mu);
double kl(const DiscreteJoint& nu, const DiscreteJoint& mu);
double kl(const GaussianJoint& nu, const GaussianJoint& mu);

/// Integral of H(L(x,.) | K(x,.)) against mu; equals kl(mu x L, mu x K).
double kl_disintegrated(const GridMeasure& mu, const GridKernel& l, const GridKernel& k);
double kl_disintegrated(const GaussianMeasure& mu, const GaussianKernel& l,
                        const GaussianKernel& k);

/// Relative Fisher information J(nu | mu) = nu(||grad log dnu/dmu||^2).
/// The grid overload differentiates the log weight ratio with central
/// differences (one-sided at the boundary) and requires grid geometry.
double fisher(const GridMeasure& nu, const GridMeasure& mu);
double fisher(const GaussianMeasure& nu, const GaussianMeasure& mu);

struct KernelFisherBound {
  double value;  // J(K(x,.) | K(y,.)) exactly, = ||tau^{-1} beta (x-y)||^2
  double bound;  // kappa^2 ||x-y||^2 with kappa = ||tau^{-1} beta||_2
};

/// Fisher distortion of a Gaussian kernel between two source points, together
/// with its Lipschitz majorant; value <= bound always.
KernelFisherBound fisher_kernel_lipschitz(const GaussianKernel& k,
                                          const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y);

}  // namespace bridgebound
