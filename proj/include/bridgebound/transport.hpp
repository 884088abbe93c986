#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bridgebound/measures.hpp"

namespace bridgebound {

// ---------------------------------------------------------------------------
// Quadratic-cost optimal transport.  Three independent solvers:
//   * 1-d quantile (monotone) coupling,
//   * exact LP via successive shortest paths (caps at 64 atoms per side),
//   * closed-form Gaussian (Bures) distance.
// The first two deliberately stay independent so each can cross-check the
// other; do not route one through the other.
// ---------------------------------------------------------------------------

inline constexpr int kLpAtomCap = 64;

struct W2Result {
  double distance;
  DiscreteJoint coupling;
};

struct LpW2Result {
  double distance;
  DiscreteJoint coupling;
  // Node potentials from the solve; (pot_target_j - pot_source_i) prices arc
  // (i,j), giving an optimality certificate via complementary slackness.
  Eigen::VectorXd source_potential;
  Eigen::VectorXd target_potential;
};

struct GaussianW2Result {
  double distance;
  GaussianJoint coupling;  // optimal jointly Gaussian coupling (singular covariance)
};

/// Monotone coupling between two measures on the line.
W2Result w2_quantile_1d(const GridMeasure& nu, const GridMeasure& mu);

/// Exact transportation LP on the squared-distance cost matrix.
LpW2Result w2_lp(const GridMeasure& nu, const GridMeasure& mu);

/// Dispatch: quantile for d = 1, LP otherwise.
W2Result w2(const GridMeasure& nu, const GridMeasure& mu);

GaussianW2Result w2(const GaussianMeasure& nu, const GaussianMeasure& mu);

/// Bures distance between centered Gaussians with these covariances.
double bures_sq(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2);

struct KernelW2Avg {
  double mean_sq;  // integral of D2(L(x,.), K(x,.))^2 against mu
  std::vector<DiscreteJoint> row_couplings;
};

/// mu-average of squared row distances, with the per-row optimal couplings
/// (the glueing ingredients for marginal-vs-average comparisons).
KernelW2Avg w2_kernel_avg(const GridMeasure& mu, const GridKernel& l, const GridKernel& k);
double w2_kernel_avg(const GaussianMeasure& mu, const GaussianKernel& l,
                     const GaussianKernel& k);

}  // namespace bridgebound
