#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "bridgebound/grid.hpp"

namespace bridgebound {

// ---------------------------------------------------------------------------
// Supports and measures.  Two interoperable backends: finitely supported
// measures on (usually regular) grids, and exact Gaussians.  Conversions
// between backends are explicit (discretize); operations never mix them.
// ---------------------------------------------------------------------------

/// Common support shared by a grid measure and the kernels defined on it.
struct GridSupport {
  Eigen::MatrixXd points;  // N x d, pairwise distinct rows
  double cell_volume = 1.0;
  std::optional<GridGeometry> geometry;  // present when the support is a regular grid

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

struct GridMeasure {
  GridSupport support;
  Eigen::VectorXd weights;  // nonnegative, sums to 1

  int size() const { return support.size(); }
  int dim() const { return support.dim(); }
};

struct GaussianMeasure {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // SPD

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Row-stochastic Markov kernel between two fixed grid supports.
struct GridKernel {
  GridSupport source;
  GridSupport target;
  Eigen::MatrixXd rows;  // source.size() x target.size(), rows sum to 1

  GridMeasure row_measure(int i) const {
    return GridMeasure{target, rows.row(i).transpose()};
  }
};

/// Linear Gaussian transition x -> N(alpha + beta x, tau).
struct GaussianKernel {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd beta;  // invertible
  Eigen::MatrixXd tau;   // SPD

  int dim() const { return static_cast<int>(alpha.size()); }
  /// chi := tau^{-1} beta, the sensitivity matrix entering every kernel bound.
  Eigen::MatrixXd chi() const;
};

/// Joint measure on the product of two grid supports.
struct DiscreteJoint {
  GridSupport x;
  GridSupport y;
  Eigen::MatrixXd mass;  // nonnegative, total mass 1

  double total_mass() const { return mass.sum(); }
};

/// Jointly Gaussian measure on R^d x R^d, stored as one 2d-dimensional Gaussian.
struct GaussianJoint {
  Eigen::VectorXd mean;  // 2d
  Eigen::MatrixXd cov;   // 2d x 2d, SPD (PSD for optimal-transport couplings)

  int dim() const { return static_cast<int>(mean.size()) / 2; }
};

enum class Coordinate { First, Second };

// --- validating factories ---------------------------------------------------

GridSupport make_grid_support(Eigen::MatrixXd points, double cell_volume = 1.0,
                              std::optional<GridGeometry> geometry = std::nullopt);
GridMeasure make_grid_measure(GridSupport support, Eigen::VectorXd weights);
GaussianMeasure make_gaussian_measure(Eigen::VectorXd mean, Eigen::MatrixXd cov);
GridKernel make_grid_kernel(GridSupport source, GridSupport target, Eigen::MatrixXd rows);
GaussianKernel make_gaussian_kernel(Eigen::VectorXd alpha, Eigen::MatrixXd beta,
                                    Eigen::MatrixXd tau);
DiscreteJoint make_discrete_joint(GridSupport x, GridSupport y, Eigen::MatrixXd mass);
GaussianJoint make_gaussian_joint(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                                  bool allow_singular = false);

/// True when two supports carry the same points (within 1e-12) and volume.
bool support_equal(const GridSupport& a, const GridSupport& b);

// --- products, pushforwards, flips ------------------------------------------

/// mu x K, the joint measure mu(dx) K(x, dy).
DiscreteJoint product(const GridMeasure& mu, const GridKernel& k);
GaussianJoint product(const GaussianMeasure& mu, const GaussianKernel& k);

/// Pushforward mu K (second marginal of mu x K).
GridMeasure push(const GridMeasure& mu, const GridKernel& k);
GaussianMeasure push(const GaussianMeasure& mu, const GaussianKernel& k);

/// Conjugate joint P^flat(d(x,y)) := P(d(y,x)).
DiscreteJoint flip(const DiscreteJoint& p);
GaussianJoint flip(const GaussianJoint& p);

// --- disintegration ----------------------------------------------------------

struct GridDisintegration {
  GridMeasure marginal;
  GridKernel kernel;
  std::vector<int> zero_mass_rows;  // rows replaced by the uniform distribution
};

struct GaussianDisintegration {
  GaussianMeasure marginal;
  GaussianKernel kernel;
};

/// Split a joint into (marginal, transition kernel) along the given coordinate.
/// Coordinate::Second disintegrates the flipped joint, so the returned kernel
/// maps y to a measure in x.
GridDisintegration disintegrate(const DiscreteJoint& p, Coordinate coord);
GaussianDisintegration disintegrate(const GaussianJoint& p, Coordinate coord);

GridMeasure first_marginal(const DiscreteJoint& p);
GridMeasure second_marginal(const DiscreteJoint& p);
GaussianMeasure first_marginal(const GaussianJoint& p);
GaussianMeasure second_marginal(const GaussianJoint& p);

// --- discretization ----------------------------------------------------------

/// Restrict a Gaussian to a regular grid and renormalize.
GridMeasure discretize(const GaussianMeasure& g, const GridGeometry& geometry);

/// Grid measure with weights proportional to exp(-potential(x)).
GridMeasure discretize_potential(const GridGeometry& geometry,
                                 const std::function<double(const Eigen::VectorXd&)>& potential);

/// Row-wise discretization of a Gaussian kernel between two grid supports.
GridKernel discretize_kernel(const GaussianKernel& k, const GridSupport& source,
                             const GridSupport& target);

/// Default rectangle for discretizing a Gaussian: mean +- sigmas * std per axis.
GridGeometry default_geometry(const GaussianMeasure& g, int points_per_axis,
                              double sigmas = 6.0);

}  // namespace bridgebound
