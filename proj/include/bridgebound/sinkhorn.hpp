#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "bridgebound/measures.hpp"
#include "bridgebound/moments.hpp"

namespace bridgebound {

// ---------------------------------------------------------------------------
// Iterative proportional fitting between two marginals, relative to a product
// reference mu x K0.  Odd steps pin the second marginal to eta, even steps
// pin the first to mu.  Both backends maintain the joint *and* the potential
// pair (U_n, V_n) of the product-form density exp(-U_n(x) - W(x,y) - V_n(y));
// the two representations are updated through independent routes and their
// agreement is a correctness check, not a tautology.
//
// Potentials are defined up to a constant split between U_n and V_n; the
// gauge is fixed by centering, mu(U_n - U) = 0, applied at even steps.
// ---------------------------------------------------------------------------

enum class Parity { Even, Odd };

inline Parity parity_of(int n) { return n % 2 == 0 ? Parity::Even : Parity::Odd; }

// --- grid backend -----------------------------------------------------------

struct GridModel {
  GridMeasure mu;
  GridMeasure eta;
  GridKernel k0;
  Eigen::MatrixXd log_k0;    // log rows of the reference kernel
  Eigen::VectorXd u_base;    // U with mu = exp(-U) dlambda on the x grid
  Eigen::VectorXd v_base;    // V with eta = exp(-V) dlambda on the y grid
};

/// Validates supports and strictly positive weights, precomputes logs.
GridModel make_grid_model(GridMeasure mu, GridMeasure eta, GridKernel k0);

struct GridSinkhornState {
  int n = 0;
  Eigen::MatrixXd log_mass;
  Eigen::VectorXd u;  // potential on the x grid (includes the base part)
  Eigen::VectorXd v;  // potential on the y grid
  GridMeasure pi;     // free marginal: mu K_n at even n, eta K_n at odd n

  Parity parity() const { return parity_of(n); }
};

GridSinkhornState sinkhorn_start(const GridModel& m);
GridSinkhornState sinkhorn_step(const GridModel& m, const GridSinkhornState& s);

/// Joint measure of a state (exponentiated log mass).
DiscreteJoint state_joint(const GridModel& m, const GridSinkhornState& s);

/// Replay the potential recursion from scratch up to index n.  Used to check
/// that product-form potentials reproduce the scaled joint.
std::pair<Eigen::VectorXd, Eigen::VectorXd> potentials_update(const GridModel& m, int n);

/// Log mass of the product-form density for a potential pair.
Eigen::MatrixXd product_form_log_mass(const GridModel& m, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v);

/// Max total-variation distance of the two marginals to their targets.
double marginal_residual(const GridModel& m, const Eigen::MatrixXd& log_mass);

struct GridBridge {
  DiscreteJoint p_star;
  Eigen::VectorXd u_star;
  Eigen::VectorXd v_star;
  int iterations_used = 0;
  double residual = 0.0;
};

GridBridge solve_bridge(const GridModel& m, double tol = 1e-10, int max_iter = 10000);

/// Transition kernel of a joint: x->y for even parity, y->x (through the
/// flipped joint) for odd parity.
GridKernel transition_of(const DiscreteJoint& p, Parity parity);

/// Finite-difference gradient (d x 1 values) of a scalar grid field.
MatrixField grad_potential(const Eigen::VectorXd& values, const GridGeometry& g);
/// Finite-difference Hessian (d x d values), gradient applied twice.
MatrixField hess_potential(const Eigen::VectorXd& values, const GridGeometry& g);

// --- Gaussian backend ---------------------------------------------------------

/// Quadratic form q(x) = x'Ax/2 + b'x + c; the Gaussian-backend potential.
struct Quadratic {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double c = 0.0;

  double eval(const Eigen::VectorXd& x) const { return 0.5 * x.dot(a * x) + b.dot(x) + c; }
  static Quadratic zero(int d) {
    return Quadratic{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d), 0.0};
  }
};

Quadratic quadratic_sum(const Quadratic& p, const Quadratic& q);

/// log of integral exp(-W(x, y) - q(y)) dy as a quadratic in x, where W is the
/// Gaussian transition cost of k.  Requires tau^{-1} + q.a to be SPD.
Quadratic log_kw_exp_neg(const GaussianKernel& k, const Quadratic& q);
/// Same through the conjugate kernel: log of integral exp(-W(x, y) - q(x)) dx
/// as a quadratic in y.
Quadratic log_kw_flat_exp_neg(const GaussianKernel& k, const Quadratic& q);

struct GaussianModel {
  GaussianMeasure mu;
  GaussianMeasure eta;
  GaussianKernel k0;
  Quadratic u_base;  // -log density of mu
  Quadratic v_base;  // -log density of eta
};

GaussianModel make_gaussian_model(GaussianMeasure mu, GaussianMeasure eta,
                                  GaussianKernel k0);

struct GaussianSinkhornState {
  int n = 0;
  GaussianJoint joint;
  Quadratic u;
  Quadratic v;
  GaussianMeasure pi;

  Parity parity() const { return parity_of(n); }
};

GaussianSinkhornState sinkhorn_start(const GaussianModel& m);
GaussianSinkhornState sinkhorn_step(const GaussianModel& m, const GaussianSinkhornState& s);

std::pair<Quadratic, Quadratic> potentials_update(const GaussianModel& m, int n);

/// Gaussian joint implied by the product form exp(-u(x) - W(x,y) - v(y)).
GaussianJoint joint_from_potentials(const GaussianModel& m, const Quadratic& u,
                                    const Quadratic& v);

/// |c_total - normalizing constant|: how far the potential pair is from
/// integrating to exactly one.
double normalization_residual(const GaussianModel& m, const Quadratic& u,
                              const Quadratic& v);

/// Max deviation of the two marginals from their targets, measured on the
/// Gaussian parameters (sup norm over mean and covariance entries).
double marginal_residual(const GaussianModel& m, const GaussianJoint& joint);

struct GaussianBridge {
  GaussianJoint p_star;
  Quadratic u_star;
  Quadratic v_star;
  int iterations_used = 0;
  double residual = 0.0;
};

GaussianBridge solve_bridge(const GaussianModel& m, double tol = 1e-12,
                            int max_iter = 10000);

GaussianKernel transition_of(const GaussianJoint& p, Parity parity);

/// Gradient field A x + b of a quadratic potential.
AffineField grad_potential(const Quadratic& q);
/// Constant Hessian field of a quadratic potential.
ConstantField hess_potential(const Quadratic& q);

/// Run n_steps iterations, returning states 0..n_steps inclusive.
std::vector<GridSinkhornState> run_sinkhorn(const GridModel& m, int n_steps);
std::vector<GaussianSinkhornState> run_sinkhorn(const GaussianModel& m, int n_steps);

}  // namespace bridgebound
