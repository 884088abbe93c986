#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bridgebound/sinkhorn.hpp"

namespace bridgebound {

// ---------------------------------------------------------------------------
// Instance-by-instance verification of the quantitative bounds: each verifier
// evaluates the two sides of an inequality on concrete data and reports the
// slack.  Nothing here is a statistical test; a failed report means either a
// bug or a violated hypothesis, and is meant to be investigated, not rerun.
// ---------------------------------------------------------------------------

/// Certified constants of a model: log-Sobolev constants of the two marginal
/// potentials, the kernel sensitivity kappa = ||chi||_2 with chi = tau^{-1}
/// beta, and the contraction parameter epsilon = kappa^2 rho_u rho_v.
struct Constants {
  double rho_u = 0.0;
  double rho_v = 0.0;
  double kappa = 0.0;
  Eigen::MatrixXd chi;
  double epsilon = 0.0;

  std::map<std::string, double> snapshot() const;
};

Constants make_constants(double rho_u, double rho_v, const Eigen::MatrixXd& chi);

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  std::map<std::string, double> constants;
  bool pass = false;
  double numerical_slack = 0.0;
  bool degenerate = false;  // infinite entropy: bound holds vacuously
};

/// Default verification slacks: floating-point headroom only, never a tuning
/// knob.  Discrete quantities run through quadratures and LP solves, Gaussian
/// ones are closed-form; hence the two regimes.
inline double discrete_numerical_slack(double rhs) {
  return 1e-9 * std::max(1.0, std::abs(rhs));
}
inline double gaussian_numerical_slack(double) { return 1e-10; }

using SlackRule = double (*)(double);

BoundReport make_report(std::string name, double lhs, double rhs, SlackRule slack_rule,
                        std::map<std::string, double> constants = {});

/// Log-Sobolev constant from the curvature criterion: curvature >= a outside
/// a ball of radius delta, >= -b inside.  Certified value 1/a when delta = 0;
/// std::nullopt (constant exists but is not computed here) otherwise.
std::optional<double> rho_from_curvature(double a, double b, double delta);

/// Log-Sobolev constant of the rows of a Gaussian kernel: spectral norm of tau.
double rho_gaussian_kernel(const GaussianKernel& k);

/// Empirical transport-entropy ratio sup D2(nu, K(x,.))^2 / (2 H(nu|K(x,.)))
/// over the rows and a family of probe measures; an instance-specific
/// certificate for discrete kernels with no curvature argument available.
double empirical_t2_certificate(const GridMeasure& mu, const GridKernel& k,
                                const GridKernel& l);

/// The three chained comparisons for a measure and two kernels:
///   D2(mu L, mu K)^2 <= avg_x D2(L(x,.), K(x,.))^2 <= 2 rho H(mu x L | mu x K),
/// then the conditional-mean and conditional-covariance consequences.
std::vector<BoundReport> verify_theorem1(const GaussianMeasure& mu, const GaussianKernel& k,
                                         const GaussianKernel& l, double rho);
std::vector<BoundReport> verify_theorem1(const GridMeasure& mu, const GridKernel& k,
                                         const GridKernel& l, double rho);

/// Mean and covariance comparisons for two coupled random vectors:
///   ||E X - E Y|| <= D2(nu_X, nu_Y)
///   ||Cov X - Cov Y||_F <= 2 D2^2 + 2 D2 sqrt(Tr Cov Y).
std::vector<BoundReport> verify_lemma(const GridMeasure& nu_x, const GridMeasure& nu_y);
std::vector<BoundReport> verify_lemma(const GaussianMeasure& nu_x,
                                      const GaussianMeasure& nu_y);

/// Per-iterate conditional-moment bounds against the bridge kernel: even
/// iterates are measured under mu with rho_v, odd iterates under eta with
/// rho_u (through the flipped joint).
std::vector<BoundReport> verify_corollaries(const GaussianModel& m,
                                            const GaussianBridge& bridge,
                                            const std::vector<GaussianSinkhornState>& states,
                                            const Constants& c);
std::vector<BoundReport> verify_corollaries(const GridModel& m, const GridBridge& bridge,
                                            const std::vector<GridSinkhornState>& states,
                                            const Constants& c);

struct DecayCurve {
  struct Entry {
    int n;
    double h;      // H(P* | P_n)
    double bound;  // (1 + 1/eps)^{-floor(n/2)} H(P* | P_0)
  };
  std::vector<Entry> entries;
};

/// Entropy decay along the trajectory: the geometric envelope plus a
/// monotonicity report.
std::pair<DecayCurve, std::vector<BoundReport>> verify_decay(
    const GaussianModel& m, const GaussianBridge& bridge,
    const std::vector<GaussianSinkhornState>& states, const Constants& c);
std::pair<DecayCurve, std::vector<BoundReport>> verify_decay(
    const GridModel& m, const GridBridge& bridge,
    const std::vector<GridSinkhornState>& states, const Constants& c);

/// Bounds for the bridge between mu and pi K relative to mu x K: entropy
/// controlled by D2(pi, mu), then the kernel-moment consequences.
std::vector<BoundReport> verify_pi_bounds(const GaussianMeasure& mu,
                                          const GaussianMeasure& pi,
                                          const GaussianKernel& k, double rho,
                                          double kappa, double solve_tol = 1e-12);
std::vector<BoundReport> verify_pi_bounds(const GridMeasure& mu,
                                          const GridMeasure& pi,
                                          const GridKernel& k, double rho,
                                          double kappa, double solve_tol = 1e-10);

/// Identities and decay bounds for the potential gradients/Hessians at one
/// iterate: exact pointwise identities (residual reports against tol), the
/// sensitivity-factor bounds, and for even iterates the end-to-end decays.
std::vector<BoundReport> verify_potential_identities(const GaussianModel& m,
                                                     const GaussianBridge& bridge,
                                                     const GaussianSinkhornState& state,
                                                     const Constants& c,
                                                     double identity_tol);
std::vector<BoundReport> verify_potential_identities(const GridModel& m,
                                                     const GridBridge& bridge,
                                                     const GridSinkhornState& state,
                                                     const Constants& c,
                                                     double identity_tol);

bool all_pass(const std::vector<BoundReport>& reports);

}  // namespace bridgebound
