#include "bridgebound/bounds.hpp"

#include <cmath>
#include <limits>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"
#include "bridgebound/metrics.hpp"
#include "bridgebound/transport.hpp"

namespace bridgebound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string tagged(const std::string& base, int n) {
  return base + "[n=" + std::to_string(n) + "]";
}

double sq(double x) { return x * x; }

// a*h + b*sqrt(h) with the infinite-entropy convention: the bound is +inf
// even when a coefficient vanishes (0 * inf would poison it with NaN).
double entropy_rhs(double a, double h, double b) {
  if (std::isinf(h)) return kInf;
  return a * h + b * std::sqrt(h);
}

}  // namespace

std::map<std::string, double> Constants::snapshot() const {
  return {{"rho_u", rho_u}, {"rho_v", rho_v}, {"kappa", kappa}, {"epsilon", epsilon}};
}

Constants make_constants(double rho_u, double rho_v, const Eigen::MatrixXd& chi) {
  if (!(rho_u > 0.0) || !(rho_v > 0.0))
    throw DomainError("constants: log-Sobolev constants must be positive");
  Constants c;
  c.rho_u = rho_u;
  c.rho_v = rho_v;
  c.chi = chi;
  c.kappa = spectral_norm(chi);
  c.epsilon = c.kappa * c.kappa * rho_u * rho_v;
  return c;
}

BoundReport make_report(std::string name, double lhs, double rhs, SlackRule slack_rule,
                        std::map<std::string, double> constants) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.constants = std::move(constants);
  r.degenerate = std::isinf(rhs);
  r.numerical_slack = r.degenerate ? 0.0 : slack_rule(rhs);
  r.pass = r.degenerate ||
           (std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + r.numerical_slack);
  return r;
}

std::optional<double> rho_from_curvature(double a, double b, double delta) {
  if (!(a > 0.0)) throw DomainError("rho_from_curvature: need positive outer curvature");
  if (b < 0.0 || delta < 0.0)
    throw DomainError("rho_from_curvature: b and delta must be nonnegative");
  if (delta == 0.0) return 1.0 / a;
  return std::nullopt;  // a constant exists but no certified value is computed here
}

double rho_gaussian_kernel(const GaussianKernel& k) { return spectral_norm(k.tau); }

double empirical_t2_certificate(const GridMeasure& mu, const GridKernel& k,
                                const GridKernel& l) {
  if (!support_equal(mu.support, k.source) || !support_equal(mu.support, l.source))
    throw DimensionError("empirical_t2_certificate: kernel sources do not match measure");
  const int nt = k.target.size();
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(nt, 1.0 / nt);
  double rho = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    if (mu.weights(i) == 0.0) continue;
    const GridMeasure row_k = k.row_measure(i);
    const Eigen::VectorXd lw = l.rows.row(i).transpose();
    const Eigen::VectorXd probes[] = {lw, uniform, 0.5 * (lw + row_k.weights)};
    for (const auto& w : probes) {
      const GridMeasure nu{l.target, w};
      const double d = w2(nu, row_k).distance;
      const double h = kl(nu, row_k);
      if (std::isfinite(h) && h > 1e-14) rho = std::max(rho, d * d / (2.0 * h));
    }
  }
  return rho;
}

namespace {

// Scalar ingredients of the three chained comparisons, shared by both backends.
struct Theorem1Data {
  double marginal_d2_sq;  // D2(mu L, mu K)^2
  double row_avg_d2_sq;   // integral of D2(L(x,.), K(x,.))^2
  double entropy;         // H(mu x L | mu x K)
  double mean_norm_sq;    // ||| m_K - m_L |||_{2,mu}^2
  double cov_norm_1;      // ||| sigma_K - sigma_L |||_{1,mu}
  double trace_const;     // c_{mu,L}
};

std::vector<BoundReport> assemble_theorem1(const Theorem1Data& t, double rho,
                                           SlackRule slack) {
  std::map<std::string, double> cs{{"rho", rho}, {"entropy", t.entropy}};
  const double ent_rhs = 2.0 * rho * t.entropy;
  std::vector<BoundReport> out;
  out.push_back(
      make_report("theorem1.marginal_vs_rows", t.marginal_d2_sq, t.row_avg_d2_sq, slack, cs));
  out.push_back(make_report("theorem1.rows_vs_entropy", t.row_avg_d2_sq, ent_rhs, slack, cs));
  out.push_back(make_report("theorem1.mean", t.mean_norm_sq, ent_rhs, slack, cs));
  out.push_back(make_report("theorem1.cov", t.cov_norm_1,
                            entropy_rhs(4.0 * rho, t.entropy,
                                        t.trace_const * std::sqrt(8.0 * rho)),
                            slack, cs));
  return out;
}

}  // namespace

std::vector<BoundReport> verify_theorem1(const GaussianMeasure& mu, const GaussianKernel& k,
                                         const GaussianKernel& l, double rho) {
  Theorem1Data t{};
  t.marginal_d2_sq = sq(w2(push(mu, l), push(mu, k)).distance);
  t.row_avg_d2_sq = w2_kernel_avg(mu, l, k);
  t.entropy = kl(product(mu, l), product(mu, k));
  t.mean_norm_sq = sq(field_norm(field_difference(cond_mean(k), cond_mean(l)), 2.0, mu));
  t.cov_norm_1 = field_norm(field_difference(cond_cov(k), cond_cov(l)), 1.0, mu);
  t.trace_const = trace_constant(mu, l);
  return assemble_theorem1(t, rho, gaussian_numerical_slack);
}

std::vector<BoundReport> verify_theorem1(const GridMeasure& mu, const GridKernel& k,
                                         const GridKernel& l, double rho) {
  Theorem1Data t{};
  t.marginal_d2_sq = sq(w2(push(mu, l), push(mu, k)).distance);
  t.row_avg_d2_sq = w2_kernel_avg(mu, l, k).mean_sq;
  t.entropy = kl(product(mu, l), product(mu, k));
  t.mean_norm_sq = sq(field_norm(field_difference(cond_mean(k), cond_mean(l)), 2.0, mu));
  t.cov_norm_1 = field_norm(field_difference(cond_cov(k), cond_cov(l)), 1.0, mu);
  t.trace_const = trace_constant(mu, l);
  return assemble_theorem1(t, rho, discrete_numerical_slack);
}

namespace {

std::vector<BoundReport> assemble_lemma(double mean_dist, double cov_dist, double d2,
                                        double trace_y, SlackRule slack) {
  std::vector<BoundReport> out;
  out.push_back(make_report("lemma.mean", mean_dist, d2, slack));
  out.push_back(make_report("lemma.cov", cov_dist,
                            2.0 * d2 * d2 + 2.0 * d2 * std::sqrt(std::max(0.0, trace_y)),
                            slack));
  return out;
}

}  // namespace

std::vector<BoundReport> verify_lemma(const GridMeasure& nu_x, const GridMeasure& nu_y) {
  // Exact LP whenever the instance fits; the quantile solver is only a 1-d
  // fallback for large supports.
  const bool lp_fits = nu_x.size() <= kLpAtomCap && nu_y.size() <= kLpAtomCap;
  const double d2 = lp_fits ? w2_lp(nu_x, nu_y).distance : w2(nu_x, nu_y).distance;
  const Eigen::MatrixXd cx = measure_cov(nu_x), cy = measure_cov(nu_y);
  return assemble_lemma((measure_mean(nu_x) - measure_mean(nu_y)).norm(),
                        (cx - cy).norm(), d2, cy.trace(), discrete_numerical_slack);
}

std::vector<BoundReport> verify_lemma(const GaussianMeasure& nu_x,
                                      const GaussianMeasure& nu_y) {
  const double d2 = w2(nu_x, nu_y).distance;
  return assemble_lemma((nu_x.mean - nu_y.mean).norm(), (nu_x.cov - nu_y.cov).norm(), d2,
                        nu_y.cov.trace(), gaussian_numerical_slack);
}

namespace {

// Conditional-moment comparison of one iterate against the bridge, reduced to
// scalars so both backends share the report assembly.
struct IterateMoments {
  double entropy;       // H(P* | P_n)
  double mean_norm_sq;  // ||| m_n - m_bridge |||_{2, pinned}^2
  double cov_norm_1;    // ||| sigma_n - sigma_bridge |||_{1, pinned}
  double trace_const;   // c of the bridge kernel under the pinned marginal
};

std::vector<BoundReport> assemble_corollary(const IterateMoments& im, int n, double rho,
                                            const Constants& c, SlackRule slack) {
  const char* side = n % 2 == 0 ? "even" : "odd";
  auto cs = c.snapshot();
  cs["entropy"] = im.entropy;
  std::vector<BoundReport> out;
  out.push_back(make_report(tagged(std::string("corollary.") + side + ".mean", n),
                            im.mean_norm_sq, 2.0 * rho * im.entropy, slack, cs));
  out.push_back(make_report(tagged(std::string("corollary.") + side + ".cov", n),
                            im.cov_norm_1,
                            entropy_rhs(4.0 * rho, im.entropy,
                                        im.trace_const * std::sqrt(8.0 * rho)),
                            slack, cs));
  return out;
}

IterateMoments gaussian_iterate_moments(const GaussianModel& m, const GaussianBridge& bridge,
                                        const GaussianSinkhornState& s) {
  IterateMoments im{};
  im.entropy = kl(bridge.p_star, s.joint);
  const Parity p = s.parity();
  const GaussianKernel kn = transition_of(s.joint, p);
  const GaussianKernel lb = transition_of(bridge.p_star, p);
  const GaussianMeasure& pinned = p == Parity::Even ? m.mu : m.eta;
  im.mean_norm_sq =
      sq(field_norm(field_difference(cond_mean(kn), cond_mean(lb)), 2.0, pinned));
  im.cov_norm_1 = field_norm(field_difference(cond_cov(kn), cond_cov(lb)), 1.0, pinned);
  im.trace_const = trace_constant(pinned, lb);
  return im;
}

IterateMoments grid_iterate_moments(const GridModel& m, const GridBridge& bridge,
                                    const GridSinkhornState& s) {
  IterateMoments im{};
  const DiscreteJoint pn = state_joint(m, s);
  im.entropy = kl(bridge.p_star, pn);
  const Parity p = s.parity();
  const GridKernel kn = transition_of(pn, p);
  const GridKernel lb = transition_of(bridge.p_star, p);
  const GridMeasure& pinned = p == Parity::Even ? m.mu : m.eta;
  im.mean_norm_sq =
      sq(field_norm(field_difference(cond_mean(kn), cond_mean(lb)), 2.0, pinned));
  im.cov_norm_1 = field_norm(field_difference(cond_cov(kn), cond_cov(lb)), 1.0, pinned);
  im.trace_const = trace_constant(pinned, lb);
  return im;
}

}  // namespace

std::vector<BoundReport> verify_corollaries(const GaussianModel& m,
                                            const GaussianBridge& bridge,
                                            const std::vector<GaussianSinkhornState>& states,
                                            const Constants& c) {
  std::vector<BoundReport> out;
  for (const auto& s : states) {
    if (s.n < 1) continue;
    const double rho = s.parity() == Parity::Even ? c.rho_v : c.rho_u;
    auto reports = assemble_corollary(gaussian_iterate_moments(m, bridge, s), s.n, rho, c,
                                      gaussian_numerical_slack);
    out.insert(out.end(), reports.begin(), reports.end());
  }
  return out;
}

std::vector<BoundReport> verify_corollaries(const GridModel& m, const GridBridge& bridge,
                                            const std::vector<GridSinkhornState>& states,
                                            const Constants& c) {
  std::vector<BoundReport> out;
  for (const auto& s : states) {
    if (s.n < 1) continue;
    const double rho = s.parity() == Parity::Even ? c.rho_v : c.rho_u;
    auto reports = assemble_corollary(grid_iterate_moments(m, bridge, s), s.n, rho, c,
                                      discrete_numerical_slack);
    out.insert(out.end(), reports.begin(), reports.end());
  }
  return out;
}

namespace {

std::pair<DecayCurve, std::vector<BoundReport>> assemble_decay(
    const std::vector<double>& h, const Constants& c, SlackRule slack) {
  DecayCurve curve;
  const double h0 = h.empty() ? 0.0 : h[0];
  const double rate = 1.0 + 1.0 / c.epsilon;
  double worst_envelope = -kInf;
  double worst_monotone = -kInf;
  for (int n = 0; n < static_cast<int>(h.size()); ++n) {
    const double bound = h0 * std::pow(rate, -(n / 2));
    curve.entries.push_back(DecayCurve::Entry{n, h[n], bound});
    worst_envelope = std::max(worst_envelope, h[n] - bound);
    if (n > 0) worst_monotone = std::max(worst_monotone, h[n] - h[n - 1]);
  }
  auto cs = c.snapshot();
  cs["h0"] = h0;
  std::vector<BoundReport> reports;
  reports.push_back(make_report("decay.envelope", worst_envelope, 0.0, slack, cs));
  reports.push_back(make_report("decay.monotone", worst_monotone, 0.0, slack, cs));
  if (!std::isfinite(h0)) {
    reports[0].degenerate = reports[1].degenerate = true;
    reports[0].pass = reports[1].pass = true;
  }
  return {std::move(curve), std::move(reports)};
}

}  // namespace

std::pair<DecayCurve, std::vector<BoundReport>> verify_decay(
    const GaussianModel& m, const GaussianBridge& bridge,
    const std::vector<GaussianSinkhornState>& states, const Constants& c) {
  (void)m;
  std::vector<double> h;
  h.reserve(states.size());
  for (const auto& s : states) h.push_back(kl(bridge.p_star, s.joint));
  return assemble_decay(h, c, gaussian_numerical_slack);
}

std::pair<DecayCurve, std::vector<BoundReport>> verify_decay(
    const GridModel& m, const GridBridge& bridge,
    const std::vector<GridSinkhornState>& states, const Constants& c) {
  std::vector<double> h;
  h.reserve(states.size());
  for (const auto& s : states) h.push_back(kl(bridge.p_star, state_joint(m, s)));
  return assemble_decay(h, c, discrete_numerical_slack);
}

std::vector<BoundReport> verify_pi_bounds(const GaussianMeasure& mu,
                                          const GaussianMeasure& pi,
                                          const GaussianKernel& k, double rho,
                                          double kappa, double solve_tol) {
  const GaussianMeasure eta = push(pi, k);
  const GaussianModel model = make_gaussian_model(mu, eta, k);
  const GaussianBridge bridge = solve_bridge(model, solve_tol);
  const GaussianKernel l = transition_of(bridge.p_star, Parity::Even);

  const double entropy = kl(bridge.p_star, product(mu, k));
  const double d2 = w2(pi, mu).distance;
  const double krd = kappa * rho * d2;
  std::map<std::string, double> cs{
      {"rho", rho}, {"kappa", kappa}, {"d2", d2}, {"entropy", entropy}};

  std::vector<BoundReport> out;
  out.push_back(make_report("pi.entropy_vs_w2", 2.0 * entropy, kappa * kappa * rho * d2 * d2,
                            gaussian_numerical_slack, cs));
  const double mean_norm =
      field_norm(field_difference(cond_mean(k), cond_mean(l)), 2.0, mu);
  out.push_back(make_report("pi.mean", mean_norm, krd, gaussian_numerical_slack, cs));
  const double cov_norm =
      field_norm(field_difference(cond_cov(k), cond_cov(l)), 1.0, mu);
  out.push_back(make_report("pi.cov", 0.5 * cov_norm,
                            krd * krd + trace_constant(mu, l) * krd,
                            gaussian_numerical_slack, cs));
  return out;
}

std::vector<BoundReport> verify_pi_bounds(const GridMeasure& mu,
                                          const GridMeasure& pi,
                                          const GridKernel& k, double rho,
                                          double kappa, double solve_tol) {
  const GridMeasure eta = push(pi, k);
  const GridModel model = make_grid_model(mu, eta, k);
  const GridBridge bridge = solve_bridge(model, solve_tol);
  const GridKernel l = transition_of(bridge.p_star, Parity::Even);

  const double entropy = kl(bridge.p_star, product(mu, k));
  const double d2 = pi.support.size() <= kLpAtomCap ? w2_lp(pi, mu).distance
                                                    : w2(pi, mu).distance;
  const double krd = kappa * rho * d2;
  std::map<std::string, double> cs{
      {"rho", rho}, {"kappa", kappa}, {"d2", d2}, {"entropy", entropy}};

  std::vector<BoundReport> out;
  out.push_back(make_report("pi.entropy_vs_w2", 2.0 * entropy,
                            kappa * kappa * rho * d2 * d2,
                            discrete_numerical_slack, cs));
  const double mean_norm =
      field_norm(field_difference(cond_mean(k), cond_mean(l)), 2.0, mu);
  out.push_back(
      make_report("pi.mean", mean_norm, krd, discrete_numerical_slack, cs));
  const double cov_norm =
      field_norm(field_difference(cond_cov(k), cond_cov(l)), 1.0, mu);
  out.push_back(make_report("pi.cov", 0.5 * cov_norm,
                            krd * krd + trace_constant(mu, l) * krd,
                            discrete_numerical_slack, cs));
  return out;
}

namespace {

// Scalars for the potential-identity reports at one iterate.
struct PotentialData {
  double grad_identity_residual;  // |||(grad U_n - grad U*) - chi'(m_n - m*)|||_{2}
  double hess_identity_residual;  // same for Hessians in |||.|||_1
  double grad_norm_sq;            // |||grad U_n - grad U*|||_2^2
  double hess_norm_1;             // |||hess U_n - hess U*|||_1
  double mean_norm_sq;
  double cov_norm_1;
  double trace_const;
  double h0;  // H(P* | P_0), for the even-side decay reports
};

std::vector<BoundReport> assemble_potentials(const PotentialData& pd, int n,
                                             const Constants& c, double identity_tol,
                                             SlackRule slack) {
  const bool even = n % 2 == 0;
  const char* side = even ? "even" : "odd";
  const double chi_sq = c.kappa * c.kappa;
  auto cs = c.snapshot();
  cs["identity_tol"] = identity_tol;

  // For scalar chi the sensitivity bounds are equalities, so stencil and
  // truncation error can land on either side; price them at the same
  // tolerance the identity residuals are held to.
  auto widened = [&](BoundReport r) {
    const double extra = identity_tol * std::max(1.0, std::abs(r.rhs));
    if (!r.degenerate && extra > r.numerical_slack) {
      r.numerical_slack = extra;
      r.pass = std::isfinite(r.lhs) && std::isfinite(r.rhs) &&
               r.lhs <= r.rhs + r.numerical_slack;
    }
    return r;
  };

  std::vector<BoundReport> out;
  out.push_back(make_report(tagged(std::string("potential.") + side + ".grad_identity", n),
                            pd.grad_identity_residual, identity_tol, slack, cs));
  out.push_back(make_report(tagged(std::string("potential.") + side + ".hess_identity", n),
                            pd.hess_identity_residual, identity_tol, slack, cs));
  out.push_back(widened(make_report(tagged(std::string("potential.") + side + ".grad_bound", n),
                                    pd.grad_norm_sq, chi_sq * pd.mean_norm_sq, slack, cs)));
  out.push_back(widened(make_report(tagged(std::string("potential.") + side + ".hess_bound", n),
                                    pd.hess_norm_1, chi_sq * pd.cov_norm_1, slack, cs)));

  if (even && n >= 2 && std::isfinite(pd.h0)) {
    const int t = n / 2;
    const double dec = std::pow(1.0 + 1.0 / c.epsilon, -t);
    const double dec_half = std::pow(1.0 + 1.0 / c.epsilon, -0.5 * t);
    const double mean_rhs = 2.0 * c.rho_v * dec * pd.h0;
    const double cov_rhs = 4.0 * c.rho_v * dec * pd.h0 +
                           2.0 * pd.trace_const * std::sqrt(2.0 * c.rho_v) * dec_half *
                               std::sqrt(pd.h0);
    out.push_back(widened(make_report(tagged("potential.even.mean_decay", n),
                                      pd.mean_norm_sq, mean_rhs, slack, cs)));
    out.push_back(widened(make_report(tagged("potential.even.cov_decay", n), pd.cov_norm_1,
                                      cov_rhs, slack, cs)));
    out.push_back(widened(make_report(tagged("potential.even.grad_decay", n),
                                      pd.grad_norm_sq, chi_sq * mean_rhs, slack, cs)));
    out.push_back(widened(make_report(tagged("potential.even.hess_decay", n),
                                      pd.hess_norm_1, chi_sq * cov_rhs, slack, cs)));
  }
  return out;
}

}  // namespace

std::vector<BoundReport> verify_potential_identities(const GaussianModel& m,
                                                     const GaussianBridge& bridge,
                                                     const GaussianSinkhornState& state,
                                                     const Constants& c,
                                                     double identity_tol) {
  const Parity p = state.parity();
  const bool even = p == Parity::Even;
  const GaussianMeasure& pinned = even ? m.mu : m.eta;
  const Eigen::MatrixXd chi = m.k0.chi();
  // Even side uses chi', odd side chi, matching the direction of the kernels.
  const Eigen::MatrixXd sens = even ? Eigen::MatrixXd(chi.transpose()) : chi;

  const GaussianKernel kn = transition_of(state.joint, p);
  const GaussianKernel lb = transition_of(bridge.p_star, p);
  const Quadratic& un = even ? state.u : state.v;
  const Quadratic& ustar = even ? bridge.u_star : bridge.v_star;

  const AffineField grad_diff = field_difference(grad_potential(un), grad_potential(ustar));
  const AffineField mean_diff = field_difference(cond_mean(kn), cond_mean(lb));
  const AffineField grad_residual{grad_diff.linear - sens * mean_diff.linear,
                                  grad_diff.offset - sens * mean_diff.offset};

  const Eigen::MatrixXd hess_diff = un.a - ustar.a;
  const Eigen::MatrixXd cov_diff = kn.tau - lb.tau;
  const Eigen::MatrixXd hess_residual = hess_diff - sens * cov_diff * sens.transpose();

  PotentialData pd{};
  pd.grad_identity_residual = field_norm(grad_residual, 2.0, pinned);
  pd.hess_identity_residual = hess_residual.norm();
  pd.grad_norm_sq = sq(field_norm(grad_diff, 2.0, pinned));
  pd.hess_norm_1 = hess_diff.norm();
  pd.mean_norm_sq = sq(field_norm(mean_diff, 2.0, pinned));
  pd.cov_norm_1 = cov_diff.norm();
  pd.trace_const = trace_constant(m.mu, transition_of(bridge.p_star, Parity::Even));
  pd.h0 = kl(bridge.p_star, product(m.mu, m.k0));
  return assemble_potentials(pd, state.n, c, identity_tol, gaussian_numerical_slack);
}

std::vector<BoundReport> verify_potential_identities(const GridModel& m,
                                                     const GridBridge& bridge,
                                                     const GridSinkhornState& state,
                                                     const Constants& c,
                                                     double identity_tol) {
  const Parity p = state.parity();
  const bool even = p == Parity::Even;
  const GridMeasure& pinned = even ? m.mu : m.eta;
  if (!pinned.support.geometry)
    throw DomainError("potential identities: pinned marginal needs grid geometry");
  const GridGeometry& geom = *pinned.support.geometry;
  const Eigen::MatrixXd chi = c.chi;
  const Eigen::MatrixXd sens = even ? Eigen::MatrixXd(chi.transpose()) : chi;

  const DiscreteJoint pn = state_joint(m, state);
  const GridKernel kn = transition_of(pn, p);
  const GridKernel lb = transition_of(bridge.p_star, p);
  const Eigen::VectorXd& un = even ? state.u : state.v;
  const Eigen::VectorXd& ustar = even ? bridge.u_star : bridge.v_star;

  const MatrixField grad_diff =
      field_difference(grad_potential(un, geom), grad_potential(ustar, geom));
  const MatrixField mean_diff = field_difference(cond_mean(kn), cond_mean(lb));
  const MatrixField hess_diff =
      field_difference(hess_potential(un, geom), hess_potential(ustar, geom));
  const MatrixField cov_diff = field_difference(cond_cov(kn), cond_cov(lb));

  MatrixField grad_residual{grad_diff.support, {}};
  MatrixField hess_residual{hess_diff.support, {}};
  for (int i = 0; i < pinned.size(); ++i) {
    grad_residual.values.push_back(grad_diff.values[i] - sens * mean_diff.values[i]);
    hess_residual.values.push_back(hess_diff.values[i] -
                                   sens * cov_diff.values[i] * sens.transpose());
  }

  PotentialData pd{};
  pd.grad_identity_residual = field_norm(grad_residual, 2.0, pinned);
  pd.hess_identity_residual = field_norm(hess_residual, 1.0, pinned);
  pd.grad_norm_sq = sq(field_norm(grad_diff, 2.0, pinned));
  pd.hess_norm_1 = field_norm(hess_diff, 1.0, pinned);
  pd.mean_norm_sq = sq(field_norm(mean_diff, 2.0, pinned));
  pd.cov_norm_1 = field_norm(cov_diff, 1.0, pinned);
  pd.trace_const = trace_constant(m.mu, transition_of(bridge.p_star, Parity::Even));
  pd.h0 = kl(bridge.p_star, state_joint(m, sinkhorn_start(m)));
  return assemble_potentials(pd, state.n, c, identity_tol, discrete_numerical_slack);
}

bool all_pass(const std::vector<BoundReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace bridgebound
