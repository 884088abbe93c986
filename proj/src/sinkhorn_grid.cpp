#include <cmath>
#include <limits>

#include "bridgebound/errors.hpp"
#include "bridgebound/sinkhorn.hpp"

namespace bridgebound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a stray +inf, which propagates)
  return m + std::log((v.array() - m).exp().sum());
}

// One potential-recursion step to odd index: V <- V_base + log K_Wflat(exp(-U)).
void potential_step_odd(const GridModel& m, const Eigen::VectorXd& u, Eigen::VectorXd& v) {
  const double log_vol_ratio =
      std::log(m.mu.support.cell_volume) - std::log(m.eta.support.cell_volume);
  for (int j = 0; j < m.eta.size(); ++j) {
    v(j) = m.v_base(j) + logsumexp(m.log_k0.col(j) - u) + log_vol_ratio;
  }
}

// One potential-recursion step to even index: U <- U_base + log K_W(exp(-V)),
// then re-center the gauge so that mu(U - U_base) = 0.
void potential_step_even(const GridModel& m, Eigen::VectorXd& u, Eigen::VectorXd& v) {
  for (int i = 0; i < m.mu.size(); ++i) {
    u(i) = m.u_base(i) + logsumexp(m.log_k0.row(i).transpose() - v);
  }
  const double gauge = m.mu.weights.dot(u - m.u_base);
  u.array() -= gauge;
  v.array() += gauge;
}

GridMeasure free_marginal(const GridModel& m, const Eigen::MatrixXd& log_mass, int n) {
  const Eigen::MatrixXd mass = log_mass.array().exp();
  if (n % 2 == 0) return GridMeasure{m.eta.support, mass.colwise().sum().transpose()};
  return GridMeasure{m.mu.support, mass.rowwise().sum()};
}

}  // namespace

GridModel make_grid_model(GridMeasure mu, GridMeasure eta, GridKernel k0) {
  if (!support_equal(mu.support, k0.source))
    throw DimensionError("grid model: kernel source does not match mu");
  if (!support_equal(eta.support, k0.target))
    throw DimensionError("grid model: kernel target does not match eta");
  if (mu.weights.minCoeff() <= 0.0 || eta.weights.minCoeff() <= 0.0)
    throw SupportError("grid model: marginal weights must be strictly positive");
  if (k0.rows.minCoeff() <= 0.0)
    throw SupportError("grid model: reference kernel must have positive rows");
  GridModel m{std::move(mu), std::move(eta), std::move(k0), {}, {}, {}};
  m.log_k0 = m.k0.rows.array().log();
  m.u_base = -m.mu.weights.array().log() + std::log(m.mu.support.cell_volume);
  m.v_base = -m.eta.weights.array().log() + std::log(m.eta.support.cell_volume);
  return m;
}

GridSinkhornState sinkhorn_start(const GridModel& m) {
  GridSinkhornState s;
  s.n = 0;
  s.log_mass = m.mu.weights.array().log().matrix().replicate(1, m.eta.size()) + m.log_k0;
  s.u = m.u_base;
  s.v = Eigen::VectorXd::Zero(m.eta.size());
  s.pi = free_marginal(m, s.log_mass, 0);
  return s;
}

GridSinkhornState sinkhorn_step(const GridModel& m, const GridSinkhornState& s) {
  GridSinkhornState next;
  next.n = s.n + 1;
  next.log_mass = s.log_mass;
  next.u = s.u;
  next.v = s.v;

  if (next.n % 2 == 1) {
    // Pin the second marginal to eta: scale columns.
    for (int j = 0; j < m.eta.size(); ++j) {
      const double lse = logsumexp(next.log_mass.col(j));
      if (!std::isfinite(lse) && m.eta.weights(j) > 0.0)
        throw SupportError("sinkhorn: zero-mass column under a positive target marginal");
      const double shift = std::log(m.eta.weights(j)) - lse;
      next.log_mass.col(j).array() += shift;
    }
    potential_step_odd(m, next.u, next.v);
  } else {
    // Pin the first marginal to mu: scale rows.
    for (int i = 0; i < m.mu.size(); ++i) {
      const double lse = logsumexp(next.log_mass.row(i).transpose());
      if (!std::isfinite(lse) && m.mu.weights(i) > 0.0)
        throw SupportError("sinkhorn: zero-mass row under a positive target marginal");
      const double shift = std::log(m.mu.weights(i)) - lse;
      next.log_mass.row(i).array() += shift;
    }
    potential_step_even(m, next.u, next.v);
  }
  next.pi = free_marginal(m, next.log_mass, next.n);
  return next;
}

DiscreteJoint state_joint(const GridModel& m, const GridSinkhornState& s) {
  return DiscreteJoint{m.mu.support, m.eta.support, s.log_mass.array().exp()};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> potentials_update(const GridModel& m, int n) {
  Eigen::VectorXd u = m.u_base;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m.eta.size());
  for (int k = 1; k <= n; ++k) {
    if (k % 2 == 1)
      potential_step_odd(m, u, v);
    else
      potential_step_even(m, u, v);
  }
  return {std::move(u), std::move(v)};
}

Eigen::MatrixXd product_form_log_mass(const GridModel& m, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v) {
  // mass_ij = exp(-u_i - W_ij - v_j) * vol_x * vol_y with
  // W_ij = -log k0_ij + log vol_y, so the y volume cancels.
  Eigen::MatrixXd lm = m.log_k0;
  const double log_volx = std::log(m.mu.support.cell_volume);
  lm.colwise() -= (u.array() - log_volx).matrix();
  lm.rowwise() -= v.transpose();
  return lm;
}

double marginal_residual(const GridModel& m, const Eigen::MatrixXd& log_mass) {
  const Eigen::MatrixXd mass = log_mass.array().exp();
  const double tv_mu = 0.5 * (mass.rowwise().sum() - m.mu.weights).cwiseAbs().sum();
  const double tv_eta =
      0.5 * (mass.colwise().sum().transpose() - m.eta.weights).cwiseAbs().sum();
  return std::max(tv_mu, tv_eta);
}

GridBridge solve_bridge(const GridModel& m, double tol, int max_iter) {
  GridSinkhornState s = sinkhorn_start(m);
  double res = marginal_residual(m, s.log_mass);
  while (res >= tol) {
    if (s.n >= max_iter)
      throw ConvergenceError("solve_bridge: iteration budget exhausted", res);
    s = sinkhorn_step(m, s);
    res = marginal_residual(m, s.log_mass);
  }
  return GridBridge{state_joint(m, s), s.u, s.v, s.n, res};
}

GridKernel transition_of(const DiscreteJoint& p, Parity parity) {
  if (parity == Parity::Odd) return disintegrate(p, Coordinate::Second).kernel;
  return disintegrate(p, Coordinate::First).kernel;
}

MatrixField grad_potential(const Eigen::VectorXd& values, const GridGeometry& g) {
  if (values.size() != g.size())
    throw DimensionError("grad_potential: field length does not match grid");
  const int n = g.size(), d = g.dim();

  auto axis_derivative = [&](int flat, int axis, int stride, int coord, int extent) {
    const double h = g.spacing(axis);
    if (coord > 0 && coord < extent - 1)
      return (values(flat + stride) - values(flat - stride)) / (2.0 * h);
    if (coord == 0) return (values(flat + stride) - values(flat)) / h;
    return (values(flat) - values(flat - stride)) / h;
  };

  MatrixField f{g.points(), {}};
  f.values.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd grad(d);
    if (d == 1) {
      grad(0) = axis_derivative(i, 0, 1, i, g.shape[0]);
    } else {
      const int n1 = g.shape[1];
      grad(0) = axis_derivative(i, 0, n1, i / n1, g.shape[0]);
      grad(1) = axis_derivative(i, 1, 1, i % n1, n1);
    }
    f.values.push_back(grad);
  }
  return f;
}

MatrixField hess_potential(const Eigen::VectorXd& values, const GridGeometry& g) {
  MatrixField grad = grad_potential(values, g);
  const int n = g.size(), d = g.dim();
  std::vector<MatrixField> cols;
  cols.reserve(d);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd comp(n);
    for (int i = 0; i < n; ++i) comp(i) = grad.values[i](k);
    cols.push_back(grad_potential(comp, g));
  }
  MatrixField f{grad.support, {}};
  f.values.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd h(d, d);
    for (int k = 0; k < d; ++k) h.col(k) = cols[k].values[i];
    f.values.push_back(0.5 * (h + h.transpose()));
  }
  return f;
}

std::vector<GridSinkhornState> run_sinkhorn(const GridModel& m, int n_steps) {
  std::vector<GridSinkhornState> states;
  states.reserve(n_steps + 1);
  states.push_back(sinkhorn_start(m));
  for (int k = 0; k < n_steps; ++k) states.push_back(sinkhorn_step(m, states.back()));
  return states;
}

}  // namespace bridgebound
