#include "bridgebound/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"
#include "bridgebound/metrics.hpp"
#include "bridgebound/moments.hpp"
#include "bridgebound/parallel.hpp"
#include "bridgebound/transport.hpp"

namespace bridgebound {

namespace {

// Distinct salts decorrelate the instance streams of suites sharing a seed.
constexpr std::uint64_t kSaltLemma = 0x6c656d6d61ull;
constexpr std::uint64_t kSaltTheorem1G = 0x74686d3167ull;
constexpr std::uint64_t kSaltTheorem1D = 0x74686d3164ull;
constexpr std::uint64_t kSaltTransport = 0x7472616e73ull;
constexpr std::uint64_t kSaltPi = 0x7069ull;

std::string index_tag(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "[i=%04d]", i);
  return buf;
}

void tag_instance(std::vector<BoundReport>& reports, int i, std::uint64_t seed) {
  for (auto& r : reports) {
    r.name += index_tag(i);
    r.constants["instance"] = static_cast<double>(i);
    r.constants["seed"] = static_cast<double>(seed);
  }
}

// The certified-Gaussian and empirically-certified-discrete runs share the
// verifier and hence its report names; disambiguate before aggregation.
void reprefix(std::vector<BoundReport>& reports, const std::string& from,
              const std::string& to) {
  for (auto& r : reports)
    if (r.name.rfind(from, 0) == 0) r.name = to + r.name.substr(from.size());
}

// Runs fn over instances on the pool and flattens the reports in index order.
std::vector<BoundReport> over_instances(
    int instances, const std::function<std::vector<BoundReport>(int)>& fn) {
  std::vector<std::vector<BoundReport>> slots(instances);
  parallel_for(instances, [&](int i) { slots[i] = fn(i); });
  std::vector<BoundReport> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

Eigen::MatrixXd random_spd(Rng& rng, int d, double base) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::MatrixXd s = a * a.transpose();
  s.diagonal().array() += base + rng.uniform(0.0, 0.5);
  return symmetrize(s);
}

}  // namespace

GaussianMeasure random_gaussian_measure(Rng& rng, int d) {
  Eigen::VectorXd mean(d);
  for (int i = 0; i < d; ++i) mean(i) = rng.uniform(-2.0, 2.0);
  return make_gaussian_measure(mean, random_spd(rng, d, 0.3));
}

GaussianKernel random_gaussian_kernel(Rng& rng, int d) {
  Eigen::VectorXd alpha(d);
  for (int i = 0; i < d; ++i) alpha(i) = rng.uniform(-1.0, 1.0);
  Eigen::MatrixXd beta(d, d);
  // Rejection keeps beta comfortably invertible; a couple of draws at most.
  for (;;) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) beta(i, j) = rng.uniform(-1.5, 1.5);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(beta);
    if (svd.singularValues()(d - 1) > 0.15) break;
  }
  return make_gaussian_kernel(alpha, beta, random_spd(rng, d, 0.25));
}

GridMeasure random_atoms(Rng& rng, int d, int min_atoms, int max_atoms) {
  const int n = rng.uniform_int(min_atoms, max_atoms);
  Eigen::MatrixXd points(n, d);
  for (;;) {
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) points(i, a) = rng.uniform(-3.0, 3.0);
    // Resolvable collisions only matter at the solver's merge tolerance.
    bool distinct = true;
    for (int i = 0; i < n && distinct; ++i)
      for (int j = i + 1; j < n && distinct; ++j)
        if ((points.row(i) - points.row(j)).lpNorm<Eigen::Infinity>() < 1e-9)
          distinct = false;
    if (distinct) break;
  }
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = -std::log(1.0 - rng.uniform());
  w /= w.sum();
  return make_grid_measure(make_grid_support(points, 1.0), w);
}

DiscreteTriple random_discrete_triple(Rng& rng, int d, int max_source, int max_target) {
  GridMeasure mu = random_atoms(rng, d, 3, max_source);
  const GridMeasure targets = random_atoms(rng, d, 3, max_target);
  const int ns = mu.size(), nt = targets.size();
  auto random_rows = [&] {
    Eigen::MatrixXd rows(ns, nt);
    for (int i = 0; i < ns; ++i) {
      for (int j = 0; j < nt; ++j) rows(i, j) = std::exp(rng.uniform(-2.0, 2.0));
      rows.row(i) /= rows.row(i).sum();
    }
    return rows;
  };
  GridKernel k = make_grid_kernel(mu.support, targets.support, random_rows());
  GridKernel l = make_grid_kernel(mu.support, targets.support, random_rows());
  return DiscreteTriple{std::move(mu), std::move(k), std::move(l)};
}

std::vector<ModelConfig> gaussian_sweep() {
  std::vector<ModelConfig> out;
  for (double a_u : {0.5, 1.0, 2.0})
    for (double a_v : {0.5, 1.0, 2.0})
      for (double beta : {0.5, 1.0}) {
        ModelConfig cfg;
        cfg.backend = "gaussian";
        cfg.d = 1;
        cfg.mu = make_gaussian_measure(Eigen::VectorXd::Zero(1),
                                       Eigen::MatrixXd::Constant(1, 1, 1.0 / a_u));
        cfg.eta = make_gaussian_measure(Eigen::VectorXd::Ones(1),
                                        Eigen::MatrixXd::Constant(1, 1, 1.0 / a_v));
        cfg.kernel = make_gaussian_kernel(Eigen::VectorXd::Zero(1),
                                          Eigen::MatrixXd::Constant(1, 1, beta),
                                          Eigen::MatrixXd::Identity(1, 1));
        out.push_back(std::move(cfg));
      }
  return out;
}

ModelConfig default_model(const std::string& backend) {
  ModelConfig cfg;
  cfg.backend = backend;
  cfg.d = 1;
  cfg.mu = make_gaussian_measure(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  cfg.eta = make_gaussian_measure(Eigen::VectorXd::Constant(1, 2.0),
                                  Eigen::MatrixXd::Constant(1, 1, 0.5));
  cfg.kernel =
      make_gaussian_kernel(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Identity(1, 1));
  cfg.grid_n = 400;
  cfg.grid_sigmas = 6.0;
  return cfg;
}

std::vector<BoundReport> suite_lemma(std::uint64_t seed, int instances) {
  return over_instances(instances, [&](int i) {
    Rng rng = instance_rng(seed ^ kSaltLemma, i);
    const GridMeasure nu_x = random_atoms(rng, 1, 2, 20);
    const GridMeasure nu_y = random_atoms(rng, 1, 2, 20);
    auto reports = verify_lemma(nu_x, nu_y);
    tag_instance(reports, i, seed);
    return reports;
  });
}

std::vector<BoundReport> suite_theorem1_gaussian(std::uint64_t seed, int instances) {
  return over_instances(instances, [&](int i) {
    Rng rng = instance_rng(seed ^ kSaltTheorem1G, i);
    const int d = 1 + i % 2;
    const GaussianMeasure mu = random_gaussian_measure(rng, d);
    const GaussianKernel k = random_gaussian_kernel(rng, d);
    const GaussianKernel l = random_gaussian_kernel(rng, d);
    auto reports = verify_theorem1(mu, k, l, rho_gaussian_kernel(k));
    reprefix(reports, "theorem1.", "theorem1.gaussian.");
    tag_instance(reports, i, seed);
    return reports;
  });
}

std::vector<BoundReport> suite_theorem1_discrete(std::uint64_t seed, int instances) {
  return over_instances(instances, [&](int i) {
    Rng rng = instance_rng(seed ^ kSaltTheorem1D, i);
    const int d = 1 + i % 2;
    const DiscreteTriple t =
        random_discrete_triple(rng, d, d == 1 ? 12 : 10, d == 1 ? 12 : 10);
    const double rho_hat = empirical_t2_certificate(t.mu, t.k, t.l);
    auto reports = verify_theorem1(t.mu, t.k, t.l, rho_hat);
    reprefix(reports, "theorem1.", "theorem1.discrete.");
    for (auto& r : reports) r.constants["rho_hat"] = rho_hat;
    tag_instance(reports, i, seed);
    return reports;
  });
}

std::vector<BoundReport> suite_transport_inequalities(std::uint64_t seed, int instances) {
  return over_instances(instances, [&](int i) {
    Rng rng = instance_rng(seed ^ kSaltTransport, i);
    const int d = 1 + i % 2;
    const GaussianMeasure mu = random_gaussian_measure(rng, d);
    const GaussianMeasure nu = random_gaussian_measure(rng, d);
    const double rho = spectral_norm(mu.cov);
    const double d2 = w2(nu, mu).distance;
    const double h = kl(nu, mu);
    const double j = fisher(nu, mu);
    std::map<std::string, double> cs{{"rho", rho}};
    std::vector<BoundReport> reports;
    reports.push_back(
        make_report("transport.t2", 0.5 * d2 * d2, rho * h, gaussian_numerical_slack, cs));
    reports.push_back(
        make_report("transport.ls", h, 0.5 * rho * j, gaussian_numerical_slack, cs));
    tag_instance(reports, i, seed);
    return reports;
  });
}

namespace {

// Bridge + trajectory for one model on the right backend, handed to a
// consumer; keeps the per-backend plumbing out of the suite loops.
template <typename GaussFn, typename GridFn>
auto with_model(const ModelConfig& cfg, int n_max, GaussFn&& gauss, GridFn&& grid) {
  if (cfg.backend == "grid") {
    const GridModel m = instantiate_grid(cfg);
    return grid(m, solve_bridge(m), run_sinkhorn(m, n_max));
  }
  const GaussianModel m = instantiate_gaussian(cfg);
  return gauss(m, solve_bridge(m), run_sinkhorn(m, n_max));
}

}  // namespace

std::vector<BoundReport> suite_corollaries(const std::vector<ModelConfig>& models,
                                           int n_max) {
  std::vector<std::vector<BoundReport>> slots(models.size());
  parallel_for(static_cast<int>(models.size()), [&](int i) {
    const Constants c = derive_constants(models[i]);
    slots[i] = with_model(
        models[i], n_max,
        [&](const GaussianModel& m, const GaussianBridge& b,
            const std::vector<GaussianSinkhornState>& states) {
          return verify_corollaries(m, b, states, c);
        },
        [&](const GridModel& m, const GridBridge& b,
            const std::vector<GridSinkhornState>& states) {
          return verify_corollaries(m, b, states, c);
        });
    tag_instance(slots[i], i, 0);
  });
  std::vector<BoundReport> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

DecaySuiteResult suite_decay(const std::vector<ModelConfig>& models, int n_max) {
  DecaySuiteResult result;
  std::vector<std::pair<DecayCurve, std::vector<BoundReport>>> slots(models.size());
  parallel_for(static_cast<int>(models.size()), [&](int i) {
    const Constants c = derive_constants(models[i]);
    slots[i] = with_model(
        models[i], n_max,
        [&](const GaussianModel& m, const GaussianBridge& b,
            const std::vector<GaussianSinkhornState>& states) {
          return verify_decay(m, b, states, c);
        },
        [&](const GridModel& m, const GridBridge& b,
            const std::vector<GridSinkhornState>& states) {
          return verify_decay(m, b, states, c);
        });
    tag_instance(slots[i].second, i, 0);
  });
  for (auto& [curve, reports] : slots) {
    result.curves.push_back(std::move(curve));
    result.reports.insert(result.reports.end(), reports.begin(), reports.end());
  }
  return result;
}

std::vector<BoundReport> suite_pi_bounds(std::uint64_t seed, int instances) {
  return over_instances(instances, [&](int i) {
    Rng rng = instance_rng(seed ^ kSaltPi, i);
    const GaussianMeasure mu = random_gaussian_measure(rng, 1);
    const GaussianMeasure pi = random_gaussian_measure(rng, 1);
    const GaussianKernel k = random_gaussian_kernel(rng, 1);
    auto reports =
        verify_pi_bounds(mu, pi, k, rho_gaussian_kernel(k), spectral_norm(k.chi()));
    tag_instance(reports, i, seed);
    return reports;
  });
}

std::vector<BoundReport> suite_potentials(const std::vector<ModelConfig>& models,
                                          const std::vector<int>& states) {
  const int n_max = states.empty() ? 0 : *std::max_element(states.begin(), states.end());
  std::vector<std::vector<BoundReport>> slots(models.size());
  parallel_for(static_cast<int>(models.size()), [&](int i) {
    const Constants c = derive_constants(models[i]);
    const double tol = models[i].backend == "grid" ? 5e-3 : 1e-10;
    slots[i] = with_model(
        models[i], n_max,
        [&](const GaussianModel& m, const GaussianBridge& b,
            const std::vector<GaussianSinkhornState>& traj) {
          std::vector<BoundReport> out;
          for (int n : states) {
            auto r = verify_potential_identities(m, b, traj[n], c, tol);
            out.insert(out.end(), r.begin(), r.end());
          }
          return out;
        },
        [&](const GridModel& m, const GridBridge& b,
            const std::vector<GridSinkhornState>& traj) {
          std::vector<BoundReport> out;
          for (int n : states) {
            auto r = verify_potential_identities(m, b, traj[n], c, tol);
            out.insert(out.end(), r.begin(), r.end());
          }
          return out;
        });
    tag_instance(slots[i], i, 0);
  });
  std::vector<BoundReport> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

BackendComparison compare_backends(const ModelConfig& cfg, int n_steps,
                                   double interior_sigmas) {
  ModelConfig gauss_cfg = cfg;
  gauss_cfg.backend = "gaussian";
  ModelConfig grid_cfg = cfg;
  grid_cfg.backend = "grid";

  const GaussianModel gm = instantiate_gaussian(gauss_cfg);
  const GaussianBridge gb = solve_bridge(gm);
  const auto gstates = run_sinkhorn(gm, n_steps);

  const GridModel dm = instantiate_grid(grid_cfg);
  const GridBridge db = solve_bridge(dm);
  const auto dstates = run_sinkhorn(dm, n_steps);

  BackendComparison out;

  // Interior masks per side: within interior_sigmas marginal stds per axis.
  auto interior = [&](const GridSupport& s, const GaussianMeasure& marginal) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(s.points.rows()); ++i) {
      bool in = true;
      for (int a = 0; a < marginal.mean.size(); ++a)
        if (std::abs(s.points(i, a) - marginal.mean(a)) >
            interior_sigmas * std::sqrt(marginal.cov(a, a)))
          in = false;
      if (in) idx.push_back(i);
    }
    return idx;
  };
  const std::vector<int> x_in = interior(dm.mu.support, cfg.mu);
  const std::vector<int> y_in = interior(dm.eta.support, cfg.eta);

  // Bridge kernel moments: exact affine/constant vs grid rows.
  const GaussianKernel gl = transition_of(gb.p_star, Parity::Even);
  const GridKernel dl = transition_of(db.p_star, Parity::Even);
  const MatrixField dmean = cond_mean(dl);
  const MatrixField dcov = cond_cov(dl);
  for (int i : x_in) {
    const Eigen::VectorXd x = dm.mu.support.points.row(i).transpose();
    out.mean_field_sup = std::max(
        out.mean_field_sup,
        (dmean.values[i] - (gl.beta * x + gl.alpha)).lpNorm<Eigen::Infinity>());
    out.cov_field_sup =
        std::max(out.cov_field_sup, (dcov.values[i] - gl.tau).lpNorm<Eigen::Infinity>());
  }

  // KL trajectory, relative to the starting entropy.
  const double h0 = kl(gb.p_star, gstates[0].joint);
  for (int n = 0; n <= n_steps; ++n) {
    const double hg = kl(gb.p_star, gstates[n].joint);
    const double hd = kl(db.p_star, state_joint(dm, dstates[n]));
    out.kl_relative = std::max(out.kl_relative, std::abs(hg - hd) / h0);
  }

  // Fixed-point potentials, centered under the discrete marginals.  The grid
  // carries U through u_base (which folds in the cell volume), so compare
  // increments u - u_base against the exact U* - U, each centered.
  auto centered_sup = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& w, const std::vector<int>& idx) {
    const Eigen::VectorXd da = a - Eigen::VectorXd::Constant(a.size(), w.dot(a));
    const Eigen::VectorXd db_ = b - Eigen::VectorXd::Constant(b.size(), w.dot(b));
    double sup = 0.0;
    for (int i : idx) sup = std::max(sup, std::abs(da(i) - db_(i)));
    return sup;
  };
  Eigen::VectorXd gauss_du(dm.mu.size()), gauss_dv(dm.eta.size());
  for (int i = 0; i < dm.mu.size(); ++i) {
    const Eigen::VectorXd x = dm.mu.support.points.row(i).transpose();
    gauss_du(i) = gb.u_star.eval(x) - gm.u_base.eval(x);
  }
  for (int j = 0; j < dm.eta.size(); ++j) {
    const Eigen::VectorXd y = dm.eta.support.points.row(j).transpose();
    gauss_dv(j) = gb.v_star.eval(y) - gm.v_base.eval(y);
  }
  out.potential_u_sup =
      centered_sup(db.u_star - dm.u_base, gauss_du, dm.mu.weights, x_in);
  out.potential_v_sup =
      centered_sup(db.v_star - dm.v_base, gauss_dv, dm.eta.weights, y_in);
  return out;
}

SuiteResult run_suite(const std::string& suite, std::uint64_t seed, int instances,
                      const std::optional<ModelConfig>& model) {
  SuiteResult result;
  auto add = [&](std::vector<BoundReport> r) {
    result.reports.insert(result.reports.end(), std::make_move_iterator(r.begin()),
                          std::make_move_iterator(r.end()));
  };
  const bool all = suite == "all";
  bool known = false;

  if (all || suite == "lemma") {
    known = true;
    add(suite_lemma(seed, instances));
  }
  if (all || suite == "theorem1") {
    known = true;
    add(suite_theorem1_gaussian(seed, instances));
    add(suite_theorem1_discrete(seed, instances));
    add(suite_transport_inequalities(seed, instances));
  }
  const std::vector<ModelConfig> models =
      model ? std::vector<ModelConfig>{*model} : gaussian_sweep();
  if (all || suite == "corollaries") {
    known = true;
    add(suite_corollaries(models, 20));
  }
  if (all || suite == "decay") {
    known = true;
    DecaySuiteResult d = suite_decay(models, 30);
    result.curves = std::move(d.curves);
    add(std::move(d.reports));
  }
  if (all || suite == "pi_bounds") {
    known = true;
    add(suite_pi_bounds(seed, instances));
  }
  if (all || suite == "potentials") {
    known = true;
    std::vector<ModelConfig> pot_models;
    if (model) {
      pot_models.push_back(*model);
    } else {
      pot_models = gaussian_sweep();
      pot_models.push_back(default_model("grid"));
    }
    add(suite_potentials(pot_models, {1, 2, 3, 4}));
  }
  if (!known)
    throw ConfigError("unknown suite \"" + suite +
                      "\" (expected theorem1|lemma|corollaries|decay|pi_bounds|potentials|all)");

  std::sort(result.reports.begin(), result.reports.end(),
            [](const BoundReport& a, const BoundReport& b) { return a.name < b.name; });
  return result;
}

}  // namespace bridgebound
