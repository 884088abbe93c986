#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bridgebound/model.hpp"
#include "bridgebound/rng.hpp"

namespace bridgebound {

// ---------------------------------------------------------------------------
// Randomized verification suites.  Each suite draws instances from
// instance_rng(seed, i) so any single failing instance is replayable from its
// (seed, instance) pair, embedded in the report constants.  Instances run on
// the worker pool; report order is index order, then sorted by run_suite.
// ---------------------------------------------------------------------------

// --- instance generators (shared with the test binaries) --------------------

GaussianMeasure random_gaussian_measure(Rng& rng, int d);
GaussianKernel random_gaussian_kernel(Rng& rng, int d);

/// Atomic measure with distinct random support points in [-3,3]^d and
/// positive normalized weights.
GridMeasure random_atoms(Rng& rng, int d, int min_atoms, int max_atoms);

/// A measure plus two strictly positive kernels on shared random supports,
/// the raw material for the discrete aggregation checks.
struct DiscreteTriple {
  GridMeasure mu;
  GridKernel k;
  GridKernel l;
};
DiscreteTriple random_discrete_triple(Rng& rng, int d, int max_source, int max_target);

// --- canned model families ---------------------------------------------------

/// 1-d Gaussian models with marginal curvatures a_u, a_v in {0.5, 1, 2} and
/// kernel slope beta in {0.5, 1} at tau = 1: the sweep used by the decay,
/// corollary and potential suites.
std::vector<ModelConfig> gaussian_sweep();

/// mu = N(0,1), eta = N(2, 0.5), kernel (alpha, beta, tau) = (0, 1, 1); the
/// default model for bridge runs and cross-backend comparisons.
ModelConfig default_model(const std::string& backend);

// --- suites ------------------------------------------------------------------

std::vector<BoundReport> suite_lemma(std::uint64_t seed, int instances);
std::vector<BoundReport> suite_theorem1_gaussian(std::uint64_t seed, int instances);
std::vector<BoundReport> suite_theorem1_discrete(std::uint64_t seed, int instances);

/// Direct Talagrand/log-Sobolev spot checks on Gaussian pairs:
/// 0.5 D2(nu,mu)^2 <= rho KL(nu|mu) and KL(nu|mu) <= (rho/2) J(nu|mu),
/// with rho = ||Sigma_mu||_2.
std::vector<BoundReport> suite_transport_inequalities(std::uint64_t seed, int instances);

std::vector<BoundReport> suite_corollaries(const std::vector<ModelConfig>& models,
                                           int n_max);

struct DecaySuiteResult {
  std::vector<DecayCurve> curves;  // one per model, same order
  std::vector<BoundReport> reports;
};
DecaySuiteResult suite_decay(const std::vector<ModelConfig>& models, int n_max);

std::vector<BoundReport> suite_pi_bounds(std::uint64_t seed, int instances);

/// Potential identities and bounds on the states listed; tolerance per the
/// backend of each model (1e-10 Gaussian, 5e-3 grid).
std::vector<BoundReport> suite_potentials(const std::vector<ModelConfig>& models,
                                          const std::vector<int>& states);

// --- cross-backend comparison -------------------------------------------------

/// Max discrepancies between the exact Gaussian solution of a model and its
/// grid discretization.  Field sups run over the interior (within
/// interior_sigmas of the marginal mean per axis); potentials are compared
/// after centering both under the discrete marginal.
struct BackendComparison {
  double mean_field_sup = 0.0;   // bridge kernel conditional mean, x interior
  double cov_field_sup = 0.0;    // bridge kernel conditional covariance
  double kl_relative = 0.0;      // trajectory KL, relative to H(P*|P_0)
  double potential_u_sup = 0.0;  // centered x-side potential at the fixed point
  double potential_v_sup = 0.0;  // centered y-side potential
};
BackendComparison compare_backends(const ModelConfig& cfg, int n_steps,
                                   double interior_sigmas = 4.0);

// --- orchestration -------------------------------------------------------------

struct SuiteResult {
  std::vector<BoundReport> reports;  // sorted by name
  std::vector<DecayCurve> curves;    // decay suite only
};

/// suite: theorem1 | lemma | corollaries | decay | pi_bounds | potentials | all.
/// A model config, when given, replaces the built-in model families of the
/// model-driven suites; seed/instances drive the randomized ones.
SuiteResult run_suite(const std::string& suite, std::uint64_t seed, int instances,
                      const std::optional<ModelConfig>& model);

}  // namespace bridgebound
