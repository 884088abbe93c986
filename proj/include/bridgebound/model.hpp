#pragma once

#include <optional>
#include <string>

#include "bridgebound/bounds.hpp"

namespace bridgebound {

/// Parsed model definition.  Both backends are described by the same Gaussian
/// data (mu, eta, kernel); the grid backend discretizes them on regular grids,
/// which is what makes cross-backend comparison meaningful.
struct ModelConfig {
  std::string backend;  // "gaussian" or "grid"
  int d = 1;
  GaussianMeasure mu;
  GaussianMeasure eta;
  GaussianKernel kernel;

  int grid_n = 400;          // points per axis
  double grid_sigmas = 6.0;  // half-width of the default box, in marginal stds
  std::optional<Eigen::VectorXd> grid_lo, grid_hi;  // shared explicit box

  // Optional externally supplied log-Sobolev constants.  When present, the
  // run is not certified by this code: the values are trusted as given.
  std::optional<double> rho_u_override, rho_v_override;

  bool certified() const { return !rho_u_override && !rho_v_override; }
};

/// Parses and validates a model definition; throws ConfigError with a
/// field-level message on any schema violation.
ModelConfig parse_model_config(const std::string& json_text);
ModelConfig load_model_config(const std::string& path);

GaussianModel instantiate_gaussian(const ModelConfig& cfg);
GridModel instantiate_grid(const ModelConfig& cfg);

/// Grid boxes used by instantiate_grid, exposed so comparisons can evaluate
/// exact fields on the same points.
GridGeometry x_geometry(const ModelConfig& cfg);
GridGeometry y_geometry(const ModelConfig& cfg);

/// Constants for the model: rho_u / rho_v from the marginal covariances
/// (spectral norms: the quadratic potentials have curvature 1/||Sigma||_2, no
/// exclusion ball), kappa and chi from the kernel.  Overrides take precedence.
Constants derive_constants(const ModelConfig& cfg);

}  // namespace bridgebound
