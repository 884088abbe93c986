#include "bridgebound/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"

namespace bridgebound {

namespace {

using nlohmann::json;

Eigen::VectorXd parse_vector(const json& j, const std::string& where, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw ConfigError(where + ": expected array of length " + std::to_string(d));
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw ConfigError(where + ": expected " + std::to_string(d) + " rows");
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) m.row(i) = parse_vector(j[i], where, d).transpose();
  return m;
}

GaussianMeasure parse_measure(const json& j, const std::string& where, int d) {
  if (!j.is_object() || !j.contains("mean") || !j.contains("cov"))
    throw ConfigError(where + ": expected {\"mean\": [...], \"cov\": [[...]]}");
  try {
    return make_gaussian_measure(parse_vector(j["mean"], where + ".mean", d),
                                 parse_matrix(j["cov"], where + ".cov", d));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

ModelConfig parse_model_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");

  ModelConfig cfg;
  if (!j.contains("backend") || !j["backend"].is_string())
    throw ConfigError("backend: expected \"gaussian\" or \"grid\"");
  cfg.backend = j["backend"].get<std::string>();
  if (cfg.backend != "gaussian" && cfg.backend != "grid")
    throw ConfigError("backend: expected \"gaussian\" or \"grid\", got \"" + cfg.backend +
                      "\"");

  if (!j.contains("d") || !j["d"].is_number_integer())
    throw ConfigError("d: expected integer 1 or 2");
  cfg.d = j["d"].get<int>();
  if (cfg.d != 1 && cfg.d != 2) throw ConfigError("d: expected 1 or 2");

  if (!j.contains("mu") || !j.contains("eta") || !j.contains("kernel"))
    throw ConfigError("model config needs mu, eta and kernel");
  cfg.mu = parse_measure(j["mu"], "mu", cfg.d);
  cfg.eta = parse_measure(j["eta"], "eta", cfg.d);

  const json& jk = j["kernel"];
  if (!jk.is_object() || !jk.contains("alpha") || !jk.contains("beta") ||
      !jk.contains("tau"))
    throw ConfigError("kernel: expected {\"alpha\": [...], \"beta\": [[...]], \"tau\": [[...]]}");
  try {
    cfg.kernel = make_gaussian_kernel(parse_vector(jk["alpha"], "kernel.alpha", cfg.d),
                                      parse_matrix(jk["beta"], "kernel.beta", cfg.d),
                                      parse_matrix(jk["tau"], "kernel.tau", cfg.d));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }

  if (j.contains("grid")) {
    const json& jg = j["grid"];
    if (!jg.is_object()) throw ConfigError("grid: expected an object");
    if (jg.contains("n")) {
      if (!jg["n"].is_number_integer() || jg["n"].get<int>() < 2)
        throw ConfigError("grid.n: expected integer >= 2");
      cfg.grid_n = jg["n"].get<int>();
    }
    if (jg.contains("sigmas")) {
      if (!jg["sigmas"].is_number() || jg["sigmas"].get<double>() <= 0)
        throw ConfigError("grid.sigmas: expected positive number");
      cfg.grid_sigmas = jg["sigmas"].get<double>();
    }
    if (jg.contains("lo") != jg.contains("hi"))
      throw ConfigError("grid: lo and hi must be given together");
    if (jg.contains("lo")) {
      cfg.grid_lo = parse_vector(jg["lo"], "grid.lo", cfg.d);
      cfg.grid_hi = parse_vector(jg["hi"], "grid.hi", cfg.d);
      for (int a = 0; a < cfg.d; ++a)
        if (!((*cfg.grid_lo)(a) < (*cfg.grid_hi)(a)))
          throw ConfigError("grid: lo must be below hi on every axis");
    }
  }

  if (j.contains("constants")) {
    const json& jc = j["constants"];
    if (!jc.is_object()) throw ConfigError("constants: expected an object");
    for (const char* key : {"rho_u", "rho_v"}) {
      if (!jc.contains(key)) continue;
      if (!jc[key].is_number() || jc[key].get<double>() <= 0)
        throw ConfigError(std::string("constants.") + key + ": expected positive number");
      (key[4] == 'u' ? cfg.rho_u_override : cfg.rho_v_override) = jc[key].get<double>();
    }
  }
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open model config: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_model_config(buf.str());
}

GaussianModel instantiate_gaussian(const ModelConfig& cfg) {
  return make_gaussian_model(cfg.mu, cfg.eta, cfg.kernel);
}

namespace {

// Box covering mean +- sigmas stds of every listed Gaussian, per axis.  The
// grids must carry not just the pinned marginals but every free marginal the
// iteration visits; a box fitted to the pinned marginal alone truncates the
// kernel rows of interior points and poisons the potentials.
GridGeometry hull_geometry(const std::vector<GaussianMeasure>& gs, int n, double sigmas) {
  const int d = static_cast<int>(gs.front().mean.size());
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const auto& g : gs)
    for (int a = 0; a < d; ++a) {
      const double half = sigmas * std::sqrt(g.cov(a, a));
      lo(a) = std::min(lo(a), g.mean(a) - half);
      hi(a) = std::max(hi(a), g.mean(a) + half);
    }
  return make_grid_geometry(lo, hi, std::vector<int>(d, n));
}

// First marginal of the first eta-pinned iterate: the widest x-marginal seen
// along the trajectory (iterates then contract back towards mu).
GaussianMeasure pulled_back_marginal(const ModelConfig& cfg) {
  const GaussianJoint p0 = product(cfg.mu, cfg.kernel);
  const int d = cfg.d;
  const Eigen::MatrixXd c_xy = p0.cov.block(0, d, d, d);
  const Eigen::MatrixXd b =
      c_xy * inverse_spd(p0.cov.block(d, d, d, d), "pulled-back marginal");
  const Eigen::VectorXd mean =
      p0.mean.head(d) + b * (cfg.eta.mean - p0.mean.tail(d));
  const Eigen::MatrixXd cov = symmetrize(b * cfg.eta.cov * b.transpose() +
                                         p0.cov.block(0, 0, d, d) -
                                         b * c_xy.transpose());
  return make_gaussian_measure(mean, cov);
}

}  // namespace

GridGeometry x_geometry(const ModelConfig& cfg) {
  if (cfg.grid_lo) return make_grid_geometry(*cfg.grid_lo, *cfg.grid_hi,
                                             std::vector<int>(cfg.d, cfg.grid_n));
  return hull_geometry({cfg.mu, pulled_back_marginal(cfg)}, cfg.grid_n, cfg.grid_sigmas);
}

GridGeometry y_geometry(const ModelConfig& cfg) {
  if (cfg.grid_lo) return make_grid_geometry(*cfg.grid_lo, *cfg.grid_hi,
                                             std::vector<int>(cfg.d, cfg.grid_n));
  return hull_geometry({cfg.eta, push(cfg.mu, cfg.kernel)}, cfg.grid_n, cfg.grid_sigmas);
}

GridModel instantiate_grid(const ModelConfig& cfg) {
  const GridGeometry gx = x_geometry(cfg), gy = y_geometry(cfg);
  GridMeasure mu = discretize(cfg.mu, gx);
  GridMeasure eta = discretize(cfg.eta, gy);
  GridKernel k0 = discretize_kernel(cfg.kernel, mu.support, eta.support);
  return make_grid_model(std::move(mu), std::move(eta), std::move(k0));
}

Constants derive_constants(const ModelConfig& cfg) {
  const double rho_u =
      cfg.rho_u_override ? *cfg.rho_u_override : spectral_norm(cfg.mu.cov);
  const double rho_v =
      cfg.rho_v_override ? *cfg.rho_v_override : spectral_norm(cfg.eta.cov);
  return make_constants(rho_u, rho_v, cfg.kernel.chi());
}

}  // namespace bridgebound
