#include "bridgebound/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "bridgebound/errors.hpp"
#include "bridgebound/metrics.hpp"
#include "bridgebound/moments.hpp"
#include "bridgebound/report.hpp"
#include "bridgebound/suites.hpp"

namespace bridgebound {

namespace {

std::optional<ModelConfig> maybe_model(const CliOptions& opt) {
  if (!opt.model_path) return std::nullopt;
  return load_model_config(*opt.model_path);
}

std::string out_path(const CliOptions& opt, const std::string& name) {
  return (std::filesystem::path(opt.out_dir) / name).string();
}

void ensure_out_dir(const CliOptions& opt) {
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + opt.out_dir);
}

std::string cardinal_name(const std::string& stem, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%03d.csv", stem.c_str(), i);
  return buf;
}

// E[q(X)] for X ~ N(mean, cov).
double quadratic_expectation(const Quadratic& q, const GaussianMeasure& g) {
  return 0.5 * (q.a * g.cov).trace() + 0.5 * g.mean.dot(q.a * g.mean) +
         q.b.dot(g.mean) + q.c;
}

std::string matrix_json(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (int i = 0; i < m.rows(); ++i) {
    out += "[";
    for (int j = 0; j < m.cols(); ++j) {
      out += format_float(m(i, j));
      if (j + 1 < m.cols()) out += ",";
    }
    out += "]";
    if (i + 1 < m.rows()) out += ",";
  }
  return out + "]";
}

std::string vector_json(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    out += format_float(v(i));
    if (i + 1 < v.size()) out += ",";
  }
  return out + "]";
}

MatrixField scalar_field(const Eigen::MatrixXd& points, const Eigen::VectorXd& values) {
  MatrixField f{points, {}};
  f.values.reserve(values.size());
  for (int i = 0; i < values.size(); ++i)
    f.values.push_back(Eigen::MatrixXd::Constant(1, 1, values(i)));
  return f;
}

double tv(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).lpNorm<1>();
}

// Sup-norm deviation of Gaussian parameters; the Gaussian stand-in for a
// marginal TV residual.
double param_dev(const GaussianMeasure& got, const GaussianMeasure& want) {
  return std::max((got.mean - want.mean).lpNorm<Eigen::Infinity>(),
                  (got.cov - want.cov).lpNorm<Eigen::Infinity>());
}

}  // namespace

int cmd_verify(const CliOptions& opt) {
  const std::optional<ModelConfig> model = maybe_model(opt);  // may throw ConfigError
  const SuiteResult result = run_suite(opt.suite, opt.seed, opt.instances, model);

  ensure_out_dir(opt);
  write_text_file(out_path(opt, "reports.json"), reports_to_json(result.reports));
  write_text_file(out_path(opt, "summary.csv"), summary_csv(result.reports));
  for (int i = 0; i < static_cast<int>(result.curves.size()); ++i)
    write_text_file(out_path(opt, cardinal_name("decay", i)), decay_csv(result.curves[i]));
  if (result.curves.size() == 1)
    write_text_file(out_path(opt, "decay.csv"), decay_csv(result.curves[0]));

  int failed = 0;
  for (const auto& r : result.reports)
    if (!r.pass) ++failed;
  std::cout << result.reports.size() << " reports, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_bridge(const CliOptions& opt) {
  const ModelConfig cfg = opt.model_path ? load_model_config(*opt.model_path)
                                         : default_model("gaussian");
  ensure_out_dir(opt);

  if (cfg.backend == "grid") {
    const GridModel m = instantiate_grid(cfg);
    const GridBridge bridge = solve_bridge(m, opt.tol.value_or(1e-10));
    const auto states = run_sinkhorn(m, bridge.iterations_used);

    std::vector<TrajectoryRow> rows;
    for (const auto& s : states) {
      const DiscreteJoint pn = state_joint(m, s);
      TrajectoryRow r;
      r.n = s.n;
      r.residual_mu = tv(first_marginal(pn).weights, m.mu.weights);
      r.residual_eta = tv(second_marginal(pn).weights, m.eta.weights);
      r.kl = kl(bridge.p_star, pn);
      r.gauge = m.mu.weights.dot(s.u - m.u_base);
      rows.push_back(r);
    }
    write_text_file(out_path(opt, "trajectory.csv"), trajectory_csv(rows));
    write_text_file(out_path(opt, "potential_u.csv"),
                    field_csv(scalar_field(m.mu.support.points, bridge.u_star)));
    write_text_file(out_path(opt, "potential_v.csv"),
                    field_csv(scalar_field(m.eta.support.points, bridge.v_star)));
    const GridKernel l = transition_of(bridge.p_star, Parity::Even);
    write_text_file(out_path(opt, "mean_field.csv"), field_csv(cond_mean(l)));
    write_text_file(out_path(opt, "cov_field.csv"), field_csv(cond_cov(l)));
    std::cout << "{\"backend\":\"grid\",\"iterations\":" << bridge.iterations_used
              << ",\"residual\":" << format_float(bridge.residual) << "}\n";
    return 0;
  }

  const GaussianModel m = instantiate_gaussian(cfg);
  const GaussianBridge bridge = solve_bridge(m, opt.tol.value_or(1e-12));
  const auto states = run_sinkhorn(m, bridge.iterations_used);

  std::vector<TrajectoryRow> rows;
  for (const auto& s : states) {
    TrajectoryRow r;
    r.n = s.n;
    r.residual_mu = param_dev(first_marginal(s.joint), m.mu);
    r.residual_eta = param_dev(second_marginal(s.joint), m.eta);
    r.kl = kl(bridge.p_star, s.joint);
    r.gauge = quadratic_expectation(s.u, m.mu) - quadratic_expectation(m.u_base, m.mu);
    rows.push_back(r);
  }
  write_text_file(out_path(opt, "trajectory.csv"), trajectory_csv(rows));

  const GaussianKernel l = transition_of(bridge.p_star, Parity::Even);
  std::string js = "{\"backend\":\"gaussian\"";
  js += ",\"iterations\":" + std::to_string(bridge.iterations_used);
  js += ",\"residual\":" + format_float(bridge.residual);
  js += ",\"u\":{\"a\":" + matrix_json(bridge.u_star.a) +
        ",\"b\":" + vector_json(bridge.u_star.b) +
        ",\"c\":" + format_float(bridge.u_star.c) + "}";
  js += ",\"v\":{\"a\":" + matrix_json(bridge.v_star.a) +
        ",\"b\":" + vector_json(bridge.v_star.b) +
        ",\"c\":" + format_float(bridge.v_star.c) + "}";
  js += ",\"kernel\":{\"alpha\":" + vector_json(l.alpha) +
        ",\"beta\":" + matrix_json(l.beta) + ",\"tau\":" + matrix_json(l.tau) + "}";
  js += ",\"joint\":{\"mean\":" + vector_json(bridge.p_star.mean) +
        ",\"cov\":" + matrix_json(bridge.p_star.cov) + "}}";
  js += "\n";
  std::cout << js;
  write_text_file(out_path(opt, "bridge.json"), js);

  // Fields materialized on the model's grid box so they are plottable
  // alongside grid-backend runs.
  const Eigen::MatrixXd xs = x_geometry(cfg).points();
  write_text_file(out_path(opt, "mean_field.csv"),
                  field_csv(materialize(cond_mean(l), xs)));
  write_text_file(out_path(opt, "cov_field.csv"),
                  field_csv(materialize(cond_cov(l), xs)));
  Eigen::VectorXd us(xs.rows());
  const Eigen::MatrixXd ys = y_geometry(cfg).points();
  Eigen::VectorXd vv(ys.rows());
  for (int i = 0; i < xs.rows(); ++i) us(i) = bridge.u_star.eval(xs.row(i).transpose());
  for (int j = 0; j < ys.rows(); ++j) vv(j) = bridge.v_star.eval(ys.row(j).transpose());
  write_text_file(out_path(opt, "potential_u.csv"), field_csv(scalar_field(xs, us)));
  write_text_file(out_path(opt, "potential_v.csv"), field_csv(scalar_field(ys, vv)));
  return 0;
}

int cmd_oracle_compare(const CliOptions& opt) {
  const ModelConfig cfg = opt.model_path ? load_model_config(*opt.model_path)
                                         : default_model("gaussian");
  const double tol = opt.tol.value_or(1e-3);
  const double tol_pot = 5.0 * tol;
  const BackendComparison cmp = compare_backends(cfg, 8);

  ensure_out_dir(opt);
  struct Row {
    const char* metric;
    double value;
    double tolerance;
  } table[] = {
      {"mean_field_sup", cmp.mean_field_sup, tol},
      {"cov_field_sup", cmp.cov_field_sup, tol},
      {"kl_relative", cmp.kl_relative, tol},
      {"potential_u_sup", cmp.potential_u_sup, tol_pot},
      {"potential_v_sup", cmp.potential_v_sup, tol_pot},
  };
  std::string csv = "metric,value,tolerance,pass\n";
  bool ok = true;
  for (const auto& row : table) {
    const bool pass = row.value <= row.tolerance;
    ok = ok && pass;
    csv += std::string(row.metric) + "," + format_float(row.value) + "," +
           format_float(row.tolerance) + "," + (pass ? "1" : "0") + "\n";
  }
  write_text_file(out_path(opt, "oracle.csv"), csv);
  std::cout << csv;
  return ok ? 0 : 1;
}

int run_cli(const std::string& command, const CliOptions& opt) {
  try {
    if (command == "verify") return cmd_verify(opt);
    if (command == "bridge") return cmd_bridge(opt);
    if (command == "oracle-compare") return cmd_oracle_compare(opt);
    std::cerr << "unknown command: " << command << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const SupportError& e) {
    std::cerr << "support error: " << e.what() << "\n";
    return 3;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace bridgebound
