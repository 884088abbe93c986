// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Each criterion re-runs its suite from a fixed seed; tolerances and instance
// counts are pinned here on purpose — they are the contract, not knobs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bridgebound/bounds.hpp"
#include "bridgebound/metrics.hpp"
#include "bridgebound/model.hpp"
#include "bridgebound/report.hpp"
#include "bridgebound/rng.hpp"
#include "bridgebound/suites.hpp"
#include "bridgebound/transport.hpp"

using namespace bridgebound;

namespace {

constexpr std::uint64_t kSeed = 20260814;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

int g_failures = 0;
int g_index = 0;

void run_criterion(const std::string& what, double time_cap_s,
                   const std::function<void(Outcome&)>& body) {
  ++g_index;
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.fail(std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_cap_s > 0.0 && secs > time_cap_s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "runtime %.2fs exceeds %.0fs cap", secs, time_cap_s);
    out.fail(buf);
  }
  if (!out.pass) ++g_failures;
  std::printf("%s  %2d. %s (%.2fs)%s%s\n", out.pass ? "PASS" : "FAIL", g_index,
              what.c_str(), secs, out.detail.empty() ? "" : " -- ",
              out.detail.c_str());
  std::fflush(stdout);
}

// All reports pass their pinned rule, and the raw slack never dips below the
// criterion's absolute floor.
void gate_reports(Outcome& out, const std::vector<BoundReport>& reports,
                  double slack_floor) {
  int failed = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::string first_bad;
  for (const BoundReport& r : reports) {
    if (!r.pass) {
      ++failed;
      if (first_bad.empty()) first_bad = r.name;
    }
    if (!r.degenerate && std::isfinite(r.slack)) min_slack = std::min(min_slack, r.slack);
  }
  if (failed > 0)
    out.fail(std::to_string(failed) + "/" + std::to_string(reports.size()) +
             " reports failed, first: " + first_bad);
  if (min_slack < slack_floor) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "min slack %.3e below floor %.1e", min_slack,
                  slack_floor);
    out.fail(buf);
  }
  if (reports.empty()) out.fail("suite produced no reports");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  std::printf("acceptance: pinned verification gate\n");

  run_criterion("coupled moment comparisons, 500 exact-LP discrete pairs", 10.0,
                [](Outcome& out) {
                  gate_reports(out, suite_lemma(kSeed, 500), -1e-9);
                });

  run_criterion("chained kernel comparisons, 200 certified Gaussian triples", 5.0,
                [](Outcome& out) {
                  gate_reports(out, suite_theorem1_gaussian(kSeed, 200), -1e-10);
                });

  run_criterion("chained kernel comparisons, 200 discrete instances with the "
                "empirical certificate",
                60.0, [](Outcome& out) {
                  gate_reports(out, suite_theorem1_discrete(kSeed, 200), -1e-9);
                });

  run_criterion("transport/entropy and entropy/Fisher spot checks, 200 Gaussian pairs",
                0.0, [](Outcome& out) {
                  gate_reports(out, suite_transport_inequalities(kSeed, 200), -1e-10);
                });

  run_criterion("marginal pinning to 1e-12 along every discrete trajectory", 0.0,
                [](Outcome& out) {
                  auto tv = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                    return 0.5 * (a - b).cwiseAbs().sum();
                  };
                  std::vector<GridModel> models;
                  models.push_back(instantiate_grid(default_model("grid")));
                  Rng rng(kSeed);
                  for (int t = 0; t < 3; ++t) {
                    const DiscreteTriple triple = random_discrete_triple(rng, 1, 10, 10);
                    GridMeasure eta = push(triple.mu, triple.l);
                    models.push_back(make_grid_model(triple.mu, eta, triple.k));
                  }
                  double worst = 0.0;
                  for (const GridModel& m : models) {
                    const std::vector<GridSinkhornState> states = run_sinkhorn(m, 9);
                    for (int n = 1; n < static_cast<int>(states.size()); ++n) {
                      const DiscreteJoint p = state_joint(m, states[n]);
                      const double res =
                          n % 2 == 1 ? tv(second_marginal(p).weights, m.eta.weights)
                                     : tv(first_marginal(p).weights, m.mu.weights);
                      worst = std::max(worst, res);
                    }
                  }
                  if (worst > 1e-12) {
                    char buf[64];
                    std::snprintf(buf, sizeof(buf), "worst pinning residual %.3e", worst);
                    out.fail(buf);
                  }
                });

  run_criterion("geometric entropy decay over the Gaussian sweep, n <= 30", 5.0,
                [](Outcome& out) {
                  const DecaySuiteResult r = suite_decay(gaussian_sweep(), 30);
                  gate_reports(out, r.reports, -1e-10);
                  for (const DecayCurve& curve : r.curves) {
                    double prev = std::numeric_limits<double>::infinity();
                    for (const DecayCurve::Entry& e : curve.entries) {
                      if (e.h > e.bound * (1.0 + 1e-9) + 1e-15)
                        out.fail("curve exceeds envelope at n=" + std::to_string(e.n));
                      if (e.h > prev + 1e-12)
                        out.fail("divergence increased at n=" + std::to_string(e.n));
                      prev = e.h;
                    }
                  }
                });

  run_criterion("per-iterate conditional moment bounds over the sweep, n <= 20", 0.0,
                [](Outcome& out) {
                  gate_reports(out, suite_corollaries(gaussian_sweep(), 20), -1e-10);
                });

  run_criterion("potential identities and bounds on both backends", 0.0,
                [](Outcome& out) {
                  std::vector<ModelConfig> exact = gaussian_sweep();
                  exact.push_back(default_model("gaussian"));
                  const std::vector<int> states{1, 2, 3, 4};
                  const std::vector<BoundReport> g = suite_potentials(exact, states);
                  gate_reports(out, g, -1e-10);
                  for (const BoundReport& r : g)
                    if (r.name.find("_identity") != std::string::npos && r.lhs > 1e-10)
                      out.fail("exact-backend identity residual " + r.name);
                  const std::vector<BoundReport> d =
                      suite_potentials({default_model("grid")}, states);
                  gate_reports(out, d, -1e-9);
                  for (const BoundReport& r : d)
                    if (r.name.find("_identity") != std::string::npos && r.lhs > 5e-3)
                      out.fail("grid identity residual " + r.name);
                });

  run_criterion("cross-backend agreement of fields, divergence and potentials", 0.0,
                [](Outcome& out) {
                  const BackendComparison c =
                      compare_backends(default_model("grid"), 10);
                  auto gate = [&out](const char* what, double v, double tol) {
                    if (!(v <= tol)) {
                      char buf[96];
                      std::snprintf(buf, sizeof(buf), "%s %.3e exceeds %.1e", what, v, tol);
                      out.fail(buf);
                    }
                  };
                  gate("mean field", c.mean_field_sup, 1e-3);
                  gate("covariance field", c.cov_field_sup, 1e-3);
                  gate("relative divergence", c.kl_relative, 1e-3);
                  gate("x-side potential", c.potential_u_sup, 5e-3);
                  gate("y-side potential", c.potential_v_sup, 5e-3);
                });

  run_criterion("transport solver cross-checks: quantile vs LP, closed form vs grid",
                0.0, [](Outcome& out) {
                  double worst_line = 0.0;
                  for (int i = 0; i < 300; ++i) {
                    Rng rng = instance_rng(kSeed ^ 0x77320000u, i);
                    const GridMeasure a = random_atoms(rng, 1, 2, 20);
                    const GridMeasure b = random_atoms(rng, 1, 2, 20);
                    worst_line = std::max(
                        worst_line, std::abs(w2_quantile_1d(a, b).distance -
                                             w2_lp(a, b).distance));
                  }
                  if (worst_line > 1e-10) {
                    char buf[64];
                    std::snprintf(buf, sizeof(buf), "quantile/LP gap %.3e", worst_line);
                    out.fail(buf);
                  }
                  double worst_grid = 0.0;
                  for (int i = 0; i < 50; ++i) {
                    Rng rng = instance_rng(kSeed ^ 0x77320001u, i);
                    Eigen::VectorXd m1(1), m2(1);
                    m1 << rng.uniform(-0.5, 0.5);
                    m2 << rng.uniform(-0.5, 0.5);
                    Eigen::MatrixXd c1(1, 1), c2(1, 1);
                    const double s1 = rng.uniform(0.7, 1.4), s2 = rng.uniform(0.7, 1.4);
                    c1 << s1 * s1;
                    c2 << s2 * s2;
                    const GaussianMeasure ga = make_gaussian_measure(m1, c1);
                    const GaussianMeasure gb = make_gaussian_measure(m2, c2);
                    Eigen::VectorXd lo(1), hi(1);
                    lo << std::min(m1(0) - 3.0 * s1, m2(0) - 3.0 * s2);
                    hi << std::max(m1(0) + 3.0 * s1, m2(0) + 3.0 * s2);
                    const GridGeometry geom = make_grid_geometry(lo, hi, {64});
                    const double exact = w2(ga, gb).distance;
                    const double gridded =
                        w2_lp(discretize(ga, geom), discretize(gb, geom)).distance;
                    worst_grid = std::max(worst_grid, std::abs(exact - gridded));
                  }
                  if (worst_grid > 2e-2) {
                    char buf[64];
                    std::snprintf(buf, sizeof(buf), "closed-form/grid gap %.3e", worst_grid);
                    out.fail(buf);
                  }
                });

  run_criterion("shifted-source bridge bounds, 1-d Gaussian instances", 0.0,
                [](Outcome& out) {
                  gate_reports(out, suite_pi_bounds(kSeed, 50), -1e-10);
                });

  run_criterion("byte-identical reports for repeated seeded runs", 0.0,
                [](Outcome& out) {
                  namespace fs = std::filesystem;
                  const fs::path dir = "acceptance_determinism_tmp";
                  fs::create_directories(dir);
                  const SuiteResult a = run_suite("lemma", 7, 40, std::nullopt);
                  const SuiteResult b = run_suite("lemma", 7, 40, std::nullopt);
                  write_text_file((dir / "a.json").string(), reports_to_json(a.reports));
                  write_text_file((dir / "b.json").string(), reports_to_json(b.reports));
                  if (slurp(dir / "a.json") != slurp(dir / "b.json"))
                    out.fail("randomized suite reports differ");
                  if (summary_csv(a.reports) != summary_csv(b.reports))
                    out.fail("summary rows differ");
                  const SuiteResult c = run_suite("decay", 1, 0, std::nullopt);
                  const SuiteResult d = run_suite("decay", 1, 0, std::nullopt);
                  if (reports_to_json(c.reports) != reports_to_json(d.reports))
                    out.fail("model-driven suite reports differ");
                  if (c.curves.size() != d.curves.size() || c.curves.empty())
                    out.fail("decay curves missing");
                  else
                    for (size_t i = 0; i < c.curves.size(); ++i)
                      if (decay_csv(c.curves[i]) != decay_csv(d.curves[i]))
                        out.fail("decay curve files differ");
                  fs::remove_all(dir);
                });

  std::printf("acceptance: %d of %d criteria failed\n", g_failures, g_index);
  return g_failures == 0 ? 0 : 1;
}
