#include "bridgebound/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"
#include "bridgebound/moments.hpp"

namespace bridgebound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dim(const GridMeasure& nu, const GridMeasure& mu, const char* what) {
  if (nu.dim() != mu.dim()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

}  // namespace

W2Result w2_quantile_1d(const GridMeasure& nu, const GridMeasure& mu) {
  require_same_dim(nu, mu, "w2_quantile_1d");
  if (nu.dim() != 1) throw DimensionError("w2_quantile_1d: measures must be on the line");

  const int nx = nu.size(), ny = mu.size();
  std::vector<int> ox(nx), oy(ny);
  std::iota(ox.begin(), ox.end(), 0);
  std::iota(oy.begin(), oy.end(), 0);
  std::sort(ox.begin(), ox.end(), [&](int a, int b) {
    return nu.support.points(a, 0) < nu.support.points(b, 0);
  });
  std::sort(oy.begin(), oy.end(), [&](int a, int b) {
    return mu.support.points(a, 0) < mu.support.points(b, 0);
  });

  // Monotone rearrangement: walk both sorted supports, pairing mass greedily.
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(nx, ny);
  double cost = 0.0;
  int i = 0, j = 0;
  double ri = nu.weights(ox[0]), rj = mu.weights(oy[0]);
  while (i < nx && j < ny) {
    const double m = std::min(ri, rj);
    if (m > 0.0) {
      const double dx = nu.support.points(ox[i], 0) - mu.support.points(oy[j], 0);
      coupling(ox[i], oy[j]) += m;
      cost += m * dx * dx;
    }
    const bool step_i = ri <= rj;
    const bool step_j = rj <= ri;
    ri -= m;
    rj -= m;
    if (step_i) {
      ++i;
      if (i < nx) ri = nu.weights(ox[i]);
    }
    if (step_j) {
      ++j;
      if (j < ny) rj = mu.weights(oy[j]);
    }
  }
  return W2Result{std::sqrt(std::max(0.0, cost)),
                  DiscreteJoint{nu.support, mu.support, std::move(coupling)}};
}

LpW2Result w2_lp(const GridMeasure& nu, const GridMeasure& mu) {
  require_same_dim(nu, mu, "w2_lp");
  const int ns = nu.size(), nt = mu.size();
  if (ns > kLpAtomCap || nt > kLpAtomCap)
    throw SizeError("w2_lp: support exceeds the exact-solver cap of 64 atoms per side");

  Eigen::MatrixXd cost(ns, nt);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j)
      cost(i, j) = (nu.support.points.row(i) - mu.support.points.row(j)).squaredNorm();

  // Successive shortest paths with Johnson potentials.  Costs are
  // nonnegative, so plain Dijkstra works from the first augmentation on.
  Eigen::VectorXd supply = nu.weights;
  Eigen::VectorXd demand = mu.weights * (nu.weights.sum() / mu.weights.sum());
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(ns, nt);
  const int nv = ns + nt;
  Eigen::VectorXd pot = Eigen::VectorXd::Zero(nv);

  std::vector<double> dist(nv);
  std::vector<int> parent(nv);  // predecessor node (source index space)
  std::vector<char> settled(nv);

  while (supply.sum() > 1e-15 && demand.sum() > 1e-15) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(settled.begin(), settled.end(), 0);
    for (int i = 0; i < ns; ++i)
      if (supply(i) > 0.0) dist[i] = 0.0;

    // Dense Dijkstra over the bipartite residual graph.
    for (int iter = 0; iter < nv; ++iter) {
      int u = -1;
      double best = kInf;
      for (int v = 0; v < nv; ++v)
        if (!settled[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      if (u < 0) break;
      settled[u] = 1;
      if (u < ns) {
        for (int j = 0; j < nt; ++j) {
          const double rc = std::max(0.0, cost(u, j) + pot(u) - pot(ns + j));
          if (dist[u] + rc < dist[ns + j]) {
            dist[ns + j] = dist[u] + rc;
            parent[ns + j] = u;
          }
        }
      } else {
        const int j = u - ns;
        for (int i = 0; i < ns; ++i) {
          if (flow(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -cost(i, j) + pot(ns + j) - pot(i));
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            parent[i] = u;
          }
        }
      }
    }

    int t = -1;
    double tbest = kInf;
    for (int j = 0; j < nt; ++j)
      if (demand(j) > 0.0 && dist[ns + j] < tbest) {
        tbest = dist[ns + j];
        t = ns + j;
      }
    if (t < 0) break;  // nothing reachable: only rounding dust remains

    // Bottleneck along the path (root supply, target demand, backward flows).
    double delta = demand(t - ns);
    for (int v = t; parent[v] >= 0; v = parent[v]) {
      const int u = parent[v];
      if (u >= ns) delta = std::min(delta, flow(v, u - ns));  // backward arc v<-u
    }
    int root = t;
    while (parent[root] >= 0) root = parent[root];
    delta = std::min(delta, supply(root));

    for (int v = t; parent[v] >= 0; v = parent[v]) {
      const int u = parent[v];
      if (u < ns)
        flow(u, v - ns) += delta;
      else
        flow(v, u - ns) -= delta;
    }
    supply(root) = (delta == supply(root)) ? 0.0 : supply(root) - delta;
    demand(t - ns) = (delta == demand(t - ns)) ? 0.0 : demand(t - ns) - delta;

    for (int v = 0; v < nv; ++v) pot(v) += std::min(dist[v], tbest);
  }

  const double total = (flow.array() * cost.array()).sum();
  LpW2Result out{std::sqrt(std::max(0.0, total)),
                 DiscreteJoint{nu.support, mu.support, std::move(flow)},
                 pot.head(ns), pot.tail(nt)};
  return out;
}

W2Result w2(const GridMeasure& nu, const GridMeasure& mu) {
  require_same_dim(nu, mu, "w2");
  if (nu.dim() == 1) return w2_quantile_1d(nu, mu);
  LpW2Result lp = w2_lp(nu, mu);
  return W2Result{lp.distance, std::move(lp.coupling)};
}

double bures_sq(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  const Eigen::MatrixXd r2 = sqrt_spd(s2);
  const Eigen::MatrixXd inner = sqrt_spd(r2 * s1 * r2);
  return std::max(0.0, s1.trace() + s2.trace() - 2.0 * inner.trace());
}

GaussianW2Result w2(const GaussianMeasure& nu, const GaussianMeasure& mu) {
  if (nu.dim() != mu.dim()) throw DimensionError("w2: dimension mismatch");
  const int d = nu.dim();
  const double dist_sq = (nu.mean - mu.mean).squaredNorm() + bures_sq(nu.cov, mu.cov);

  // Optimal map T(x) = m2 + A (x - m1) with A = S1^{-1/2}(S1^{1/2} S2
  // S1^{1/2})^{1/2} S1^{-1/2}; the coupling is the (singular) law of (X, TX).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(nu.cov));
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(1e-14);
  const Eigen::MatrixXd r = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                            eig.eigenvectors().transpose();
  const Eigen::MatrixXd rinv = eig.eigenvectors() *
                               lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                               eig.eigenvectors().transpose();
  const Eigen::MatrixXd a = rinv * sqrt_spd(r * mu.cov * r) * rinv;

  Eigen::VectorXd mean(2 * d);
  mean.head(d) = nu.mean;
  mean.tail(d) = mu.mean;
  Eigen::MatrixXd cov(2 * d, 2 * d);
  cov.topLeftCorner(d, d) = nu.cov;
  cov.topRightCorner(d, d) = nu.cov * a;
  cov.bottomLeftCorner(d, d) = a * nu.cov;
  cov.bottomRightCorner(d, d) = mu.cov;
  return GaussianW2Result{std::sqrt(std::max(0.0, dist_sq)),
                          make_gaussian_joint(std::move(mean), std::move(cov),
                                              /*allow_singular=*/true)};
}

KernelW2Avg w2_kernel_avg(const GridMeasure& mu, const GridKernel& l,
                          const GridKernel& k) {
  if (!support_equal(mu.support, l.source) || !support_equal(mu.support, k.source))
    throw DimensionError("w2_kernel_avg: kernel sources do not match measure");
  KernelW2Avg out{0.0, {}};
  out.row_couplings.reserve(mu.size());
  for (int i = 0; i < mu.size(); ++i) {
    W2Result r = w2(l.row_measure(i), k.row_measure(i));
    out.mean_sq += mu.weights(i) * r.distance * r.distance;
    out.row_couplings.push_back(std::move(r.coupling));
  }
  return out;
}

double w2_kernel_avg(const GaussianMeasure& mu, const GaussianKernel& l,
                     const GaussianKernel& k) {
  if (l.dim() != mu.dim() || k.dim() != mu.dim())
    throw DimensionError("w2_kernel_avg: dimension mismatch");
  const double mean_part =
      field_norm(field_difference(cond_mean(l), cond_mean(k)), 2.0, mu);
  return mean_part * mean_part + bures_sq(l.tau, k.tau);
}

}  // namespace bridgebound
