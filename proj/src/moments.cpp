#include "bridgebound/moments.hpp"

#include <cmath>

#include "bridgebound/errors.hpp"
#include "bridgebound/linalg.hpp"

namespace bridgebound {

namespace {

void require_same_support(const MatrixField& a, const MatrixField& b) {
  if (a.support.rows() != b.support.rows() ||
      a.support.cols() != b.support.cols() ||
      (a.support - b.support).cwiseAbs().maxCoeff() > 1e-12)
    throw DimensionError("field difference: supports disagree");
}

void require_p(double p) {
  if (!(p >= 1.0)) throw DomainError("field norm: p must be at least 1");
}

}  // namespace

MatrixField field_difference(const MatrixField& a, const MatrixField& b) {
  require_same_support(a, b);
  MatrixField out{a.support, {}};
  out.values.reserve(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values.push_back(a.values[i] - b.values[i]);
  return out;
}

AffineField field_difference(const AffineField& a, const AffineField& b) {
  return AffineField{a.linear - b.linear, a.offset - b.offset};
}

ConstantField field_difference(const ConstantField& a, const ConstantField& b) {
  return ConstantField{a.value - b.value};
}

MatrixField cond_mean(const GridKernel& k) {
  const int n = k.source.size();
  MatrixField f{k.source.points, {}};
  f.values.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd m = k.target.points.transpose() * k.rows.row(i).transpose();
    f.values.push_back(m);
  }
  return f;
}

AffineField cond_mean(const GaussianKernel& k) { return AffineField{k.beta, k.alpha}; }

MatrixField cond_cov(const GridKernel& k) {
  const int n = k.source.size(), m = k.target.size(), d = k.target.dim();
  MatrixField f{k.source.points, {}};
  f.values.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd mean = k.target.points.transpose() * k.rows.row(i).transpose();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < m; ++j) {
      const double w = k.rows(i, j);
      if (w == 0.0) continue;
      Eigen::VectorXd c = k.target.points.row(j).transpose() - mean;
      cov.noalias() += w * c * c.transpose();
    }
    f.values.push_back(symmetrize(cov));
  }
  return f;
}

ConstantField cond_cov(const GaussianKernel& k) { return ConstantField{k.tau}; }

Eigen::MatrixXd cross_cov(const DiscreteJoint& p) {
  const int dx = p.x.dim(), dy = p.y.dim();
  Eigen::VectorXd mx = Eigen::VectorXd::Zero(dx), my = Eigen::VectorXd::Zero(dy);
  const Eigen::VectorXd wx = p.mass.rowwise().sum();
  const Eigen::VectorXd wy = p.mass.colwise().sum().transpose();
  mx = p.x.points.transpose() * wx;
  my = p.y.points.transpose() * wy;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dx, dy);
  for (int i = 0; i < p.x.size(); ++i)
    for (int j = 0; j < p.y.size(); ++j) {
      const double w = p.mass(i, j);
      if (w == 0.0) continue;
      c.noalias() += w * (p.x.points.row(i).transpose() - mx) *
                     (p.y.points.row(j) - my.transpose());
    }
  return c;
}

Eigen::MatrixXd cross_cov(const GaussianJoint& p) {
  const int d = p.dim();
  return p.cov.block(0, d, d, d);
}

double field_norm(const MatrixField& f, double p, const GridMeasure& mu) {
  require_p(p);
  if (static_cast<int>(f.values.size()) != mu.size())
    throw DimensionError("field norm: field and measure sizes disagree");
  double acc = 0.0;
  for (int i = 0; i < mu.size(); ++i)
    acc += mu.weights(i) * std::pow(f.values[i].norm(), p);
  return std::pow(acc, 1.0 / p);
}

double field_norm(const AffineField& f, double p, const GaussianMeasure& mu) {
  require_p(p);
  if (p != 2.0)
    throw DomainError("field norm: affine Gaussian fields support p = 2 only");
  // E ||A x + b||^2 = Tr(A Sigma A') + ||A m + b||^2 for x ~ N(m, Sigma).
  const Eigen::MatrixXd a = f.linear;
  const double quad = (a * mu.cov * a.transpose()).trace();
  const double cent = (a * mu.mean + f.offset).squaredNorm();
  return std::sqrt(std::max(0.0, quad + cent));
}

double field_norm(const ConstantField& f, double p, const GaussianMeasure&) {
  require_p(p);
  return f.value.norm();
}

double trace_constant(const GridMeasure& mu, const GridKernel& k) {
  if (!support_equal(mu.support, k.source))
    throw DimensionError("trace constant: kernel source does not match measure");
  MatrixField sig = cond_cov(k);
  double acc = 0.0;
  for (int i = 0; i < mu.size(); ++i) acc += mu.weights(i) * sig.values[i].trace();
  return std::sqrt(std::max(0.0, acc));
}

double trace_constant(const GaussianMeasure& mu, const GaussianKernel& k) {
  if (mu.dim() != k.dim())
    throw DimensionError("trace constant: kernel dimension does not match measure");
  return std::sqrt(std::max(0.0, k.tau.trace()));
}

MatrixField materialize(const AffineField& f, const Eigen::MatrixXd& support) {
  MatrixField out{support, {}};
  out.values.reserve(support.rows());
  for (int i = 0; i < support.rows(); ++i) {
    Eigen::VectorXd v = f.linear * support.row(i).transpose() + f.offset;
    out.values.push_back(v);
  }
  return out;
}

MatrixField materialize(const ConstantField& f, const Eigen::MatrixXd& support) {
  MatrixField out{support, {}};
  out.values.assign(support.rows(), f.value);
  return out;
}

Eigen::VectorXd measure_mean(const GridMeasure& mu) {
  return mu.support.points.transpose() * mu.weights;
}

Eigen::MatrixXd measure_cov(const GridMeasure& mu) {
  const Eigen::VectorXd m = measure_mean(mu);
  const int d = mu.dim();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < mu.size(); ++i) {
    const double w = mu.weights(i);
    if (w == 0.0) continue;
    Eigen::VectorXd u = mu.support.points.row(i).transpose() - m;
    c.noalias() += w * u * u.transpose();
  }
  return symmetrize(c);
}

}  // namespace bridgebound
