#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "bridgebound/errors.hpp"

namespace bridgebound {

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

/// Largest singular value.
inline double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

inline double frobenius_norm(const Eigen::MatrixXd& a) { return a.norm(); }

/// Symmetrize, then require min eigenvalue > tol * max eigenvalue.
/// Relative floor 1e-12 is the positive-definiteness policy everywhere.
inline Eigen::MatrixXd require_spd(const Eigen::MatrixXd& a, const char* what,
                                   double rel_floor = 1e-12) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": matrix is not square");
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw DomainError(std::string(what) + ": matrix is not symmetric");
  Eigen::MatrixXd s = symmetrize(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= rel_floor * lmax)
    throw DomainError(std::string(what) + ": matrix is not positive definite");
  return s;
}

/// Symmetric PSD square root; eigenvalues clamped at 1e-14 before sqrt.
inline Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(a));
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(1e-14);
  return eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

inline double logdet_spd(const Eigen::MatrixXd& a, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(a));
  if (llt.info() != Eigen::Success)
    throw DomainError(std::string(what) + ": Cholesky failed (matrix not SPD)");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

inline Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& a, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(a));
  if (llt.info() != Eigen::Success)
    throw DomainError(std::string(what) + ": Cholesky failed (matrix not SPD)");
  return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

inline double min_eigenvalue(const Eigen::MatrixXd& sym) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(symmetrize(sym))
      .eigenvalues()
      .minCoeff();
}

/// Require an invertible square matrix (relative singular-value floor).
inline void require_invertible(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": matrix is not square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw DomainError(std::string(what) + ": matrix is numerically singular");
}

}  // namespace bridgebound
