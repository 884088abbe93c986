#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bridgebound/errors.hpp"

namespace bridgebound {

/// Regular rectangular grid in one or two dimensions.  Points include both
/// endpoints; spacing along axis k is (hi-lo)/(n_k - 1).  Enumeration is
/// row-major with the last axis fastest, so 2-d index (i0, i1) maps to
/// flat index i0 * n1 + i1.
struct GridGeometry {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<int> shape;

  int dim() const { return static_cast<int>(shape.size()); }

  int size() const {
    int n = 1;
    for (int s : shape) n *= s;
    return n;
  }

  double spacing(int axis) const {
    return (hi(axis) - lo(axis)) / (shape[axis] - 1);
  }

  double cell_volume() const {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= spacing(k);
    return v;
  }

  Eigen::MatrixXd points() const {
    const int d = dim();
    Eigen::MatrixXd pts(size(), d);
    if (d == 1) {
      for (int i = 0; i < shape[0]; ++i) pts(i, 0) = lo(0) + i * spacing(0);
    } else {
      const double h0 = spacing(0), h1 = spacing(1);
      int r = 0;
      for (int i0 = 0; i0 < shape[0]; ++i0)
        for (int i1 = 0; i1 < shape[1]; ++i1, ++r) {
          pts(r, 0) = lo(0) + i0 * h0;
          pts(r, 1) = lo(1) + i1 * h1;
        }
    }
    return pts;
  }
};

inline GridGeometry make_grid_geometry(const Eigen::VectorXd& lo,
                                       const Eigen::VectorXd& hi,
                                       const std::vector<int>& shape) {
  const int d = static_cast<int>(shape.size());
  if (d < 1 || d > 2)
    throw DimensionError("grid geometry: only dimensions 1 and 2 are supported");
  if (lo.size() != d || hi.size() != d)
    throw DimensionError("grid geometry: lo/hi length does not match dimension");
  for (int k = 0; k < d; ++k) {
    if (shape[k] < 2) throw DomainError("grid geometry: need at least 2 points per axis");
    if (!(hi(k) > lo(k))) throw DomainError("grid geometry: hi must exceed lo");
  }
  return GridGeometry{lo, hi, shape};
}

}  // namespace bridgebound
