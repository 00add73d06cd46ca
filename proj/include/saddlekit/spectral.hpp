#pragma once

#include <vector>

#include "saddlekit/common.hpp"

namespace saddlekit {

// Singular-value summary of a matrix.
//
// sigma_min is the square root of the smallest eigenvalue of B'B, so it is
// zero whenever B has fewer rows than columns; this is the constant for which
// ||Bx|| >= sigma_min ||x|| holds. sigma_min_nonzero is the smallest singular
// value above rank_tolerance.
struct SpectralInfo {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double sigma_min_nonzero = 0.0;
  Eigen::Index rank = 0;
  std::vector<double> singular_values;  // descending, min(E, M) entries
  double rank_tolerance = 0.0;
};

SpectralInfo spectral_quantities(const Matrix& matrix);

// Orthonormal basis of Range(B), E x rank.
Matrix range_basis(const Matrix& matrix);
// Orthonormal basis of Null(B), M x (M - rank).
Matrix null_space_basis(const Matrix& matrix);

// Orthogonal projector onto Range(B).
class RangeProjector {
 public:
  explicit RangeProjector(const Matrix& matrix);

  Vector project(const Vector& v) const;
  // ||v - P v||.
  double residual(const Vector& v) const;

 private:
  Matrix basis_;
};

}  // namespace saddlekit
