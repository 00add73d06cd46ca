#include "saddlekit/spectral.hpp"

#include <algorithm>
#include <limits>

namespace saddlekit {

namespace {

struct Decomposition {
  Eigen::JacobiSVD<Matrix> svd;
  double tolerance;
  Eigen::Index rank;
};

Decomposition decompose(const Matrix& matrix) {
  if (matrix.size() == 0) throw ConfigError("spectral: empty matrix");
  if (!matrix.allFinite()) throw ConfigError("spectral: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double sigma_max = s.size() > 0 ? s(0) : 0.0;
  if (sigma_max == 0.0) throw ConfigError("zero matrix has no σ̲");
  const double tolerance = sigma_max *
                           static_cast<double>(std::max(matrix.rows(), matrix.cols())) *
                           std::numeric_limits<double>::epsilon();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tolerance) ++rank;
  return {std::move(svd), tolerance, rank};
}

}  // namespace

SpectralInfo spectral_quantities(const Matrix& matrix) {
  const Decomposition d = decompose(matrix);
  const Vector& s = d.svd.singularValues();

  SpectralInfo info;
  info.singular_values.assign(s.data(), s.data() + s.size());
  info.sigma_max = s(0);
  info.rank = d.rank;
  info.rank_tolerance = d.tolerance;
  info.sigma_min_nonzero = s(d.rank - 1);
  // B'B is M x M; it is singular whenever E < M.
  info.sigma_min = matrix.rows() < matrix.cols() ? 0.0 : s(s.size() - 1);
  return info;
}

Matrix range_basis(const Matrix& matrix) {
  const Decomposition d = decompose(matrix);
  return d.svd.matrixU().leftCols(d.rank);
}

Matrix null_space_basis(const Matrix& matrix) {
  const Decomposition d = decompose(matrix);
  return d.svd.matrixV().rightCols(matrix.cols() - d.rank);
}

RangeProjector::RangeProjector(const Matrix& matrix)
    : basis_(range_basis(matrix)) {}

Vector RangeProjector::project(const Vector& v) const {
  return basis_ * (basis_.transpose() * v);
}

double RangeProjector::residual(const Vector& v) const {
  return (v - project(v)).norm();
}

}  // namespace saddlekit
