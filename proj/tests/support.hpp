#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "saddlekit/consensus.hpp"
#include "saddlekit/network.hpp"
#include "saddlekit/problem.hpp"

namespace saddlekit::testing {

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

// Symmetric R with 2R having eigenvalues spread over [lo, hi].
inline Matrix random_spd_half(Rng& rng, Eigen::Index n, double lo, double hi) {
  const Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  const Matrix q = qr.householderQ();
  Vector eig(n);
  for (Eigen::Index i = 0; i < n; ++i) eig(i) = rng.uniform(lo, hi);
  eig(0) = lo;
  if (n > 1) eig(n - 1) = hi;
  return 0.5 * q * eig.asDiagonal() * q.transpose();
}

// E x M constraint matrix; when `deficient` the last row repeats a
// combination of the others so the row rank is below E.
inline Matrix random_constraints(Rng& rng, Eigen::Index e, Eigen::Index m, bool deficient) {
  Matrix b = random_matrix(rng, e, m);
  if (deficient && e >= 2) {
    const Eigen::Index last = e - 1;
    b.row(last) = rng.uniform(0.5, 2.0) * b.row(0);
    if (e >= 3) b.row(last) -= rng.uniform(0.5, 2.0) * b.row(1);
  }
  return b;
}

struct CorpusOptions {
  Eigen::Index max_dim = 10;
  Eigen::Index max_constraints = 6;
  bool homogeneous = false;
};

// Strongly convex quadratic with a feasible (possibly rank deficient)
// constraint. Deficiency alternates with the index.
inline EqualityConstrainedProblem corpus_problem(std::uint64_t seed,
                                                 const CorpusOptions& options = {}) {
  Rng rng(seed * 7919 + 17);
  const Eigen::Index m = rng.uniform_int(2, options.max_dim);
  const Eigen::Index e = rng.uniform_int(1, std::min(options.max_constraints, m));
  const bool deficient = (seed % 2 == 1) && e >= 2;
  const double lo = rng.uniform(0.2, 2.0);
  const double hi = lo * rng.uniform(1.0, 20.0);
  Matrix r_mat = random_spd_half(rng, m, lo, hi);
  Vector r = rng.normal_vector(m);
  Matrix b_mat = random_constraints(rng, e, m, deficient);
  Vector b = options.homogeneous ? Vector::Zero(e) : Vector(b_mat * rng.normal_vector(m));
  return make_quadratic_problem(std::move(r_mat), std::move(r), std::move(b_mat), std::move(b));
}

// Bounded conditioning: Hessian condition number at most 4 and nonzero
// singular values of B in [0.5, 1]. Odd seeds drop one rank when E >= 2.
inline EqualityConstrainedProblem conditioned_problem(std::uint64_t seed) {
  Rng rng(seed * 6151 + 29);
  const Eigen::Index m = rng.uniform_int(2, 10);
  const Eigen::Index e = rng.uniform_int(1, std::min<Eigen::Index>(6, m));
  const double lo = rng.uniform(0.5, 2.0);
  Matrix r_mat = random_spd_half(rng, m, lo, lo * rng.uniform(1.0, 4.0));
  Vector r = rng.normal_vector(m);
  const Matrix u = Eigen::HouseholderQR<Matrix>(random_matrix(rng, e, e)).householderQ();
  const Matrix v = Eigen::HouseholderQR<Matrix>(random_matrix(rng, m, m)).householderQ();
  Vector sv(e);
  for (Eigen::Index i = 0; i < e; ++i) sv(i) = rng.uniform(0.5, 1.0);
  if (seed % 2 == 1 && e >= 2) sv(e - 1) = 0.0;
  Matrix b_mat = u * sv.asDiagonal() * v.leftCols(e).transpose();
  Vector b = b_mat * rng.normal_vector(m);
  return make_quadratic_problem(std::move(r_mat), std::move(r), std::move(b_mat), std::move(b));
}

inline Network random_connected_network(Rng& rng, int k, double p) {
  return erdos_renyi(k, p, static_cast<std::uint64_t>(rng.uniform_int(0, 1 << 30))).network;
}

// K agents with strongly convex quadratics on a random connected graph.
inline MultiAgentProblem random_multi_agent(std::uint64_t seed, int k, Eigen::Index m) {
  Rng rng(seed * 104729 + 3);
  Network net = random_connected_network(rng, k, 0.4);
  std::vector<QuadraticCost> costs;
  for (int a = 0; a < k; ++a) {
    costs.emplace_back(random_spd_half(rng, m, rng.uniform(0.5, 1.5), rng.uniform(2.0, 6.0)),
                       rng.normal_vector(m));
  }
  return MultiAgentProblem(std::move(net), std::move(costs));
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace saddlekit::testing
