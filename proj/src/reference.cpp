#include "saddlekit/reference.hpp"

#include <sstream>

#include "saddlekit/spectral.hpp"

namespace saddlekit {

Vector range_space_dual(const Vector& gradient_at_wstar, const Matrix& matrix,
                        double tolerance) {
  if (gradient_at_wstar.size() != matrix.cols()) {
    throw ConfigError("range_space_dual: gradient must have M entries");
  }
  if (gradient_at_wstar.isZero(0.0)) return Vector::Zero(matrix.rows());

  // B = U S V', so the minimum-norm solution of B' l = -g is
  // U_r S_r^{-1} V_r' (-g), which lies in span(U_r) = Range(B).
  Eigen::JacobiSVD<Matrix> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const SpectralInfo info = spectral_quantities(matrix);
  const Eigen::Index r = info.rank;
  const Vector coeffs = (svd.matrixV().leftCols(r).transpose() * (-gradient_at_wstar))
                            .cwiseQuotient(svd.singularValues().head(r));
  Vector lambda = svd.matrixU().leftCols(r) * coeffs;

  const double residual = (matrix.transpose() * lambda + gradient_at_wstar).norm();
  if (!(residual <= tolerance * (1.0 + gradient_at_wstar.norm()))) {
    std::ostringstream os;
    os << "w* fails stationarity: not an optimum (residual " << residual << ")";
    throw AssumptionError(os.str());
  }
  return lambda;
}

SaddleReference solve_kkt_reference(const EqualityConstrainedProblem& problem) {
  const QuadraticCost* q = problem.quadratic();
  if (q == nullptr) throw ConfigError("solve_kkt_reference needs a quadratic cost");
  require_feasible(problem);

  const Matrix& B = problem.constraint_matrix();
  const Vector& b = problem.constraint_rhs();
  const Matrix H = q->hessian();
  const Eigen::Index m = problem.dim_primal();
  const Eigen::Index e = problem.dim_constraints();

  // The minimizer is unique iff the Hessian is positive definite on Null(B).
  const Matrix N = null_space_basis(B);
  if (N.cols() > 0) {
    const Matrix reduced = N.transpose() * H * N;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if (!(eig.eigenvalues().minCoeff() > 1e-10 * scale)) {
      throw AssumptionError(
          "problem violates Assumption 1: Hessian not positive definite on Null(B)");
    }
  }

  Matrix kkt = Matrix::Zero(m + e, m + e);
  kkt.topLeftCorner(m, m) = H;
  kkt.topRightCorner(m, e) = B.transpose();
  kkt.bottomLeftCorner(e, m) = B;
  Vector rhs(m + e);
  rhs << -q->linear_term(), b;

  // Minimum-norm solve; the KKT kernel is {0} x Null(B'), so the dual part of
  // the minimum-norm solution is orthogonal to Null(B').
  const auto cod = kkt.completeOrthogonalDecomposition();
  Vector sol = cod.solve(rhs);
  for (int pass = 0; pass < 2; ++pass) {
    sol += cod.solve(rhs - kkt * sol);
  }

  SaddleReference ref;
  ref.w_star = sol.head(m);
  const Vector grad = q->gradient(ref.w_star);
  ref.lambda_star_b = range_space_dual(grad, B, 1e-6);
  ref.kkt_stationarity_residual = (grad + B.transpose() * ref.lambda_star_b).norm();
  ref.kkt_feasibility_residual = (B * ref.w_star - b).norm();
  return ref;
}

}  // namespace saddlekit
