#pragma once

#include "saddlekit/problem.hpp"

namespace saddlekit {

// The saddle point (w*, lambda*_b) with lambda*_b the unique optimal dual
// lying in Range(B).
struct SaddleReference {
  Vector w_star;
  Vector lambda_star_b;
  double kkt_stationarity_residual = 0.0;  // ||grad J(w*) + B' lambda*_b||
  double kkt_feasibility_residual = 0.0;   // ||B w* - b||
};

// Direct dense solve of [[2R, B'], [B, 0]] (w, lambda) = (-r, b) for a
// quadratic cost. Throws AssumptionError when the minimizer is not unique.
SaddleReference solve_kkt_reference(const EqualityConstrainedProblem& problem);

// Minimum-norm solution of B' lambda = -gradient. Throws AssumptionError when
// the system is inconsistent beyond `tolerance` (relative to 1 + ||gradient||).
Vector range_space_dual(const Vector& gradient_at_wstar, const Matrix& matrix,
                        double tolerance = 1e-8);

}  // namespace saddlekit
