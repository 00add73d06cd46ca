#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "saddlekit/problem.hpp"
#include "saddlekit/reference.hpp"
#include "saddlekit/spectral.hpp"

namespace saddlekit {

// Smoothness and strong-convexity constants of J_rho = J + rho/2 ||Bw - b||^2.
struct RegularityConstants {
  double delta = 0.0;      // smoothness of J
  double nu = 0.0;         // strong convexity of J, 0 if absent
  double rho = 0.0;
  double delta_rho = 0.0;  // delta + rho sigma_max(B)^2
  double nu_rho = 0.0;     // strong convexity of J_rho w.r.t. w*

  // Validates 0 < nu_rho <= delta_rho and fills delta_rho.
  static RegularityConstants make(double delta, double nu, double rho,
                                  double sigma_max, double nu_rho);
};

// Exact constants for a quadratic cost: delta = lambda_max(2R),
// nu = max(lambda_min(2R), 0), nu_rho = lambda_min(2R + rho B'B).
// Throws AssumptionError when nu_rho <= 0.
RegularityConstants quadratic_regularity(const EqualityConstrainedProblem& problem,
                                         double rho);

struct RegularitySample {
  double radius = 0.0;
  double strong_convexity_margin = 0.0;  // lhs - nu_rho ||x - w*||^2
  double smoothness_margin = 0.0;        // delta_rho ||x - y|| - ||g(x) - g(y)||
  bool strong_convexity_ok = false;
  bool smoothness_ok = false;
};

struct RegularityReport {
  std::vector<RegularitySample> samples;
  // Populated for quadratic costs only.
  std::optional<double> hessian_delta;
  std::optional<double> hessian_nu;
  bool hessian_constants_ok = true;

  bool all_passed() const;
  int failures() const;
};

// Sample-tests the strong-convexity-at-w* and smoothness inequalities of
// `claimed` at random points around w* (radii cycling through 1, 10, 0.1).
RegularityReport verify_regularity(const EqualityConstrainedProblem& problem,
                                   const SaddleReference& reference,
                                   const RegularityConstants& claimed,
                                   int sample_count, std::uint64_t seed = 0);

}  // namespace saddlekit
