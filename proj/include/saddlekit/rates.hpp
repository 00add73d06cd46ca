#pragma once

#include <optional>
#include <string>

#include "saddlekit/problem.hpp"
#include "saddlekit/regularity.hpp"
#include "saddlekit/spectral.hpp"

namespace saddlekit {

enum class BoundsRegime { kIncremental, kNonIncrementalEta0 };

// Admissible step sizes: mu_w < mu_w_bound, mu_lambda <= mu_lambda_bound.
struct StepSizeBounds {
  double mu_w_bound = 0.0;
  double mu_lambda_bound = 0.0;
  BoundsRegime regime = BoundsRegime::kIncremental;
  // Non-incremental eta = 0 only: constants of the equivalent incremental
  // recursion on J' = J - mu_l/2 ||Bw - b||^2, evaluated at mu_lambda_bound.
  std::optional<double> delta_prime;
  std::optional<double> nu_prime;

  bool admits(double mu_w, double mu_lambda) const;
};

// Incremental regime: mu_w < 1/delta_rho, mu_l <= nu_rho / sigma_max^2.
// Non-incremental eta = 0: mu_l <= nu / (2 sigma_max^2) and
// mu_w < 1 / (delta - mu_l sigma_min^2) at that mu_l.
StepSizeBounds step_size_bounds(const RegularityConstants& constants,
                                const SpectralInfo& spectral,
                                BoundsRegime regime);

// Constants (delta', nu') of J - mu_l/2 ||Bw - b||^2 given those of J.
// Throws AssumptionError unless nu' > 0.
RegularityConstants shifted_constants(const RegularityConstants& constants,
                                      const SpectralInfo& spectral,
                                      double mu_lambda);

struct RateReport {
  double gamma = 0.0;
  double gamma_primal = 0.0;  // 1 - mu_w nu_rho (1 - mu_w delta_rho)
  double gamma_dual = 0.0;    // 1 - mu_w mu_l sigma_nonzero^2
  double c_w = 0.0;           // 1 - mu_w mu_l sigma_max^2
  double c_lambda = 0.0;      // mu_w / mu_l
  double kappa = 0.0;         // delta_rho / nu_rho
};

// Contraction factor of the Lyapunov functional. Throws ConfigError naming
// the violated bound when the steps are inadmissible.
RateReport theoretical_rate(const RegularityConstants& constants,
                            const SpectralInfo& spectral, double mu_w,
                            double mu_lambda);

// Half-bound default steps: mu_w = 0.5 / delta_rho, mu_l = nu_rho / sigma_max^2.
std::pair<double, double> auto_step_sizes(const RegularityConstants& constants,
                                          const SpectralInfo& spectral);

// Maps a non-incremental run (eta, mu_l, w_init, lambda'_init) onto the
// incremental recursion with the same primal iterates.
struct IncrementalEquivalent {
  double rho = 0.0;
  Vector lambda_init;
  // eta < mu_l: rho is negative and the incremental recursion runs on the
  // shifted cost J' (use shifted_constants for its rates).
  bool negative_penalty = false;
};

IncrementalEquivalent to_incremental_equivalent(
    double eta, double mu_lambda, const Vector& w_init,
    const Vector& lambda_prime_init, const EqualityConstrainedProblem& problem);

}  // namespace saddlekit
