#include "saddlekit/rates.hpp"

#include <sstream>

namespace saddlekit {

bool StepSizeBounds::admits(double mu_w, double mu_lambda) const {
  return mu_w > 0.0 && mu_lambda > 0.0 && mu_w < mu_w_bound &&
         mu_lambda <= mu_lambda_bound * (1.0 + 1e-12);
}

StepSizeBounds step_size_bounds(const RegularityConstants& constants,
                                const SpectralInfo& spectral, BoundsRegime regime) {
  const double smax_sq = spectral.sigma_max * spectral.sigma_max;
  if (!(smax_sq > 0.0)) throw ConfigError("step_size_bounds: sigma_max must be positive");
  StepSizeBounds bounds;
  bounds.regime = regime;
  if (regime == BoundsRegime::kIncremental) {
    if (!(constants.nu_rho > 0.0)) throw AssumptionError("strong convexity required");
    bounds.mu_w_bound = 1.0 / constants.delta_rho;
    bounds.mu_lambda_bound = constants.nu_rho / smax_sq;
    return bounds;
  }
  if (!(constants.nu > 0.0)) throw AssumptionError("strong convexity required");
  // nu' = nu - mu_l sigma_max^2 > 0 needs mu_l < nu / sigma_max^2; the bound
  // below is the stricter of the two.
  bounds.mu_lambda_bound = constants.nu / (2.0 * smax_sq);
  const double delta_prime =
      constants.delta - bounds.mu_lambda_bound * spectral.sigma_min * spectral.sigma_min;
  bounds.mu_w_bound = 1.0 / delta_prime;
  bounds.delta_prime = delta_prime;
  bounds.nu_prime = constants.nu - bounds.mu_lambda_bound * smax_sq;
  return bounds;
}

RegularityConstants shifted_constants(const RegularityConstants& constants,
                                      const SpectralInfo& spectral, double mu_lambda) {
  const double delta_prime =
      constants.delta - mu_lambda * spectral.sigma_min * spectral.sigma_min;
  const double nu_prime =
      constants.nu - mu_lambda * spectral.sigma_max * spectral.sigma_max;
  if (!(nu_prime > 0.0)) {
    std::ostringstream os;
    os << "shifted cost is not strongly convex (nu' = " << nu_prime
       << "); need mu_lambda < nu / sigma_max^2";
    throw AssumptionError(os.str());
  }
  RegularityConstants c;
  c.delta = delta_prime;
  c.nu = nu_prime;
  c.rho = 0.0;
  c.delta_rho = delta_prime;
  c.nu_rho = nu_prime;
  return c;
}

RateReport theoretical_rate(const RegularityConstants& constants,
                            const SpectralInfo& spectral, double mu_w,
                            double mu_lambda) {
  if (!(mu_w > 0.0) || !(mu_lambda > 0.0)) {
    throw ConfigError("inadmissible step sizes: steps must be positive");
  }
  const StepSizeBounds bounds =
      step_size_bounds(constants, spectral, BoundsRegime::kIncremental);
  if (!(mu_w < bounds.mu_w_bound)) {
    std::ostringstream os;
    os << "inadmissible step sizes: μ_w exceeds 1/δ_ρ (mu_w = " << mu_w
       << ", bound " << bounds.mu_w_bound << ")";
    throw ConfigError(os.str());
  }
  // Inclusive bound; allow a few ulps so a step set exactly at it survives rounding.
  if (!(mu_lambda <= bounds.mu_lambda_bound * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << "inadmissible step sizes: μ_λ exceeds ν_ρ/σ²_max (mu_lambda = " << mu_lambda
       << ", bound " << bounds.mu_lambda_bound << ")";
    throw ConfigError(os.str());
  }
  const double smax_sq = spectral.sigma_max * spectral.sigma_max;
  const double snz_sq = spectral.sigma_min_nonzero * spectral.sigma_min_nonzero;
  RateReport r;
  r.gamma_primal = 1.0 - mu_w * constants.nu_rho * (1.0 - mu_w * constants.delta_rho);
  r.gamma_dual = 1.0 - mu_w * mu_lambda * snz_sq;
  r.gamma = std::max(r.gamma_primal, r.gamma_dual);
  r.c_w = 1.0 - mu_w * mu_lambda * smax_sq;
  r.c_lambda = mu_w / mu_lambda;
  r.kappa = constants.delta_rho / constants.nu_rho;
  return r;
}

std::pair<double, double> auto_step_sizes(const RegularityConstants& constants,
                                          const SpectralInfo& spectral) {
  return {0.5 / constants.delta_rho,
          constants.nu_rho / (spectral.sigma_max * spectral.sigma_max)};
}

IncrementalEquivalent to_incremental_equivalent(
    double eta, double mu_lambda, const Vector& w_init,
    const Vector& lambda_prime_init, const EqualityConstrainedProblem& problem) {
  if (!(eta >= 0.0) || !(mu_lambda > 0.0)) {
    throw ConfigError("to_incremental_equivalent: need eta >= 0 and mu_lambda > 0");
  }
  if (w_init.size() != problem.dim_primal() ||
      lambda_prime_init.size() != problem.dim_constraints()) {
    throw ConfigError("to_incremental_equivalent: dimension mismatch");
  }
  IncrementalEquivalent out;
  out.rho = eta - mu_lambda;
  out.negative_penalty = out.rho < 0.0;
  out.lambda_init = lambda_prime_init + mu_lambda * problem.constraint_residual(w_init);
  return out;
}

}  // namespace saddlekit
