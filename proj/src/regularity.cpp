#include "saddlekit/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace saddlekit {

RegularityConstants RegularityConstants::make(double delta, double nu, double rho,
                                              double sigma_max, double nu_rho) {
  if (!(delta > 0.0)) throw ConfigError("regularity: delta must be positive");
  if (!(nu >= 0.0)) throw ConfigError("regularity: nu must be nonnegative");
  if (!(rho >= 0.0)) throw ConfigError("regularity: rho must be nonnegative");
  RegularityConstants c;
  c.delta = delta;
  c.nu = nu;
  c.rho = rho;
  c.delta_rho = delta + rho * sigma_max * sigma_max;
  c.nu_rho = nu_rho;
  if (!(nu_rho > 0.0 && nu_rho <= c.delta_rho)) {
    std::ostringstream os;
    os << "regularity: need 0 < nu_rho <= delta_rho (nu_rho = " << nu_rho
       << ", delta_rho = " << c.delta_rho << ")";
    throw AssumptionError(os.str());
  }
  return c;
}

RegularityConstants quadratic_regularity(const EqualityConstrainedProblem& problem,
                                         double rho) {
  const QuadraticCost* q = problem.quadratic();
  if (q == nullptr) throw ConfigError("quadratic_regularity needs a quadratic cost");
  const Matrix& B = problem.constraint_matrix();
  const Matrix H = q->hessian();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  const double delta = eig.eigenvalues().maxCoeff();
  const double nu = std::max(eig.eigenvalues().minCoeff(), 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig_rho(H + rho * B.transpose() * B,
                                                Eigen::EigenvaluesOnly);
  const double nu_rho = eig_rho.eigenvalues().minCoeff();
  const double sigma_max = Eigen::JacobiSVD<Matrix>(B).singularValues()(0);
  if (!(delta > 0.0)) throw AssumptionError("quadratic cost has no positive curvature");
  if (!(nu_rho > 0.0)) {
    std::ostringstream os;
    os << "J_rho is not strongly convex at rho = " << rho
       << " (lambda_min = " << nu_rho << ")";
    throw AssumptionError(os.str());
  }
  return RegularityConstants::make(delta, nu, rho, sigma_max, nu_rho);
}

bool RegularityReport::all_passed() const {
  return failures() == 0 && hessian_constants_ok;
}

int RegularityReport::failures() const {
  return static_cast<int>(std::count_if(
      samples.begin(), samples.end(), [](const RegularitySample& s) {
        return !(s.strong_convexity_ok && s.smoothness_ok);
      }));
}

RegularityReport verify_regularity(const EqualityConstrainedProblem& problem,
                                   const SaddleReference& reference,
                                   const RegularityConstants& claimed,
                                   int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw ConfigError("verify_regularity: sample_count must be >= 1");
  constexpr double kRadii[] = {1.0, 10.0, 0.1};
  constexpr double kSlack = 1e-10;

  Rng rng(seed);
  const Eigen::Index m = problem.dim_primal();
  const double rho = claimed.rho;
  const Vector& w_star = reference.w_star;
  const Vector g_star = problem.augmented_gradient(w_star, rho);

  RegularityReport report;
  report.samples.reserve(static_cast<std::size_t>(sample_count));
  for (int i = 0; i < sample_count; ++i) {
    RegularitySample s;
    s.radius = kRadii[i % 3];
    const Vector x = w_star + s.radius * rng.normal_vector(m);
    const Vector y = w_star + s.radius * rng.normal_vector(m);
    const Vector gx = problem.augmented_gradient(x, rho);
    const Vector gy = problem.augmented_gradient(y, rho);

    const Vector dx = x - w_star;
    const double scale_sc = dx.squaredNorm();
    s.strong_convexity_margin = dx.dot(gx - g_star) - claimed.nu_rho * scale_sc;
    s.strong_convexity_ok =
        s.strong_convexity_margin >= -kSlack * std::max(1.0, claimed.nu_rho * scale_sc);

    const double dist = (x - y).norm();
    s.smoothness_margin = claimed.delta_rho * dist - (gx - gy).norm();
    s.smoothness_ok =
        s.smoothness_margin >= -kSlack * std::max(1.0, claimed.delta_rho * dist);
    report.samples.push_back(s);
  }

  if (const QuadraticCost* q = problem.quadratic()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q->hessian(), Eigen::EigenvaluesOnly);
    report.hessian_delta = eig.eigenvalues().maxCoeff();
    report.hessian_nu = std::max(eig.eigenvalues().minCoeff(), 0.0);
    const double tol = 1e-9 * std::max(1.0, *report.hessian_delta);
    report.hessian_constants_ok = claimed.delta >= *report.hessian_delta - tol &&
                                  claimed.nu <= *report.hessian_nu + tol;
  }
  return report;
}

}  // namespace saddlekit
