#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "saddlekit/common.hpp"

namespace saddlekit {

// Smooth cost J: R^M -> R, queried through value and gradient.
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double value(const Vector& w) const = 0;
  virtual Vector gradient(const Vector& w) const = 0;
};

// J(w) = w'Rw + r'w with R symmetrized at construction, so grad J = 2Rw + r
// and the Hessian is 2R.
class QuadraticCost final : public CostFunction {
 public:
  QuadraticCost(Matrix quadratic_term, Vector linear_term);

  Eigen::Index dim() const override { return linear_.size(); }
  double value(const Vector& w) const override;
  Vector gradient(const Vector& w) const override;

  const Matrix& quadratic_term() const { return quadratic_; }
  const Vector& linear_term() const { return linear_; }
  Matrix hessian() const { return 2.0 * quadratic_; }

 private:
  Matrix quadratic_;
  Vector linear_;
};

// minimize J(w) subject to Bw = b.
class EqualityConstrainedProblem {
 public:
  EqualityConstrainedProblem(std::shared_ptr<const CostFunction> cost,
                             Matrix constraint_matrix, Vector constraint_rhs);

  Eigen::Index dim_primal() const { return cost_->dim(); }
  Eigen::Index dim_constraints() const { return constraint_matrix_.rows(); }

  const CostFunction& cost() const { return *cost_; }
  std::shared_ptr<const CostFunction> cost_ptr() const { return cost_; }
  // Non-null only when the cost is quadratic.
  const QuadraticCost* quadratic() const;

  const Matrix& constraint_matrix() const { return constraint_matrix_; }
  const Vector& constraint_rhs() const { return constraint_rhs_; }

  // Bw - b.
  Vector constraint_residual(const Vector& w) const;
  // grad J(w) + rho B'(Bw - b).
  Vector augmented_gradient(const Vector& w, double rho) const;
  // J(w) + rho/2 ||Bw - b||^2.
  double augmented_value(const Vector& w, double rho) const;

  // Least-squares residual of Bx = b relative to 1 + ||b||.
  double feasibility_gap() const;

 private:
  std::shared_ptr<const CostFunction> cost_;
  Matrix constraint_matrix_;
  Vector constraint_rhs_;
};

// Throws ConfigError unless b lies in Range(B) up to `tolerance`.
void require_feasible(const EqualityConstrainedProblem& problem,
                      double tolerance = 1e-9);

// Largest relative error between the analytic gradient and central finite
// differences (step 1e-6 (1 + ||w||)) at `points` random locations.
double gradient_check(const CostFunction& cost, int points, Rng& rng);

EqualityConstrainedProblem make_quadratic_problem(Matrix R, Vector r, Matrix B,
                                                  Vector b);

// {"M":..,"E":..,"R":[[..]],"r":[..],"B":[[..]],"b":[..]}, row-major.
std::string problem_to_json(const EqualityConstrainedProblem& problem);
EqualityConstrainedProblem problem_from_json(const std::string& text);

EqualityConstrainedProblem load_problem(const std::filesystem::path& path);
void save_problem(const EqualityConstrainedProblem& problem,
                  const std::filesystem::path& path);

}  // namespace saddlekit
