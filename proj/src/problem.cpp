#include "saddlekit/problem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace saddlekit {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() {
  // 53 random bits mapped onto [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::uniform_open(double lo, double hi) {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return lo + (hi - lo) * u;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal() {
  const double u1 = uniform_open(0.0, 1.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector Rng::normal_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

QuadraticCost::QuadraticCost(Matrix quadratic_term, Vector linear_term)
    : linear_(std::move(linear_term)) {
  if (quadratic_term.rows() != quadratic_term.cols() ||
      quadratic_term.rows() != linear_.size() || linear_.size() == 0) {
    throw ConfigError("quadratic cost: R must be M x M and r an M-vector");
  }
  if (!quadratic_term.allFinite() || !linear_.allFinite()) {
    throw ConfigError("quadratic cost: non-finite entries");
  }
  quadratic_ = 0.5 * (quadratic_term + quadratic_term.transpose());
}

double QuadraticCost::value(const Vector& w) const {
  return w.dot(quadratic_ * w) + linear_.dot(w);
}

Vector QuadraticCost::gradient(const Vector& w) const {
  return 2.0 * (quadratic_ * w) + linear_;
}

EqualityConstrainedProblem::EqualityConstrainedProblem(
    std::shared_ptr<const CostFunction> cost, Matrix constraint_matrix,
    Vector constraint_rhs)
    : cost_(std::move(cost)),
      constraint_matrix_(std::move(constraint_matrix)),
      constraint_rhs_(std::move(constraint_rhs)) {
  if (!cost_) throw ConfigError("problem: missing cost");
  if (cost_->dim() < 1) throw ConfigError("problem: M must be >= 1");
  if (constraint_matrix_.rows() < 1) throw ConfigError("problem: E must be >= 1");
  if (constraint_matrix_.cols() != cost_->dim()) {
    throw ConfigError("problem: B must have M columns");
  }
  if (constraint_rhs_.size() != constraint_matrix_.rows()) {
    throw ConfigError("problem: b must have E entries");
  }
  if (!constraint_matrix_.allFinite() || !constraint_rhs_.allFinite()) {
    throw ConfigError("problem: non-finite constraint data");
  }
}

const QuadraticCost* EqualityConstrainedProblem::quadratic() const {
  return dynamic_cast<const QuadraticCost*>(cost_.get());
}

Vector EqualityConstrainedProblem::constraint_residual(const Vector& w) const {
  return constraint_matrix_ * w - constraint_rhs_;
}

Vector EqualityConstrainedProblem::augmented_gradient(const Vector& w,
                                                      double rho) const {
  Vector g = cost_->gradient(w);
  if (rho != 0.0) {
    g.noalias() += rho * (constraint_matrix_.transpose() * constraint_residual(w));
  }
  return g;
}

double EqualityConstrainedProblem::augmented_value(const Vector& w,
                                                   double rho) const {
  return cost_->value(w) + 0.5 * rho * constraint_residual(w).squaredNorm();
}

double EqualityConstrainedProblem::feasibility_gap() const {
  const Vector x =
      constraint_matrix_.completeOrthogonalDecomposition().solve(constraint_rhs_);
  return (constraint_matrix_ * x - constraint_rhs_).norm() /
         (1.0 + constraint_rhs_.norm());
}

void require_feasible(const EqualityConstrainedProblem& problem,
                      double tolerance) {
  const double gap = problem.feasibility_gap();
  if (!(gap <= tolerance)) {
    std::ostringstream os;
    os << "infeasible constraints: b is not in Range(B) (relative residual "
       << gap << ")";
    throw ConfigError(os.str());
  }
}

double gradient_check(const CostFunction& cost, int points, Rng& rng) {
  double worst = 0.0;
  const Eigen::Index n = cost.dim();
  for (int p = 0; p < points; ++p) {
    const Vector w = rng.normal_vector(n);
    const double h = 1e-6 * (1.0 + w.norm());
    const Vector g = cost.gradient(w);
    Vector fd(n);
    Vector probe = w;
    for (Eigen::Index i = 0; i < n; ++i) {
      probe(i) = w(i) + h;
      const double up = cost.value(probe);
      probe(i) = w(i) - h;
      const double down = cost.value(probe);
      probe(i) = w(i);
      fd(i) = (up - down) / (2.0 * h);
    }
    worst = std::max(worst, (fd - g).norm() / std::max(1.0, g.norm()));
  }
  return worst;
}

EqualityConstrainedProblem make_quadratic_problem(Matrix R, Vector r, Matrix B,
                                                  Vector b) {
  return EqualityConstrainedProblem(
      std::make_shared<QuadraticCost>(std::move(R), std::move(r)), std::move(B),
      std::move(b));
}

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                        const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ConfigError(std::string("problem JSON: '") + name + "' has wrong row count");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(std::string("problem JSON: '") + name +
                        "' has wrong column count");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[c].get<double>();
  }
  return m;
}

Vector vector_from_json(const json& j, Eigen::Index n, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw ConfigError(std::string("problem JSON: '") + name + "' has wrong length");
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

std::string problem_to_json(const EqualityConstrainedProblem& problem) {
  const QuadraticCost* q = problem.quadratic();
  if (q == nullptr) throw ConfigError("only quadratic problems serialize to JSON");
  json j;
  j["M"] = problem.dim_primal();
  j["E"] = problem.dim_constraints();
  j["R"] = matrix_to_json(q->quadratic_term());
  j["r"] = vector_to_json(q->linear_term());
  j["B"] = matrix_to_json(problem.constraint_matrix());
  j["b"] = vector_to_json(problem.constraint_rhs());
  return j.dump(2);
}

EqualityConstrainedProblem problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("problem JSON: ") + e.what());
  }
  try {
    const auto m = j.at("M").get<Eigen::Index>();
    const auto e = j.at("E").get<Eigen::Index>();
    if (m < 1 || e < 1) throw ConfigError("problem JSON: M and E must be >= 1");
    return make_quadratic_problem(matrix_from_json(j.at("R"), m, m, "R"),
                                  vector_from_json(j.at("r"), m, "r"),
                                  matrix_from_json(j.at("B"), e, m, "B"),
                                  vector_from_json(j.at("b"), e, "b"));
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("problem JSON: ") + ex.what());
  }
}

EqualityConstrainedProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return problem_from_json(buffer.str());
}

void save_problem(const EqualityConstrainedProblem& problem,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write problem file " + path.string());
  out << problem_to_json(problem) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace saddlekit
