#include "saddlekit/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace saddlekit {

namespace {

Matrix kron_identity(const Matrix& s, Eigen::Index m) {
  const Eigen::Index k = s.rows();
  Matrix out = Matrix::Zero(k * m, k * m);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (s(i, j) == 0.0) continue;
      for (Eigen::Index a = 0; a < m; ++a) out(i * m + a, j * m + a) = s(i, j);
    }
  }
  return out;
}

}  // namespace

Vector ConsensusOperators::mix(const Vector& stacked) const {
  const Eigen::Index m = block_dim;
  const Matrix& a = combination.weights;
  Vector out(stacked.size());
  for (int k = 0; k < network.node_count(); ++k) {
    auto block = out.segment(k * m, m);
    block = a(k, k) * stacked.segment(k * m, m);
    for (int s : network.neighbors(k)) block += a(s, k) * stacked.segment(s * m, m);
  }
  return out;
}

Vector ConsensusOperators::consensus_gap(const Vector& stacked) const {
  return stacked - mix(stacked);
}

Vector ConsensusOperators::half_mix(const Vector& stacked) const {
  return 0.5 * (stacked + mix(stacked));
}

Vector ConsensusOperators::apply_laplacian(const Vector& stacked) const {
  const Eigen::Index m = block_dim;
  Vector out(stacked.size());
  for (int k = 0; k < network.node_count(); ++k) {
    auto block = out.segment(k * m, m);
    block = static_cast<double>(network.degree(k)) * stacked.segment(k * m, m);
    for (int s : network.neighbors(k)) block -= stacked.segment(s * m, m);
  }
  return out;
}

ConsensusOperators build_consensus_operators(const Network& network,
                                             const CombinationMatrix& a,
                                             Eigen::Index block_dim) {
  if (block_dim < 1) throw ConfigError("consensus operators: M must be >= 1");
  const int k = network.node_count();
  if (a.weights.rows() != k || a.weights.cols() != k) {
    throw ConfigError("consensus operators: combination matrix must be K x K");
  }
  const Matrix gap = Matrix::Identity(k, k) - a.weights;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gap + gap.transpose()));
  Vector ev = eig.eigenvalues();
  if (ev.minCoeff() < -1e-10) {
    throw ConfigError("I−A not PSD; invalid combination matrix");
  }
  const CombinationCheck check = check_combination_matrix(a, network);
  if (!check.ok()) {
    throw ConfigError(
        "consensus operators: combination matrix must be symmetric, doubly "
        "stochastic, nonnegative, primitive and match the topology");
  }
  // Round-off around the zero eigenvalue would leak into the root as ~1e-8.
  const double floor = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  ev = ev.unaryExpr([floor](double x) { return x < floor ? 0.0 : x; });
  const Matrix root =
      eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();

  Matrix lap = Matrix::Zero(k, k);
  for (auto [u, v] : network.edges()) {
    lap(u, v) = -1.0;
    lap(v, u) = -1.0;
  }
  for (int i = 0; i < k; ++i) lap(i, i) = network.degree(i);

  ConsensusOperators ops{network, a, block_dim, {}, {}, {}, {}};
  ops.b_op = kron_identity(root, block_dim);
  ops.b_sq = kron_identity(gap, block_dim);
  ops.a_bar = kron_identity(0.5 * (Matrix::Identity(k, k) + a.weights), block_dim);
  ops.laplacian = kron_identity(lap, block_dim);
  return ops;
}

double distance_to_consensus(const Vector& stacked, Eigen::Index block_dim) {
  const Eigen::Index k = stacked.size() / block_dim;
  Vector mean = Vector::Zero(block_dim);
  for (Eigen::Index i = 0; i < k; ++i) mean += stacked.segment(i * block_dim, block_dim);
  mean /= static_cast<double>(k);
  double sq = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    sq += (stacked.segment(i * block_dim, block_dim) - mean).squaredNorm();
  }
  return std::sqrt(sq);
}

SpectralInfo consensus_spectrum(const ConsensusOperators& ops) {
  const Eigen::Index k = ops.agents();
  const Eigen::Index m = ops.block_dim;
  const Matrix gap = Matrix::Identity(k, k) - ops.combination.weights;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gap + gap.transpose()),
                                            Eigen::EigenvaluesOnly);
  const Vector sv = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();  // ascending
  SpectralInfo info;
  info.sigma_max = sv(k - 1);
  info.sigma_min = sv(0);
  info.rank_tolerance = info.sigma_max * static_cast<double>(k * m) *
                        std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    for (Eigen::Index a = 0; a < m; ++a) info.singular_values.push_back(sv(i));
    if (sv(i) > info.rank_tolerance) {
      info.rank += m;
      info.sigma_min_nonzero = sv(i);
    }
  }
  return info;
}

MultiAgentProblem::MultiAgentProblem(Network network,
                                     std::vector<QuadraticCost> agent_costs)
    : network_(std::move(network)), costs_(std::move(agent_costs)) {
  if (static_cast<int>(costs_.size()) != network_.node_count()) {
    throw ConfigError("multi-agent problem: need one cost per agent");
  }
  for (const QuadraticCost& c : costs_) {
    if (c.dim() != costs_.front().dim()) {
      throw ConfigError("multi-agent problem: agent costs must share M");
    }
  }
}

Vector MultiAgentProblem::stacked_gradient(const Vector& stacked) const {
  const Eigen::Index m = block_dim();
  Vector g(stacked.size());
  for (Eigen::Index k = 0; k < agents(); ++k) {
    const QuadraticCost& c = costs_[static_cast<std::size_t>(k)];
    g.segment(k * m, m).noalias() = 2.0 * (c.quadratic_term() * stacked.segment(k * m, m));
    g.segment(k * m, m) += c.linear_term();
  }
  return g;
}

EqualityConstrainedProblem MultiAgentProblem::stacked_problem(
    const ConsensusOperators& ops) const {
  const Eigen::Index m = block_dim();
  const Eigen::Index n = agents() * m;
  Matrix r = Matrix::Zero(n, n);
  Vector lin(n);
  for (Eigen::Index k = 0; k < agents(); ++k) {
    const QuadraticCost& c = costs_[static_cast<std::size_t>(k)];
    r.block(k * m, k * m, m, m) = c.quadratic_term();
    lin.segment(k * m, m) = c.linear_term();
  }
  return make_quadratic_problem(std::move(r), std::move(lin), ops.b_op, Vector::Zero(n));
}

Matrix MultiAgentProblem::aggregate_hessian() const {
  Matrix h = Matrix::Zero(block_dim(), block_dim());
  for (const QuadraticCost& c : costs_) h += c.hessian();
  return h;
}

Vector MultiAgentProblem::aggregate_minimizer() const {
  Vector lin = Vector::Zero(block_dim());
  for (const QuadraticCost& c : costs_) lin += c.linear_term();
  const Eigen::LLT<Matrix> llt(aggregate_hessian());
  if (llt.info() != Eigen::Success) {
    throw AssumptionError("aggregate cost is not strongly convex");
  }
  return llt.solve(-lin);
}

Vector MultiAgentProblem::stacked_minimizer() const {
  return aggregate_minimizer().replicate(agents(), 1);
}

double MultiAgentProblem::smoothness() const {
  double delta = 0.0;
  for (const QuadraticCost& c : costs_) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c.hessian(), Eigen::EigenvaluesOnly);
    delta = std::max(delta, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  return delta;
}

std::vector<double> MultiAgentProblem::agent_strong_convexity() const {
  std::vector<double> out;
  out.reserve(costs_.size());
  for (const QuadraticCost& c : costs_) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c.hessian(), Eigen::EigenvaluesOnly);
    out.push_back(eig.eigenvalues().minCoeff());
  }
  return out;
}

double MultiAgentProblem::aggregate_strong_convexity() const {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(
      aggregate_hessian() / static_cast<double>(agents()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double nu_rho_bound(double beta_bar, double delta, double sigma_underbar_sq,
                    double rho, double eta) {
  const double e2 = eta * eta;
  return std::min(beta_bar - 2.0 * delta * eta,
                  rho * sigma_underbar_sq * e2 / (4.0 * (e2 + 1.0)));
}

namespace {

NuRhoEstimate golden_section(double beta_bar, double delta, double s, double rho) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = beta_bar / (2.0 * delta);
  auto f = [&](double eta) { return nu_rho_bound(beta_bar, delta, s, rho, eta); };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  // The maximum sits where the decreasing and increasing branches cross. An
  // interval of 1e-10 still costs ~2*delta*1e-10 in value, which is large
  // relative to small nu, so bisect the branch gap to machine precision.
  auto gap = [&](double eta) {
    const double e2 = eta * eta;
    return (beta_bar - 2.0 * delta * eta) - rho * s * e2 / (4.0 * (e2 + 1.0));
  };
  double a = std::max(0.0, lo - 1e-10);
  double c = std::min(beta_bar / (2.0 * delta), hi + 1e-10);
  if (gap(a) > 0.0 && gap(c) < 0.0) {
    while (true) {
      const double m = 0.5 * (a + c);
      if (m <= a || m >= c) break;
      (gap(m) > 0.0 ? a : c) = m;
    }
    lo = a;
    hi = c;
  }
  NuRhoEstimate out;
  out.eta_star = f(lo) >= f(hi) ? lo : hi;
  out.nu_rho = f(out.eta_star);
  return out;
}

}  // namespace

NuRhoEstimate nu_rho_estimate(double beta_bar, double delta,
                              double sigma_underbar_sq, double rho) {
  if (!(beta_bar > 0.0) || !(delta > 0.0) || !(sigma_underbar_sq > 0.0) ||
      !(rho > 0.0)) {
    throw ConfigError("nu_rho_estimate: beta_bar, delta, sigma^2 and rho must be positive");
  }
  NuRhoEstimate out = golden_section(beta_bar, delta, sigma_underbar_sq, rho);
  const NuRhoEstimate larger =
      golden_section(beta_bar, delta, sigma_underbar_sq, 10.0 * rho);
  out.limit_consistent = out.nu_rho > 0.0 && out.nu_rho < beta_bar &&
                         larger.nu_rho >= out.nu_rho * (1.0 - 1e-9);
  return out;
}

RegularityConstants distributed_constants(const MultiAgentProblem& problem,
                                          const ConsensusOperators& ops, double rho) {
  if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
  const double delta = problem.smoothness();
  const SpectralInfo spec = consensus_spectrum(ops);
  const std::vector<double> betas = problem.agent_strong_convexity();
  const double min_beta = *std::min_element(betas.begin(), betas.end());
  if (rho == 0.0) {
    if (!(min_beta > 0.0)) {
      std::ostringstream os;
      os << "rho = 0 requires every agent cost to be strongly convex (min beta_k = "
         << min_beta << ")";
      throw AssumptionError(os.str());
    }
    return RegularityConstants::make(delta, min_beta, 0.0, spec.sigma_max, min_beta);
  }
  if (min_beta < 0.0) {
    throw AssumptionError(
        "rho > 0 rate certificate requires every agent cost to be convex");
  }
  const double beta_bar = problem.aggregate_strong_convexity();
  if (!(beta_bar > 0.0)) {
    throw AssumptionError("rho > 0 requires a strongly convex aggregate cost");
  }
  const NuRhoEstimate est = nu_rho_estimate(
      beta_bar, delta, spec.sigma_min_nonzero * spec.sigma_min_nonzero, rho);
  return RegularityConstants::make(delta, std::max(min_beta, 0.0), rho, spec.sigma_max,
                                   est.nu_rho);
}

DistributedRateReport distributed_rate_report(const MultiAgentProblem& problem,
                                              const ConsensusOperators& ops,
                                              double rho, double mu_w,
                                              double mu_lambda) {
  DistributedRateReport report;
  report.rho = rho;
  report.constants = distributed_constants(problem, ops, rho);
  const SpectralInfo spec = consensus_spectrum(ops);
  report.rate = theoretical_rate(report.constants, spec, mu_w, mu_lambda);

  const std::vector<double> betas = problem.agent_strong_convexity();
  const double min_beta = *std::min_element(betas.begin(), betas.end());
  if (min_beta > 0.0) report.kappa_l = problem.smoothness() / min_beta;
  if (rho > 0.0) {
    report.kappa_al = report.constants.delta_rho / report.constants.nu_rho;
    report.eta_star =
        nu_rho_estimate(problem.aggregate_strong_convexity(), problem.smoothness(),
                        spec.sigma_min_nonzero * spec.sigma_min_nonzero, rho)
            .eta_star;
  }
  return report;
}

}  // namespace saddlekit
