#include "saddlekit/network.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace saddlekit {

Network::Network(int node_count, const std::vector<std::pair<int, int>>& edges)
    : node_count_(node_count), neighbors_(node_count > 0 ? node_count : 0) {
  if (node_count < 2) throw ConfigError("network: need at least 2 nodes");
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= node_count || v >= node_count) {
      throw ConfigError("network: edge endpoint out of range");
    }
    if (u == v) throw ConfigError("network: self-loops are not allowed");
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [u, v] : edges_) {
    neighbors_[u].push_back(v);
    neighbors_[v].push_back(u);
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());
}

bool Network::adjacent(int u, int v) const {
  const auto& n = neighbors_.at(u);
  return std::binary_search(n.begin(), n.end(), v);
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> Network::adjacency() const {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(node_count_,
                                                                    node_count_, false);
  for (auto [u, v] : edges_) {
    adj(u, v) = true;
    adj(v, u) = true;
  }
  return adj;
}

bool Network::connected() const {
  std::vector<bool> seen(node_count_, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int k = frontier.front();
    frontier.pop();
    for (int s : neighbors_[k]) {
      if (!seen[s]) {
        seen[s] = true;
        ++reached;
        frontier.push(s);
      }
    }
  }
  return reached == node_count_;
}

GeneratedNetwork erdos_renyi(int node_count, double edge_probability,
                             std::uint64_t seed, int max_attempts) {
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw ConfigError("erdos_renyi: edge probability must be in (0, 1]");
  }
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    Rng rng(s);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < node_count; ++u) {
      for (int v = u + 1; v < node_count; ++v) {
        if (rng.uniform() < edge_probability) edges.emplace_back(u, v);
      }
    }
    Network net(node_count, edges);
    if (net.connected()) return {std::move(net), s, attempt + 1};
  }
  throw ConfigError("erdos_renyi: no connected graph after " +
                    std::to_string(max_attempts) + " attempts");
}

std::string network_to_edge_list(const Network& network) {
  std::ostringstream os;
  os << network.node_count() << '\n';
  for (auto [u, v] : network.edges()) os << u << ' ' << v << '\n';
  return os.str();
}

Network network_from_edge_list(const std::string& text) {
  std::istringstream in(text);
  int k = 0;
  if (!(in >> k)) throw ConfigError("edge list: missing node count");
  std::vector<std::pair<int, int>> edges;
  int u = 0;
  int v = 0;
  while (in >> u) {
    if (!(in >> v)) throw ConfigError("edge list: dangling endpoint");
    edges.emplace_back(u, v);
  }
  if (!in.eof()) throw ConfigError("edge list: malformed entry");
  return Network(k, edges);
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return network_from_edge_list(buffer.str());
}

void save_network(const Network& network, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write edge list " + path.string());
  out << network_to_edge_list(network);
  if (!out) throw IoError("write failed for " + path.string());
}

CombinationMatrix metropolis_weights(const Network& network) {
  if (!network.connected()) {
    throw ConfigError("metropolis_weights: network is not connected");
  }
  const int k = network.node_count();
  Matrix a = Matrix::Zero(k, k);
  for (auto [u, v] : network.edges()) {
    const double w = 1.0 / (1.0 + std::max(network.degree(u), network.degree(v)));
    a(u, v) = w;
    a(v, u) = w;
  }
  for (int i = 0; i < k; ++i) {
    double off = 0.0;
    for (int s : network.neighbors(i)) off += a(s, i);
    a(i, i) = 1.0 - off;
  }
  return {std::move(a)};
}

CombinationCheck check_combination_matrix(const CombinationMatrix& combination,
                                          const Network& network, double tolerance) {
  const Matrix& a = combination.weights;
  const int k = network.node_count();
  CombinationCheck check;
  if (a.rows() != k || a.cols() != k) return check;

  check.symmetric = (a - a.transpose()).cwiseAbs().maxCoeff() <= tolerance;
  check.doubly_stochastic =
      (a.rowwise().sum().array() - 1.0).abs().maxCoeff() <= tolerance &&
      (a.colwise().sum().array() - 1.0).abs().maxCoeff() <= tolerance;
  check.nonnegative = a.minCoeff() >= 0.0;

  check.respects_topology = true;
  for (int s = 0; s < k; ++s) {
    for (int t = 0; t < k; ++t) {
      if (s != t && !network.adjacent(s, t) && a(s, t) != 0.0) {
        check.respects_topology = false;
      }
    }
  }

  // Track the zero pattern of A^p with boolean products to avoid underflow.
  using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
  const BoolMatrix pattern = (a.array() > 0.0).matrix();
  BoolMatrix power = pattern;
  for (int p = 1; p <= k && !check.primitive; ++p) {
    if (power.all()) {
      check.primitive = true;
      break;
    }
    BoolMatrix next = BoolMatrix::Constant(k, k, false);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        for (int l = 0; l < k; ++l) {
          if (power(i, l) && pattern(l, j)) {
            next(i, j) = true;
            break;
          }
        }
      }
    }
    power = std::move(next);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix::Identity(k, k) - a,
                                            Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();  // ascending
  check.second_smallest_eigenvalue = ev(1);
  check.simple_zero_eigenvalue = std::abs(ev(0)) <= 1e-10 && ev(1) > 1e-10;
  return check;
}

}  // namespace saddlekit
