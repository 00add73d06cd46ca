#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "saddlekit/common.hpp"

namespace saddlekit {

// Static undirected graph over nodes 0..K-1 without self-loops.
class Network {
 public:
  // Throws ConfigError on K < 2, out-of-range endpoints, or self-loops.
  // Duplicate edges are merged.
  Network(int node_count, const std::vector<std::pair<int, int>>& edges);

  int node_count() const { return node_count_; }
  // Sorted (u < v) unique edges.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  // Sorted neighbors of k, excluding k.
  const std::vector<int>& neighbors(int k) const { return neighbors_[k]; }
  int degree(int k) const { return static_cast<int>(neighbors_[k].size()); }
  bool adjacent(int u, int v) const;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency() const;

  bool connected() const;

 private:
  int node_count_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> neighbors_;
};

// G(K, p) draws, retried with the next seed until connected.
struct GeneratedNetwork {
  Network network;
  std::uint64_t seed_used;
  int attempts;
};

GeneratedNetwork erdos_renyi(int node_count, double edge_probability,
                             std::uint64_t seed, int max_attempts = 1000);

// "K\n" followed by one "u v" pair per line, 0-indexed.
std::string network_to_edge_list(const Network& network);
Network network_from_edge_list(const std::string& text);
Network load_network(const std::filesystem::path& path);
void save_network(const Network& network, const std::filesystem::path& path);

// Symmetric doubly stochastic combination matrix A = [a_sk].
struct CombinationMatrix {
  Matrix weights;
};

// a_sk = 1 / (1 + max(d_s, d_k)) for neighbors, a_kk = 1 - sum_{s != k} a_sk.
// Throws ConfigError on a disconnected network.
CombinationMatrix metropolis_weights(const Network& network);

struct CombinationCheck {
  bool symmetric = false;
  bool doubly_stochastic = false;
  bool nonnegative = false;
  bool respects_topology = false;
  bool primitive = false;
  // I - A is PSD and its null space is exactly span(1).
  bool simple_zero_eigenvalue = false;
  double second_smallest_eigenvalue = 0.0;  // of I - A

  bool ok() const {
    return symmetric && doubly_stochastic && nonnegative && respects_topology &&
           primitive && simple_zero_eigenvalue;
  }
};

CombinationCheck check_combination_matrix(const CombinationMatrix& a,
                                          const Network& network,
                                          double tolerance = 1e-12);

}  // namespace saddlekit
