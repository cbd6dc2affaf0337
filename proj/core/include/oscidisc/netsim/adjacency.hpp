#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace oscidisc::netsim {

/// Symmetric, unweighted, hollow adjacency matrix with cached neighbour lists.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(int n = 0);

  /// Validates symmetry, 0/1 entries and a zero diagonal.
  static AdjacencyMatrix from_dense(const Eigen::MatrixXi& dense);

  int size() const noexcept { return n_; }
  bool operator()(int i, int j) const { return bits_[static_cast<std::size_t>(i) * n_ + j] != 0; }

  /// Adds the undirected edge {i, j}; i != j.
  void connect(int i, int j);

  const std::vector<int>& neighbors(int i) const { return neighbors_[static_cast<std::size_t>(i)]; }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  std::size_t edge_count() const noexcept { return edges_; }

  Eigen::MatrixXi dense() const;

 private:
  int n_;
  std::size_t edges_ = 0;
  std::vector<std::uint8_t> bits_;
  std::vector<std::vector<int>> neighbors_;
};

/// Erdős–Rényi G(n, p): each unordered pair is an edge independently with
/// probability p. Deterministic in `seed`.
AdjacencyMatrix build_er_adjacency(int n, double p, std::uint64_t seed);

/// Complete graph K_n.
AdjacencyMatrix complete_graph(int n);

}  // namespace oscidisc::netsim
