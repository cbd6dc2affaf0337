#include "oscidisc/netsim/adjacency.hpp"

#include "oscidisc/common.hpp"
#include "oscidisc/rng.hpp"

#include <cmath>

namespace oscidisc::netsim {

AdjacencyMatrix::AdjacencyMatrix(int n)
    : n_(n), bits_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0),
      neighbors_(static_cast<std::size_t>(n)) {
  if (n < 0) throw ArgumentError("node count must be non-negative");
}

AdjacencyMatrix AdjacencyMatrix::from_dense(const Eigen::MatrixXi& dense) {
  if (dense.rows() != dense.cols()) throw ArgumentError("adjacency must be square");
  const int n = static_cast<int>(dense.rows());
  AdjacencyMatrix out(n);
  for (int i = 0; i < n; ++i) {
    if (dense(i, i) != 0) throw ArgumentError("adjacency diagonal must be zero");
    for (int j = i + 1; j < n; ++j) {
      const int a = dense(i, j);
      if (a != dense(j, i)) throw ArgumentError("adjacency must be symmetric");
      if (a != 0 && a != 1) throw ArgumentError("adjacency entries must be 0 or 1");
      if (a) out.connect(i, j);
    }
  }
  return out;
}

void AdjacencyMatrix::connect(int i, int j) {
  if (i == j) throw ArgumentError("self loops are not allowed");
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ArgumentError("node index out of range");
  auto& ij = bits_[static_cast<std::size_t>(i) * n_ + j];
  if (ij) return;
  ij = 1;
  bits_[static_cast<std::size_t>(j) * n_ + i] = 1;
  neighbors_[static_cast<std::size_t>(i)].push_back(j);
  neighbors_[static_cast<std::size_t>(j)].push_back(i);
  ++edges_;
}

Eigen::MatrixXi AdjacencyMatrix::dense() const {
  Eigen::MatrixXi out = Eigen::MatrixXi::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j : neighbors(i)) out(i, j) = 1;
  return out;
}

AdjacencyMatrix build_er_adjacency(int n, double p, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("build_er_adjacency: n must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("build_er_adjacency: p must lie in [0, 1]");
  AdjacencyMatrix adj(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // one draw per pair keeps the pair -> draw mapping fixed for every p
      if (rng.uniform() < p) adj.connect(i, j);
    }
  }
  return adj;
}

AdjacencyMatrix complete_graph(int n) {
  AdjacencyMatrix adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) adj.connect(i, j);
  return adj;
}

}  // namespace oscidisc::netsim
