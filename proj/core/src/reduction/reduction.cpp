#include "oscidisc/reduction/reduction.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace oscidisc::reduction {
namespace {

struct Svd {
  Vector values;
  Matrix right;  // d × min(m, d)
};

Svd thin_svd(const Matrix& data) {
  Eigen::BDCSVD<Matrix> svd(data, Eigen::ComputeThinV);
  Svd out{svd.singularValues(), svd.matrixV()};
  // Fix the sign of each mode so its largest-magnitude entry is positive.
  for (Index k = 0; k < out.right.cols(); ++k) {
    Index arg = 0;
    out.right.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.right(arg, k) < 0.0) out.right.col(k) *= -1.0;
  }
  return out;
}

void check_rank(Index rank, Index m, Index d) {
  const Index limit = std::min(m, d);
  if (rank < 1 || rank > limit) {
    std::ostringstream msg;
    msg << "rank " << rank << " outside [1, " << limit << "]";
    throw ArgumentError(msg.str());
  }
}

// Tail sums Σ_{i≥k} σ_i², accumulated from the smallest value up.
std::vector<double> tail_energy(const Vector& sv) {
  std::vector<double> tail(static_cast<std::size_t>(sv.size()) + 1, 0.0);
  for (Index k = sv.size() - 1; k >= 0; --k) {
    tail[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k) + 1] + sv(k) * sv(k);
  }
  return tail;
}

Trajectory coordinates_of(const Trajectory& traj, const Matrix& modes, const Vector& mean) {
  Trajectory coords;
  coords.times = traj.times;
  coords.states = (traj.states.rowwise() - mean.transpose()) * modes;
  if (traj.derivatives) coords.derivatives = (*traj.derivatives) * modes;
  coords.labels = numbered_labels("U_", modes.cols(), 1);
  return coords;
}

}  // namespace

Vector singular_values(const Matrix& data) {
  if (data.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(data);
  return svd.singularValues();
}

Reduction reduce(const Trajectory& traj, Index rank, bool center) {
  traj.validate();
  check_rank(rank, traj.samples(), traj.dim());
  Reduction out;
  out.basis.mean = center ? Vector(traj.states.colwise().mean().transpose()) : Vector::Zero(traj.dim());
  const Matrix centered = traj.states.rowwise() - out.basis.mean.transpose();
  const Svd svd = thin_svd(centered);
  out.basis.singular_values = svd.values;
  out.basis.modes = svd.right.leftCols(rank);
  out.basis.rank = rank;
  out.coordinates = coordinates_of(traj, out.basis.modes, out.basis.mean);
  return out;
}

Reduction reduce_blockwise(const Trajectory& traj, const BlockMap& blocks, std::span<const Index> ranks,
                           bool center) {
  traj.validate();
  if (blocks.empty()) throw ArgumentError("block map is empty");
  if (ranks.size() != blocks.size()) throw ArgumentError("one rank per block is required");

  std::vector<int> seen(static_cast<std::size_t>(traj.dim()), 0);
  for (const auto& block : blocks) {
    if (block.columns.empty()) throw ArgumentError("block '" + block.label + "' is empty");
    for (Index c : block.columns) {
      if (c < 0 || c >= traj.dim()) throw ArgumentError("block '" + block.label + "' has an out-of-range column");
      if (seen[static_cast<std::size_t>(c)]++) {
        throw ArgumentError("block map overlaps at column " + std::to_string(c));
      }
    }
  }
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (!seen[c]) throw ArgumentError("block map does not cover column " + std::to_string(c));
  }

  const Index total_rank = std::accumulate(ranks.begin(), ranks.end(), Index{0});
  Reduction out;
  out.basis.modes = Matrix::Zero(traj.dim(), total_rank);
  out.basis.mean = Vector::Zero(traj.dim());
  out.basis.rank = total_rank;
  std::vector<double> merged;

  Index col = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Trajectory sub = traj.columns(blocks[b].columns);
    Reduction part = reduce(sub, ranks[b], center);
    for (std::size_t k = 0; k < blocks[b].columns.size(); ++k) {
      const Index row = blocks[b].columns[k];
      out.basis.modes.block(row, col, 1, ranks[b]) = part.basis.modes.row(static_cast<Index>(k));
      out.basis.mean(row) = part.basis.mean(static_cast<Index>(k));
    }
    merged.insert(merged.end(), part.basis.singular_values.begin(), part.basis.singular_values.end());
    out.basis.blocks.push_back(BlockBasis{blocks[b], std::move(part.basis.modes),
                                          std::move(part.basis.singular_values), ranks[b],
                                          std::move(part.basis.mean)});
    col += ranks[b];
  }
  std::sort(merged.begin(), merged.end(), std::greater<>());
  out.basis.singular_values = Eigen::Map<Vector>(merged.data(), static_cast<Index>(merged.size()));
  out.coordinates = coordinates_of(traj, out.basis.modes, out.basis.mean);
  return out;
}

Matrix project(const ReducedBasis& basis, const Matrix& states) {
  if (states.cols() != basis.modes.rows()) throw StructuralError("state width differs from basis");
  return (states.rowwise() - basis.mean.transpose()) * basis.modes;
}

Matrix lift(const ReducedBasis& basis, const Matrix& coordinates) {
  if (coordinates.cols() != basis.modes.cols()) throw StructuralError("coordinate width differs from basis rank");
  return (coordinates * basis.modes.transpose()).rowwise() + basis.mean.transpose();
}

double truncation_error(const Vector& singular_values, Index rank) {
  if (rank < 0) throw ArgumentError("rank must be non-negative");
  const auto tail = tail_energy(singular_values);
  const auto k = static_cast<std::size_t>(std::min<Index>(rank, singular_values.size()));
  return std::sqrt(tail[k]);
}

std::vector<Index> dimension_from_spectrum(const Vector& singular_values, std::span<const double> thresholds,
                                           DimensionConvention convention) {
  for (double tau : thresholds) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("dimension thresholds must lie in (0, 1]");
  }
  const auto tail = tail_energy(singular_values);
  const double total = tail.front();
  const Index k = singular_values.size();

  std::vector<Index> out;
  out.reserve(thresholds.size());
  for (double tau : thresholds) {
    if (total <= 0.0 || k == 0) {
      out.push_back(1);
      continue;
    }
    Index r = 1;
    for (; r < k; ++r) {
      const double rest = tail[static_cast<std::size_t>(r)];
      const bool ok = convention == DimensionConvention::energy
                          ? std::sqrt((total - rest) / total) >= tau
                          : std::sqrt(rest / total) <= 1.0 - tau;
      if (ok) break;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<Index> estimate_dimension(const Trajectory& traj, std::span<const double> thresholds,
                                      DimensionConvention convention) {
  if (traj.samples() == 0 || traj.dim() == 0) throw ArgumentError("cannot estimate dimension of an empty trajectory");
  return dimension_from_spectrum(singular_values(traj.states), thresholds, convention);
}

}  // namespace oscidisc::reduction
