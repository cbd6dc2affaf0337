#pragma once

#include "oscidisc/trajectory.hpp"

#include <span>
#include <string>
#include <vector>

namespace oscidisc::reduction {

/// A labelled subset of state columns.
struct Block {
  std::string label;
  std::vector<Index> columns;
};
using BlockMap = std::vector<Block>;

/// Basis of one block: modes are |columns| × rank.
struct BlockBasis {
  Block block;
  Matrix modes;
  Vector singular_values;
  Index rank = 0;
  Vector mean;
};

/// Spatial modes of a trajectory (d × r, orthonormal columns) and the full
/// singular spectrum. For block-wise reductions `modes` is the block-diagonal
/// embedding of the per-block bases, and `singular_values` is the merged,
/// sorted spectrum of all blocks.
struct ReducedBasis {
  Matrix modes;
  Vector singular_values;
  Index rank = 0;
  /// Temporal mean subtracted before projection (zero when not centred).
  Vector mean;
  std::vector<BlockBasis> blocks;
};

struct Reduction {
  ReducedBasis basis;
  /// m × r mode coordinates labelled U_1..U_r; derivatives projected with the
  /// same basis when the input carries them.
  Trajectory coordinates;
};

/// Singular values of a matrix in non-increasing order.
Vector singular_values(const Matrix& data);

/// Leading-`rank` SVD basis of the state matrix.
Reduction reduce(const Trajectory& traj, Index rank, bool center = false);

/// Independent SVD per block; coordinates are concatenated block by block.
Reduction reduce_blockwise(const Trajectory& traj, const BlockMap& blocks,
                           std::span<const Index> ranks, bool center = false);

/// Projects states (m × d) onto the basis.
Matrix project(const ReducedBasis& basis, const Matrix& states);
/// Maps coordinates (m × r) back to state space.
Matrix lift(const ReducedBasis& basis, const Matrix& coordinates);

/// ‖X − X_r‖_F for the rank-r truncated SVD of X.
double truncation_error(const Vector& singular_values, Index rank);

/// How "X% accuracy" is read.
///   energy: sqrt(Σ_{i≤r} σ_i²) / ‖X‖_F ≥ τ
///   error:  ‖X − X_r‖_F / ‖X‖_F ≤ 1 − τ
enum class DimensionConvention { energy, error };

/// Smallest rank meeting each threshold τ ∈ (0, 1].
std::vector<Index> dimension_from_spectrum(const Vector& singular_values,
                                           std::span<const double> thresholds,
                                           DimensionConvention convention = DimensionConvention::error);

std::vector<Index> estimate_dimension(const Trajectory& traj, std::span<const double> thresholds,
                                      DimensionConvention convention = DimensionConvention::error);

}  // namespace oscidisc::reduction
