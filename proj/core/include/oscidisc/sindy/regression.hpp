#pragma once

#include "oscidisc/sindy/library.hpp"

#include <vector>

namespace oscidisc::sindy {

/// Diagnostics attached to every sparse fit.
struct FitDiagnostics {
  int iterations = 0;
  bool converged = true;
  /// Some active least-squares subproblem was rank deficient and was solved
  /// in the minimum-norm sense.
  bool rank_deficient = false;
  /// Largest ratio |R_00| / |R_kk| seen over the active QR factorisations.
  double condition_estimate = 1.0;
};

/// Coefficient matrix (library terms × state dimension) with its library.
struct SparseModel {
  LibrarySpec library;
  Matrix xi;
  double threshold = 0.0;
  FitDiagnostics diagnostics;
  std::vector<std::string> var_names;

  Index state_dim() const noexcept { return xi.cols(); }
  Index active_count() const noexcept { return (xi.array() != 0.0).count(); }

  /// Θ(x) Ξ for a single state.
  Vector rhs(const Vector& state) const;
  /// Θ(X) Ξ for a batch of states.
  Matrix predict(const Matrix& states) const;
};

/// Sequentially thresholded least squares, one independent active set per
/// target column. Every surviving coefficient has magnitude ≥ lambda.
SparseModel stlsq(const Matrix& theta, const Matrix& xdot, double lambda, int max_iter = 25);

/// As above, with the library attached to the result.
SparseModel stlsq(const Matrix& theta, const Matrix& xdot, const LibrarySpec& library, double lambda,
                  int max_iter = 25);

/// Row-selected variant: only rows with mask[i] contribute.
SparseModel stlsq_rows(const Matrix& theta, const Matrix& xdot, const std::vector<bool>& mask,
                       double lambda, int max_iter = 25);

/// Per-sample trim weights from the capped-simplex subproblem.
struct TrimResult {
  Vector weights;               // v ∈ [0, 1]^m, Σ v = h
  Index inlier_budget = 0;      // h
  std::vector<bool> trim_mask;  // v_i < 0.5
  std::vector<double> objective_history;
  int outer_iterations = 0;
  bool converged = false;

  Index samples() const noexcept { return weights.size(); }
  Index trimmed_count() const noexcept;
};

struct TrimmedFit {
  SparseModel model;
  TrimResult trim;
};

/// h = round(m (1 − trim_fraction)) inliers.
Index inlier_budget(Index samples, double trim_fraction);

/// Alternating minimisation of ½ Σ v_i ‖(ΘΞ − Ẋ)_i‖² + λ‖Ξ‖₀ over
/// 0 ≤ v ≤ 1, 1ᵀv = h. The v-step takes the simplex vertex keeping the h
/// rows with the smallest residual (ties to the lower row index).
TrimmedFit stlsq_trimmed(const Matrix& theta, const Matrix& xdot, double lambda, double trim_fraction,
                         int max_outer_iter = 50, int max_iter = 25);

TrimmedFit stlsq_trimmed(const Matrix& theta, const Matrix& xdot, const LibrarySpec& library,
                         double lambda, double trim_fraction, int max_outer_iter = 50,
                         int max_iter = 25);

}  // namespace oscidisc::sindy
