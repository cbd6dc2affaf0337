#include "oscidisc/sindy/regression.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace oscidisc::sindy {
namespace {

struct ColumnFit {
  Vector coef;
  int iterations = 0;
  bool converged = false;
  bool rank_deficient = false;
  double condition = 1.0;
};

ColumnFit fit_column(const Matrix& theta, const Vector& target, double lambda, int max_iter) {
  const Index p = theta.cols();
  ColumnFit fit;
  fit.coef = Vector::Zero(p);
  std::vector<Index> active(static_cast<std::size_t>(p));
  std::iota(active.begin(), active.end(), Index{0});

  for (int it = 1; it <= max_iter; ++it) {
    fit.iterations = it;
    fit.coef.setZero();
    if (active.empty()) {
      fit.converged = true;
      break;
    }
    Matrix sub(theta.rows(), static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) sub.col(static_cast<Index>(k)) = theta.col(active[k]);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
    const Vector sol = cod.solve(target);
    if (cod.rank() < sub.cols()) {
      fit.rank_deficient = true;
      fit.condition = std::numeric_limits<double>::infinity();
    } else if (cod.rank() > 0) {
      const Vector diag = cod.matrixQTZ().diagonal().head(cod.rank()).cwiseAbs();
      fit.condition = std::max(fit.condition, diag.maxCoeff() / diag.minCoeff());
    }

    std::vector<Index> next;
    next.reserve(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double c = sol(static_cast<Index>(k));
      if (std::abs(c) >= lambda) {
        fit.coef(active[k]) = c;
        next.push_back(active[k]);
      }
    }
    if (next == active) {
      fit.converged = true;
      break;
    }
    active = std::move(next);
  }
  return fit;
}

void check_inputs(const Matrix& theta, const Matrix& xdot, double lambda, int max_iter) {
  if (theta.rows() != xdot.rows()) {
    std::ostringstream msg;
    msg << "library has " << theta.rows() << " rows, derivatives have " << xdot.rows();
    throw StructuralError(msg.str());
  }
  if (!(lambda >= 0.0)) throw ArgumentError("threshold lambda must be non-negative");
  if (max_iter < 1) throw ArgumentError("max_iter must be at least 1");
}

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = m.row(rows[k]);
  return out;
}

std::vector<Index> rows_of(const std::vector<bool>& mask) {
  std::vector<Index> rows;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) rows.push_back(static_cast<Index>(i));
  return rows;
}

}  // namespace

Vector SparseModel::rhs(const Vector& state) const {
  if (state.size() != library.var_count()) throw StructuralError("state length differs from library variables");
  Vector feat(library.size());
  evaluate_library(library, std::span<const double>(state.data(), static_cast<std::size_t>(state.size())),
                   std::span<double>(feat.data(), static_cast<std::size_t>(feat.size())));
  return xi.transpose() * feat;
}

Matrix SparseModel::predict(const Matrix& states) const { return build_library(states, library) * xi; }

SparseModel stlsq(const Matrix& theta, const Matrix& xdot, double lambda, int max_iter) {
  check_inputs(theta, xdot, lambda, max_iter);
  SparseModel model;
  model.threshold = lambda;
  model.xi = Matrix::Zero(theta.cols(), xdot.cols());
  model.diagnostics.iterations = 0;
  for (Index c = 0; c < xdot.cols(); ++c) {
    const ColumnFit fit = fit_column(theta, xdot.col(c), lambda, max_iter);
    model.xi.col(c) = fit.coef;
    model.diagnostics.iterations = std::max(model.diagnostics.iterations, fit.iterations);
    model.diagnostics.converged = model.diagnostics.converged && fit.converged;
    model.diagnostics.rank_deficient = model.diagnostics.rank_deficient || fit.rank_deficient;
    model.diagnostics.condition_estimate = std::max(model.diagnostics.condition_estimate, fit.condition);
  }
  return model;
}

SparseModel stlsq(const Matrix& theta, const Matrix& xdot, const LibrarySpec& library, double lambda,
                  int max_iter) {
  if (library.size() != theta.cols()) throw StructuralError("library size differs from feature columns");
  SparseModel model = stlsq(theta, xdot, lambda, max_iter);
  model.library = library;
  model.var_names = default_var_names(library.var_count());
  return model;
}

SparseModel stlsq_rows(const Matrix& theta, const Matrix& xdot, const std::vector<bool>& mask, double lambda,
                       int max_iter) {
  if (static_cast<Index>(mask.size()) != theta.rows()) throw StructuralError("row mask length differs from sample count");
  const auto rows = rows_of(mask);
  return stlsq(select_rows(theta, rows), select_rows(xdot, rows), lambda, max_iter);
}

Index TrimResult::trimmed_count() const noexcept {
  return static_cast<Index>(std::count(trim_mask.begin(), trim_mask.end(), true));
}

Index inlier_budget(Index samples, double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 1.0)) throw ArgumentError("trim fraction must lie in [0, 1)");
  return static_cast<Index>(std::llround(static_cast<double>(samples) * (1.0 - trim_fraction)));
}

TrimmedFit stlsq_trimmed(const Matrix& theta, const Matrix& xdot, double lambda, double trim_fraction,
                         int max_outer_iter, int max_iter) {
  check_inputs(theta, xdot, lambda, max_iter);
  if (max_outer_iter < 1) throw ArgumentError("max_outer_iter must be at least 1");
  const Index m = theta.rows();
  const Index p = theta.cols();
  const Index h = inlier_budget(m, trim_fraction);
  if (h <= p) {
    std::ostringstream msg;
    msg << "inlier budget h=" << h << " does not exceed library size p=" << p;
    throw ArgumentError(msg.str());
  }

  auto residuals = [&](const SparseModel& model) {
    return Vector((theta * model.xi - xdot).rowwise().squaredNorm());
  };

  TrimmedFit out;
  out.trim.inlier_budget = h;

  if (h >= m) {
    out.model = stlsq(theta, xdot, lambda, max_iter);
    out.trim.weights = Vector::Ones(m);
    out.trim.trim_mask.assign(static_cast<std::size_t>(m), false);
    out.trim.objective_history.push_back(0.5 * residuals(out.model).sum());
    out.trim.outer_iterations = 1;
    out.trim.converged = true;
    return out;
  }

  std::vector<bool> selected(static_cast<std::size_t>(m), true);
  std::vector<Index> order(static_cast<std::size_t>(m));
  SparseModel best_model;
  std::vector<bool> best_selected;

  for (int outer = 1; outer <= max_outer_iter; ++outer) {
    out.trim.outer_iterations = outer;
    SparseModel model = stlsq_rows(theta, xdot, selected, lambda, max_iter);
    const Vector r = residuals(model);

    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return r(a) < r(b); });
    std::vector<bool> next(static_cast<std::size_t>(m), false);
    double objective = 0.0;
    for (Index k = 0; k < h; ++k) {
      next[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
      objective += 0.5 * r(order[static_cast<std::size_t>(k)]);
    }

    auto& history = out.trim.objective_history;
    if (!history.empty() && objective > history.back()) {
      // The sparse refit moved uphill; keep the previous pair.
      out.trim.converged = true;
      break;
    }
    history.push_back(objective);
    best_model = std::move(model);
    best_selected = next;
    if (next == selected) {
      out.trim.converged = true;
      break;
    }
    selected = std::move(next);
  }

  out.model = std::move(best_model);
  out.trim.weights.resize(m);
  out.trim.trim_mask.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const bool in = best_selected[static_cast<std::size_t>(i)];
    out.trim.weights(i) = in ? 1.0 : 0.0;
    out.trim.trim_mask[static_cast<std::size_t>(i)] = out.trim.weights(i) < 0.5;
  }
  return out;
}

TrimmedFit stlsq_trimmed(const Matrix& theta, const Matrix& xdot, const LibrarySpec& library, double lambda,
                         double trim_fraction, int max_outer_iter, int max_iter) {
  if (library.size() != theta.cols()) throw StructuralError("library size differs from feature columns");
  TrimmedFit fit = stlsq_trimmed(theta, xdot, lambda, trim_fraction, max_outer_iter, max_iter);
  fit.model.library = library;
  fit.model.var_names = default_var_names(library.var_count());
  return fit;
}

}  // namespace oscidisc::sindy
