#include "oscidisc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oscidisc::analysis {

std::vector<double> upward_crossings(const Vector& times, const Vector& signal, double level) {
  std::vector<double> out;
  for (Index i = 1; i < signal.size(); ++i) {
    const double a = signal(i - 1) - level;
    const double b = signal(i) - level;
    if (a < 0.0 && b >= 0.0) {
      const double frac = a / (a - b);
      out.push_back(times(i - 1) + frac * (times(i) - times(i - 1)));
    }
  }
  return out;
}

std::optional<double> estimate_period(const Vector& times, const Vector& signal) {
  if (signal.size() < 3) return std::nullopt;
  const double level = 0.5 * (signal.maxCoeff() + signal.minCoeff());
  const auto crossings = upward_crossings(times, signal, level);
  if (crossings.size() < 2) return std::nullopt;
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

double hausdorff_distance(const Matrix& a, const Matrix& b) {
  auto directed = [](const Matrix& from, const Matrix& to) {
    double worst = 0.0;
    for (Index i = 0; i < from.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < to.rows(); ++j) {
        best = std::min(best, (from.row(i) - to.row(j)).squaredNorm());
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  if (a.rows() == 0 || b.rows() == 0) return std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

double bounding_diameter(const Matrix& points) {
  if (points.rows() == 0) return 0.0;
  return (points.colwise().maxCoeff() - points.colwise().minCoeff()).norm();
}

double r_squared(const Vector& observed, const Vector& predicted) {
  const double mean = observed.mean();
  const double ss_tot = (observed.array() - mean).square().sum();
  const double ss_res = (observed - predicted).squaredNorm();
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  return 1.0 - ss_res / ss_tot;
}

Matrix every_nth_row(const Matrix& m, Index stride) {
  if (stride <= 1) return m;
  const Index rows = (m.rows() + stride - 1) / stride;
  Matrix out(rows, m.cols());
  for (Index i = 0; i < rows; ++i) out.row(i) = m.row(i * stride);
  return out;
}

}  // namespace oscidisc::analysis
