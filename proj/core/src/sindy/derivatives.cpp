#include "oscidisc/sindy/derivatives.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscidisc::sindy {
namespace {

// Centered moving average; the window shrinks symmetrically near the ends.
Matrix moving_average(const Matrix& x, Index width) {
  const Index half = width / 2;
  const Index m = x.rows();
  Matrix out(m, x.cols());
  for (Index i = 0; i < m; ++i) {
    const Index reach = std::min({half, i, m - 1 - i});
    out.row(i) = x.middleRows(i - reach, 2 * reach + 1).colwise().mean();
  }
  return out;
}

}  // namespace

Matrix estimate_derivatives(const Trajectory& traj, DerivativeOptions options) {
  traj.validate();
  const Index m = traj.samples();
  if (m < 3) throw ArgumentError("derivative estimation needs at least 3 samples");

  const double dt = traj.times(1) - traj.times(0);
  for (Index i = 2; i < m; ++i) {
    const double step = traj.times(i) - traj.times(i - 1);
    if (std::abs(step - dt) > options.uniform_tolerance * std::abs(dt)) {
      std::ostringstream msg;
      msg << "time grid is not uniform at sample " << i << "; resample before differentiating";
      throw ArgumentError(msg.str());
    }
  }

  Matrix x = traj.states;
  if (options.method == DerivativeMethod::smoothed) {
    if (options.smoothing_width < 1 || options.smoothing_width % 2 == 0) {
      throw ArgumentError("smoothing width must be a positive odd number");
    }
    x = moving_average(x, options.smoothing_width);
  }

  Matrix d(m, x.cols());
  const double inv2h = 1.0 / (2.0 * dt);
  for (Index i = 1; i + 1 < m; ++i) d.row(i) = (x.row(i + 1) - x.row(i - 1)) * inv2h;
  d.row(0) = (4.0 * (x.row(1) - x.row(0)) - (x.row(2) - x.row(0))) * inv2h;
  d.row(m - 1) = (4.0 * (x.row(m - 1) - x.row(m - 2)) - (x.row(m - 1) - x.row(m - 3))) * inv2h;
  return d;
}

}  // namespace oscidisc::sindy
