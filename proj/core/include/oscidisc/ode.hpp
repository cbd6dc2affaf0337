#pragma once

#include "oscidisc/common.hpp"

#include <cmath>
#include <sstream>

namespace oscidisc {

/// Classical fixed-step fourth-order Runge-Kutta.
///
/// `Rhs` is invocable as rhs(double t, const Vector& x, Vector& dxdt).
class Rk4Stepper {
 public:
  explicit Rk4Stepper(Index dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  template <class Rhs>
  void step(Rhs&& rhs, double t, Vector& x, double dt) {
    const double half = 0.5 * dt;
    rhs(t, x, k1_);
    tmp_.noalias() = x + half * k1_;
    rhs(t + half, tmp_, k2_);
    tmp_.noalias() = x + half * k2_;
    rhs(t + half, tmp_, k3_);
    tmp_.noalias() = x + dt * k3_;
    rhs(t + dt, tmp_, k4_);
    x.noalias() += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  Vector k1_, k2_, k3_, k4_, tmp_;
};

/// Number of fixed steps covering [t0, t1]; throws on bad arguments.
inline Index step_count(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("dt must be positive and finite");
  if (!(t1 > t0)) throw ArgumentError("t1 must exceed t0");
  const auto n = static_cast<Index>(std::llround((t1 - t0) / dt));
  return n < 1 ? 1 : n;
}

struct IntegrationOptions {
  /// Store every `record_every`-th step (1 keeps every step).
  Index record_every = 1;
};

struct IntegrationResult {
  Vector times;
  Matrix states;
};

/// Integrates from x0 over [t0, t1] with fixed dt, sampling t_k = t0 + k dt.
/// Throws BlowupError on the first non-finite state.
template <class Rhs>
IntegrationResult integrate_rk4(Rhs&& rhs, const Vector& x0, double t0, double t1, double dt,
                                IntegrationOptions options = {}) {
  const Index steps = step_count(t0, t1, dt);
  const Index stride = options.record_every < 1 ? 1 : options.record_every;
  const Index records = steps / stride + 1;

  IntegrationResult out;
  out.times.resize(records);
  out.states.resize(records, x0.size());

  Rk4Stepper stepper(x0.size());
  Vector x = x0;
  Index row = 0;
  out.times(row) = t0;
  out.states.row(row++) = x.transpose();
  for (Index k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    stepper.step(rhs, t, x, dt);
    if (!x.allFinite()) {
      std::ostringstream msg;
      msg << "integration blew up after t=" << t;
      throw BlowupError(msg.str(), t);
    }
    if ((k + 1) % stride == 0 && row < records) {
      out.times(row) = t0 + static_cast<double>(k + 1) * dt;
      out.states.row(row++) = x.transpose();
    }
  }
  out.times.conservativeResize(row);
  out.states.conservativeResize(row, Eigen::NoChange);
  return out;
}

}  // namespace oscidisc
