#include "oscidisc/netsim/canonical.hpp"

namespace oscidisc::netsim {
namespace {

void check_params(const CanonicalKind& kind) {
  if (const auto* v = std::get_if<VanDerPol>(&kind); v && !(v->mu > 0.0)) {
    throw ArgumentError("Van der Pol mu must be positive");
  }
  if (const auto* r = std::get_if<RayleighOscillator>(&kind); r && !(r->epsilon > 0.0)) {
    throw ArgumentError("Rayleigh epsilon must be positive");
  }
}

void rhs_into(const CanonicalKind& kind, const Vector& s, Vector& out) {
  const double x = s(0), y = s(1);
  if (const auto* v = std::get_if<VanDerPol>(&kind)) {
    out(0) = v->mu * (x - x * x * x / 3.0 - y);
    out(1) = x / v->mu;
  } else {
    const auto& r = std::get<RayleighOscillator>(kind);
    out(0) = y;
    out(1) = (y - y * y * y / 3.0 - x) / r.epsilon;
  }
}

}  // namespace

Vector canonical_rhs(const CanonicalKind& kind, const Vector& state) {
  if (state.size() != 2) throw StructuralError("canonical oscillators have a 2-dimensional state");
  Vector out(2);
  rhs_into(kind, state, out);
  return out;
}

Trajectory canonical_oscillator(const CanonicalKind& kind, const Vector& x0, double t0, double t1,
                                double dt, IntegrationOptions options) {
  check_params(kind);
  if (x0.size() != 2) throw StructuralError("canonical oscillators have a 2-dimensional state");
  auto rhs = [&kind](double, const Vector& x, Vector& dx) { rhs_into(kind, x, dx); };
  auto result = integrate_rk4(rhs, x0, t0, t1, dt, options);

  Trajectory traj;
  traj.times = std::move(result.times);
  traj.states = std::move(result.states);
  Matrix derivs(traj.states.rows(), 2);
  Vector x(2), dx(2);
  for (Index i = 0; i < traj.states.rows(); ++i) {
    x = traj.states.row(i).transpose();
    rhs_into(kind, x, dx);
    derivs.row(i) = dx.transpose();
  }
  traj.derivatives = std::move(derivs);
  traj.labels = {"x", "y"};
  return traj;
}

}  // namespace oscidisc::netsim
