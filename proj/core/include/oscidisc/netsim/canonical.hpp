#pragma once

#include "oscidisc/ode.hpp"
#include "oscidisc/trajectory.hpp"

#include <variant>

namespace oscidisc::netsim {

/// Van der Pol in Liénard variables:
///   dx/dt = μ (x − x³/3 − y),   dy/dt = x / μ.
struct VanDerPol {
  double mu = 5.0;
};

/// Single Rayleigh oscillator ε ẍ = ẋ − ẋ³/3 − x as the pair (x, y = ẋ).
struct RayleighOscillator {
  double epsilon = 1.0;
};

using CanonicalKind = std::variant<VanDerPol, RayleighOscillator>;

Vector canonical_rhs(const CanonicalKind& kind, const Vector& state);

/// Trajectory with exact derivatives; labels {"x", "y"}.
Trajectory canonical_oscillator(const CanonicalKind& kind, const Vector& x0, double t0, double t1,
                                double dt, IntegrationOptions options = {});

}  // namespace oscidisc::netsim
