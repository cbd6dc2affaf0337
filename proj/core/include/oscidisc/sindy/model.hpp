#pragma once

#include "oscidisc/ode.hpp"
#include "oscidisc/sindy/regression.hpp"
#include "oscidisc/trajectory.hpp"

#include <string>

namespace oscidisc::sindy {

/// RK4 integration of dx/dt = Θ(x) Ξ. Requires a square model (library over
/// the same variables it predicts).
Trajectory simulate_model(const SparseModel& model, const Vector& x0, double t0, double t1, double dt,
                          IntegrationOptions options = {});

/// One line per state dimension, e.g. "dx0/dt = -2.000 x0". Terms are sorted
/// by |coefficient| (ties by library order), printed to 4 significant figures.
std::string model_to_text(const SparseModel& model);

/// JSON document {library, xi (row-major), lambda, metadata}. Coefficients
/// round-trip bit-exactly.
std::string model_to_json(const SparseModel& model);
SparseModel model_from_json(const std::string& text);

}  // namespace oscidisc::sindy
