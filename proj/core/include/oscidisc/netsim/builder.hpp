#pragma once

#include "oscidisc/netsim/network.hpp"

#include <cstdint>

namespace oscidisc::netsim {

// Recipes for drawing random heterogeneous networks. Nodes are ordered by
// bloc: Kuramoto, Rayleigh, Rössler, FitzHugh–Nagumo.

struct KuramotoBloc {
  int count = 0;
  double omega_mean = 0.6;
  /// ω ~ U(mean - width/2, mean + width/2).
  double omega_width = 0.5;
};

struct RayleighBloc {
  int count = 0;
  double epsilon_lo = 5e-4;
  double epsilon_hi = 5e-3;
};

struct RosslerBloc {
  int count = 0;
  Rossler params{};
};

struct FhnBloc {
  int count = 0;
  FitzHughNagumo params{-0.1, 1.1, -1.0, 0.1, 0.1, 0.2};
};

struct NetworkRecipe {
  KuramotoBloc kuramoto;
  RayleighBloc rayleigh;
  RosslerBloc rossler;
  FhnBloc fhn;
  double edge_probability = 0.2;
  CouplingStrengths coupling{10.0, 0.0, 0.0, 0.2};
  CrossCouplingRule rule = CrossCouplingRule::symmetric_sine;

  int node_count() const noexcept {
    return kuramoto.count + rayleigh.count + rossler.count + fhn.count;
  }
};

/// Draws adjacency and per-node parameters from independent sub-streams of
/// `seed`.
NetworkSpec build_network(const NetworkRecipe& recipe, std::uint64_t seed);

}  // namespace oscidisc::netsim
