#pragma once

#include "oscidisc/common.hpp"
#include "oscidisc/netsim/adjacency.hpp"
#include "oscidisc/ode.hpp"
#include "oscidisc/trajectory.hpp"

#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace oscidisc::netsim {

/// Phase oscillator: dθ/dt = ω + coupling.
struct Kuramoto {
  double omega = 0.6;
};

/// ε ẍ = ẋ - ẋ³/3 - x + HKB coupling; state (x, ẋ).
struct Rayleigh {
  double epsilon = 1e-3;
};

/// Rössler node; state (x, y, z).
struct Rossler {
  double a = 0.2;
  double b = 0.2;
  double c = 5.7;
};

/// FitzHugh–Nagumo node; state (v, w).
///   dv/dt = α₃v³ + α₂v² + α₁v - w + stimulus + coupling
///   dw/dt = c v - b w + coupling
struct FitzHughNagumo {
  double alpha1 = -0.1;
  double alpha2 = 1.1;
  double alpha3 = -1.0;
  double c_gain = 0.1;
  double b_decay = 0.1;
  double stimulus = 0.0;
};

using OscillatorKind = std::variant<Kuramoto, Rayleigh, Rossler, FitzHughNagumo>;

enum class Family { kuramoto, rayleigh, rossler, fhn };

Family family_of(const OscillatorKind& kind) noexcept;
int state_width(const OscillatorKind& kind) noexcept;
std::string_view family_name(Family family) noexcept;
/// Component names, e.g. {"v", "w"} for FitzHugh–Nagumo.
std::vector<std::string_view> component_names(const OscillatorKind& kind);

/// Coupling strength K per receiving-node family.
struct CouplingStrengths {
  double kuramoto = 0.0;
  double rayleigh = 0.0;
  double rossler = 0.0;
  double fhn = 0.0;

  double of(Family family) const noexcept;
};

/// How nodes of different families see each other.
///
/// symmetric_sine: a Kuramoto neighbour presents sin θ in place of each
/// component; a Kuramoto node sees sin(s_i − θ_j) with s_i the neighbour's
/// first component; other mismatched families couple component-wise over
/// their shared leading components.
/// same_family_only: edges between different families are ignored.
enum class CrossCouplingRule { symmetric_sine, same_family_only };

class NetworkSpec {
 public:
  NetworkSpec(std::vector<OscillatorKind> nodes, AdjacencyMatrix adjacency,
              CouplingStrengths coupling,
              CrossCouplingRule rule = CrossCouplingRule::symmetric_sine);

  const std::vector<OscillatorKind>& nodes() const noexcept { return nodes_; }
  const AdjacencyMatrix& adjacency() const noexcept { return adjacency_; }
  const CouplingStrengths& coupling() const noexcept { return coupling_; }
  CrossCouplingRule rule() const noexcept { return rule_; }

  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  Index total_dim() const noexcept { return total_dim_; }
  Index offset(int node) const { return offsets_[static_cast<std::size_t>(node)]; }
  Family family(int node) const { return families_[static_cast<std::size_t>(node)]; }

  /// "<component>_<node>" per state column, e.g. theta_0, v_3.
  std::vector<std::string> labels() const;
  /// State columns holding component `component` of every node in `family`.
  std::vector<Index> columns_of(Family family, int component) const;

 private:
  std::vector<OscillatorKind> nodes_;
  AdjacencyMatrix adjacency_;
  CouplingStrengths coupling_;
  CrossCouplingRule rule_;
  std::vector<Index> offsets_;
  std::vector<Family> families_;
  Index total_dim_ = 0;
};

/// Writes d(state)/dt into `out`. Throws StructuralError on length mismatch.
void network_rhs(const NetworkSpec& spec, std::span<const double> state, double t,
                 std::span<double> out);
Vector network_rhs(const NetworkSpec& spec, const Vector& state, double t);

/// RK4 integration of network_rhs; derivatives are exact RHS evaluations at
/// each stored state.
Trajectory simulate(const NetworkSpec& spec, const Vector& x0, double t0, double t1, double dt,
                    IntegrationOptions options = {});

/// i.i.d. uniform initial state: phases U(0, 2π), other components U(-1, 1).
Vector random_initial_state(const NetworkSpec& spec, std::uint64_t seed);

/// Replaces every Kuramoto phase column by cos θ (and its derivative by
/// -sin θ · dθ/dt). Other columns pass through.
Trajectory observe(const NetworkSpec& spec, const Trajectory& traj);

/// |mean over Kuramoto nodes of e^{iθ}|; 0 when there are none.
double order_parameter(const NetworkSpec& spec, const Vector& state);

}  // namespace oscidisc::netsim
