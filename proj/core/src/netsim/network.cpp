#include "oscidisc/netsim/network.hpp"

#include "oscidisc/rng.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace oscidisc::netsim {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Scratch-owning evaluator so the integration loop does not allocate.
class RhsEvaluator {
 public:
  explicit RhsEvaluator(const NetworkSpec& spec)
      : spec_(spec),
        sin_lead_(static_cast<std::size_t>(spec.node_count())),
        cos_lead_(static_cast<std::size_t>(spec.node_count())) {}

  void operator()(std::span<const double> x, std::span<double> dx) {
    const int n = spec_.node_count();
    const auto& adj = spec_.adjacency();
    const double inv_n = n > 0 ? 1.0 / n : 0.0;
    const bool cross = spec_.rule() == CrossCouplingRule::symmetric_sine;

    // Leading component (phase for Kuramoto) of every node, as sin/cos.
    for (int i = 0; i < n; ++i) {
      const double s = x[static_cast<std::size_t>(spec_.offset(i))];
      sin_lead_[static_cast<std::size_t>(i)] = std::sin(s);
      cos_lead_[static_cast<std::size_t>(i)] = std::cos(s);
    }

    // Value node i presents for component k to a neighbour of another family.
    auto presented = [&](int i, int k, double& value) {
      if (spec_.family(i) == Family::kuramoto) {
        value = sin_lead_[static_cast<std::size_t>(i)];
        return true;
      }
      if (k >= state_width(spec_.nodes()[static_cast<std::size_t>(i)])) return false;
      value = x[static_cast<std::size_t>(spec_.offset(i) + k)];
      return true;
    };

    for (int j = 0; j < n; ++j) {
      const auto off = static_cast<std::size_t>(spec_.offset(j));
      const Family fam = spec_.family(j);
      const double gain = spec_.coupling().of(fam) * inv_n;
      const auto& nbrs = adj.neighbors(j);

      std::visit(
          overloaded{
              [&](const Kuramoto& k) {
                double sum_sin = 0.0, sum_cos = 0.0;
                for (int i : nbrs) {
                  if (!cross && spec_.family(i) != fam) continue;
                  sum_sin += sin_lead_[static_cast<std::size_t>(i)];
                  sum_cos += cos_lead_[static_cast<std::size_t>(i)];
                }
                // Σ sin(s_i − θ_j) = cos θ_j Σ sin s_i − sin θ_j Σ cos s_i
                const double coupling = cos_lead_[static_cast<std::size_t>(j)] * sum_sin -
                                        sin_lead_[static_cast<std::size_t>(j)] * sum_cos;
                dx[off] = k.omega + gain * coupling;
              },
              [&](const Rayleigh& r) {
                const double xj = x[off];
                const double yj = x[off + 1];
                double coupling = 0.0;
                for (int i : nbrs) {
                  double xi = 0.0, yi = 0.0;
                  if (spec_.family(i) == fam) {
                    xi = x[static_cast<std::size_t>(spec_.offset(i))];
                    yi = x[static_cast<std::size_t>(spec_.offset(i)) + 1];
                  } else {
                    if (!cross || !presented(i, 0, xi) || !presented(i, 1, yi)) continue;
                  }
                  const double gap = xj - xi;
                  coupling += (1.0 + gap * gap) * (yi - yj);
                }
                dx[off] = yj;
                dx[off + 1] = (yj - yj * yj * yj / 3.0 - xj + gain * coupling) / r.epsilon;
              },
              [&](const Rossler& r) {
                double coupling[3] = {0.0, 0.0, 0.0};
                for (int i : nbrs) {
                  if (!cross && spec_.family(i) != fam) continue;
                  for (int c = 0; c < 3; ++c) {
                    double other = 0.0;
                    if (!presented(i, c, other)) continue;
                    coupling[c] += std::sin(x[off + static_cast<std::size_t>(c)] - other);
                  }
                }
                const double xs = x[off], ys = x[off + 1], zs = x[off + 2];
                dx[off] = -ys - zs + gain * coupling[0];
                dx[off + 1] = xs + r.a * ys + gain * coupling[1];
                dx[off + 2] = r.b + zs * (xs - r.c) + gain * coupling[2];
              },
              [&](const FitzHughNagumo& f) {
                const double v = x[off];
                const double w = x[off + 1];
                double coupling_v = 0.0, coupling_w = 0.0;
                for (int i : nbrs) {
                  if (!cross && spec_.family(i) != fam) continue;
                  double vi = 0.0, wi = 0.0;
                  if (presented(i, 0, vi)) coupling_v += v - vi;
                  if (presented(i, 1, wi)) coupling_w += w - wi;
                }
                dx[off] = ((f.alpha3 * v + f.alpha2) * v + f.alpha1) * v - w + f.stimulus +
                          gain * coupling_v;
                dx[off + 1] = f.c_gain * v - f.b_decay * w + gain * coupling_w;
              },
          },
          spec_.nodes()[static_cast<std::size_t>(j)]);
    }
  }

 private:
  const NetworkSpec& spec_;
  std::vector<double> sin_lead_;
  std::vector<double> cos_lead_;
};

void check_length(const NetworkSpec& spec, std::size_t got, const char* what) {
  if (static_cast<Index>(got) != spec.total_dim()) {
    std::ostringstream msg;
    msg << what << " has length " << got << ", network state dimension is " << spec.total_dim();
    throw StructuralError(msg.str());
  }
}

}  // namespace

Family family_of(const OscillatorKind& kind) noexcept {
  return std::visit(overloaded{[](const Kuramoto&) { return Family::kuramoto; },
                               [](const Rayleigh&) { return Family::rayleigh; },
                               [](const Rossler&) { return Family::rossler; },
                               [](const FitzHughNagumo&) { return Family::fhn; }},
                    kind);
}

int state_width(const OscillatorKind& kind) noexcept {
  switch (family_of(kind)) {
    case Family::kuramoto: return 1;
    case Family::rayleigh: return 2;
    case Family::rossler: return 3;
    case Family::fhn: return 2;
  }
  return 0;
}

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::kuramoto: return "kuramoto";
    case Family::rayleigh: return "rayleigh";
    case Family::rossler: return "rossler";
    case Family::fhn: return "fhn";
  }
  return "unknown";
}

std::vector<std::string_view> component_names(const OscillatorKind& kind) {
  switch (family_of(kind)) {
    case Family::kuramoto: return {"theta"};
    case Family::rayleigh: return {"x", "xdot"};
    case Family::rossler: return {"x", "y", "z"};
    case Family::fhn: return {"v", "w"};
  }
  return {};
}

double CouplingStrengths::of(Family family) const noexcept {
  switch (family) {
    case Family::kuramoto: return kuramoto;
    case Family::rayleigh: return rayleigh;
    case Family::rossler: return rossler;
    case Family::fhn: return fhn;
  }
  return 0.0;
}

NetworkSpec::NetworkSpec(std::vector<OscillatorKind> nodes, AdjacencyMatrix adjacency,
                         CouplingStrengths coupling, CrossCouplingRule rule)
    : nodes_(std::move(nodes)), adjacency_(std::move(adjacency)), coupling_(coupling), rule_(rule) {
  if (adjacency_.size() != static_cast<int>(nodes_.size())) {
    std::ostringstream msg;
    msg << "adjacency has " << adjacency_.size() << " nodes, population has " << nodes_.size();
    throw StructuralError(msg.str());
  }
  for (double k : {coupling_.kuramoto, coupling_.rayleigh, coupling_.rossler, coupling_.fhn}) {
    if (!(k >= 0.0)) throw ArgumentError("coupling strengths must be non-negative");
  }
  offsets_.reserve(nodes_.size());
  families_.reserve(nodes_.size());
  for (const auto& node : nodes_) {
    if (const auto* r = std::get_if<Rayleigh>(&node); r && !(r->epsilon > 0.0)) {
      throw ArgumentError("Rayleigh epsilon must be strictly positive");
    }
    offsets_.push_back(total_dim_);
    families_.push_back(family_of(node));
    total_dim_ += state_width(node);
  }
}

std::vector<std::string> NetworkSpec::labels() const {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(total_dim_));
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (auto name : component_names(nodes_[i])) out.push_back(std::string(name) + "_" + std::to_string(i));
  }
  return out;
}

std::vector<Index> NetworkSpec::columns_of(Family family, int component) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (families_[i] == family && component < state_width(nodes_[i])) out.push_back(offsets_[i] + component);
  }
  return out;
}

void network_rhs(const NetworkSpec& spec, std::span<const double> state, double /*t*/,
                 std::span<double> out) {
  check_length(spec, state.size(), "state");
  check_length(spec, out.size(), "output");
  RhsEvaluator eval(spec);
  eval(state, out);
}

Vector network_rhs(const NetworkSpec& spec, const Vector& state, double t) {
  Vector out(state.size());
  network_rhs(spec, std::span<const double>(state.data(), static_cast<std::size_t>(state.size())), t,
              std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Trajectory simulate(const NetworkSpec& spec, const Vector& x0, double t0, double t1, double dt,
                    IntegrationOptions options) {
  check_length(spec, static_cast<std::size_t>(x0.size()), "initial state");
  RhsEvaluator eval(spec);
  auto rhs = [&eval](double, const Vector& x, Vector& dx) {
    eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
         std::span<double>(dx.data(), static_cast<std::size_t>(dx.size())));
  };
  auto result = integrate_rk4(rhs, x0, t0, t1, dt, options);

  Trajectory traj;
  traj.times = std::move(result.times);
  traj.states = std::move(result.states);
  Matrix derivs(traj.states.rows(), traj.states.cols());
  Vector x(traj.states.cols()), dx(traj.states.cols());
  for (Index i = 0; i < traj.states.rows(); ++i) {
    x = traj.states.row(i).transpose();
    rhs(traj.times(i), x, dx);
    derivs.row(i) = dx.transpose();
  }
  traj.derivatives = std::move(derivs);
  traj.labels = spec.labels();
  return traj;
}

Vector random_initial_state(const NetworkSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Vector x(spec.total_dim());
  for (int i = 0; i < spec.node_count(); ++i) {
    const Index off = spec.offset(i);
    const int width = state_width(spec.nodes()[static_cast<std::size_t>(i)]);
    for (int c = 0; c < width; ++c) {
      x(off + c) = spec.family(i) == Family::kuramoto ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                                                      : rng.uniform(-1.0, 1.0);
    }
  }
  return x;
}

Trajectory observe(const NetworkSpec& spec, const Trajectory& traj) {
  if (traj.dim() != spec.total_dim()) throw StructuralError("trajectory width differs from network dimension");
  Trajectory out = traj;
  for (int i = 0; i < spec.node_count(); ++i) {
    if (spec.family(i) != Family::kuramoto) continue;
    const Index c = spec.offset(i);
    if (out.derivatives) {
      out.derivatives->col(c) =
          (-traj.states.col(c).array().sin() * traj.derivatives->col(c).array()).matrix();
    }
    out.states.col(c) = traj.states.col(c).array().cos().matrix();
    if (!out.labels.empty()) out.labels[static_cast<std::size_t>(c)] = "cos_theta_" + std::to_string(i);
  }
  return out;
}

double order_parameter(const NetworkSpec& spec, const Vector& state) {
  std::complex<double> sum{0.0, 0.0};
  int count = 0;
  for (int i = 0; i < spec.node_count(); ++i) {
    if (spec.family(i) != Family::kuramoto) continue;
    sum += std::polar(1.0, state(spec.offset(i)));
    ++count;
  }
  return count ? std::abs(sum) / count : 0.0;
}

}  // namespace oscidisc::netsim
