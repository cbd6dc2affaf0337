#include "oscidisc/netsim/builder.hpp"

#include "oscidisc/rng.hpp"

namespace oscidisc::netsim {

NetworkSpec build_network(const NetworkRecipe& recipe, std::uint64_t seed) {
  const int n = recipe.node_count();
  if (n < 1) throw ArgumentError("network recipe has no nodes");
  for (int count : {recipe.kuramoto.count, recipe.rayleigh.count, recipe.rossler.count, recipe.fhn.count}) {
    if (count < 0) throw ArgumentError("bloc sizes must be non-negative");
  }
  if (recipe.rayleigh.count > 0 &&
      !(recipe.rayleigh.epsilon_lo > 0.0 && recipe.rayleigh.epsilon_hi >= recipe.rayleigh.epsilon_lo)) {
    throw ArgumentError("Rayleigh epsilon range must satisfy 0 < lo <= hi");
  }

  Rng params(derive_seed(seed, static_cast<std::uint64_t>(Stream::parameters)));
  std::vector<OscillatorKind> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  const double half_width = 0.5 * recipe.kuramoto.omega_width;
  for (int i = 0; i < recipe.kuramoto.count; ++i) {
    nodes.emplace_back(Kuramoto{params.uniform(recipe.kuramoto.omega_mean - half_width,
                                               recipe.kuramoto.omega_mean + half_width)});
  }
  for (int i = 0; i < recipe.rayleigh.count; ++i) {
    nodes.emplace_back(Rayleigh{params.uniform(recipe.rayleigh.epsilon_lo, recipe.rayleigh.epsilon_hi)});
  }
  for (int i = 0; i < recipe.rossler.count; ++i) nodes.emplace_back(recipe.rossler.params);
  for (int i = 0; i < recipe.fhn.count; ++i) nodes.emplace_back(recipe.fhn.params);

  auto adjacency = build_er_adjacency(n, recipe.edge_probability,
                                      derive_seed(seed, static_cast<std::uint64_t>(Stream::adjacency)));
  return NetworkSpec(std::move(nodes), std::move(adjacency), recipe.coupling, recipe.rule);
}

}  // namespace oscidisc::netsim
