#include "oscidisc/experiment/config.hpp"

#include "oscidisc/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <set>

namespace oscidisc::experiment {
namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed,
                const std::string& what = "unknown key") {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(path.empty() ? "<document>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(join(path, key), what);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "has the wrong type");
  }
}

template <class T>
T get(const YAML::Node& parent, const std::string& path, const std::string& key, T fallback) {
  const auto node = parent[key];
  if (!node) return fallback;
  return scalar<T>(node, join(path, key));
}

template <class T>
std::vector<T> get_list(const YAML::Node& parent, const std::string& path, const std::string& key,
                        std::vector<T> fallback) {
  const auto node = parent[key];
  if (!node) return fallback;
  const auto field = join(path, key);
  if (!node.IsSequence()) throw ConfigError(field, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar<T>(node[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

void require(bool ok, const std::string& field, const std::string& reason) {
  if (!ok) throw ConfigError(field, reason);
}

LibraryRecipe parse_library(const YAML::Node& node, const std::string& path, LibraryRecipe lib) {
  if (!node) return lib;
  check_keys(node, path, {"polynomial", "reciprocal", "sin", "cos", "abs"});
  if (const auto poly = node["polynomial"]) {
    const auto field = join(path, "polynomial");
    if (poly.IsScalar()) {
      lib.polynomial_degree = scalar<int>(poly, field);
    } else {
      check_keys(poly, field, {"degree", "vars", "constant"});
      lib.polynomial_degree = get<int>(poly, field, "degree", lib.polynomial_degree);
      lib.polynomial_vars = get_list<int>(poly, field, "vars", {});
      lib.include_constant = get<bool>(poly, field, "constant", true);
    }
    require(lib.polynomial_degree >= 0, field, "degree must be non-negative");
  }
  if (const auto rec = node["reciprocal"]) {
    const auto field = join(path, "reciprocal");
    require(rec.IsSequence(), field, "expected a list");
    for (std::size_t i = 0; i < rec.size(); ++i) {
      const auto f = field + "[" + std::to_string(i) + "]";
      check_keys(rec[i], f, {"var", "shift", "guard"});
      LibraryRecipe::Reciprocal r;
      r.var = get<int>(rec[i], f, "var", 0);
      r.shift = get<double>(rec[i], f, "shift", 0.0);
      r.guard = get<double>(rec[i], f, "guard", 1e-3);
      require(r.guard > 0.0, join(f, "guard"), "must be positive");
      lib.reciprocals.push_back(r);
    }
  }
  lib.sines = get_list<int>(node, path, "sin", lib.sines);
  lib.cosines = get_list<int>(node, path, "cos", lib.cosines);
  if (const auto abs = node["abs"]) {
    const auto field = join(path, "abs");
    require(abs.IsSequence(), field, "expected a list");
    for (std::size_t i = 0; i < abs.size(); ++i) {
      const auto f = field + "[" + std::to_string(i) + "]";
      check_keys(abs[i], f, {"var", "powers"});
      lib.abs_monomials.push_back({get<int>(abs[i], f, "var", 0), get_list<int>(abs[i], f, "powers", {})});
    }
  }
  return lib;
}

netsim::Family parse_family(const YAML::Node& node, const std::string& field) {
  const auto s = scalar<std::string>(node, field);
  if (s == "kuramoto") return netsim::Family::kuramoto;
  if (s == "rayleigh") return netsim::Family::rayleigh;
  if (s == "rossler") return netsim::Family::rossler;
  if (s == "fhn") return netsim::Family::fhn;
  throw ConfigError(field, "unknown oscillator kind '" + s + "'");
}

void parse_canonical(const YAML::Node& node, CanonicalSection& c) {
  const std::string path = "canonical";
  check_keys(node, path, {"system", "mu", "epsilon", "x0", "dt", "t_end", "transient", "record_every"});
  const auto system = get<std::string>(node, path, "system", "van_der_pol");
  if (system == "van_der_pol") {
    netsim::VanDerPol v;
    v.mu = get<double>(node, path, "mu", v.mu);
    require(v.mu > 0.0, "canonical.mu", "must be positive");
    c.system = v;
  } else if (system == "rayleigh") {
    netsim::RayleighOscillator r;
    r.epsilon = get<double>(node, path, "epsilon", r.epsilon);
    require(r.epsilon > 0.0, "canonical.epsilon", "must be positive");
    c.system = r;
  } else {
    throw ConfigError("canonical.system", "unknown oscillator kind '" + system + "'");
  }
  const auto x0 = get_list<double>(node, path, "x0", {c.x0(0), c.x0(1)});
  require(x0.size() == 2, "canonical.x0", "must have 2 entries");
  c.x0 = Eigen::Map<const Vector>(x0.data(), 2);
  c.dt = get<double>(node, path, "dt", c.dt);
  c.t_end = get<double>(node, path, "t_end", c.t_end);
  c.transient = get<double>(node, path, "transient", c.transient);
  c.record_every = get<Index>(node, path, "record_every", c.record_every);
  require(c.dt > 0.0, "canonical.dt", "must be positive");
  require(c.transient >= 0.0 && c.transient < c.t_end, "canonical.transient", "must lie in [0, t_end)");
  require(c.record_every >= 1, "canonical.record_every", "must be at least 1");
}

void parse_network(const YAML::Node& node, NetworkSection& n) {
  const std::string path = "network";
  check_keys(node, path,
             {"kuramoto", "rayleigh", "rossler", "fhn", "edge_probability", "coupling", "cross_coupling", "dt", "t_end",
              "transient", "record_every"},
             "unknown oscillator kind or key");
  auto& r = n.recipe;
  if (const auto k = node["kuramoto"]) {
    check_keys(k, "network.kuramoto", {"count", "omega_mean", "omega_width"});
    r.kuramoto.count = get<int>(k, "network.kuramoto", "count", 0);
    r.kuramoto.omega_mean = get<double>(k, "network.kuramoto", "omega_mean", r.kuramoto.omega_mean);
    r.kuramoto.omega_width = get<double>(k, "network.kuramoto", "omega_width", r.kuramoto.omega_width);
    require(r.kuramoto.omega_width >= 0.0, "network.kuramoto.omega_width", "must be non-negative");
  }
  if (const auto k = node["rayleigh"]) {
    check_keys(k, "network.rayleigh", {"count", "epsilon_lo", "epsilon_hi"});
    r.rayleigh.count = get<int>(k, "network.rayleigh", "count", 0);
    r.rayleigh.epsilon_lo = get<double>(k, "network.rayleigh", "epsilon_lo", r.rayleigh.epsilon_lo);
    r.rayleigh.epsilon_hi = get<double>(k, "network.rayleigh", "epsilon_hi", r.rayleigh.epsilon_hi);
    require(r.rayleigh.epsilon_lo > 0.0 && r.rayleigh.epsilon_hi >= r.rayleigh.epsilon_lo, "network.rayleigh",
            "epsilon range must satisfy 0 < epsilon_lo <= epsilon_hi");
  }
  if (const auto k = node["rossler"]) {
    check_keys(k, "network.rossler", {"count", "a", "b", "c"});
    r.rossler.count = get<int>(k, "network.rossler", "count", 0);
    r.rossler.params.a = get<double>(k, "network.rossler", "a", r.rossler.params.a);
    r.rossler.params.b = get<double>(k, "network.rossler", "b", r.rossler.params.b);
    r.rossler.params.c = get<double>(k, "network.rossler", "c", r.rossler.params.c);
  }
  if (const auto k = node["fhn"]) {
    const std::string f = "network.fhn";
    check_keys(k, f, {"count", "alpha1", "alpha2", "alpha3", "c", "b", "stimulus"});
    auto& p = r.fhn.params;
    r.fhn.count = get<int>(k, f, "count", 0);
    p.alpha1 = get<double>(k, f, "alpha1", p.alpha1);
    p.alpha2 = get<double>(k, f, "alpha2", p.alpha2);
    p.alpha3 = get<double>(k, f, "alpha3", p.alpha3);
    p.c_gain = get<double>(k, f, "c", p.c_gain);
    p.b_decay = get<double>(k, f, "b", p.b_decay);
    p.stimulus = get<double>(k, f, "stimulus", p.stimulus);
  }
  for (const auto* name : {"kuramoto", "rayleigh", "rossler", "fhn"}) {
    if (node[name]) require(node[name]["count"] && node[name]["count"].as<int>(-1) >= 0,
                            std::string("network.") + name + ".count", "must be a non-negative integer");
  }
  require(r.node_count() >= 1 || !node, "network", "needs at least one node");
  r.edge_probability = get<double>(node, path, "edge_probability", r.edge_probability);
  require(r.edge_probability >= 0.0 && r.edge_probability <= 1.0, "network.edge_probability", "must lie in [0, 1]");
  if (const auto k = node["coupling"]) {
    check_keys(k, "network.coupling", {"kuramoto", "rayleigh", "rossler", "fhn"}, "unknown oscillator kind");
    r.coupling.kuramoto = get<double>(k, "network.coupling", "kuramoto", r.coupling.kuramoto);
    r.coupling.rayleigh = get<double>(k, "network.coupling", "rayleigh", r.coupling.rayleigh);
    r.coupling.rossler = get<double>(k, "network.coupling", "rossler", r.coupling.rossler);
    r.coupling.fhn = get<double>(k, "network.coupling", "fhn", r.coupling.fhn);
    for (double K : {r.coupling.kuramoto, r.coupling.rayleigh, r.coupling.rossler, r.coupling.fhn})
      require(K >= 0.0, "network.coupling", "strengths must be non-negative");
  }
  const auto rule = get<std::string>(node, path, "cross_coupling", "symmetric_sine");
  if (rule == "symmetric_sine") {
    r.rule = netsim::CrossCouplingRule::symmetric_sine;
  } else if (rule == "same_family_only") {
    r.rule = netsim::CrossCouplingRule::same_family_only;
  } else {
    throw ConfigError("network.cross_coupling", "must be symmetric_sine or same_family_only");
  }
  n.dt = get<double>(node, path, "dt", n.dt);
  n.t_end = get<double>(node, path, "t_end", n.t_end);
  n.transient = get<double>(node, path, "transient", n.transient);
  n.record_every = get<Index>(node, path, "record_every", n.record_every);
  require(n.dt > 0.0, "network.dt", "must be positive");
  require(n.transient >= 0.0 && n.transient < n.t_end, "network.transient", "must lie in [0, t_end)");
  require(n.record_every >= 1, "network.record_every", "must be at least 1");
}

void parse_reduction(const YAML::Node& node, ReductionSection& r) {
  const std::string path = "reduction";
  check_keys(node, path, {"rank", "blocks", "center", "thresholds", "convention"});
  r.rank = get<Index>(node, path, "rank", r.rank);
  require(r.rank >= 1, "reduction.rank", "must be at least 1");
  r.center = get<bool>(node, path, "center", r.center);
  r.thresholds = get_list<double>(node, path, "thresholds", r.thresholds);
  require(!r.thresholds.empty(), "reduction.thresholds", "must not be empty");
  for (double t : r.thresholds) require(t > 0.0 && t <= 1.0, "reduction.thresholds", "entries must lie in (0, 1]");
  const auto conv = get<std::string>(node, path, "convention", "error");
  if (conv == "error") {
    r.convention = reduction::DimensionConvention::error;
  } else if (conv == "energy") {
    r.convention = reduction::DimensionConvention::energy;
  } else {
    throw ConfigError("reduction.convention", "must be error or energy");
  }
  if (const auto blocks = node["blocks"]) {
    require(blocks.IsSequence(), "reduction.blocks", "expected a list");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto f = "reduction.blocks[" + std::to_string(i) + "]";
      check_keys(blocks[i], f, {"label", "family", "component", "rank"});
      BlockConfig b;
      require(static_cast<bool>(blocks[i]["family"]), join(f, "family"), "is required");
      b.family = parse_family(blocks[i]["family"], join(f, "family"));
      b.component = get<int>(blocks[i], f, "component", 0);
      b.rank = get<Index>(blocks[i], f, "rank", 1);
      b.label = get<std::string>(blocks[i], f, "label", "block" + std::to_string(i));
      require(b.rank >= 1, join(f, "rank"), "must be at least 1");
      require(b.component >= 0, join(f, "component"), "must be non-negative");
      r.blocks.push_back(std::move(b));
    }
  }
}

void parse_sindy(const YAML::Node& node, SindySection& s) {
  const std::string path = "sindy";
  check_keys(node, path,
             {"lambda", "trim_fraction", "max_iter", "max_outer_iter", "library", "slow_library", "fast_library",
              "region_libraries"});
  s.lambda = get<double>(node, path, "lambda", s.lambda);
  require(s.lambda >= 0.0, "sindy.lambda", "must be non-negative");
  if (node["trim_fraction"]) {
    s.trim_fraction = scalar<double>(node["trim_fraction"], "sindy.trim_fraction");
    require(*s.trim_fraction >= 0.0 && *s.trim_fraction < 1.0, "sindy.trim_fraction", "must lie in [0, 1)");
  }
  s.max_iter = get<int>(node, path, "max_iter", s.max_iter);
  s.max_outer_iter = get<int>(node, path, "max_outer_iter", s.max_outer_iter);
  require(s.max_iter >= 1, "sindy.max_iter", "must be at least 1");
  require(s.max_outer_iter >= 1, "sindy.max_outer_iter", "must be at least 1");
  s.library = parse_library(node["library"], "sindy.library", s.library);
  s.slow_library = parse_library(node["slow_library"], "sindy.slow_library", s.library);
  s.fast_library = parse_library(node["fast_library"], "sindy.fast_library", s.library);
  if (const auto regions = node["region_libraries"]) {
    require(regions.IsMap(), "sindy.region_libraries", "expected a mapping from region label to library");
    for (const auto& kv : regions) {
      const auto key = kv.first.as<std::string>();
      const auto field = "sindy.region_libraries." + key;
      const int label = scalar<int>(kv.first, field);
      require(label >= 1, field, "region labels start at 1");
      s.region_libraries[label] = parse_library(kv.second, field, LibraryRecipe{});
    }
  }
}

void parse_hybrid(const YAML::Node& node, HybridSection& h) {
  const std::string path = "hybrid";
  check_keys(node, path, {"enabled", "margin_fraction", "min_run", "mode", "holdout_fraction", "simulate_periods"});
  h.enabled = node ? get<bool>(node, path, "enabled", true) : false;
  h.margin_fraction = get<double>(node, path, "margin_fraction", h.margin_fraction);
  h.min_run = get<Index>(node, path, "min_run", h.min_run);
  h.holdout_fraction = get<double>(node, path, "holdout_fraction", h.holdout_fraction);
  h.simulate_periods = get<double>(node, path, "simulate_periods", h.simulate_periods);
  const auto mode = get<std::string>(node, path, "mode", "fast_only");
  if (mode == "fast_only") {
    h.mode = hybrid::RegionMode::fast_only;
  } else if (mode == "per_segment") {
    h.mode = hybrid::RegionMode::per_segment;
  } else {
    throw ConfigError("hybrid.mode", "must be fast_only or per_segment");
  }
  require(h.margin_fraction >= 0.0, "hybrid.margin_fraction", "must be non-negative");
  require(h.min_run >= 1, "hybrid.min_run", "must be at least 1");
  require(h.holdout_fraction >= 0.0 && h.holdout_fraction < 1.0, "hybrid.holdout_fraction", "must lie in [0, 1)");
  require(h.simulate_periods > 0.0, "hybrid.simulate_periods", "must be positive");
}

void parse_sweep(const YAML::Node& node, SweepSection& s) {
  const std::string path = "sweep";
  check_keys(node, path, {"grid", "trials", "jobs", "force_same_seed", "total_nodes"});
  s.trials = get<int>(node, path, "trials", s.trials);
  s.jobs = get<int>(node, path, "jobs", s.jobs);
  s.force_same_seed = get<bool>(node, path, "force_same_seed", s.force_same_seed);
  s.total_nodes = get<int>(node, path, "total_nodes", s.total_nodes);
  require(s.trials >= 2, "sweep.trials", "must be at least 2");
  require(s.jobs >= 1, "sweep.jobs", "must be at least 1");
  require(s.total_nodes >= 1, "sweep.total_nodes", "must be at least 1");
  const auto grid = node["grid"];
  require(grid && grid.IsSequence() && grid.size() >= 1 && grid.size() <= 2, "sweep.grid",
          "must list one or two axes");
  const auto& known = sweep_parameters();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto f = "sweep.grid[" + std::to_string(i) + "]";
    check_keys(grid[i], f, {"param", "values"});
    SweepAxis axis;
    axis.param = get<std::string>(grid[i], f, "param", "");
    require(std::find(known.begin(), known.end(), axis.param) != known.end(), join(f, "param"),
            "unknown sweep parameter '" + axis.param + "'");
    axis.values = get_list<double>(grid[i], f, "values", {});
    require(!axis.values.empty(), join(f, "values"), "must not be empty");
    s.grid.push_back(std::move(axis));
  }
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::canonical_hybrid: return "canonical_hybrid";
    case ExperimentKind::network_reduce_fit: return "network_reduce_fit";
    case ExperimentKind::mixed_network: return "mixed_network";
    case ExperimentKind::dimension_sweep: return "dimension_sweep";
  }
  return "canonical_hybrid";
}

sindy::LibrarySpec LibraryRecipe::build(int var_count) const {
  sindy::LibrarySpec lib(var_count);
  std::vector<int> vars = polynomial_vars;
  if (vars.empty())
    for (int v = 0; v < var_count; ++v) vars.push_back(v);
  for (int v : vars)
    if (v < 0 || v >= var_count) throw ArgumentError("library variable index " + std::to_string(v) + " out of range");
  const auto sub = sindy::LibrarySpec::polynomial(static_cast<int>(vars.size()), polynomial_degree, include_constant);
  for (const auto& t : sub.terms()) {
    std::vector<int> powers(static_cast<std::size_t>(var_count), 0);
    for (std::size_t k = 0; k < vars.size(); ++k) powers[static_cast<std::size_t>(vars[k])] = t.powers[k];
    lib.add(sindy::Term::monomial(std::move(powers)));
  }
  for (const auto& r : reciprocals) lib.add(sindy::Term::reciprocal(r.var, r.shift, r.guard));
  for (int v : sines) lib.add(sindy::Term::sine(v));
  for (int v : cosines) lib.add(sindy::Term::cosine(v));
  for (const auto& a : abs_monomials) lib.add(sindy::Term::abs_monomial(a.var, a.powers));
  return lib;
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"n_kuramoto",        "connectivity_threshold", "edge_probability",
                                              "kuramoto_mean_frequency", "kuramoto_coupling", "fhn_coupling"};
  return names;
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", std::string("not valid YAML: ") + e.what());
  }
  require(root && root.IsMap(), "<document>", "expected a mapping at the top level");
  check_keys(root, "",
             {"experiment", "name", "seed", "output_dir", "canonical", "network", "reduction", "sindy", "hybrid",
              "sweep"});

  ExperimentConfig cfg;
  require(static_cast<bool>(root["experiment"]), "experiment", "is required");
  const auto kind = scalar<std::string>(root["experiment"], "experiment");
  if (kind == "canonical_hybrid") {
    cfg.kind = ExperimentKind::canonical_hybrid;
  } else if (kind == "network_reduce_fit") {
    cfg.kind = ExperimentKind::network_reduce_fit;
  } else if (kind == "mixed_network") {
    cfg.kind = ExperimentKind::mixed_network;
  } else if (kind == "dimension_sweep") {
    cfg.kind = ExperimentKind::dimension_sweep;
  } else {
    throw ConfigError("experiment", "unknown experiment kind '" + kind + "'");
  }
  cfg.name = get<std::string>(root, "", "name", kind);
  cfg.seed = get<std::uint64_t>(root, "", "seed", cfg.seed);
  cfg.output_dir = get<std::string>(root, "", "output_dir", "output/" + cfg.name);

  if (cfg.kind == ExperimentKind::canonical_hybrid) {
    require(static_cast<bool>(root["canonical"]), "canonical", "is required for canonical_hybrid");
    parse_canonical(root["canonical"], cfg.canonical);
    cfg.sindy.library.polynomial_degree = 3;
  } else {
    require(static_cast<bool>(root["network"]), "network", "is required for " + kind);
    parse_network(root["network"], cfg.network);
  }
  parse_reduction(root["reduction"], cfg.reduction);
  parse_sindy(root["sindy"], cfg.sindy);
  parse_hybrid(root["hybrid"], cfg.hybrid);
  if (cfg.kind == ExperimentKind::canonical_hybrid) {
    require(cfg.sindy.trim_fraction.has_value(), "sindy.trim_fraction", "is required for canonical_hybrid");
    cfg.hybrid.enabled = true;
  }
  if (cfg.hybrid.enabled && cfg.kind != ExperimentKind::canonical_hybrid)
    require(cfg.sindy.trim_fraction.has_value(), "sindy.trim_fraction", "is required when hybrid is enabled");
  if (cfg.kind == ExperimentKind::dimension_sweep) {
    require(static_cast<bool>(root["sweep"]), "sweep", "is required for dimension_sweep");
    parse_sweep(root["sweep"], cfg.sweep);
  } else {
    require(!root["sweep"], "sweep", "only applies to dimension_sweep");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const Error& e) {
    throw ConfigError("<file>", e.what());
  }
  return parse_config(text);
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("OSCIDISC_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return config.output_dir;
}

}  // namespace oscidisc::experiment
