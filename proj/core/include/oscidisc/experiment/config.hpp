#pragma once

#include "oscidisc/hybrid/hybrid_model.hpp"
#include "oscidisc/netsim/builder.hpp"
#include "oscidisc/netsim/canonical.hpp"
#include "oscidisc/reduction/reduction.hpp"
#include "oscidisc/sindy/library.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oscidisc::experiment {

/// A configuration document violated the schema. `field()` is the dotted path
/// of the offending key, e.g. "network.kuramoto.count".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& reason)
      : Error(field + ": " + reason), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ExperimentKind { canonical_hybrid, network_reduce_fit, mixed_network, dimension_sweep };

std::string_view kind_name(ExperimentKind kind) noexcept;

/// Library description that is materialised once the variable count is known.
struct LibraryRecipe {
  int polynomial_degree = 1;
  /// Variables entering the polynomial part; empty means all of them.
  std::vector<int> polynomial_vars;
  bool include_constant = true;
  struct Reciprocal {
    int var = 0;
    double shift = 0.0;
    double guard = 1e-3;
  };
  std::vector<Reciprocal> reciprocals;
  std::vector<int> sines;
  std::vector<int> cosines;
  struct AbsMonomial {
    int var = 0;
    std::vector<int> powers;
  };
  std::vector<AbsMonomial> abs_monomials;

  sindy::LibrarySpec build(int var_count) const;
};

struct CanonicalSection {
  netsim::CanonicalKind system = netsim::VanDerPol{};
  Vector x0 = Vector::Constant(2, 2.0);
  double dt = 1e-3;
  double t_end = 60.0;
  /// Samples before this time are discarded.
  double transient = 30.0;
  Index record_every = 1;
};

struct NetworkSection {
  netsim::NetworkRecipe recipe;
  double dt = 0.1;
  double t_end = 2000.0;
  double transient = 1000.0;
  Index record_every = 5;
};

struct BlockConfig {
  std::string label;
  netsim::Family family = netsim::Family::fhn;
  int component = 0;
  Index rank = 1;
};

struct ReductionSection {
  Index rank = 2;
  /// Non-empty selects a block-wise reduction; ranks come from each block.
  std::vector<BlockConfig> blocks;
  bool center = false;
  std::vector<double> thresholds{0.9, 0.95, 0.99};
  reduction::DimensionConvention convention = reduction::DimensionConvention::error;
};

struct SindySection {
  double lambda = 0.05;
  std::optional<double> trim_fraction;
  int max_iter = 25;
  int max_outer_iter = 50;
  LibraryRecipe library;
  LibraryRecipe slow_library;
  LibraryRecipe fast_library;
  std::map<int, LibraryRecipe> region_libraries;
};

struct HybridSection {
  bool enabled = false;
  double margin_fraction = 0.02;
  Index min_run = 3;
  hybrid::RegionMode mode = hybrid::RegionMode::fast_only;
  /// Fraction of the window (taken from its end) held out when scoring the
  /// hybrid model's derivative predictions.
  double holdout_fraction = 0.0;
  /// Length of the hybrid re-simulation, in periods of the data.
  double simulate_periods = 1.0;
};

struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

struct SweepSection {
  std::vector<SweepAxis> grid;
  int trials = 20;
  int jobs = 1;
  bool force_same_seed = false;
  int total_nodes = 100;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::canonical_hybrid;
  std::string name;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "output";
  CanonicalSection canonical;
  NetworkSection network;
  ReductionSection reduction;
  SindySection sindy;
  HybridSection hybrid;
  SweepSection sweep;
};

/// Parameters a sweep axis may vary.
const std::vector<std::string>& sweep_parameters();

/// Parses a YAML document. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The configured output directory, unless OSCIDISC_OUTPUT_DIR is set.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

}  // namespace oscidisc::experiment
