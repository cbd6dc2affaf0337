#pragma once

#include "oscidisc/hybrid/regions.hpp"
#include "oscidisc/ode.hpp"
#include "oscidisc/sindy/library.hpp"
#include "oscidisc/sindy/regression.hpp"

#include <map>
#include <string>
#include <vector>

namespace oscidisc::hybrid {

/// Switched system: the first region containing the state supplies the
/// dynamics, otherwise the slow model does.
struct HybridModel {
  std::vector<FastRegion> regions;
  std::vector<sindy::SparseModel> region_models;
  sindy::SparseModel slow_model;
  Index state_dim = 0;
  /// Bounding box of the training states.
  Vector hull_lo;
  Vector hull_hi;

  /// 0 for the slow model, k for regions[k - 1].
  int dispatch(const Vector& x) const;
  const sindy::SparseModel& model_for(int label) const;
  /// Distance from `x` to the training box, relative to its diagonal.
  double hull_excursion(const Vector& x) const;
};

enum class RegionMode {
  /// Fast regions from trimmed runs; one slow model elsewhere.
  fast_only,
  /// Every segment becomes a region; fast segments group only with fast ones
  /// and slow with slow, by mutual centroid containment. Fast regions take
  /// precedence in dispatch.
  per_segment
};

struct HybridFitOptions {
  sindy::LibrarySpec slow_library;
  sindy::LibrarySpec fast_library;
  /// Overrides keyed by region label.
  std::map<int, sindy::LibrarySpec> region_libraries;
  double lambda = 0.1;
  double margin_fraction = 0.02;
  Index min_run = 3;
  RegionMode mode = RegionMode::fast_only;
  int max_iter = 25;
  /// Only samples before this index are used to fit models (all when
  /// negative); geometry still uses every segment.
  Index fit_end = -1;
};

/// Region label of every sample under the model's segment membership
/// (0 for samples outside all regions' member segments).
std::vector<int> member_labels(const HybridModel& model, Index samples);

/// Fits one sparse model per region on its member segments and a slow model on
/// the samples outside every fast region. Uses the trajectory's derivatives
/// when present, otherwise central differences.
HybridModel fit_hybrid(const Trajectory& traj, const sindy::TrimResult& trim, const HybridFitOptions& options);

struct HybridSimulation {
  Trajectory trajectory;
  /// Active model per recorded sample.
  std::vector<int> labels;
  bool extrapolation_warning = false;
  double max_hull_excursion = 0.0;
};

/// RK4 with the active model chosen at the start of each step and held for
/// all of its stages.
HybridSimulation simulate_hybrid(const HybridModel& model, const Vector& x0, double t0, double t1, double dt,
                                 IntegrationOptions options = {});

/// Label sequence with consecutive repeats collapsed.
std::vector<int> visit_sequence(const std::vector<int>& labels);

std::string hybrid_to_json(const HybridModel& model);
HybridModel hybrid_from_json(const std::string& text);

}  // namespace oscidisc::hybrid
