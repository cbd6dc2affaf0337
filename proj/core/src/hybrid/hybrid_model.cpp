#include "oscidisc/hybrid/hybrid_model.hpp"

#include "oscidisc/sindy/derivatives.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace oscidisc::hybrid {
namespace {

using sindy::LibrarySpec;
using sindy::SparseModel;

SparseModel fit_rows(const Trajectory& traj, const Matrix& xdot, const std::vector<Index>& rows,
                     const LibrarySpec& library, double lambda, int max_iter, const std::string& name) {
  const auto p = library.size();
  if (static_cast<Index>(rows.size()) < 2 * p) {
    std::ostringstream msg;
    msg << "region " << name << " has " << rows.size() << " samples; its library of " << p << " terms needs at least "
        << 2 * p;
    throw UnderdeterminedError(msg.str(), name);
  }
  Matrix x(static_cast<Index>(rows.size()), traj.dim());
  Matrix dx(static_cast<Index>(rows.size()), xdot.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    x.row(static_cast<Index>(k)) = traj.states.row(rows[k]);
    dx.row(static_cast<Index>(k)) = xdot.row(rows[k]);
  }
  SparseModel model = sindy::stlsq(sindy::build_library(x, library), dx, library, lambda, max_iter);
  if (traj.labels.size() == static_cast<std::size_t>(traj.dim())) model.var_names = traj.labels;
  return model;
}

std::vector<Index> member_rows(const FastRegion& r, Index end) {
  std::vector<Index> rows;
  for (const auto& s : r.segments)
    for (Index i = s.begin; i < std::min(s.end, end); ++i) rows.push_back(i);
  return rows;
}

// Evaluates Θ(x)Ξ for a fixed model without reallocating.
class ModelRhs {
 public:
  explicit ModelRhs(const SparseModel& model)
      : model_(&model), feat_(static_cast<std::size_t>(model.library.size())) {}

  void operator()(double, const Vector& x, Vector& dx) {
    sindy::evaluate_library(model_->library, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                            feat_);
    dx.noalias() = model_->xi.transpose() * Eigen::Map<const Vector>(feat_.data(), model_->library.size());
  }

 private:
  const SparseModel* model_;
  std::vector<double> feat_;
};

}  // namespace

int HybridModel::dispatch(const Vector& x) const {
  for (std::size_t k = 0; k < regions.size(); ++k)
    if (regions[k].contains(x)) return static_cast<int>(k) + 1;
  return 0;
}

const SparseModel& HybridModel::model_for(int label) const {
  if (label == 0) return slow_model;
  if (label < 0 || label > static_cast<int>(region_models.size())) throw ArgumentError("unknown region label");
  return region_models[static_cast<std::size_t>(label - 1)];
}

double HybridModel::hull_excursion(const Vector& x) const {
  if (hull_lo.size() != x.size()) return 0.0;
  const double diameter = (hull_hi - hull_lo).norm();
  const Vector outside = (hull_lo - x).cwiseMax(x - hull_hi).cwiseMax(0.0);
  const double dist = outside.norm();
  if (diameter <= 0.0) return dist > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return dist / diameter;
}

HybridModel fit_hybrid(const Trajectory& traj, const sindy::TrimResult& trim, const HybridFitOptions& options) {
  traj.validate();
  const Matrix xdot = traj.has_derivatives() ? *traj.derivatives : sindy::estimate_derivatives(traj);
  const auto segments = segment_trajectory(traj, trim, options.min_run);
  const Vector margin = default_margin(traj, options.margin_fraction);

  HybridModel model;
  model.state_dim = traj.dim();
  model.hull_lo = traj.states.colwise().minCoeff().transpose();
  model.hull_hi = traj.states.colwise().maxCoeff().transpose();

  const Index end = options.fit_end < 0 ? traj.samples() : std::min(options.fit_end, traj.samples());
  const auto rule = options.mode == RegionMode::per_segment ? MergeRule::centroid : MergeRule::overlap;
  auto fast_regions = build_fast_regions(traj, segments, margin, true, rule);
  model.regions = fast_regions;
  if (options.mode == RegionMode::per_segment) {
    auto slow_regions = build_fast_regions(traj, segments, margin, false, rule);
    model.regions.insert(model.regions.end(), slow_regions.begin(), slow_regions.end());
  }
  for (std::size_t k = 0; k < model.regions.size(); ++k) model.regions[k].label = static_cast<int>(k) + 1;

  for (const auto& region : model.regions) {
    const auto found = options.region_libraries.find(region.label);
    const LibrarySpec& lib = found != options.region_libraries.end() ? found->second
                             : region.fast                            ? options.fast_library
                                                                      : options.slow_library;
    const std::string name = (region.fast ? "fast_" : "slow_") + std::to_string(region.label);
    model.region_models.push_back(
        fit_rows(traj, xdot, member_rows(region, end), lib, options.lambda, options.max_iter, name));
  }

  std::vector<Index> outside;
  for (Index i = 0; i < end; ++i) {
    const Vector x = traj.states.row(i).transpose();
    const bool in_fast = std::any_of(fast_regions.begin(), fast_regions.end(),
                                     [&](const FastRegion& r) { return r.contains(x); });
    if (!in_fast) outside.push_back(i);
  }
  model.slow_model = fit_rows(traj, xdot, outside, options.slow_library, options.lambda, options.max_iter, "slow");
  return model;
}

std::vector<int> member_labels(const HybridModel& model, Index samples) {
  std::vector<int> out(static_cast<std::size_t>(samples), 0);
  for (const auto& r : model.regions)
    for (const auto& s : r.segments)
      for (Index i = s.begin; i < std::min(s.end, samples); ++i) out[static_cast<std::size_t>(i)] = r.label;
  return out;
}

HybridSimulation simulate_hybrid(const HybridModel& model, const Vector& x0, double t0, double t1, double dt,
                                 IntegrationOptions options) {
  if (x0.size() != model.state_dim) {
    std::ostringstream msg;
    msg << "initial state has length " << x0.size() << ", hybrid model expects " << model.state_dim;
    throw StructuralError(msg.str());
  }
  const Index steps = step_count(t0, t1, dt);
  const Index stride = std::max<Index>(1, options.record_every);
  const Index records = steps / stride + 1;

  std::vector<ModelRhs> rhs;
  rhs.emplace_back(model.slow_model);
  for (const auto& m : model.region_models) rhs.emplace_back(m);

  HybridSimulation out;
  auto& traj = out.trajectory;
  traj.times.resize(records);
  traj.states.resize(records, x0.size());
  out.labels.reserve(static_cast<std::size_t>(records));

  Rk4Stepper stepper(x0.size());
  Vector x = x0;
  Index row = 0;
  auto record = [&](double t, int label) {
    traj.times(row) = t;
    traj.states.row(row++) = x.transpose();
    out.labels.push_back(label);
    out.max_hull_excursion = std::max(out.max_hull_excursion, model.hull_excursion(x));
  };

  int label = model.dispatch(x);
  record(t0, label);
  for (Index k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    stepper.step(rhs[static_cast<std::size_t>(label)], t, x, dt);
    if (!x.allFinite()) {
      std::ostringstream msg;
      msg << "hybrid integration blew up after t=" << t;
      throw BlowupError(msg.str(), t);
    }
    label = model.dispatch(x);
    if ((k + 1) % stride == 0 && row < records) record(t0 + static_cast<double>(k + 1) * dt, label);
  }
  traj.times.conservativeResize(row);
  traj.states.conservativeResize(row, Eigen::NoChange);
  traj.labels = model.slow_model.var_names.size() == static_cast<std::size_t>(model.state_dim)
                    ? model.slow_model.var_names
                    : sindy::default_var_names(static_cast<int>(model.state_dim));
  out.extrapolation_warning = out.max_hull_excursion > 0.5;
  return out;
}

std::vector<int> visit_sequence(const std::vector<int>& labels) {
  std::vector<int> out;
  for (int l : labels)
    if (out.empty() || out.back() != l) out.push_back(l);
  return out;
}

}  // namespace oscidisc::hybrid
