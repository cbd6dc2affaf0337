#include "oscidisc/experiment/pipelines.hpp"

#include "oscidisc/analysis.hpp"
#include "oscidisc/experiment/sweep.hpp"
#include "oscidisc/io.hpp"
#include "oscidisc/rng.hpp"
#include "oscidisc/sindy/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oscidisc::experiment {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e.what());
  }
}

class Writer {
 public:
  Writer(fs::path dir, RunReport& report) : dir_(std::move(dir)), report_(report) {}

  fs::path operator()(const std::string& name) {
    report_.files.push_back(name);
    return dir_ / name;
  }

 private:
  fs::path dir_;
  RunReport& report_;
};

double period_of(const Trajectory& traj, Index column) {
  const auto p = analysis::estimate_period(traj.times, traj.states.col(column));
  return p ? *p : kNaN;
}

double rel_err(double value, double truth) { return std::abs(value - truth) / std::abs(truth); }

hybrid::HybridFitOptions fit_options(const ExperimentConfig& cfg, int vars) {
  hybrid::HybridFitOptions opt;
  opt.slow_library = cfg.sindy.slow_library.build(vars);
  opt.fast_library = cfg.sindy.fast_library.build(vars);
  for (const auto& [label, recipe] : cfg.sindy.region_libraries) opt.region_libraries[label] = recipe.build(vars);
  opt.lambda = cfg.sindy.lambda;
  opt.margin_fraction = cfg.hybrid.margin_fraction;
  opt.min_run = cfg.hybrid.min_run;
  opt.mode = cfg.hybrid.mode;
  opt.max_iter = cfg.sindy.max_iter;
  return opt;
}

std::vector<std::string> hybrid_texts(const hybrid::HybridModel& model) {
  std::vector<std::string> out{"slow:\n" + sindy::model_to_text(model.slow_model)};
  for (std::size_t k = 0; k < model.regions.size(); ++k) {
    out.push_back("region " + std::to_string(model.regions[k].label) + (model.regions[k].fast ? " (fast)" : " (slow)") +
                  ":\n" + sindy::model_to_text(model.region_models[k]));
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += p + "\n";
  return out;
}

// Alternation check for switched trajectories: every fast visit is preceded
// and followed by the slow model, and no region is visited twice in a row.
bool alternates(const std::vector<int>& visits) {
  int last_fast = -1;
  for (std::size_t i = 0; i < visits.size(); ++i) {
    if (visits[i] == 0) continue;
    if (i > 0 && visits[i - 1] != 0) return false;
    if (visits[i] == last_fast) return false;
    last_fast = visits[i];
  }
  return true;
}

void write_trim_mask(const fs::path& path, const Trajectory& traj, const sindy::TrimResult& trim) {
  Matrix m(traj.samples(), 3);
  for (Index i = 0; i < traj.samples(); ++i) {
    m(i, 0) = traj.times(i);
    m(i, 1) = trim.weights(i);
    m(i, 2) = trim.trim_mask[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  io::write_matrix_csv(path, m, {"t", "weight", "trimmed"});
}

void write_report(const fs::path& path, const ExperimentConfig& cfg, const RunReport& report) {
  json doc;
  doc["experiment"] = kind_name(cfg.kind);
  doc["name"] = cfg.name;
  doc["seed"] = cfg.seed;
  json metrics = json::object();
  for (const auto& [k, v] : report.metrics) {
    metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
    doc[k] = metrics[k];
  }
  doc["metrics"] = std::move(metrics);
  doc["models"] = report.models;
  auto files = report.files;
  files.push_back("report.json");
  doc["files"] = files;
  io::write_text(path, doc.dump(2) + "\n");
}

RunReport run_canonical(const ExperimentConfig& cfg, const fs::path& dir) {
  RunReport report;
  report.output_dir = dir;
  Writer out(dir, report);
  auto& met = report.metrics;
  const auto& c = cfg.canonical;

  const Trajectory window = stage("simulate", [&] {
    return netsim::canonical_oscillator(c.system, c.x0, 0.0, c.t_end, c.dt, {c.record_every}).since(c.transient);
  });
  const double period = period_of(window, 0);
  if (!std::isfinite(period)) throw PipelineError("simulate", "data window holds fewer than two oscillations");
  met["true_period"] = period;

  const auto opt = fit_options(cfg, 2);
  const auto trim = stage("trim", [&] {
    return sindy::stlsq_trimmed(sindy::build_library(window.states, opt.slow_library), *window.derivatives,
                                opt.slow_library, cfg.sindy.lambda, *cfg.sindy.trim_fraction,
                                cfg.sindy.max_outer_iter, cfg.sindy.max_iter);
  });
  const auto segments = hybrid::segment_trajectory(window, trim.trim, opt.min_run);
  const double periods_in_window = (window.times(window.samples() - 1) - window.times(0)) / period;
  met["trimmed_fraction"] = static_cast<double>(trim.trim.trimmed_count()) / static_cast<double>(window.samples());
  met["fast_segments"] = static_cast<double>(hybrid::count_fast(segments));
  met["fast_segments_per_period"] = static_cast<double>(hybrid::count_fast(segments)) / periods_in_window;

  const auto model = stage("fit", [&] { return hybrid::fit_hybrid(window, trim.trim, opt); });
  met["fast_regions"] = static_cast<double>(model.regions.size());
  report.models = hybrid_texts(model);

  const double duration = cfg.hybrid.simulate_periods * period;
  const Vector x0 = window.states.row(0).transpose();
  try {
    const auto sim = hybrid::simulate_hybrid(model, x0, 0.0, duration, c.dt, {c.record_every});
    const double sim_period = period_of(sim.trajectory, 0);
    const auto cycle_end = std::min<Index>(
        window.samples(), static_cast<Index>(std::ceil(period / (c.dt * static_cast<double>(c.record_every)))) + 1);
    const Matrix cycle = window.states.topRows(cycle_end);
    const auto visits = hybrid::visit_sequence(sim.labels);
    const auto fast_visits = std::count_if(visits.begin(), visits.end(), [](int l) { return l != 0; });
    met["sim_period"] = sim_period;
    met["cycle_period_rel_err"] = rel_err(sim_period, period);
    met["cycle_hausdorff_rel"] = cycle_distance(sim.trajectory.states, cycle) / analysis::bounding_diameter(cycle);
    met["dispatch_alternates"] = alternates(visits) ? 1.0 : 0.0;
    met["fast_visits_per_region_per_period"] =
        model.regions.empty() ? 0.0
                              : static_cast<double>(fast_visits) /
                                    (static_cast<double>(model.regions.size()) * cfg.hybrid.simulate_periods);
    met["extrapolation_warning"] = sim.extrapolation_warning ? 1.0 : 0.0;
    met["blowup"] = 0.0;
    stage("write", [&] {
      io::write_trajectory_csv(out("hybrid_sim.csv"), sim.trajectory, sim.labels);
      return 0;
    });
  } catch (const BlowupError& e) {
    met["blowup"] = 1.0;
    met["blowup_time"] = e.last_valid_time();
    met["cycle_period_rel_err"] = kNaN;
  }

  stage("write", [&] {
    io::write_trajectory_csv(out("trajectory.csv"), window);
    write_trim_mask(out("trim_mask.csv"), window, trim.trim);
    io::write_text(out("hybrid_model.json"), hybrid::hybrid_to_json(model) + "\n");
    io::write_text(out("model.txt"), join_lines(report.models));
    return 0;
  });
  return report;
}

// R² of derivative predictions on held-out samples [begin, end). Each sample
// is scored with the model of the region whose segments contain it; the
// pooled value and the worst single region are reported per block.
void score_holdout(const hybrid::HybridModel& model, const Trajectory& coords, Index begin,
                   const reduction::Reduction& red, std::map<std::string, double>& met) {
  const Index m = coords.samples();
  const Index d = coords.dim();
  const auto members = hybrid::member_labels(model, m);
  Matrix pred(m - begin, d);
  for (Index i = begin; i < m; ++i)
    pred.row(i - begin) = model.model_for(members[static_cast<std::size_t>(i)]).rhs(coords.states.row(i).transpose()).transpose();
  const Matrix truth = coords.derivatives->bottomRows(m - begin);
  for (Index j = 0; j < d; ++j)
    met["heldout_r2_" + coords.labels[static_cast<std::size_t>(j)]] = analysis::r_squared(truth.col(j), pred.col(j));

  std::vector<double> worst(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  int scored = 0;
  for (int label = 0; label <= static_cast<int>(model.regions.size()); ++label) {
    std::vector<Index> rows;
    for (Index i = begin; i < m; ++i)
      if (members[static_cast<std::size_t>(i)] == label) rows.push_back(i - begin);
    if (rows.size() < 10) continue;
    ++scored;
    for (Index j = 0; j < d; ++j) {
      Vector a(static_cast<Index>(rows.size())), b(static_cast<Index>(rows.size()));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        a(static_cast<Index>(k)) = truth(rows[k], j);
        b(static_cast<Index>(k)) = pred(rows[k], j);
      }
      worst[static_cast<std::size_t>(j)] = std::min(worst[static_cast<std::size_t>(j)], analysis::r_squared(a, b));
    }
  }
  met["heldout_regions_scored"] = scored;
  Index col = 0;
  for (const auto& block : red.basis.blocks) {
    double pooled = std::numeric_limits<double>::infinity();
    double region = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < block.rank; ++k, ++col) {
      pooled = std::min(pooled, met["heldout_r2_" + coords.labels[static_cast<std::size_t>(col)]]);
      region = std::min(region, worst[static_cast<std::size_t>(col)]);
    }
    met["heldout_r2_min_" + block.block.label] = pooled;
    met["heldout_r2_worst_region_" + block.block.label] = std::isfinite(region) ? region : kNaN;
  }
}

RunReport run_network(const ExperimentConfig& cfg, const fs::path& dir) {
  RunReport report;
  report.output_dir = dir;
  Writer out(dir, report);
  auto& met = report.metrics;

  const auto run = stage("simulate", [&] { return simulate_network(cfg.network, trial_seed(cfg.seed, 0, 0)); });
  const Trajectory& obs = run.observed;
  met["order_parameter"] = run.order_parameter;
  met["nodes"] = run.spec.node_count();
  met["state_dim"] = static_cast<double>(obs.dim());
  for (const auto& [name, block] : std::vector<std::pair<std::string, netsim::Family>>{
           {"v", netsim::Family::fhn}, {"x", netsim::Family::rayleigh}}) {
    const auto cols = run.spec.columns_of(block, 0);
    if (cols.empty()) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Index c : cols) {
      lo = std::min(lo, obs.states.col(c).minCoeff());
      hi = std::max(hi, obs.states.col(c).maxCoeff());
    }
    met["amplitude_" + name] = hi - lo;
  }

  const auto red = stage("reduce", [&] { return reduce_network(run.spec, obs, cfg.reduction); });
  const auto dims = stage("reduce", [&] {
    return reduction::estimate_dimension(obs, cfg.reduction.thresholds, cfg.reduction.convention);
  });
  for (std::size_t k = 0; k < dims.size(); ++k)
    met["dimension_" + io::format_shortest(cfg.reduction.thresholds[k])] = static_cast<double>(dims[k]);
  {
    const Vector& s = red.basis.singular_values;
    const double total = s.squaredNorm();
    const double head = s.head(std::min<Index>(red.basis.rank, s.size())).squaredNorm();
    met["energy_retained"] = total > 0.0 ? std::sqrt(head / total) : 1.0;
  }
  const Trajectory& coords = red.coordinates;
  const Index r = coords.dim();
  met["rank"] = static_cast<double>(r);
  met["cycle_recurrence_gap"] = recurrence_gap(coords.states);
  const double period = period_of(coords, 0);
  met["true_period"] = period;

  const double duration = coords.times(coords.samples() - 1) - coords.times(0);
  const double dt = cfg.network.dt;
  const Index stride = cfg.network.record_every;
  const Vector x0 = coords.states.row(0).transpose();

  if (cfg.hybrid.enabled) {
    auto opt = fit_options(cfg, static_cast<int>(r));
    const Index m = coords.samples();
    const Index m_test = static_cast<Index>(std::llround(cfg.hybrid.holdout_fraction * static_cast<double>(m)));
    opt.fit_end = m - m_test;
    const Trajectory& train = coords;
    const auto trim = stage("trim", [&] {
      return sindy::stlsq_trimmed(sindy::build_library(train.states, opt.slow_library), *train.derivatives,
                                  opt.slow_library, cfg.sindy.lambda, *cfg.sindy.trim_fraction,
                                  cfg.sindy.max_outer_iter, cfg.sindy.max_iter);
    });
    const auto segments = hybrid::segment_trajectory(train, trim.trim, opt.min_run);
    met["trimmed_fraction"] = static_cast<double>(trim.trim.trimmed_count()) / static_cast<double>(train.samples());
    met["fast_segments"] = static_cast<double>(hybrid::count_fast(segments));
    met["segments"] = static_cast<double>(segments.size());
    const auto model = stage("fit", [&] { return hybrid::fit_hybrid(train, trim.trim, opt); });
    met["regions"] = static_cast<double>(model.regions.size());
    met["fast_regions"] = static_cast<double>(
        std::count_if(model.regions.begin(), model.regions.end(), [](const auto& g) { return g.fast; }));
    report.models = hybrid_texts(model);
    if (m_test > 0) score_holdout(model, coords, m - m_test, red, met);
    try {
      const auto sim = hybrid::simulate_hybrid(model, x0, 0.0, duration, dt, {stride});
      met["sim_period"] = period_of(sim.trajectory, 0);
      met["cycle_period_rel_err"] = rel_err(met["sim_period"], period);
      met["extrapolation_warning"] = sim.extrapolation_warning ? 1.0 : 0.0;
      met["blowup"] = 0.0;
      stage("write", [&] {
        io::write_trajectory_csv(out("hybrid_sim.csv"), sim.trajectory, sim.labels);
        return 0;
      });
    } catch (const BlowupError& e) {
      met["blowup"] = 1.0;
      met["blowup_time"] = e.last_valid_time();
      met["cycle_period_rel_err"] = kNaN;
    }
    stage("write", [&] {
      write_trim_mask(out("trim_mask.csv"), train, trim.trim);
      io::write_text(out("hybrid_model.json"), hybrid::hybrid_to_json(model) + "\n");
      return 0;
    });
  } else {
    const auto lib = cfg.sindy.library.build(static_cast<int>(r));
    auto model = stage("fit", [&] {
      return sindy::stlsq(sindy::build_library(coords.states, lib), *coords.derivatives, lib, cfg.sindy.lambda,
                          cfg.sindy.max_iter);
    });
    model.var_names = coords.labels;
    Index max_active = 0;
    for (Index j = 0; j < model.xi.cols(); ++j)
      max_active = std::max<Index>(max_active, (model.xi.col(j).array() != 0.0).count());
    met["max_active_terms"] = static_cast<double>(max_active);
    met["active_terms"] = static_cast<double>(model.active_count());
    met["fit_r2_min"] = std::numeric_limits<double>::infinity();
    const Matrix pred = model.predict(coords.states);
    for (Index j = 0; j < r; ++j)
      met["fit_r2_min"] = std::min(met["fit_r2_min"], analysis::r_squared(coords.derivatives->col(j), pred.col(j)));
    report.models = {sindy::model_to_text(model)};
    try {
      const auto sim = sindy::simulate_model(model, x0, 0.0, duration, dt, {stride});
      met["sim_period"] = period_of(sim, 0);
      met["cycle_period_rel_err"] = rel_err(met["sim_period"], period);
      met["blowup"] = 0.0;
      stage("write", [&] {
        io::write_trajectory_csv(out("model_sim.csv"), sim);
        return 0;
      });
    } catch (const BlowupError& e) {
      met["blowup"] = 1.0;
      met["blowup_time"] = e.last_valid_time();
      met["cycle_period_rel_err"] = kNaN;
    }
    stage("write", [&] {
      io::write_text(out("model.json"), sindy::model_to_json(model) + "\n");
      return 0;
    });
  }

  stage("write", [&] {
    io::write_trajectory_csv(out("trajectory.csv"), obs);
    io::write_trajectory_csv(out("coordinates.csv"), coords);
    io::write_matrix_csv(out("singular_values.csv"), red.basis.singular_values, {"sigma"});
    io::write_matrix_csv(out("modes.csv"), red.basis.modes, numbered_labels("U_", red.basis.rank, 1));
    io::write_text(out("model.txt"), join_lines(report.models));
    return 0;
  });
  return report;
}

}  // namespace

NetworkRun simulate_network(const NetworkSection& section, std::uint64_t seed) {
  auto spec = netsim::build_network(section.recipe, seed);
  const Vector x0 =
      netsim::random_initial_state(spec, derive_seed(seed, static_cast<std::uint64_t>(Stream::initial_state)));
  const auto raw = netsim::simulate(spec, x0, 0.0, section.t_end, section.dt, {section.record_every});
  const Vector last = raw.states.row(raw.samples() - 1).transpose();
  NetworkRun run{spec, netsim::observe(spec, raw).since(section.transient), netsim::order_parameter(spec, last)};
  if (run.observed.samples() < 3) throw ArgumentError("fewer than 3 samples after the transient");
  return run;
}

reduction::Reduction reduce_network(const netsim::NetworkSpec& spec, const Trajectory& observed,
                                    const ReductionSection& section) {
  if (section.blocks.empty()) return reduction::reduce(observed, section.rank, section.center);
  reduction::BlockMap blocks;
  std::vector<Index> ranks;
  for (const auto& b : section.blocks) {
    auto cols = spec.columns_of(b.family, b.component);
    if (cols.empty()) {
      throw ArgumentError("block '" + b.label + "' selects no columns (family " +
                          std::string(netsim::family_name(b.family)) + ", component " + std::to_string(b.component) +
                          ")");
    }
    blocks.push_back({b.label, std::move(cols)});
    ranks.push_back(b.rank);
  }
  return reduction::reduce_blockwise(observed, blocks, ranks, section.center);
}

double cycle_distance(const Matrix& a, const Matrix& b, Index max_points) {
  auto directed = [max_points](const Matrix& from, const Matrix& to) {
    const Index stride = std::max<Index>(1, (from.rows() + max_points - 1) / max_points);
    double worst = 0.0;
    for (Index i = 0; i < from.rows(); i += stride) {
      const double best = (to.rowwise() - from.row(i)).rowwise().squaredNorm().minCoeff();
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  if (a.rows() == 0 || b.rows() == 0) return std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

double recurrence_gap(const Matrix& states) {
  const Index m = states.rows();
  if (m < 4) return kNaN;
  const double diameter = analysis::bounding_diameter(states);
  const auto later = states.bottomRows(m - m / 4);
  const double gap = std::sqrt((later.rowwise() - states.row(0)).rowwise().squaredNorm().minCoeff());
  return diameter > 0.0 ? gap / diameter : 0.0;
}

RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw PipelineError("write", "cannot create " + output_dir.string() + ": " + ec.message());

  RunReport report;
  switch (config.kind) {
    case ExperimentKind::canonical_hybrid: report = run_canonical(config, output_dir); break;
    case ExperimentKind::network_reduce_fit:
    case ExperimentKind::mixed_network: report = run_network(config, output_dir); break;
    case ExperimentKind::dimension_sweep: {
      const auto result =
          stage("simulate", [&] { return run_dimension_sweep(config, config.sweep.trials, config.sweep.jobs); });
      report.output_dir = output_dir;
      for (const auto& p : stage("write", [&] { return write_sweep_outputs(result, output_dir); }))
        report.files.push_back(p.filename().string());
      int blowups = 0, failed = 0;
      for (const auto& c : result.cells) {
        blowups += c.blowups;
        failed += c.failed ? 1 : 0;
      }
      report.metrics["cells"] = static_cast<double>(result.cells.size());
      report.metrics["trials"] = static_cast<double>(result.trials.size());
      report.metrics["blowups"] = blowups;
      report.metrics["failed_cells"] = failed;
      break;
    }
  }
  stage("write", [&] {
    write_report(output_dir / "report.json", config, report);
    return 0;
  });
  report.files.push_back("report.json");
  return report;
}

}  // namespace oscidisc::experiment
