#include "oscidisc/experiment/sweep.hpp"

#include "oscidisc/experiment/pipelines.hpp"
#include "oscidisc/io.hpp"
#include "oscidisc/rng.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace oscidisc::experiment {
namespace {

void set_param(NetworkSection& net, const std::string& name, double value, int total_nodes) {
  auto& r = net.recipe;
  if (name == "n_kuramoto") {
    const int nk = static_cast<int>(std::llround(value));
    const int others = r.rayleigh.count + r.rossler.count;
    if (nk < 0 || nk + others > total_nodes) throw ArgumentError("n_kuramoto out of range for the node budget");
    r.kuramoto.count = nk;
    r.fhn.count = total_nodes - nk - others;
  } else if (name == "connectivity_threshold") {
    r.edge_probability = 1.0 - value;
  } else if (name == "edge_probability") {
    r.edge_probability = value;
  } else if (name == "kuramoto_mean_frequency") {
    r.kuramoto.omega_mean = value;
  } else if (name == "kuramoto_coupling") {
    r.coupling.kuramoto = value;
  } else if (name == "fhn_coupling") {
    r.coupling.fhn = value;
  } else {
    throw ArgumentError("unknown sweep parameter '" + name + "'");
  }
}

std::string threshold_tag(double t) { return io::format_shortest(t); }

}  // namespace

std::vector<std::vector<double>> sweep_grid(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<double>> out{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out) {
      for (double v : axis.values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, Index cell, int trial, bool force_same_seed) {
  return derive_seed(master, static_cast<std::uint64_t>(cell), force_same_seed ? 0u : static_cast<std::uint64_t>(trial));
}

NetworkSection apply_cell(const ExperimentConfig& config, const std::vector<double>& params) {
  NetworkSection net = config.network;
  for (std::size_t k = 0; k < params.size(); ++k)
    set_param(net, config.sweep.grid[k].param, params[k], config.sweep.total_nodes);
  return net;
}

SweepResult run_dimension_sweep(const ExperimentConfig& config, int trials, int jobs) {
  if (trials < 2) throw ArgumentError("a sweep needs at least 2 trials per cell");
  if (jobs < 1) throw ArgumentError("a sweep needs at least one worker");
  const auto started = std::chrono::steady_clock::now();

  SweepResult result;
  result.axes = config.sweep.grid;
  result.thresholds = config.reduction.thresholds;
  result.master_seed = config.seed;
  const auto grid = sweep_grid(result.axes);
  std::vector<NetworkSection> sections;
  for (const auto& params : grid) {
    sections.push_back(apply_cell(config, params));
    SweepCell cell;
    cell.params = params;
    result.cells.push_back(std::move(cell));
  }
  const auto total = static_cast<Index>(grid.size()) * trials;
  result.trials.resize(static_cast<std::size_t>(total));

  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (Index task = next++; task < total; task = next++) {
      const Index cell = task / trials;
      const int trial = static_cast<int>(task % trials);
      TrialRecord rec;
      rec.cell = cell;
      rec.trial = trial;
      rec.seed = trial_seed(config.seed, cell, trial, config.sweep.force_same_seed);
      try {
        const auto run = simulate_network(sections[static_cast<std::size_t>(cell)], rec.seed);
        rec.dimensions =
            reduction::estimate_dimension(run.observed, result.thresholds, config.reduction.convention);
      } catch (const BlowupError&) {
        rec.blowup = true;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
      result.trials[static_cast<std::size_t>(task)] = std::move(rec);
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = static_cast<int>(std::min<Index>(jobs, total));
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  aggregate(result);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

void aggregate(SweepResult& result) {
  const auto nt = result.thresholds.size();
  for (auto& cell : result.cells) {
    cell.trials = 0;
    cell.blowups = 0;
    cell.mean.assign(nt, 0.0);
    cell.stddev.assign(nt, 0.0);
  }
  std::vector<std::vector<std::vector<double>>> samples(result.cells.size(), std::vector<std::vector<double>>(nt));
  for (const auto& rec : result.trials) {
    auto& cell = result.cells.at(static_cast<std::size_t>(rec.cell));
    ++cell.trials;
    if (rec.blowup) {
      ++cell.blowups;
      continue;
    }
    for (std::size_t k = 0; k < nt; ++k)
      samples[static_cast<std::size_t>(rec.cell)][k].push_back(static_cast<double>(rec.dimensions.at(k)));
  }
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    auto& cell = result.cells[c];
    cell.failed = 2 * cell.blowups > cell.trials;
    for (std::size_t k = 0; k < nt; ++k) {
      const auto& xs = samples[c][k];
      if (xs.empty()) {
        cell.mean[k] = std::numeric_limits<double>::quiet_NaN();
        cell.stddev[k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double mean = sum / static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      cell.mean[k] = mean;
      cell.stddev[k] = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    }
  }
}

Matrix heatmap(const SweepResult& result, std::size_t threshold_index) {
  const Index rows = static_cast<Index>(result.axes.at(0).values.size());
  const Index cols = result.axes.size() > 1 ? static_cast<Index>(result.axes[1].values.size()) : 1;
  Matrix out(rows, cols);
  for (Index c = 0; c < static_cast<Index>(result.cells.size()); ++c)
    out(c / cols, c % cols) = result.cells[static_cast<std::size_t>(c)].mean.at(threshold_index);
  return out;
}

std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  io::Table log;
  log.header = {"cell", "trial", "seed", "blowup"};
  for (const auto& axis : result.axes) log.header.push_back(axis.param);
  for (double t : result.thresholds) log.header.push_back("dim_" + threshold_tag(t));
  for (const auto& rec : result.trials) {
    std::vector<std::string> row{std::to_string(rec.cell), std::to_string(rec.trial), std::to_string(rec.seed),
                                 rec.blowup ? "1" : "0"};
    for (double p : result.cells[static_cast<std::size_t>(rec.cell)].params) row.push_back(io::format_shortest(p));
    for (std::size_t k = 0; k < result.thresholds.size(); ++k)
      row.push_back(rec.blowup ? "" : std::to_string(rec.dimensions[k]));
    log.rows.push_back(std::move(row));
  }
  written.push_back(dir / "trials.csv");
  io::write_table_csv(written.back(), log);

  for (std::size_t k = 0; k < result.thresholds.size(); ++k) {
    const Matrix h = heatmap(result, k);
    io::Table table;
    const auto& first = result.axes[0];
    if (result.axes.size() > 1) {
      table.header.push_back(first.param + "\\" + result.axes[1].param);
      for (double v : result.axes[1].values) table.header.push_back(io::format_shortest(v));
    } else {
      table.header = {first.param, "mean_dimension"};
    }
    for (Index i = 0; i < h.rows(); ++i) {
      std::vector<std::string> row{io::format_shortest(first.values[static_cast<std::size_t>(i)])};
      for (Index j = 0; j < h.cols(); ++j) row.push_back(io::format_double(h(i, j)));
      table.rows.push_back(std::move(row));
    }
    written.push_back(dir / ("heatmap_" + threshold_tag(result.thresholds[k]) + ".csv"));
    io::write_table_csv(written.back(), table);
  }

  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json doc;
  doc["master_seed"] = result.master_seed;
  doc["wall_seconds"] = result.wall_seconds;
  doc["thresholds"] = result.thresholds;
  doc["axes"] = json::array();
  for (const auto& a : result.axes) doc["axes"].push_back({{"param", a.param}, {"values", a.values}});
  doc["cells"] = json::array();
  for (const auto& c : result.cells) {
    json mean = json::array(), sd = json::array();
    for (double v : c.mean) mean.push_back(num(v));
    for (double v : c.stddev) sd.push_back(num(v));
    doc["cells"].push_back({{"params", c.params},
                            {"trials", c.trials},
                            {"blowups", c.blowups},
                            {"failed", c.failed},
                            {"mean", std::move(mean)},
                            {"stddev", std::move(sd)}});
  }
  written.push_back(dir / "sweep.json");
  io::write_text(written.back(), doc.dump(2) + "\n");
  return written;
}

}  // namespace oscidisc::experiment
