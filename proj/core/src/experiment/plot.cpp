#include "oscidisc/experiment/plot.hpp"

#include "oscidisc/hybrid/hybrid_model.hpp"
#include "oscidisc/hybrid/segments.hpp"
#include "oscidisc/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace oscidisc::experiment {
namespace {

namespace fs = std::filesystem;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Frame {
  double x0, x1, y0, y1;
  double sx(double x) const { return 60.0 + (x - x0) / (x1 - x0 + 1e-300) * 520.0; }
  double sy(double y) const { return 420.0 - (y - y0) / (y1 - y0 + 1e-300) * 380.0; }
};

Frame frame_of(const Vector& x, const Vector& y) {
  return {x.minCoeff(), x.maxCoeff(), y.minCoeff(), y.maxCoeff()};
}

std::string svg_open(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\">\n"
    << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
    << "<rect x=\"60\" y=\"40\" width=\"520\" height=\"380\" fill=\"none\" stroke=\"black\"/>\n"
    << "<text x=\"320\" y=\"25\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
    << "<text x=\"320\" y=\"465\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n"
    << "<text x=\"18\" y=\"230\" font-size=\"12\" transform=\"rotate(-90 18 230)\" text-anchor=\"middle\">" << ylabel
    << "</text>\n";
  return s.str();
}

void write_scatter_svg(const fs::path& path, const Vector& x, const Vector& y, const std::vector<std::string>& groups,
                       const std::string& xlabel, const std::string& ylabel) {
  const auto f = frame_of(x, y);
  std::map<std::string, std::size_t> colour;
  std::ostringstream s;
  s << svg_open("phase plane", xlabel, ylabel);
  const Index stride = std::max<Index>(1, x.size() / 4000);
  for (Index i = 0; i < x.size(); i += stride) {
    const auto& g = groups[static_cast<std::size_t>(i)];
    const auto c = colour.emplace(g, colour.size()).first->second;
    s << "<circle cx=\"" << f.sx(x(i)) << "\" cy=\"" << f.sy(y(i)) << "\" r=\"1.2\" fill=\""
      << kPalette[c % kPalette.size()] << "\"/>\n";
  }
  int row = 0;
  for (const auto& [g, c] : colour) {
    s << "<text x=\"590\" y=\"" << 55 + 14 * row++ << "\" font-size=\"11\" fill=\"" << kPalette[c % kPalette.size()]
      << "\">" << g << "</text>\n";
  }
  s << "</svg>\n";
  io::write_text(path, s.str());
}

void write_line_svg(const fs::path& path, const Vector& x, const Vector& y, const std::string& xlabel,
                    const std::string& ylabel) {
  const auto f = frame_of(x, y);
  std::ostringstream s;
  s << svg_open(ylabel + " vs " + xlabel, xlabel, ylabel) << "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
  const Index stride = std::max<Index>(1, x.size() / 4000);
  for (Index i = 0; i < x.size(); i += stride) s << f.sx(x(i)) << ',' << f.sy(y(i)) << ' ';
  s << "\"/>\n</svg>\n";
  io::write_text(path, s.str());
}

void write_heat_svg(const fs::path& path, const Matrix& h, const std::string& title) {
  std::ostringstream s;
  s << svg_open(title, "axis 2", "axis 1");
  const double lo = h.minCoeff(), hi = h.maxCoeff();
  const double w = 520.0 / static_cast<double>(h.cols()), ht = 380.0 / static_cast<double>(h.rows());
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = 0; j < h.cols(); ++j) {
      const double u = hi > lo ? (h(i, j) - lo) / (hi - lo) : 0.0;
      const int shade = std::isfinite(u) ? static_cast<int>(255.0 * (1.0 - u)) : 255;
      s << "<rect x=\"" << 60.0 + w * static_cast<double>(j) << "\" y=\"" << 40.0 + ht * static_cast<double>(i)
        << "\" width=\"" << w << "\" height=\"" << ht << "\" fill=\"rgb(255," << shade << ',' << shade << ")\"/>\n";
    }
  }
  s << "</svg>\n";
  io::write_text(path, s.str());
}

std::vector<fs::path> phase_plane(const fs::path& dir, bool svg) {
  const fs::path source = fs::exists(dir / "coordinates.csv") ? dir / "coordinates.csv" : dir / "trajectory.csv";
  const auto traj = io::read_trajectory_csv(source);
  if (traj.dim() < 2) throw MissingArtifactError(source.string() + " has fewer than two state columns");
  const auto mask_table = io::read_table_csv(dir / "trim_mask.csv");
  const auto it = std::find(mask_table.header.begin(), mask_table.header.end(), "trimmed");
  if (it == mask_table.header.end()) throw MissingArtifactError("trim_mask.csv lacks a 'trimmed' column");
  const auto col = static_cast<std::size_t>(it - mask_table.header.begin());
  std::vector<bool> mask;
  for (const auto& row : mask_table.rows) mask.push_back(row.at(col) == "1");
  const Index m = std::min<Index>(traj.samples(), static_cast<Index>(mask.size()));

  std::optional<hybrid::HybridModel> model;
  if (fs::exists(dir / "hybrid_model.json")) {
    model = hybrid::hybrid_from_json(io::read_text(dir / "hybrid_model.json"));
    if (model->state_dim != traj.dim()) model.reset();
  }
  mask.resize(static_cast<std::size_t>(m));
  const auto segment_mask = hybrid::segments_to_mask(hybrid::segment_mask(mask));

  io::Table table;
  table.header = {"x", "y", "label"};
  std::vector<std::string> groups;
  for (Index i = 0; i < m; ++i) {
    std::string label = segment_mask[static_cast<std::size_t>(i)] ? "fast" : "slow";
    if (model) {
      const int k = model->dispatch(traj.states.row(i).transpose());
      if (k == 0) {
        label = "slow";
      } else {
        const auto& r = model->regions[static_cast<std::size_t>(k - 1)];
        label = (r.fast ? "fast_" : "slow_") + std::to_string(r.label);
      }
    }
    table.rows.push_back({io::format_double(traj.states(i, 0)), io::format_double(traj.states(i, 1)), label});
    groups.push_back(label);
  }
  std::vector<fs::path> out{dir / "phase_plane.csv"};
  io::write_table_csv(out.back(), table);
  if (svg) {
    out.push_back(dir / "phase_plane.svg");
    write_scatter_svg(out.back(), traj.states.col(0).head(m), traj.states.col(1).head(m), groups, traj.labels[0],
                      traj.labels[1]);
  }
  return out;
}

std::vector<fs::path> projections(const fs::path& dir, bool svg) {
  const auto coords = io::read_trajectory_csv(dir / "coordinates.csv");
  std::vector<fs::path> out;
  for (Index i = 0; i + 1 < coords.dim(); i += 2) {
    const auto a = coords.labels[static_cast<std::size_t>(i)];
    const auto b = coords.labels[static_cast<std::size_t>(i + 1)];
    const std::string stem = "projection_" + a + "_" + b;
    Matrix m(coords.samples(), 3);
    m << coords.times, coords.states.col(i), coords.states.col(i + 1);
    out.push_back(dir / (stem + ".csv"));
    io::write_matrix_csv(out.back(), m, {"t", a, b});
    if (svg) {
      out.push_back(dir / (stem + ".svg"));
      write_line_svg(out.back(), coords.states.col(i), coords.states.col(i + 1), a, b);
    }
  }
  return out;
}

std::vector<fs::path> heatmaps(const fs::path& dir, bool svg) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(io::read_text(dir / "sweep.json"));
  } catch (const json::exception& e) {
    throw MissingArtifactError(std::string("sweep.json is malformed: ") + e.what());
  }
  const auto& axes = doc.at("axes");
  const auto thresholds = doc.at("thresholds").get<std::vector<double>>();
  const auto first = axes.at(0).at("values").get<std::vector<double>>();
  const auto second = axes.size() > 1 ? axes.at(1).at("values").get<std::vector<double>>() : std::vector<double>{};
  const Index rows = static_cast<Index>(first.size());
  const Index cols = second.empty() ? 1 : static_cast<Index>(second.size());
  const auto& cells = doc.at("cells");
  if (static_cast<Index>(cells.size()) != rows * cols) throw MissingArtifactError("sweep.json cell count differs from its grid");

  std::vector<fs::path> out;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    Matrix h(rows, cols);
    for (Index c = 0; c < rows * cols; ++c) {
      const auto& v = cells.at(static_cast<std::size_t>(c)).at("mean").at(k);
      h(c / cols, c % cols) = v.is_null() ? std::nan("") : v.get<double>();
    }
    io::Table table;
    const auto p1 = axes.at(0).at("param").get<std::string>();
    if (second.empty()) {
      table.header = {p1, "mean_dimension"};
    } else {
      table.header.push_back(p1 + "\\" + axes.at(1).at("param").get<std::string>());
      for (double v : second) table.header.push_back(io::format_shortest(v));
    }
    for (Index i = 0; i < rows; ++i) {
      std::vector<std::string> row{io::format_shortest(first[static_cast<std::size_t>(i)])};
      for (Index j = 0; j < cols; ++j) row.push_back(io::format_double(h(i, j)));
      table.rows.push_back(std::move(row));
    }
    const std::string stem = "heatmap_" + io::format_shortest(thresholds[k]);
    out.push_back(dir / (stem + ".csv"));
    io::write_table_csv(out.back(), table);
    if (svg) {
      out.push_back(dir / (stem + ".svg"));
      write_heat_svg(out.back(), h, "mean dimension at " + io::format_shortest(thresholds[k]));
    }
  }
  return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& dir, bool svg) {
  if (!fs::is_directory(dir)) throw MissingArtifactError(dir.string() + " is not a directory");
  const bool has_phase = fs::exists(dir / "trim_mask.csv") &&
                         (fs::exists(dir / "trajectory.csv") || fs::exists(dir / "coordinates.csv"));
  const bool has_coords = fs::exists(dir / "coordinates.csv");
  const bool has_sweep = fs::exists(dir / "sweep.json");
  if (!has_phase && !has_coords && !has_sweep) {
    throw MissingArtifactError("no plottable artifacts in " + dir.string() +
                               "; expected trajectory.csv with trim_mask.csv, coordinates.csv, or sweep.json");
  }
  std::vector<fs::path> out;
  try {
    if (has_phase)
      for (auto& p : phase_plane(dir, svg)) out.push_back(std::move(p));
    if (has_coords)
      for (auto& p : projections(dir, svg)) out.push_back(std::move(p));
    if (has_sweep)
      for (auto& p : heatmaps(dir, svg)) out.push_back(std::move(p));
  } catch (const MissingArtifactError&) {
    throw;
  } catch (const Error& e) {
    throw MissingArtifactError(e.what());
  }
  return out;
}

}  // namespace oscidisc::experiment
