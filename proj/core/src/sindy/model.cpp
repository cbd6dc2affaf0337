#include "oscidisc/sindy/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace oscidisc::sindy {
namespace {

std::string four_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.4g", v);
  std::string s(buf);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

Trajectory simulate_model(const SparseModel& model, const Vector& x0, double t0, double t1, double dt,
                          IntegrationOptions options) {
  const Index d = model.state_dim();
  if (model.library.var_count() != d) throw StructuralError("model library variables differ from its state dimension");
  if (x0.size() != d) {
    std::ostringstream msg;
    msg << "initial state has length " << x0.size() << ", model expects " << d;
    throw StructuralError(msg.str());
  }
  std::vector<double> feat(static_cast<std::size_t>(model.library.size()));
  const Eigen::Map<const Vector> fv(feat.data(), model.library.size());
  auto rhs = [&](double, const Vector& x, Vector& dx) {
    evaluate_library(model.library, std::span<const double>(x.data(), static_cast<std::size_t>(d)), feat);
    dx.noalias() = model.xi.transpose() * fv;
  };
  auto res = integrate_rk4(rhs, x0, t0, t1, dt, options);
  Trajectory out;
  out.times = std::move(res.times);
  out.states = std::move(res.states);
  out.labels = model.var_names.size() == static_cast<std::size_t>(d) ? model.var_names
                                                                      : default_var_names(static_cast<int>(d));
  return out;
}

std::string model_to_text(const SparseModel& model) {
  const auto vars = model.var_names.size() == static_cast<std::size_t>(model.library.var_count())
                        ? model.var_names
                        : default_var_names(model.library.var_count());
  const auto names = model.library.names(vars);
  const auto lhs = model.var_names.size() == static_cast<std::size_t>(model.state_dim())
                       ? model.var_names
                       : default_var_names(static_cast<int>(model.state_dim()));
  std::ostringstream out;
  for (Index c = 0; c < model.state_dim(); ++c) {
    std::vector<Index> active;
    for (Index k = 0; k < model.xi.rows(); ++k)
      if (model.xi(k, c) != 0.0) active.push_back(k);
    std::stable_sort(active.begin(), active.end(), [&](Index a, Index b) {
      return std::abs(model.xi(a, c)) > std::abs(model.xi(b, c));
    });
    out << 'd' << lhs[static_cast<std::size_t>(c)] << "/dt = ";
    if (active.empty()) out << '0';
    for (std::size_t j = 0; j < active.size(); ++j) {
      const double v = model.xi(active[j], c);
      const std::string& term = names[static_cast<std::size_t>(active[j])];
      if (j == 0) {
        out << four_sig(v);
      } else {
        out << (v < 0 ? " - " : " + ") << four_sig(std::abs(v));
      }
      if (term != "1") out << ' ' << term;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace oscidisc::sindy
