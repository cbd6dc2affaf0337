#include "oscidisc/hybrid/hybrid_model.hpp"
#include "oscidisc/sindy/model.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace oscidisc {
namespace {

using nlohmann::json;
using sindy::LibrarySpec;
using sindy::SparseModel;
using sindy::Term;
using sindy::TermKind;

const char* kind_name(TermKind k) {
  switch (k) {
    case TermKind::monomial: return "monomial";
    case TermKind::sine: return "sine";
    case TermKind::cosine: return "cosine";
    case TermKind::reciprocal: return "reciprocal";
    case TermKind::abs_monomial: return "abs_monomial";
  }
  return "monomial";
}

TermKind kind_from(const std::string& s) {
  if (s == "monomial") return TermKind::monomial;
  if (s == "sine") return TermKind::sine;
  if (s == "cosine") return TermKind::cosine;
  if (s == "reciprocal") return TermKind::reciprocal;
  if (s == "abs_monomial") return TermKind::abs_monomial;
  throw ArgumentError("unknown library term kind '" + s + "'");
}

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

json library_json(const LibrarySpec& lib) {
  json terms = json::array();
  for (const auto& t : lib.terms()) {
    json e{{"kind", kind_name(t.kind)}};
    switch (t.kind) {
      case TermKind::monomial: e["powers"] = t.powers; break;
      case TermKind::abs_monomial:
        e["powers"] = t.powers;
        e["var"] = t.var;
        break;
      case TermKind::reciprocal:
        e["var"] = t.var;
        e["shift"] = t.shift;
        e["guard"] = t.guard;
        break;
      case TermKind::sine:
      case TermKind::cosine: e["var"] = t.var; break;
    }
    terms.push_back(std::move(e));
  }
  return json{{"var_count", lib.var_count()}, {"terms", std::move(terms)}};
}

LibrarySpec library_from(const json& j) {
  LibrarySpec lib(j.at("var_count").get<int>());
  for (const auto& e : j.at("terms")) {
    Term t;
    t.kind = kind_from(e.at("kind").get<std::string>());
    if (e.contains("powers")) t.powers = e.at("powers").get<std::vector<int>>();
    if (e.contains("var")) t.var = e.at("var").get<int>();
    if (e.contains("shift")) t.shift = e.at("shift").get<double>();
    if (e.contains("guard")) t.guard = e.at("guard").get<double>();
    lib.add(std::move(t));
  }
  return lib;
}

json model_json(const SparseModel& m) {
  json xi = json::array();
  for (Index r = 0; r < m.xi.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.xi.cols(); ++c) row.push_back(m.xi(r, c));
    xi.push_back(std::move(row));
  }
  const double cond = m.diagnostics.condition_estimate;
  return json{{"library", library_json(m.library)},
              {"term_names", m.library.names(m.var_names.size() == static_cast<std::size_t>(m.library.var_count())
                                                 ? m.var_names
                                                 : std::vector<std::string>{})},
              {"var_names", m.var_names},
              {"state_dim", m.state_dim()},
              {"xi", std::move(xi)},
              {"lambda", m.threshold},
              {"metadata",
               {{"active_count", m.active_count()},
                {"iterations", m.diagnostics.iterations},
                {"converged", m.diagnostics.converged},
                {"rank_deficient", m.diagnostics.rank_deficient},
                {"condition_estimate", std::isfinite(cond) ? json(cond) : json(nullptr)}}}};
}

SparseModel model_from(const json& j) {
  SparseModel m;
  m.library = library_from(j.at("library"));
  m.var_names = j.value("var_names", std::vector<std::string>{});
  const auto d = j.at("state_dim").get<Index>();
  const auto& xi = j.at("xi");
  if (static_cast<Index>(xi.size()) != m.library.size()) throw StructuralError("xi row count differs from library size");
  m.xi.resize(m.library.size(), d);
  for (Index r = 0; r < m.xi.rows(); ++r) {
    const auto& row = xi.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != d) throw StructuralError("xi row length differs from state dimension");
    for (Index c = 0; c < d; ++c) m.xi(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  m.threshold = j.at("lambda").get<double>();
  if (j.contains("metadata")) {
    const auto& md = j.at("metadata");
    m.diagnostics.iterations = md.value("iterations", 0);
    m.diagnostics.converged = md.value("converged", true);
    m.diagnostics.rank_deficient = md.value("rank_deficient", false);
    const auto& cond = md.at("condition_estimate");
    m.diagnostics.condition_estimate = cond.is_null() ? std::numeric_limits<double>::infinity() : cond.get<double>();
  }
  return m;
}

template <class F>
auto parse_guarded(const std::string& text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace

namespace sindy {

std::string model_to_json(const SparseModel& model) { return model_json(model).dump(2); }

SparseModel model_from_json(const std::string& text) {
  return parse_guarded(text, [](const json& j) { return model_from(j); });
}

}  // namespace sindy

namespace hybrid {

std::string hybrid_to_json(const HybridModel& model) {
  json regions = json::array();
  for (std::size_t k = 0; k < model.regions.size(); ++k) {
    const auto& r = model.regions[k];
    json segs = json::array();
    for (const auto& s : r.segments) segs.push_back({s.begin, s.end});
    regions.push_back({{"label", r.label},
                       {"fast", r.fast},
                       {"lo", vec_json(r.lo)},
                       {"hi", vec_json(r.hi)},
                       {"margin", vec_json(r.margin)},
                       {"centroid", vec_json(r.centroid)},
                       {"segments", std::move(segs)},
                       {"model", model_json(model.region_models[k])}});
  }
  return json{{"state_dim", model.state_dim},
              {"regions", std::move(regions)},
              {"slow_model", model_json(model.slow_model)},
              {"metadata", {{"hull_lo", vec_json(model.hull_lo)}, {"hull_hi", vec_json(model.hull_hi)}}}}
      .dump(2);
}

HybridModel hybrid_from_json(const std::string& text) {
  return parse_guarded(text, [](const json& j) {
    HybridModel m;
    m.state_dim = j.at("state_dim").get<Index>();
    for (const auto& r : j.at("regions")) {
      FastRegion region;
      region.label = r.at("label").get<int>();
      region.fast = r.value("fast", true);
      region.lo = vec_from(r.at("lo"));
      region.hi = vec_from(r.at("hi"));
      region.margin = r.contains("margin") ? vec_from(r.at("margin")) : Vector::Zero(region.lo.size());
      region.centroid = r.contains("centroid") ? vec_from(r.at("centroid")) : Vector(0.5 * (region.lo + region.hi));
      if (region.lo.size() != m.state_dim || region.hi.size() != m.state_dim || region.margin.size() != m.state_dim)
        throw StructuralError("region bounds differ from state dimension");
      if ((region.lo.array() > region.hi.array()).any()) throw ArgumentError("region has lo > hi");
      if (r.contains("segments"))
        for (const auto& s : r.at("segments")) region.segments.push_back({s.at(0).get<Index>(), s.at(1).get<Index>(), region.fast});
      m.regions.push_back(std::move(region));
      m.region_models.push_back(model_from(r.at("model")));
    }
    m.slow_model = model_from(j.at("slow_model"));
    if (j.contains("metadata")) {
      m.hull_lo = vec_from(j.at("metadata").at("hull_lo"));
      m.hull_hi = vec_from(j.at("metadata").at("hull_hi"));
    }
    return m;
  });
}

}  // namespace hybrid
}  // namespace oscidisc
