#include "oscidisc/sindy/library.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscidisc::sindy {
namespace {

double ipow(double base, int exp) {
  double out = 1.0;
  for (int k = 0; k < exp; ++k) out *= base;
  return out;
}

std::string format_shift(double shift) {
  std::ostringstream s;
  s << std::abs(shift);
  return s.str();
}

void append_factors(std::ostringstream& out, const std::vector<int>& powers, int skip,
                    const std::vector<std::string>& names, bool& first) {
  for (std::size_t k = 0; k < powers.size(); ++k) {
    if (static_cast<int>(k) == skip || powers[k] == 0) continue;
    if (!first) out << ' ';
    out << names[k];
    if (powers[k] > 1) out << '^' << powers[k];
    first = false;
  }
}

// Exponent vectors of total degree `degree`, earlier variables first.
void compositions(int vars, int degree, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  const auto pos = cur.size();
  if (static_cast<int>(pos) == vars - 1) {
    cur.push_back(degree);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int p = degree; p >= 0; --p) {
    cur.push_back(p);
    compositions(vars, degree - p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Term Term::constant(int var_count) { return monomial(std::vector<int>(static_cast<std::size_t>(var_count), 0)); }

Term Term::monomial(std::vector<int> powers) {
  Term t;
  t.kind = TermKind::monomial;
  t.powers = std::move(powers);
  return t;
}

Term Term::sine(int var) {
  Term t;
  t.kind = TermKind::sine;
  t.var = var;
  return t;
}

Term Term::cosine(int var) {
  Term t;
  t.kind = TermKind::cosine;
  t.var = var;
  return t;
}

Term Term::reciprocal(int var, double shift, double guard) {
  Term t;
  t.kind = TermKind::reciprocal;
  t.var = var;
  t.shift = shift;
  t.guard = guard;
  return t;
}

Term Term::abs_monomial(int var, std::vector<int> powers) {
  Term t;
  t.kind = TermKind::abs_monomial;
  t.var = var;
  t.powers = std::move(powers);
  return t;
}

double Term::evaluate(std::span<const double> x) const {
  switch (kind) {
    case TermKind::monomial: {
      double out = 1.0;
      for (std::size_t k = 0; k < powers.size(); ++k) out *= ipow(x[k], powers[k]);
      return out;
    }
    case TermKind::sine: return std::sin(x[static_cast<std::size_t>(var)]);
    case TermKind::cosine: return std::cos(x[static_cast<std::size_t>(var)]);
    case TermKind::reciprocal: {
      double denom = x[static_cast<std::size_t>(var)] - shift;
      if (std::abs(denom) < guard) denom = std::signbit(denom) ? -guard : guard;
      return 1.0 / denom;
    }
    case TermKind::abs_monomial: {
      double out = ipow(std::abs(x[static_cast<std::size_t>(var)]), powers[static_cast<std::size_t>(var)]);
      for (std::size_t k = 0; k < powers.size(); ++k) {
        if (static_cast<int>(k) != var) out *= ipow(x[k], powers[k]);
      }
      return out;
    }
  }
  return 0.0;
}

std::string Term::name(const std::vector<std::string>& var_names) const {
  std::ostringstream out;
  const auto& v = var_names;
  switch (kind) {
    case TermKind::monomial: {
      bool first = true;
      append_factors(out, powers, -1, v, first);
      if (first) out << '1';
      break;
    }
    case TermKind::sine: out << "sin(" << v[static_cast<std::size_t>(var)] << ')'; break;
    case TermKind::cosine: out << "cos(" << v[static_cast<std::size_t>(var)] << ')'; break;
    case TermKind::reciprocal:
      if (shift == 0.0) {
        out << "1/" << v[static_cast<std::size_t>(var)];
      } else {
        out << "1/(" << v[static_cast<std::size_t>(var)] << (shift > 0 ? '-' : '+') << format_shift(shift) << ')';
      }
      break;
    case TermKind::abs_monomial: {
      out << '|' << v[static_cast<std::size_t>(var)] << '|';
      const int p = powers[static_cast<std::size_t>(var)];
      if (p > 1) out << '^' << p;
      bool first = false;
      append_factors(out, powers, var, v, first);
      break;
    }
  }
  return out.str();
}

LibrarySpec& LibrarySpec::add(Term term) {
  const auto vars = static_cast<std::size_t>(var_count_);
  auto bad = [](const std::string& why) { throw ArgumentError("invalid library term: " + why); };
  switch (term.kind) {
    case TermKind::monomial:
    case TermKind::abs_monomial:
      if (term.powers.size() != vars) bad("exponent vector length differs from variable count");
      if (std::any_of(term.powers.begin(), term.powers.end(), [](int p) { return p < 0; })) {
        bad("negative exponent");
      }
      if (term.kind == TermKind::abs_monomial) {
        if (term.var < 0 || term.var >= var_count_) bad("variable index out of range");
        if (term.powers[static_cast<std::size_t>(term.var)] < 1) bad("absolute-value power must be at least 1");
      }
      term.var = term.kind == TermKind::monomial ? 0 : term.var;
      term.shift = 0.0;
      term.guard = 1e-3;
      break;
    case TermKind::reciprocal:
      if (!(term.guard > 0.0)) bad("reciprocal guard radius must be positive");
      [[fallthrough]];
    case TermKind::sine:
    case TermKind::cosine:
      if (term.var < 0 || term.var >= var_count_) bad("variable index out of range");
      term.powers.clear();
      if (term.kind != TermKind::reciprocal) {
        term.shift = 0.0;
        term.guard = 1e-3;
      }
      break;
  }
  if (std::find(terms_.begin(), terms_.end(), term) != terms_.end()) {
    throw ArgumentError("duplicate library term " + term.name(default_var_names(var_count_)));
  }
  terms_.push_back(std::move(term));
  return *this;
}

std::vector<std::string> LibrarySpec::names(const std::vector<std::string>& var_names) const {
  const auto vn = var_names.empty() ? default_var_names(var_count_) : var_names;
  std::vector<std::string> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.name(vn));
  return out;
}

LibrarySpec LibrarySpec::polynomial(int var_count, int max_degree, bool include_constant) {
  if (var_count < 1) throw ArgumentError("polynomial library needs at least one variable");
  if (max_degree < 0) throw ArgumentError("polynomial degree must be non-negative");
  LibrarySpec lib(var_count);
  for (int deg = include_constant ? 0 : 1; deg <= max_degree; ++deg) {
    std::vector<std::vector<int>> exps;
    std::vector<int> cur;
    compositions(var_count, deg, cur, exps);
    for (auto& e : exps) lib.add(Term::monomial(std::move(e)));
  }
  return lib;
}

std::vector<std::string> default_var_names(int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

void evaluate_library(const LibrarySpec& spec, std::span<const double> x, std::span<double> out) {
  for (Index k = 0; k < spec.size(); ++k) out[static_cast<std::size_t>(k)] = spec[k].evaluate(x);
}

Matrix build_library(const Matrix& states, const LibrarySpec& spec) {
  if (states.cols() != spec.var_count()) {
    std::ostringstream msg;
    msg << "library expects " << spec.var_count() << " variables, data has " << states.cols();
    throw StructuralError(msg.str());
  }
  Matrix theta(states.rows(), spec.size());
  std::vector<double> row(static_cast<std::size_t>(states.cols()));
  std::vector<double> feat(static_cast<std::size_t>(spec.size()));
  for (Index i = 0; i < states.rows(); ++i) {
    for (Index j = 0; j < states.cols(); ++j) {
      const double v = states(i, j);
      if (!std::isfinite(v)) throw ArgumentError("non-finite sample in row " + std::to_string(i));
      row[static_cast<std::size_t>(j)] = v;
    }
    evaluate_library(spec, row, feat);
    for (Index k = 0; k < spec.size(); ++k) theta(i, k) = feat[static_cast<std::size_t>(k)];
  }
  return theta;
}

}  // namespace oscidisc::sindy
