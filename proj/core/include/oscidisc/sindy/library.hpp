#pragma once

#include "oscidisc/common.hpp"

#include <span>
#include <string>
#include <vector>

namespace oscidisc::sindy {

enum class TermKind {
  monomial,     // Π x_k^{p_k}; all-zero powers is the constant term
  sine,         // sin(x_var)
  cosine,       // cos(x_var)
  reciprocal,   // 1 / (x_var − shift), clamped to |denominator| ≥ guard
  abs_monomial  // |x_var|^{p_var} · Π_{k≠var} x_k^{p_k}
};

/// One candidate function of the state.
struct Term {
  TermKind kind = TermKind::monomial;
  std::vector<int> powers;  // monomial / abs_monomial exponents, one per variable
  int var = 0;              // variable for sine, cosine, reciprocal, abs_monomial
  double shift = 0.0;       // reciprocal only
  double guard = 1e-3;      // reciprocal only

  static Term constant(int var_count);
  static Term monomial(std::vector<int> powers);
  static Term sine(int var);
  static Term cosine(int var);
  static Term reciprocal(int var, double shift, double guard = 1e-3);
  static Term abs_monomial(int var, std::vector<int> powers);

  double evaluate(std::span<const double> x) const;
  /// Human-readable name, e.g. "x0^2 x1", "sin(x0)", "1/(x0-1)", "|x0|^2".
  std::string name(const std::vector<std::string>& var_names) const;

  bool operator==(const Term&) const = default;
};

/// Ordered, duplicate-free list of terms over `var_count` variables.
class LibrarySpec {
 public:
  explicit LibrarySpec(int var_count = 0) : var_count_(var_count) {}

  /// Throws ArgumentError on a duplicate or malformed term.
  LibrarySpec& add(Term term);

  int var_count() const noexcept { return var_count_; }
  Index size() const noexcept { return static_cast<Index>(terms_.size()); }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const Term& operator[](Index k) const { return terms_[static_cast<std::size_t>(k)]; }

  std::vector<std::string> names(const std::vector<std::string>& var_names = {}) const;

  /// All monomials of total degree 0..max_degree, graded then lexicographic
  /// with earlier variables first: 1, x, y, x², xy, y², ...
  static LibrarySpec polynomial(int var_count, int max_degree, bool include_constant = true);

  bool operator==(const LibrarySpec&) const = default;

 private:
  int var_count_;
  std::vector<Term> terms_;
};

/// Default variable names x0..x{d-1}.
std::vector<std::string> default_var_names(int count);

/// Θ(X): column k is term k evaluated at every row. Throws ArgumentError
/// naming the first row with a non-finite entry.
Matrix build_library(const Matrix& states, const LibrarySpec& spec);

/// Single-row evaluation into `out` (length spec.size()).
void evaluate_library(const LibrarySpec& spec, std::span<const double> x, std::span<double> out);

}  // namespace oscidisc::sindy
