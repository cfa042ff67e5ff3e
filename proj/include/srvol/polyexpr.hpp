#pragma once
/// Exact multivariate polynomial and rational-function arithmetic over the
/// coordinates (x, y, z), with a text parser and printer, formal partial
/// derivatives, vector fields with rational-function components, and Lie
/// brackets.  All calculus here is formal (term-by-term), so downstream
/// geometric quantities are free of truncation error; the only rounding is
/// double-precision coefficient arithmetic at the 1e-16 scale.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "srvol/errors.hpp"

namespace srvol {

using Point3 = std::array<double, 3>;

/// Exponent triple (i, j, k) representing the monomial x^i y^j z^k.
using Monomial = std::array<int, 3>;

/// Graded-lexicographic order: lower total degree first, ties broken
/// lexicographically in (x, y, z).  Gives polynomials a canonical term order
/// for printing and comparison.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = a[0] + a[1] + a[2];
    const int db = b[0] + b[1] + b[2];
    if (da != db) return da < db;
    return a < b;
  }
};

/// Sparse polynomial in (x, y, z) with double coefficients.
///
/// Invariants: no stored coefficient is exactly zero, and after every
/// arithmetic operation coefficients smaller than 1e-14 times the largest
/// absolute coefficient are dropped (they are rounding residue, not data).
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  /// Relative threshold below which a coefficient is considered rounding
  /// residue and dropped during normalization.
  static constexpr double kCoeffDropRel = 1e-14;

  Polynomial() = default;                    ///< zero polynomial
  explicit Polynomial(double constant);      ///< constant polynomial
  static Polynomial variable(int axis);      ///< x, y or z (axis 0, 1, 2)
  static Polynomial monomial(const Monomial& m, double coeff);

  bool is_zero() const { return terms_.empty(); }
  /// True if this is the constant polynomial with value c (exact compare).
  bool is_constant(double c) const;
  const TermMap& terms() const { return terms_; }
  double coefficient(const Monomial& m) const;
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  /// Largest per-axis exponent appearing in any term.
  std::array<int, 3> max_exponents() const;
  double max_abs_coeff() const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial pow(int n) const;  ///< n >= 0

  /// Exact formal partial derivative with respect to axis 0, 1 or 2.
  Polynomial partial(int axis) const;

  double eval(const Point3& p) const;

  /// Exact coefficient rescale realizing the substitution
  /// (x, y, z) -> (sx*x, sy*y, sz*z): each term gains sx^i sy^j sz^k.
  Polynomial scale_axes(double sx, double sy, double sz) const;

  /// Canonical printed form, re-parseable by parse_poly.  Terms appear in
  /// descending graded-lexicographic order, e.g. "x^2*y - 0.5*z + 2".
  std::string str() const;

  /// Exact multivariate long division: if d divides p (up to rounding
  /// residue, measured relative to the operand scale), stores the quotient
  /// in q and returns true; otherwise returns false and leaves q unspecified.
  /// This is deterministic leading-term division, not a GCD computation; it
  /// is used to keep unreduced rational arithmetic from stacking repeated
  /// denominator factors.
  static bool try_divide(const Polynomial& p, const Polynomial& d, Polynomial& q);

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

 private:
  void normalize();
  TermMap terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/// Parses an expression over x, y, z with decimal literals (scientific
/// notation accepted), operators + - * ^ (nonnegative integer exponents
/// only), parentheses, and unary minus.  Throws ParseError with the byte
/// position on malformed input; negative or fractional exponents are
/// rejected.
Polynomial parse_poly(std::string_view text);

/// Convenience named wrapper for Polynomial::partial: axis is 'x', 'y', 'z'.
Polynomial partial(const Polynomial& p, char var);

/// Quotient of two polynomials.  Never reduced to lowest terms: correctness
/// is evaluation-based, and all operations keep the representation exact.
class RationalFn {
 public:
  RationalFn();  ///< zero (0/1)
  RationalFn(Polynomial num);  ///< polynomial lifted to numerator/1
  RationalFn(Polynomial num, Polynomial den);  ///< throws on zero denominator
  explicit RationalFn(double constant);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RationalFn operator-() const;
  /// Addition/subtraction detect equal denominators (exact term-map match)
  /// and keep them shared instead of cross-multiplying.
  RationalFn operator+(const RationalFn& o) const;
  RationalFn operator-(const RationalFn& o) const;
  RationalFn operator*(const RationalFn& o) const;
  RationalFn operator/(const RationalFn& o) const;  ///< throws on zero divisor
  RationalFn operator*(double s) const;

  /// Formal quotient-rule partial derivative: (n'd - nd')/d^2.
  RationalFn partial(int axis) const;

  /// Evaluates num(p)/den(p); throws PoleError when den(p) == 0.
  double eval(const Point3& p) const;

  /// If num - c*den normalizes to the zero polynomial for the constant
  /// c = num/den read off at the leading denominator term, collapses the
  /// representation to the exact constant c and returns true.  Used when a
  /// quantity is known to be constant by construction (e.g. normalization
  /// residues) to stop denominators from propagating.
  bool collapse_constant();

  /// Collapses to the given constant when num - v*den is zero up to rounding
  /// residue (coefficients below tol relative to the operand scale).  For
  /// quantities whose value is forced by an algebraic identity this clears
  /// the cancellation residue that blocks collapse_constant().
  bool collapse_to(double v, double tol = 1e-10);

  std::string str() const;  ///< "(num) / (den)" or just num when den == 1

 private:
  Polynomial num_, den_;
};

inline RationalFn operator*(double s, const RationalFn& r) { return r * s; }

/// Vector field on R^3 with rational-function components (coefficients of
/// d/dx, d/dy, d/dz).
struct RationalField3 {
  std::array<RationalFn, 3> c;

  RationalField3() = default;
  RationalField3(RationalFn cx, RationalFn cy, RationalFn cz)
      : c{std::move(cx), std::move(cy), std::move(cz)} {}

  Point3 eval(const Point3& p) const {
    return {c[0].eval(p), c[1].eval(p), c[2].eval(p)};
  }
};

/// Lie bracket [V, W]: component k equals
///   sum_j V^j d_j W^k - W^j d_j V^k,
/// computed exactly in rational-function arithmetic.
RationalField3 lie_bracket(const RationalField3& V, const RationalField3& W);

/// Directional derivative V(f) = sum_j V^j d_j f of a rational function
/// along a rational vector field, computed exactly.
RationalFn directional_derivative(const RationalField3& V, const RationalFn& f);

// ---------------------------------------------------------------------------
// Flat evaluation plan for hot loops.
// ---------------------------------------------------------------------------

/// Per-point table of powers x^0..x^d, y^0..y^d, z^0..z^d shared by all
/// compiled polynomials evaluated at that point.
struct PowerTable {
  static constexpr int kMaxDegree = 48;
  double p[3][kMaxDegree + 1];

  void build(const Point3& pt, const std::array<int, 3>& maxdeg) {
    for (int a = 0; a < 3; ++a) {
      p[a][0] = 1.0;
      for (int d = 1; d <= maxdeg[a]; ++d) p[a][d] = p[a][d - 1] * pt[a];
    }
  }
};

/// Polynomial flattened into parallel term arrays for branch-free summation
/// against a PowerTable.
struct CompiledPoly {
  struct Term {
    std::uint8_t i, j, k;
    double coeff;
  };
  std::vector<Term> terms;
  std::array<int, 3> max_exponents{0, 0, 0};

  static CompiledPoly compile(const Polynomial& p);

  double eval(const PowerTable& t) const {
    double s = 0.0;
    for (const Term& term : terms)
      s += term.coeff * t.p[0][term.i] * t.p[1][term.j] * t.p[2][term.k];
    return s;
  }
};

}  // namespace srvol
