#include "srvol/polyexpr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace srvol {

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

Polynomial::Polynomial(double constant) {
  if (constant != 0.0) terms_[{0, 0, 0}] = constant;
}

Polynomial Polynomial::variable(int axis) {
  Monomial m{0, 0, 0};
  m[axis] = 1;
  return monomial(m, 1.0);
}

Polynomial Polynomial::monomial(const Monomial& m, double coeff) {
  Polynomial p;
  if (coeff != 0.0) p.terms_[m] = coeff;
  return p;
}

bool Polynomial::is_constant(double c) const {
  if (c == 0.0) return terms_.empty();
  return terms_.size() == 1 && terms_.begin()->first == Monomial{0, 0, 0} &&
         terms_.begin()->second == c;
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  const Monomial& m = terms_.rbegin()->first;  // graded order: last = top degree
  return m[0] + m[1] + m[2];
}

std::array<int, 3> Polynomial::max_exponents() const {
  std::array<int, 3> r{0, 0, 0};
  for (const auto& [m, c] : terms_)
    for (int a = 0; a < 3; ++a)
      if (m[a] > r[a]) r[a] = m[a];
  return r;
}

double Polynomial::max_abs_coeff() const {
  double r = 0.0;
  for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
  return r;
}

void Polynomial::normalize() {
  double top = 0.0;
  for (const auto& [m, c] : terms_) top = std::max(top, std::abs(c));
  const double cutoff = top * kCoeffDropRel;
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0.0 || std::abs(it->second) < cutoff)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.terms_[m] += c;
  r.normalize();
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.terms_[m] -= c;
  r.normalize();
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m{ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]};
      r.terms_[m] += ca * cb;
    }
  r.normalize();
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  if (s == 0.0) return Polynomial();
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c *= s;
  r.normalize();
  return r;
}

Polynomial Polynomial::pow(int n) const {
  Polynomial r(1.0);
  for (int i = 0; i < n; ++i) r = r * (*this);
  return r;
}

Polynomial Polynomial::partial(int axis) const {
  Polynomial r;
  for (const auto& [m, c] : terms_) {
    if (m[axis] == 0) continue;
    Monomial d = m;
    d[axis] -= 1;
    r.terms_[d] += c * m[axis];
  }
  r.normalize();
  return r;
}

namespace {
double ipow(double b, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}
}  // namespace

double Polynomial::eval(const Point3& p) const {
  double s = 0.0;
  for (const auto& [m, c] : terms_)
    s += c * ipow(p[0], m[0]) * ipow(p[1], m[1]) * ipow(p[2], m[2]);
  return s;
}

Polynomial Polynomial::scale_axes(double sx, double sy, double sz) const {
  Polynomial r;
  for (const auto& [m, c] : terms_)
    r.terms_[m] = c * ipow(sx, m[0]) * ipow(sy, m[1]) * ipow(sz, m[2]);
  r.normalize();
  return r;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  char buf[64];
  // Descending graded-lex order reads naturally (leading term first).
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const Monomial& m = it->first;
    double c = it->second;
    const bool first = out.empty();
    const bool neg = c < 0.0;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    const double a = std::abs(c);
    const bool constant_term = (m[0] == 0 && m[1] == 0 && m[2] == 0);
    const bool unit = (a == 1.0);
    if (!unit || constant_term) {
      std::snprintf(buf, sizeof buf, "%.17g", a);
      out += buf;
    }
    static const char* names[3] = {"x", "y", "z"};
    bool wrote_factor = !unit || constant_term;
    for (int axis = 0; axis < 3; ++axis) {
      if (m[axis] == 0) continue;
      if (wrote_factor) out += "*";
      out += names[axis];
      if (m[axis] > 1) {
        std::snprintf(buf, sizeof buf, "^%d", m[axis]);
        out += buf;
      }
      wrote_factor = true;
    }
  }
  return out;
}

bool Polynomial::try_divide(const Polynomial& p, const Polynomial& d,
                            Polynomial& q) {
  q = Polynomial();
  if (d.terms_.empty()) return false;
  if (p.terms_.empty()) return true;
  const Monomial dm = d.terms_.rbegin()->first;
  const double dc = d.terms_.rbegin()->second;
  const double dmax = d.max_abs_coeff();
  // Scale against which a non-cancellable leftover counts as rounding
  // residue rather than a genuine remainder.
  double scale = p.max_abs_coeff();

  TermMap r = p.terms_;
  TermMap qt;
  // Each pass erases r's leading (graded-lex largest) monomial and inserts
  // only strictly smaller ones, so the loop terminates; the step cap guards
  // against runaway fill-in on adversarial inputs.
  for (int steps = 0; !r.empty(); ++steps) {
    if (steps > 200000) return false;
    const auto rl = std::prev(r.end());
    const Monomial rm = rl->first;
    const double rc = rl->second;
    Monomial tm;
    bool divisible = true;
    for (int a = 0; a < 3; ++a) {
      tm[a] = rm[a] - dm[a];
      if (tm[a] < 0) divisible = false;
    }
    if (!divisible) {
      if (std::abs(rc) <= 1e-12 * scale) {
        r.erase(rl);
        continue;
      }
      return false;
    }
    const double tc = rc / dc;
    qt[tm] += tc;
    scale = std::max(scale, std::abs(tc) * dmax);
    r.erase(rl);
    for (auto it = d.terms_.begin(); it != std::prev(d.terms_.end()); ++it) {
      Monomial m;
      for (int a = 0; a < 3; ++a) m[a] = it->first[a] + tm[a];
      double& slot = r[m];
      slot -= tc * it->second;
      if (slot == 0.0) r.erase(m);
    }
  }
  q.terms_ = std::move(qt);
  q.normalize();
  return true;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' uint)*
//   atom   := number | 'x' | 'y' | 'z' | '(' expr ')' | '-' atom
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Polynomial run() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return p;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    skip_ws();
    bool negate = false;
    if (consume('-'))
      negate = true;
    else
      consume('+');
    Polynomial acc = term();
    if (negate) acc = -acc;
    for (;;) {
      if (consume('+'))
        acc = acc + term();
      else if (consume('-'))
        acc = acc - term();
      else
        break;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (consume('*')) acc = acc * factor();
    return acc;
  }

  Polynomial factor() {
    Polynomial base = atom();
    while (consume('^')) {
      skip_ws();
      const std::size_t at = pos_;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
        throw ParseError("exponent must be a nonnegative integer", at);
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("expected integer exponent after '^'", at);
      long e = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        e = e * 10 + (text_[pos_] - '0');
        if (e > 1000) throw ParseError("exponent too large", at);
        ++pos_;
      }
      if (pos_ < text_.size() && text_[pos_] == '.')
        throw ParseError("exponent must be a nonnegative integer", at);
      base = base.pow(static_cast<int>(e));
    }
    return base;
  }

  Polynomial atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return -atom();
    }
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (c == 'x' || c == 'y' || c == 'z') {
      ++pos_;
      return Polynomial::variable(c == 'x' ? 0 : c == 'y' ? 1 : 2);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Polynomial number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // 'e' did not start an exponent
      }
    }
    if (pos_ == start) throw ParseError("expected number", start);
    const std::string lit(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(lit.c_str(), &end);
    if (end != lit.c_str() + lit.size()) throw ParseError("malformed number '" + lit + "'", start);
    return Polynomial(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_poly(std::string_view text) { return Parser(text).run(); }

Polynomial partial(const Polynomial& p, char var) {
  return p.partial(var == 'x' ? 0 : var == 'y' ? 1 : 2);
}

// ---------------------------------------------------------------------------
// RationalFn
// ---------------------------------------------------------------------------

RationalFn::RationalFn() : num_(), den_(1.0) {}

RationalFn::RationalFn(Polynomial num) : num_(std::move(num)), den_(1.0) {}

RationalFn::RationalFn(double constant) : num_(constant), den_(1.0) {}

RationalFn::RationalFn(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error("rational function with zero denominator");
  if (num_.is_zero()) den_ = Polynomial(1.0);
}

RationalFn RationalFn::operator-() const { return RationalFn(-num_, den_); }

RationalFn RationalFn::operator+(const RationalFn& o) const {
  if (den_ == o.den_) return RationalFn(num_ + o.num_, den_);
  if (den_.is_constant(1.0)) return RationalFn(num_ * o.den_ + o.num_, o.den_);
  if (o.den_.is_constant(1.0)) return RationalFn(num_ + o.num_ * den_, den_);
  // When one denominator exactly divides the other, reuse the larger one.
  // Blind cross-multiplication stacks repeated factors until the wide
  // coefficient range pushes small legitimate terms (often the constant)
  // below the relative drop threshold, which manufactures spurious poles.
  Polynomial q;
  if (Polynomial::try_divide(den_, o.den_, q))
    return RationalFn(num_ + o.num_ * q, den_);
  if (Polynomial::try_divide(o.den_, den_, q))
    return RationalFn(num_ * q + o.num_, o.den_);
  return RationalFn(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalFn RationalFn::operator-(const RationalFn& o) const { return *this + (-o); }

RationalFn RationalFn::operator*(const RationalFn& o) const {
  if (num_.is_zero() || o.num_.is_zero()) return RationalFn();
  return RationalFn(num_ * o.num_, den_ * o.den_);
}

RationalFn RationalFn::operator/(const RationalFn& o) const {
  if (o.num_.is_zero()) throw Error("division of rational function by zero");
  if (num_.is_zero()) return RationalFn();
  return RationalFn(num_ * o.den_, den_ * o.num_);
}

RationalFn RationalFn::operator*(double s) const {
  return RationalFn(num_ * s, den_);
}

RationalFn RationalFn::partial(int axis) const {
  if (den_.is_constant(1.0)) return RationalFn(num_.partial(axis));
  Polynomial n = num_.partial(axis) * den_ - num_ * den_.partial(axis);
  if (n.is_zero()) return RationalFn();
  return RationalFn(std::move(n), den_ * den_);
}

double RationalFn::eval(const Point3& p) const {
  const double d = den_.eval(p);
  if (d == 0.0) throw PoleError("rational function pole at evaluation point");
  return num_.eval(p) / d;
}

bool RationalFn::collapse_constant() {
  if (num_.is_zero()) {
    den_ = Polynomial(1.0);
    return true;
  }
  // Candidate constant: ratio of coefficients at the denominator's leading
  // monomial (graded-lex top term).
  const Monomial lead = den_.terms().rbegin()->first;
  const double dc = den_.coefficient(lead);
  const double nc = num_.coefficient(lead);
  if (dc == 0.0) return false;
  const double cand = nc / dc;
  Polynomial residue = num_ - den_ * cand;
  if (!residue.is_zero()) return false;
  num_ = Polynomial(cand);
  den_ = Polynomial(1.0);
  return true;
}

bool RationalFn::collapse_to(double v, double tol) {
  const Polynomial residue = num_ - den_ * v;
  const double scale =
      num_.max_abs_coeff() + (std::abs(v) + 1.0) * den_.max_abs_coeff();
  if (!residue.is_zero() && residue.max_abs_coeff() > tol * scale) return false;
  num_ = Polynomial(v);
  den_ = Polynomial(1.0);
  return true;
}

std::string RationalFn::str() const {
  if (den_.is_constant(1.0)) return num_.str();
  return "(" + num_.str() + ") / (" + den_.str() + ")";
}

// ---------------------------------------------------------------------------
// Vector fields
// ---------------------------------------------------------------------------

RationalField3 lie_bracket(const RationalField3& V, const RationalField3& W) {
  RationalField3 r;
  for (int k = 0; k < 3; ++k) {
    RationalFn acc;
    for (int j = 0; j < 3; ++j)
      acc = acc + V.c[j] * W.c[k].partial(j) - W.c[j] * V.c[k].partial(j);
    r.c[k] = std::move(acc);
  }
  return r;
}

RationalFn directional_derivative(const RationalField3& V, const RationalFn& f) {
  RationalFn acc;
  for (int j = 0; j < 3; ++j) acc = acc + V.c[j] * f.partial(j);
  return acc;
}

// ---------------------------------------------------------------------------
// CompiledPoly
// ---------------------------------------------------------------------------

CompiledPoly CompiledPoly::compile(const Polynomial& p) {
  CompiledPoly cp;
  cp.max_exponents = p.max_exponents();
  for (int a = 0; a < 3; ++a)
    if (cp.max_exponents[a] > PowerTable::kMaxDegree)
      throw Error("polynomial degree exceeds compiled evaluation limit");
  cp.terms.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms())
    cp.terms.push_back({static_cast<std::uint8_t>(m[0]),
                        static_cast<std::uint8_t>(m[1]),
                        static_cast<std::uint8_t>(m[2]), c});
  return cp;
}

}  // namespace srvol
