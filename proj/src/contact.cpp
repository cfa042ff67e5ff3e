#include "srvol/contact.hpp"

#include <cmath>
#include <utility>

namespace srvol {

namespace {

constexpr double kDegeneracyThreshold = 1e-10;

double det3(const Point3& r0, const Point3& r1, const Point3& r2) {
  return r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) -
         r0[1] * (r1[0] * r2[2] - r1[2] * r2[0]) +
         r0[2] * (r1[0] * r2[1] - r1[1] * r2[0]);
}

double frame_det_at(const RationalField3& X1, const RationalField3& X2,
                    const RationalField3& X3, const Point3& pt) {
  return det3(X1.eval(pt), X2.eval(pt), X3.eval(pt));
}

RationalFn dot(const std::array<RationalFn, 3>& form, const RationalField3& V) {
  RationalFn acc;
  for (int j = 0; j < 3; ++j) acc = acc + form[j] * V.c[j];
  return acc;
}

/// Substitutes x = 0, y = 0, keeping the polynomial in z.
Polynomial restrict_to_z_axis(const Polynomial& p) {
  Polynomial r;
  for (const auto& [m, c] : p.terms())
    if (m[0] == 0 && m[1] == 0) r = r + Polynomial::monomial(m, c);
  return r;
}

}  // namespace

FrameField::FrameField(RationalField3 x1, RationalField3 x2)
    : X1(std::move(x1)), X2(std::move(x2)) {
  RationalField3 x3 = lie_bracket(X2, X1);
  const Point3 origin{0, 0, 0};
  if (std::abs(frame_det_at(X1, X2, x3, origin)) < kDegeneracyThreshold)
    throw DegeneracyError(
        "contact condition fails: X1, X2, [X2, X1] are linearly dependent at the origin");
}

FrameField heisenberg_frame() {
  RationalField3 X1(RationalFn(Polynomial(1.0)), RationalFn(),
                    RationalFn(Polynomial::variable(1) * -0.5));
  RationalField3 X2(RationalFn(), RationalFn(Polynomial(1.0)),
                    RationalFn(Polynomial::variable(0) * 0.5));
  return FrameField(std::move(X1), std::move(X2));
}

FrameField build_normal_frame(const NormalFormSpec& spec) {
  const Polynomial& beta = spec.beta;
  const Polynomial& gamma = spec.gamma;
  {
    Polynomial g0 = restrict_to_z_axis(gamma);
    if (!g0.is_zero())
      throw ConfigError("normal-form boundary condition violated: gamma(0,0,z) = " + g0.str());
    Polynomial gx0 = restrict_to_z_axis(gamma.partial(0));
    if (!gx0.is_zero())
      throw ConfigError("normal-form boundary condition violated: d(gamma)/dx(0,0,z) = " +
                        gx0.str());
    Polynomial gy0 = restrict_to_z_axis(gamma.partial(1));
    if (!gy0.is_zero())
      throw ConfigError("normal-form boundary condition violated: d(gamma)/dy(0,0,z) = " +
                        gy0.str());
    Polynomial b0 = restrict_to_z_axis(beta);
    if (!b0.is_zero())
      throw ConfigError("normal-form boundary condition violated: beta(0,0,z) = " + b0.str());
  }

  const Polynomial x = Polynomial::variable(0);
  const Polynomial y = Polynomial::variable(1);
  const Polynomial one(1.0);
  const Polynomial P = one + gamma;  // 1 + gamma multiplies the vertical part

  RationalField3 X1(RationalFn(one + beta * y * y), RationalFn(-(beta * x * y)),
                    RationalFn(P * y * -0.5));
  RationalField3 X2(RationalFn(-(beta * x * y)), RationalFn(one + beta * x * x),
                    RationalFn(P * x * 0.5));
  return FrameField(std::move(X1), std::move(X2));
}

ContactStructure derive(const FrameField& frame) {
  const RationalField3& X1 = frame.X1;
  const RationalField3& X2 = frame.X2;
  RationalField3 X3 = lie_bracket(X2, X1);

  const Point3 origin{0, 0, 0};
  const double det0 = frame_det_at(X1, X2, X3, origin);
  if (std::abs(det0) < kDegeneracyThreshold)
    throw DegeneracyError("frame degenerate at origin: |det(X1, X2, [X2, X1])| = " +
                          std::to_string(std::abs(det0)) + " < 1e-10");

  // Contact form from omega(X1) = omega(X2) = 0, omega(X3) = 1: Cramer's rule
  // on the matrix with rows X1, X2, X3 gives omega_j = cofactor(3, j) / det.
  RationalFn delta = X1.c[0] * (X2.c[1] * X3.c[2] - X2.c[2] * X3.c[1]) -
                     X1.c[1] * (X2.c[0] * X3.c[2] - X2.c[2] * X3.c[0]) +
                     X1.c[2] * (X2.c[0] * X3.c[1] - X2.c[1] * X3.c[0]);
  std::array<RationalFn, 3> omega;
  omega[0] = (X1.c[1] * X2.c[2] - X1.c[2] * X2.c[1]) / delta;
  omega[1] = -(X1.c[0] * X2.c[2] - X1.c[2] * X2.c[0]) / delta;
  omega[2] = (X1.c[0] * X2.c[1] - X1.c[1] * X2.c[0]) / delta;

  // By construction omega(X1) = omega(X2) = 0 and omega(X3) = 1 hold as
  // rational-function identities (up to coefficient rounding); the Reeb
  // elimination below uses them.  Numerical residuals are asserted in tests.

  // d-omega on the coordinate fields (which commute):
  // (d-omega)_ab = d_a(omega_b) - d_b(omega_a).
  std::array<std::array<RationalFn, 3>, 3> domega;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) domega[a][b] = omega[b].partial(a) - omega[a].partial(b);

  // Reeb field by elimination in the frame basis: writing
  // X0 = X3 + alpha X1 + beta X2, the conditions d-omega(X0, X1) =
  // d-omega(X0, X2) = 0 together with d-omega(X1, X2) = 1 (which holds by the
  // normalization of omega) give
  //   alpha = omega([X3, X2]),  beta = -omega([X3, X1]),
  // using the invariant identity
  //   d-omega(U, V) = U(omega(V)) - V(omega(U)) - omega([U, V])
  // and omega(X1) = omega(X2) = 0, omega(X3) = 1.
  RationalFn alpha = dot(omega, lie_bracket(X3, X2));
  RationalFn beta = dot(omega, lie_bracket(X3, X1)) * -1.0;
  RationalField3 X0;
  for (int k = 0; k < 3; ++k) X0.c[k] = X3.c[k] + alpha * X1.c[k] + beta * X2.c[k];

  RationalFn w0 = dot(omega, X0);
  w0.collapse_constant();

  // Structure constants: for a bracket B, the X0-coefficient is omega(B)
  // (omega annihilates X1, X2 and pairs to 1 with X0); the horizontal part
  // H = B - omega(B) X0 is expanded against (X1, X2) on the coordinate pair
  // with the best-conditioned 2x2 minor at the origin.
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  int pa = 0, pb = 1;
  {
    double best = -1.0;
    for (const auto& [a, b] : pairs) {
      const Point3 v1 = X1.eval(origin), v2 = X2.eval(origin);
      const double d = std::abs(v1[a] * v2[b] - v1[b] * v2[a]);
      if (d > best) {
        best = d;
        pa = a;
        pb = b;
      }
    }
    if (best < kDegeneracyThreshold)
      throw DegeneracyError("horizontal frame degenerate at origin in every coordinate pair");
  }
  RationalFn minor = X1.c[pa] * X2.c[pb] - X1.c[pb] * X2.c[pa];
  minor.collapse_constant();

  // expected_c0: the frame component of each bracket along the Reeb direction
  // is forced by the normalization (0 for [X1,X0] and [X2,X0], 1 for
  // [X2,X1]); collapsing to that value clears cancellation residue so the
  // residue does not propagate as a spurious rational factor.
  auto expand = [&](const RationalField3& B, double expected_c0, RationalFn& c1,
                    RationalFn& c2, RationalFn& c0) {
    c0 = dot(omega, B);
    if (!c0.collapse_to(expected_c0)) c0.collapse_constant();
    RationalField3 H;
    for (int k = 0; k < 3; ++k) H.c[k] = B.c[k] - c0 * X0.c[k];
    c1 = (H.c[pa] * X2.c[pb] - H.c[pb] * X2.c[pa]) / minor;
    c2 = (X1.c[pa] * H.c[pb] - X1.c[pb] * H.c[pa]) / minor;
    c1.collapse_constant();
    c2.collapse_constant();
  };

  StructureConstants c;
  expand(lie_bracket(X1, X0), 0.0, c.c01_1, c.c01_2, c.c01_0);
  expand(lie_bracket(X2, X0), 0.0, c.c02_1, c.c02_2, c.c02_0);
  expand(X3, 1.0, c.c12_1, c.c12_2, c.c12_0);

  // Invariants as exact rational functions.
  RationalFn kappa = directional_derivative(X2, c.c12_1) -
                     directional_derivative(X1, c.c12_2) - c.c12_1 * c.c12_1 -
                     c.c12_2 * c.c12_2 + (c.c02_1 - c.c01_2) * 0.5;
  RationalFn chi_a = c.c01_1;
  RationalFn chi_b = (c.c01_2 + c.c02_1) * 0.5;

  return ContactStructure{frame,
                          std::move(X3),
                          std::move(omega),
                          std::move(domega),
                          std::move(X0),
                          std::move(c),
                          std::move(kappa),
                          std::move(chi_a),
                          std::move(chi_b)};
}

double chi_at(const ContactStructure& s, const Point3& pt) {
  return std::hypot(s.chi_a.eval(pt), s.chi_b.eval(pt));
}

double kappa_at(const ContactStructure& s, const Point3& pt) { return s.kappa.eval(pt); }

double popp_density(const ContactStructure& s, const Point3& pt) {
  const double d = frame_det_at(s.frame.X1, s.frame.X2, s.X3, pt);
  if (std::abs(d) < kDegeneracyThreshold)
    throw DegeneracyError("frame degenerate at evaluation point (|det| < 1e-10)");
  return 1.0 / std::abs(d);
}

std::array<double, 3> gamma2(const NormalFormSpec& spec) {
  const Polynomial& g = spec.gamma;
  return {g.coefficient({2, 0, 0}), 0.5 * g.coefficient({1, 1, 0}), g.coefficient({0, 2, 0})};
}

}  // namespace srvol
