#pragma once
/// Derivation of a 3D contact structure from a polynomial frame pair
/// (X1, X2): the normalized contact form omega, the Reeb field X0, the
/// structure constants of the frame brackets, the metric invariants chi and
/// kappa, and the Popp volume density.  Everything is exact rational-function
/// calculus; no floating ODE or finite differences enter.
///
/// Conventions.  The contact form is normalized by omega(X1) = omega(X2) = 0
/// and omega([X2, X1]) = 1, making d-omega restrict to the area form of the
/// distribution.  The Reeb field X0 satisfies omega(X0) = 1 and
/// d-omega(X0, .) = 0.  The structure constants expand the brackets as
///   [X1, X0] = c01_1 X1 + c01_2 X2,
///   [X2, X0] = c02_1 X1 + c02_2 X2,
///   [X2, X1] = c12_1 X1 + c12_2 X2 + X0,
/// with the trace identity c01_1 + c02_2 = 0 holding identically.

#include <array>
#include <string>

#include "srvol/errors.hpp"
#include "srvol/polyexpr.hpp"

namespace srvol {

/// Frame pair spanning the distribution.  Construction checks the contact
/// condition: X1(0), X2(0), [X2, X1](0) linearly independent (determinant
/// threshold 1e-10).
struct FrameField {
  RationalField3 X1, X2;

  FrameField(RationalField3 x1, RationalField3 x2);
};

/// The flat (Heisenberg) frame X1 = d/dx - (y/2) d/dz, X2 = d/dy + (x/2) d/dz.
FrameField heisenberg_frame();

/// Data (beta, gamma) for a frame in normal coordinates:
///   X1 = (d/dx - y/2 d/dz) + beta*y*(y d/dx - x d/dy) - gamma*(y/2) d/dz,
///   X2 = (d/dy + x/2 d/dz) - beta*x*(y d/dx - x d/dy) + gamma*(x/2) d/dz,
/// subject to the boundary identities gamma(0,0,z) = 0, d(gamma)/dx(0,0,z) = 0,
/// d(gamma)/dy(0,0,z) = 0, beta(0,0,z) = 0 as polynomial identities.
struct NormalFormSpec {
  Polynomial beta, gamma;
};

/// Builds the normal-coordinates frame; throws ConfigError naming the failing
/// boundary identity if the spec is invalid.  beta = gamma = 0 reproduces
/// heisenberg_frame().
FrameField build_normal_frame(const NormalFormSpec& spec);

/// Structure constants as exact rational functions (labels as in the header
/// comment above; the X0-components c01_0, c02_0 vanish identically and
/// c12_0 is identically 1 — all three are verified during derivation).
struct StructureConstants {
  RationalFn c01_1, c01_2, c02_1, c02_2, c12_1, c12_2;
  RationalFn c01_0, c02_0, c12_0;
};

/// Fully derived contact data; immutable after derive().
struct ContactStructure {
  FrameField frame;
  RationalField3 X3;     ///< [X2, X1]
  std::array<RationalFn, 3> omega;  ///< contact form components (dx, dy, dz)
  std::array<std::array<RationalFn, 3>, 3> domega;  ///< d-omega on coordinate fields
  RationalField3 X0;     ///< Reeb field
  StructureConstants c;

  /// kappa as a rational function:
  ///   X2(c12_1) - X1(c12_2) - c12_1^2 - c12_2^2 + (c02_1 - c01_2)/2.
  RationalFn kappa;
  /// chi is evaluated as hypot(c01_1, (c01_2 + c02_1)/2), guaranteeing
  /// chi >= 0; the two ingredients are stored exactly.
  RationalFn chi_a;      ///< c01_1
  RationalFn chi_b;      ///< (c01_2 + c02_1)/2
};

/// Derives contact form, Reeb field and structure constants by exact
/// elimination in the frame basis.  Throws DegeneracyError if the frame is
/// degenerate at the origin (determinant below 1e-10).
ContactStructure derive(const FrameField& frame);

/// Metric invariant chi at a point: sqrt((c01_1)^2 + (c01_2 + c02_1)^2 / 4).
double chi_at(const ContactStructure& s, const Point3& pt);

/// Metric invariant kappa at a point (see ContactStructure::kappa).
double kappa_at(const ContactStructure& s, const Point3& pt);

/// Popp volume density psi(pt) = |det A|^-1, where A has rows X1, X2,
/// X3 = [X2, X1] evaluated at pt.  Throws DegeneracyError when the frame
/// degenerates at pt (|det| below 1e-10).
double popp_density(const ContactStructure& s, const Point3& pt);

/// Quadratic-part coefficients (a, b, c) of gamma at the origin with z = 0:
/// gamma^[2](x, y) = a x^2 + 2 b x y + c y^2.
std::array<double, 3> gamma2(const NormalFormSpec& spec);

}  // namespace srvol
