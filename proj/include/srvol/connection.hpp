#pragma once
/// Orthonormal-frame Christoffel symbols of the extended metric, the
/// sectional curvature of the distribution plane, and the curvature
/// identity tying it to the metric invariants.
///
/// The extended metric declares the frame {X0, X1, X2} orthonormal.  Only
/// the distribution-plane sectional curvature is implemented; the full
/// curvature tensor and the canonical connection are out of scope, the
/// identity test below capturing the verifiable content.

#include "srvol/contact.hpp"

namespace srvol {

/// Full antisymmetric structure-constant table of the frame {X0, X1, X2}
/// at a point: c[i][j][k] is the X_k-coefficient of [X_i, X_j], so
/// c[2][1][0] = 1 always and c[j][i][k] = -c[i][j][k].
struct ExtendedConstants {
  double c[3][3][3];
};

/// Evaluates the derived structure constants at pt and fills the full
/// antisymmetric table.
ExtendedConstants extended_constants(const ContactStructure& s,
                                     const Point3& pt);

/// Connection coefficients in the orthonormal frame: g[i][j][k] holds the
/// X_k-coefficient of the covariant derivative of X_j along X_i.
struct ChristoffelTable {
  double g[3][3][3];
};

/// Applies  -(1/2) (c_ij^k - c_jk^i + c_ki^j)  index-wise.  Throws
/// ConfigError if the input table is not antisymmetric (tolerance 1e-12 on
/// each entry pair).
ChristoffelTable christoffel(const ExtendedConstants& ext);

/// Sectional curvature of the distribution plane at pt, assembled from the
/// structure constants and their exact directional derivatives:
///   -X1(c12_2) + X2(c12_1) - c12_1^2 - c12_2^2 + (c02_1 - c01_2)/2
///   + c01_1^2 + (c02_1 + c01_2)^2/4 - 3/4.
/// Throws PoleError if pt hits a denominator zero.
double sectional_D(const ContactStructure& s, const Point3& pt);

/// Residual |sectional_D - (kappa + chi^2 - 3/4)| at pt, where kappa and
/// chi come from the independently stored invariants of the structure.
double verify_sec_identity(const ContactStructure& s, const Point3& pt);

}  // namespace srvol
