#pragma once

#include <string>
#include <vector>

#include "srvol/contact.hpp"
#include "srvol/cylcovector.hpp"

namespace srvol {

/// Phase state of the cylindrical Hamiltonian system.  The speed rho is a
/// conserved parameter, not part of the state.
struct GeodesicState {
  Point3 pt;
  double theta, w;
};

/// Time-sampled solution; samples are strictly increasing in t, start at
/// t = 0 at the origin, and include at least 64 uniformly spaced times along
/// with every adaptive step point.
struct GeodesicTrace {
  struct Sample {
    double t;
    GeodesicState state;
  };
  std::vector<Sample> samples;
  double rho;
  double tolerance;  ///< local-error tolerance the integration ran at

  /// CSV export with header line and columns t,x,y,z,theta,w.
  std::string to_csv() const;
};

/// Structure data flattened for repeated evaluation: compiled numerator /
/// denominator pairs for the horizontal frame components and the six
/// structure constants entering the right-hand side.
class CompiledStructure {
 public:
  explicit CompiledStructure(const ContactStructure& s);

  /// Frame and structure constants at one point.
  struct Values {
    double X1[3], X2[3];
    double c011, c012_plus_c021, c022, c121, c122;
  };

  /// Evaluates everything against a single shared power table; throws
  /// PoleError if any denominator vanishes at p.
  Values eval(const Point3& p) const;

 private:
  struct Ratio {
    CompiledPoly num, den;
    bool den_is_one = true;
  };
  Ratio fields_[6];  // X1 components, then X2 components
  Ratio consts_[6];  // c01_1, c01_2, c02_1, c02_2, c12_1, c12_2
  std::array<int, 3> max_exp_{0, 0, 0};

  double eval_ratio(const Ratio& r, const PowerTable& t) const;
};

/// Right-hand side of the geodesic system at conserved speed rho:
///   p'     = rho cos(theta) X1(p) + rho sin(theta) X2(p)
///   theta' = w - rho b(theta)
///   w'     = -rho^2 a(theta)
/// with a(theta) = c01_1 cos^2 + (c01_2 + c02_1) cos sin + c02_2 sin^2 and
/// b(theta) = c12_1 cos + c12_2 sin, all constants evaluated at p.
GeodesicState rhs(const ContactStructure& s, double rho, const GeodesicState& st);

/// Adaptive embedded Runge-Kutta 5(4) integration over [0, t_final] from the
/// origin with covector cov.  Local error controlled at tol (absolute and
/// relative), at most 1e6 steps.  theta is left unwrapped.  Throws
/// ConfigError for tol outside [1e-13, 1e-6], ConvergenceError on step-size
/// underflow or step-count exhaustion, PoleError if the structure constants
/// blow up along the trajectory.
GeodesicTrace integrate(const ContactStructure& s, const CylCovector& cov,
                        double t_final, double tol);

/// Endpoint of the time-1 geodesic; rho = 0 returns the base point without
/// integrating.
Point3 exp_map(const ContactStructure& s, const CylCovector& cov, double tol);

/// Overload reusing an already-compiled structure; preferred when evaluating
/// many covectors of the same structure (e.g. quadrature grids).
Point3 exp_map(const CompiledStructure& cs, const CylCovector& cov,
               double tol);

/// Determinant of the 3x3 matrix of central finite differences of exp_map in
/// (rho, theta, w), with one entrywise Richardson level (steps fd_step and
/// fd_step/2).  ode_tol is the tolerance passed to the inner integrations.
double jacobian_exp(const ContactStructure& s, const CylCovector& cov,
                    double fd_step = 1e-4, double ode_tol = 1e-11);

/// Overload reusing an already-compiled structure.
double jacobian_exp(const CompiledStructure& cs, const CylCovector& cov,
                    double fd_step = 1e-4, double ode_tol = 1e-11);

/// Smallest t > 0 at which the Jacobian along the ray t -> (t, theta, t w)
/// changes sign: coarse scan with step 0.02 * 2 pi/|w|, then bisection until
/// the bracket is narrower than tol.  Throws ConvergenceError if no sign
/// change occurs before 3 * 2 pi/|w|; requires w != 0.
double first_conjugate_time(const ContactStructure& s, double theta, double w,
                            double tol);

namespace detail {
/// Single-step central-difference Jacobian determinant (no extrapolation);
/// exposed so the convergence order underlying jacobian_exp can be measured.
double jacobian_fd_det(const ContactStructure& s, const CylCovector& cov,
                       double fd_step, double ode_tol);
}  // namespace detail

}  // namespace srvol
