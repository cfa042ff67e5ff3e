#pragma once

#include "srvol/polyexpr.hpp"

namespace srvol {

/// Endpoint of the model geodesic with initial covector (rho, theta, w) at
/// parameter t, plus a flag recording whether the small-phase series branch
/// produced it.
struct HeisExpResult {
  double x, y, z;
  bool valid_series;
};

/// Geodesic endpoint in the model group.  Closed form
///   x = rho (sin(wt + theta) - sin theta)/w
///   y = -rho (cos(wt + theta) - cos theta)/w
///   z = rho^2 (wt - sin(wt)) / (2 w^2)
/// evaluated through product identities to avoid cancellation; for
/// |w t| < 1e-5 a degree-5 series branch removes the w -> 0 singularity.
HeisExpResult heis_exp_full(double rho, double theta, double w, double t);
Point3 heis_exp(double rho, double theta, double w, double t);

namespace detail {
// Both branches exposed so the switch-point agreement can be tested
// directly; heis_exp picks between them at |w t| = 1e-5.
Point3 heis_exp_closed(double rho, double theta, double w, double t);
Point3 heis_exp_series(double rho, double theta, double w, double t);
double heis_jacobian_closed(double rho, double w);
double heis_jacobian_series(double rho, double w);
double g0_closed(double w);
double g0_series(double w);
}  // namespace detail

/// Jacobian determinant of the time-1 endpoint map with respect to
/// (rho, theta, w):  rho^3 (2 - 2 cos w - w sin w)/w^4, with a series branch
/// for |w| < 1e-3.  Rotationally symmetric, so theta does not enter the
/// value.  Vanishes at w = +-2pi (the conjugate locus touches the cut).
double heis_jacobian(double rho, double theta, double w);

/// Weight function g0(w) = ((16 - 3w^2) cos w + 2 cos 2w + 13 w sin w
/// + w sin 2w - 18)/w^6 appearing in the second-order volume coefficient;
/// series branch for |w| < 0.5.  Even in w.
double g0(double w);

/// Si(x) = integral of sin(t)/t over [0, x], x >= 0, via adaptive
/// Gauss-Kronrod refinement to 1e-12 absolute.
double sine_integral(double x);

/// Volume of the unit ball in the model group: (1 + 2 pi Si(2 pi))/12.
double c0();

/// Second-order volume-expansion constant:
/// (2 + 4 pi Si(2 pi) - 1/pi^2)/(160 c0).
double c1();

/// Cut time 2 pi/|w| of the model geodesic; +infinity for w = 0 (straight
/// lines minimize forever).
double heis_cut_time(double w);

}  // namespace srvol
