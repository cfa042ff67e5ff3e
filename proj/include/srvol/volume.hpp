#pragma once

#include <string>
#include <utility>
#include <vector>

#include "srvol/contact.hpp"

namespace srvol {

/// Node counts and inner ODE tolerance for the tensor-product quadrature in
/// cylindrical covector coordinates: Gauss-Legendre in rho on [0, 1],
/// uniform periodic nodes in theta, Gauss-Legendre in w on the
/// (rho, theta)-dependent admissible interval.
struct QuadratureSpec {
  int n_rho = 16;
  int n_theta = 32;
  int n_w = 48;
  double tol_ode = 1e-9;
};

/// Diagnostics gathered over all quadrature nodes.  Inside the injectivity
/// domain the exponential Jacobian should stay positive; a negative value at
/// any node is flagged rather than silently absorbed by the absolute value.
struct BallVolumeDiag {
  double min_jacobian = 0.0;
  long negative_nodes = 0;
  bool domain_violation = false;
};

/// Volume of the metric ball of radius eps around the frame's base point,
/// measured in the intrinsic volume induced by the frame: eps^4 times the
/// integral of density(scaled endpoint) * |Jacobian of the rescaled
/// exponential| over the truncated covector domain.  Node values are
/// evaluated independently (OpenMP when available) and reduced in fixed node
/// order, so results are reproducible at a fixed spec.  Throws ConfigError
/// for invalid specs (counts < 4, odd n_theta, tolerance outside
/// [1e-13, 1e-6]) or when eps is too large for the truncated domain to stay
/// positive.
double ball_volume(const ContactStructure& s, double eps,
                   const QuadratureSpec& quad, BallVolumeDiag* diag = nullptr);

/// Same computation with the node loop forced serial; bitwise identical to
/// ball_volume at any thread count.
double ball_volume_serial(const ContactStructure& s, double eps,
                          const QuadratureSpec& quad,
                          BallVolumeDiag* diag = nullptr);

/// Convergence-checked volume: evaluates at quad and at doubled node counts,
/// throws ConvergenceError if the relative change exceeds 10 * tol, and
/// returns the refined value.  The measured relative change is reported
/// through rel_change when non-null.
double ball_volume_checked(const ContactStructure& s, double eps,
                           const QuadratureSpec& quad, double tol = 1e-8,
                           double* rel_change = nullptr);

/// Ladder of ball volumes together with the two-parameter fit
/// volume/eps^4 = c0_est * (1 + slope_est * eps^2).
struct ExpansionReport {
  std::vector<double> eps_list;
  std::vector<double> volumes;
  double c0_est = 0.0;
  double slope_est = 0.0;
  std::vector<double> residuals;  ///< per-entry misfit of volume/eps^4
};

/// Computes volumes over a decreasing eps ladder (>= 4 entries, largest
/// <= 0.3) and least-squares fits the quartic-normalized volumes against
/// 1 and eps^2.  Throws ConfigError on a malformed ladder and
/// DegeneracyError when the ladder cannot condition the fit or the fitted
/// leading coefficient is not positive.
ExpansionReport fit_expansion(const ContactStructure& s,
                              const std::vector<double>& eps_list,
                              const QuadratureSpec& quad);

/// Second-order Jacobian coefficient, averaged over the circle: for each
/// eps in the ladder, averages (J^eps - J^flat)/eps^2 over a uniform theta
/// grid at fixed (rho, w), then extrapolates the ladder to eps -> 0
/// (polynomial in eps^2).  The averaging removes the second-harmonic part,
/// so the limit is rho^5 * (kappa/2) * g0(w) with g0 the flat spectral
/// weight.  Requires 0 < rho <= 1, 0 < |w| < 2 pi - 0.1, and a decreasing
/// ladder of >= 3 entries with largest <= 0.5; throws ConvergenceError if
/// the ladder differences shrink at an observed order below 1.5.  When
/// observed_order is non-null it receives the measured order of the last
/// three ladder entries (NaN if the differences sit at the noise floor or
/// are non-monotone, in which case the order check is skipped).
double v2_theta_average(const ContactStructure& s, double rho, double w,
                        const std::vector<double>& eps_ladder,
                        double* observed_order = nullptr);

/// Cross-check of the closed-form second-order integral: lhs is the
/// adaptive quadrature of (pi/2)(5 w sin w - (w^2 - 8) cos w - 8)/w^6 over
/// [-2 pi, 2 pi] (series branch near w = 0), rhs the closed form
/// (1/160)(1/pi^2 - 2 - 4 pi Si(2 pi)).  Returns {lhs, rhs}.
std::pair<double, double> u2_integral_check();

/// CSV with header eps,volume,volume_over_eps4,fitted (12 significant
/// digits).
std::string expansion_to_csv(const ExpansionReport& r);

/// JSON object with eps_list, volumes, residuals, c0_est, slope_est.
std::string expansion_to_json(const ExpansionReport& r);

}  // namespace srvol
