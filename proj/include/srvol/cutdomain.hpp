#pragma once
/// Asymptotic cut time at high vertical frequency and the truncated
/// integration domain it bounds in cylindrical covector coordinates.
///
/// All boundaries here are the leading asymptotic formulas with their
/// remainders dropped.  The domain boundary error is harmless at second
/// order in the dilation parameter because the leading volume integrand
/// vanishes on w = +-2 pi, but volumes built on this domain are correct
/// only to o(eps^2) relative order beyond the leading term.

#include <numbers>

#include "srvol/errors.hpp"

namespace srvol {

/// Truncated covector domain of a structure with invariants (kappa, chi) at
/// dilation scale eps: |w| <= 2 pi - eps^2 rho^2 f(theta) for rho in
/// [0, rho_max].  The bound stays positive for every theta whenever
/// eps^2 f(theta) < 2 pi.
struct OmegaDomain {
  double eps;
  double kappa;
  double chi;
  double rho_max = 1.0;  ///< 1 in dilated coordinates
};

/// Asymptotic cut time together with a flag recording that |w| sat below
/// the validity guard of the expansion.
struct CutTimeAsymptotic {
  double value;
  bool regime_warning;
};

/// Angular profile of the domain boundary: (kappa + 2 chi sin^2 theta)/(4 pi).
double f_theta(double kappa, double chi, double theta);

/// Two-term high-frequency cut time 2 pi/|w| - pi (kappa + 2 chi sin^2
/// theta)/|w|^3.  The O(1/w^4) remainder is dropped.  |w| below w_guard
/// (default 4 pi) sets regime_warning instead of failing; w = 0 throws
/// ConfigError.
CutTimeAsymptotic cut_time_asymptotic(double kappa, double chi, double theta,
                                      double w,
                                      double w_guard = 4.0 * std::numbers::pi);

/// Vertical half-width of the domain at (rho, theta):
/// 2 pi - eps^2 rho^2 f(theta); the bound for negative w is its mirror.
/// Throws ConfigError when rho falls outside [0, rho_max] or when the bound
/// is nonpositive (eps too large for the asymptotic domain).
double w_bound(const OmegaDomain& domain, double rho, double theta);

/// Cut covector frequency at small radius: 2 pi/rho - (kappa + 2 chi sin^2
/// theta) rho/(4 pi), the O(rho^2) remainder dropped.  Requires
/// 0 < rho <= rho_guard (default 0.5); throws ConfigError otherwise.
double inverse_cut(double kappa, double chi, double theta, double rho,
                   double rho_guard = 0.5);

}  // namespace srvol
