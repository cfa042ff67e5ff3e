#include "srvol/cutdomain.hpp"

#include <cmath>
#include <string>

namespace srvol {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double f_theta(double kappa, double chi, double theta) {
  const double s = std::sin(theta);
  return (kappa + 2.0 * chi * s * s) / (4.0 * std::numbers::pi);
}

CutTimeAsymptotic cut_time_asymptotic(double kappa, double chi, double theta,
                                      double w, double w_guard) {
  if (w == 0.0)
    throw ConfigError("cut_time_asymptotic: w must be nonzero");
  const double aw = std::abs(w);
  const double s = std::sin(theta);
  const double value =
      kTwoPi / aw -
      std::numbers::pi * (kappa + 2.0 * chi * s * s) / (aw * aw * aw);
  return {value, aw < w_guard};
}

double w_bound(const OmegaDomain& domain, double rho, double theta) {
  if (!(rho >= 0.0 && rho <= domain.rho_max))
    throw ConfigError("w_bound: rho outside [0, rho_max]");
  const double bound =
      kTwoPi - domain.eps * domain.eps * rho * rho *
                   f_theta(domain.kappa, domain.chi, theta);
  if (!(bound > 0.0))
    throw ConfigError(
        "w_bound: nonpositive bound; eps too large for the asymptotic "
        "domain");
  return bound;
}

double inverse_cut(double kappa, double chi, double theta, double rho,
                   double rho_guard) {
  if (!(rho > 0.0 && rho <= rho_guard))
    throw ConfigError(
        "inverse_cut: rho must lie in (0, " + std::to_string(rho_guard) +
        "]");
  const double s = std::sin(theta);
  return kTwoPi / rho -
         (kappa + 2.0 * chi * s * s) * rho / (4.0 * std::numbers::pi);
}

}  // namespace srvol
