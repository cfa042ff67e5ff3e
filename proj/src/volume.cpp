#include "srvol/volume.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <vector>

#include "json.hpp"
#include "srvol/cutdomain.hpp"
#include "srvol/dilation.hpp"
#include "srvol/errors.hpp"
#include "srvol/geodesic.hpp"
#include "srvol/heisenberg.hpp"

namespace srvol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFdStep = 1e-4;  // Jacobian stencil inside the quadrature

/// RAII wrapper for a GSL Gauss-Legendre node/weight table.
struct GlTable {
  gsl_integration_glfixed_table* t;
  explicit GlTable(int n)
      : t(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n))) {
    if (t == nullptr)
      throw ConfigError("could not allocate Gauss-Legendre table");
  }
  GlTable(const GlTable&) = delete;
  GlTable& operator=(const GlTable&) = delete;
  ~GlTable() { gsl_integration_glfixed_table_free(t); }
};

void validate_spec(const QuadratureSpec& q) {
  if (q.n_rho < 4 || q.n_theta < 4 || q.n_w < 4)
    throw ConfigError("quadrature spec requires all node counts >= 4");
  if (q.n_theta % 2 != 0)
    throw ConfigError("quadrature spec requires an even n_theta");
  if (!(q.tol_ode >= 1e-13 && q.tol_ode <= 1e-6))
    throw ConfigError("quadrature tol_ode must lie in [1e-13, 1e-6]");
}

double volume_impl(const ContactStructure& s, double eps,
                   const QuadratureSpec& q, BallVolumeDiag* diag,
                   bool parallel) {
  validate_spec(q);
  if (!(eps > 0.0)) throw ConfigError("ball_volume requires eps > 0");

  const Point3 origin{0.0, 0.0, 0.0};
  const double k0 = kappa_at(s, origin);
  const double x0 = chi_at(s, origin);
  const double fmax =
      std::max(f_theta(k0, x0, 0.0), f_theta(k0, x0, kPi / 2.0));
  if (!(2.0 * kPi - eps * eps * fmax > 0.0))
    throw ConfigError(
        "ball_volume: eps too large, truncated covector domain collapses");
  const OmegaDomain dom{eps, k0, x0, 1.0};

  const ContactStructure sd = derive(make_dilated(eps, s.frame).frame);
  const CompiledStructure cs(sd);

  const GlTable rho_tab(q.n_rho);
  const GlTable w_tab(q.n_w);

  const long total = static_cast<long>(q.n_rho) * q.n_theta * q.n_w;
  std::vector<double> nrho(total), nth(total), nw(total), nwt(total);
  long idx = 0;
  const double th_weight = 2.0 * kPi / q.n_theta;
  for (int i = 0; i < q.n_rho; ++i) {
    double ri = 0.0, wri = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &ri,
                                  &wri, rho_tab.t);
    for (int j = 0; j < q.n_theta; ++j) {
      const double th = th_weight * j;
      const double wb = w_bound(dom, ri, th);
      for (int k = 0; k < q.n_w; ++k) {
        double wk = 0.0, wwk = 0.0;
        gsl_integration_glfixed_point(-wb, wb, static_cast<std::size_t>(k),
                                      &wk, &wwk, w_tab.t);
        nrho[idx] = ri;
        nth[idx] = th;
        nw[idx] = wk;
        nwt[idx] = wri * th_weight * wwk;
        ++idx;
      }
    }
  }

  // Node values are computed independently; the reduction below runs in
  // fixed node order so the result is bit-reproducible at a fixed spec.
  std::vector<double> vals(total), jacs(total);
  std::exception_ptr eptr = nullptr;
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (long n = 0; n < total; ++n) {
    try {
      const CylCovector cov{nrho[n], nth[n], nw[n]};
      const double det = jacobian_exp(cs, cov, kFdStep, q.tol_ode);
      const Point3 qhat = exp_map(cs, cov, q.tol_ode);
      const double psi = popp_density(s, dilate_point(eps, qhat));
      jacs[n] = det;
      vals[n] = nwt[n] * psi * std::abs(det);
    } catch (...) {
#pragma omp critical
      {
        if (!eptr) eptr = std::current_exception();
      }
      jacs[n] = 0.0;
      vals[n] = 0.0;
    }
  }
  if (eptr) std::rethrow_exception(eptr);

  double sum = 0.0;
  double minj = std::numeric_limits<double>::infinity();
  long neg = 0;
  for (long n = 0; n < total; ++n) {
    sum += vals[n];
    minj = std::min(minj, jacs[n]);
    if (jacs[n] < 0.0) ++neg;
  }
  if (diag != nullptr) {
    diag->min_jacobian = minj;
    diag->negative_nodes = neg;
    diag->domain_violation = neg > 0;
  }
  const double e2 = eps * eps;
  return e2 * e2 * sum;
}

}  // namespace

double ball_volume(const ContactStructure& s, double eps,
                   const QuadratureSpec& quad, BallVolumeDiag* diag) {
  return volume_impl(s, eps, quad, diag, true);
}

double ball_volume_serial(const ContactStructure& s, double eps,
                          const QuadratureSpec& quad, BallVolumeDiag* diag) {
  return volume_impl(s, eps, quad, diag, false);
}

double ball_volume_checked(const ContactStructure& s, double eps,
                           const QuadratureSpec& quad, double tol,
                           double* rel_change) {
  if (!(tol > 0.0))
    throw ConfigError("ball_volume_checked requires a positive tolerance");
  const double coarse = ball_volume(s, eps, quad);
  QuadratureSpec fine = quad;
  fine.n_rho *= 2;
  fine.n_theta *= 2;
  fine.n_w *= 2;
  const double refined = ball_volume(s, eps, fine);
  const double rel = std::abs(refined - coarse) / std::abs(refined);
  if (rel_change != nullptr) *rel_change = rel;
  if (rel > 10.0 * tol)
    throw ConvergenceError(
        "ball_volume quadrature did not settle under node doubling");
  return refined;
}

ExpansionReport fit_expansion(const ContactStructure& s,
                              const std::vector<double>& eps_list,
                              const QuadratureSpec& quad) {
  if (eps_list.size() < 4)
    throw ConfigError("fit_expansion requires at least 4 eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ConfigError("fit_expansion requires a strictly decreasing ladder");
  if (!(eps_list.back() > 0.0))
    throw ConfigError("fit_expansion requires positive eps values");
  if (!(eps_list.front() <= 0.3))
    throw ConfigError("fit_expansion requires eps <= 0.3");

  ExpansionReport r;
  r.eps_list = eps_list;
  r.volumes.reserve(eps_list.size());
  for (const double eps : eps_list)
    r.volumes.push_back(ball_volume(s, eps, quad));

  // Least squares for y = A + B x with x = eps^2, y = volume/eps^4.
  const double n = static_cast<double>(eps_list.size());
  double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  std::vector<double> xs(eps_list.size()), ys(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double e2 = eps_list[i] * eps_list[i];
    xs[i] = e2;
    ys[i] = r.volumes[i] / (e2 * e2);
    sx += xs[i];
    sxx += xs[i] * xs[i];
    sy += ys[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (!(det > 1e-12 * n * sxx))
    throw DegeneracyError("fit_expansion: eps ladder cannot condition the fit");
  const double a = (sxx * sy - sx * sxy) / det;
  const double b = (n * sxy - sx * sy) / det;
  if (!(a > 0.0))
    throw DegeneracyError(
        "fit_expansion: fitted leading coefficient is not positive");
  r.c0_est = a;
  r.slope_est = b / a;
  r.residuals.resize(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    r.residuals[i] = ys[i] - (a + b * xs[i]);
  return r;
}

double v2_theta_average(const ContactStructure& s, double rho, double w,
                        const std::vector<double>& eps_ladder,
                        double* observed_order) {
  if (observed_order != nullptr)
    *observed_order = std::numeric_limits<double>::quiet_NaN();
  if (!(rho > 0.0 && rho <= 1.0))
    throw ConfigError("v2_theta_average requires rho in (0, 1]");
  if (!(std::abs(w) > 0.0 && std::abs(w) < 2.0 * kPi - 0.1))
    throw ConfigError("v2_theta_average requires 0 < |w| < 2 pi - 0.1");
  if (eps_ladder.size() < 3)
    throw ConfigError("v2_theta_average requires at least 3 eps values");
  for (std::size_t i = 1; i < eps_ladder.size(); ++i)
    if (!(eps_ladder[i] < eps_ladder[i - 1]))
      throw ConfigError(
          "v2_theta_average requires a strictly decreasing ladder");
  if (!(eps_ladder.back() > 0.0 && eps_ladder.front() <= 0.5))
    throw ConfigError("v2_theta_average requires eps values in (0, 0.5]");

  constexpr int kThetaGrid = 16;
  constexpr double kOdeTol = 1e-11;
  const std::size_t m = eps_ladder.size();
  std::vector<double> avg(m);
  for (std::size_t a = 0; a < m; ++a) {
    const double eps = eps_ladder[a];
    const ContactStructure sd = derive(make_dilated(eps, s.frame).frame);
    const CompiledStructure cs(sd);
    double acc = 0.0;
    for (int j = 0; j < kThetaGrid; ++j) {
      const double th = 2.0 * kPi * j / kThetaGrid;
      const double jac = jacobian_exp(cs, CylCovector{rho, th, w}, kFdStep,
                                      kOdeTol);
      acc += jac - heis_jacobian(rho, th, w);
    }
    avg[a] = acc / (kThetaGrid * eps * eps);
  }

  // Observed order of the ladder differences (geometric ladders): the
  // theta average kills the odd-order remainder, so the differences should
  // shrink at order ~2 in eps.
  const double d1 = avg[m - 3] - avg[m - 2];
  const double d2 = avg[m - 2] - avg[m - 1];
  const double scale = 1.0 + std::abs(avg[m - 1]);
  if (std::abs(d2) > 1e-7 * scale && d1 * d2 > 0.0) {
    const double ratio = std::sqrt((eps_ladder[m - 3] / eps_ladder[m - 2]) *
                                   (eps_ladder[m - 2] / eps_ladder[m - 1]));
    const double order = std::log(std::abs(d1 / d2)) / std::log(ratio);
    if (observed_order != nullptr) *observed_order = order;
    if (order < 1.5)
      throw ConvergenceError(
          "v2_theta_average: ladder shrinks at observed order below 1.5");
  }

  // Neville extrapolation to eps = 0 in the variable t = eps^2.
  std::vector<double> t(m), tab(avg);
  for (std::size_t i = 0; i < m; ++i) t[i] = eps_ladder[i] * eps_ladder[i];
  for (std::size_t k = 1; k < m; ++k)
    for (std::size_t i = m - 1; i >= k; --i) {
      tab[i] = (t[i] * tab[i - 1] - t[i - k] * tab[i]) / (t[i] - t[i - k]);
      if (i == k) break;
    }
  return tab[m - 1];
}

std::pair<double, double> u2_integral_check() {
  const auto integrand = [](double w) {
    const double u = w * w;
    if (std::abs(w) < 0.6) {
      // (5 w sin w - (w^2 - 8) cos w - 8)/w^6 expanded about w = 0: the
      // coefficient of w^{2k-6} is (-1)^k 4 (k-1)(k-2)/(2k)! for k >= 3.
      double sum = 0.0;
      double fact = 720.0;  // (2k)! at k = 3
      double upow = 1.0;
      double sign = -1.0;
      for (int k = 3; k <= 14; ++k) {
        sum += sign * 4.0 * (k - 1) * (k - 2) / fact * upow;
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        upow *= u;
        sign = -sign;
      }
      return 0.5 * kPi * sum;
    }
    const double num =
        5.0 * w * std::sin(w) - (u - 8.0) * std::cos(w) - 8.0;
    return 0.5 * kPi * num / (u * u * u);
  };
  const double lhs =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          integrand, -2.0 * kPi, 2.0 * kPi, 12, 1e-13);
  const double rhs =
      (1.0 / (kPi * kPi) - 2.0 - 4.0 * kPi * sine_integral(2.0 * kPi)) /
      160.0;
  return {lhs, rhs};
}

std::string expansion_to_csv(const ExpansionReport& r) {
  std::string out = "eps,volume,volume_over_eps4,fitted\n";
  char buf[192];
  for (std::size_t i = 0; i < r.eps_list.size(); ++i) {
    const double e2 = r.eps_list[i] * r.eps_list[i];
    const double fitted = r.c0_est * (1.0 + r.slope_est * e2);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n",
                  r.eps_list[i], r.volumes[i], r.volumes[i] / (e2 * e2),
                  fitted);
    out += buf;
  }
  return out;
}

std::string expansion_to_json(const ExpansionReport& r) {
  nlohmann::json j;
  j["eps_list"] = r.eps_list;
  j["volumes"] = r.volumes;
  j["c0_est"] = r.c0_est;
  j["slope_est"] = r.slope_est;
  j["residuals"] = r.residuals;
  return j.dump(2);
}

}  // namespace srvol
