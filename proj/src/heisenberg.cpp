#include "srvol/heisenberg.hpp"

#include <cmath>
#include <limits>

#include "srvol/quadrature.hpp"

namespace srvol {

namespace detail {

Point3 heis_exp_closed(double rho, double theta, double w, double t) {
  const double ph = w * t;
  // sin(theta + ph) - sin(theta) = 2 cos(theta + ph/2) sin(ph/2) and
  // cos(theta) - cos(theta + ph) = 2 sin(theta + ph/2) sin(ph/2): the
  // product forms avoid subtracting nearly equal values for small ph.
  const double sh = std::sin(0.5 * ph);
  const double x = rho * 2.0 * std::cos(theta + 0.5 * ph) * sh / w;
  const double y = rho * 2.0 * std::sin(theta + 0.5 * ph) * sh / w;
  const double z = rho * rho * (ph - std::sin(ph)) / (2.0 * w * w);
  return {x, y, z};
}

Point3 heis_exp_series(double rho, double theta, double w, double t) {
  const double ph = w * t;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ph2 = ph * ph;
  // Horizontal components: rho t [cos/sin(theta) rotated by the phase],
  // expanded to fourth order in the phase.
  const double even = 1.0 - ph2 / 6.0 + ph2 * ph2 / 120.0;
  const double odd = ph * (0.5 - ph2 / 24.0);
  const double x = rho * t * (ct * even - st * odd);
  const double y = rho * t * (st * even + ct * odd);
  // z = rho^2 (wt - sin wt)/(2w^2) expanded in w at fixed t.
  const double w2 = w * w;
  const double t3 = t * t * t;
  const double z =
      rho * rho * t3 * (w / 12.0 - w * w2 * t * t / 240.0 + w2 * w2 * w * t3 * t / 10080.0);
  return {x, y, z};
}

double heis_jacobian_closed(double rho, double w) {
  // 2 - 2 cos w = 4 sin^2(w/2) exactly; writing the numerator as
  // 4 sin^2(w/2) - w sin w defers the cancellation to two O(w^2) terms,
  // which keeps the quotient accurate down to the series switch.
  const double s = std::sin(0.5 * w);
  const double num = 4.0 * s * s - w * std::sin(w);
  return rho * rho * rho * num / (w * w * w * w);
}

double heis_jacobian_series(double rho, double w) {
  const double w2 = w * w;
  return rho * rho * rho * (1.0 / 12.0 - w2 / 180.0 + w2 * w2 / 6720.0);
}

double g0_closed(double w) {
  const double w2 = w * w;
  const double num = (16.0 - 3.0 * w2) * std::cos(w) + 2.0 * std::cos(2.0 * w) +
                     13.0 * w * std::sin(w) + w * std::sin(2.0 * w) - 18.0;
  return num / (w2 * w2 * w2);
}

double g0_series(double w) {
  const double w2 = w * w;
  double s = 7279.0 / 25406244864000.0;
  s = s * w2 - 101.0 / 5381376000.0;
  s = s * w2 + 151.0 / 161441280.0;
  s = s * w2 - 1.0 / 29700.0;
  s = s * w2 + 9.0 / 11200.0;
  s = s * w2 - 3.0 / 280.0;
  s = s * w2 + 1.0 / 20.0;
  return s;
}

}  // namespace detail

HeisExpResult heis_exp_full(double rho, double theta, double w, double t) {
  const bool series = std::abs(w * t) < 1e-5;
  const Point3 p = series ? detail::heis_exp_series(rho, theta, w, t)
                          : detail::heis_exp_closed(rho, theta, w, t);
  return {p[0], p[1], p[2], series};
}

Point3 heis_exp(double rho, double theta, double w, double t) {
  const HeisExpResult r = heis_exp_full(rho, theta, w, t);
  return {r.x, r.y, r.z};
}

double heis_jacobian(double rho, double theta, double w) {
  (void)theta;  // rotational symmetry: the determinant is theta-independent
  if (std::abs(w) < 1e-3) return detail::heis_jacobian_series(rho, w);
  return detail::heis_jacobian_closed(rho, w);
}

double g0(double w) {
  if (std::abs(w) < 0.5) return detail::g0_series(w);
  return detail::g0_closed(w);
}

double sine_integral(double x) {
  if (x == 0.0) return 0.0;
  auto sinc = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
  return adaptive_gk(sinc, 0.0, x, 1e-13);
}

double c0() {
  const double pi = std::acos(-1.0);
  return (1.0 + 2.0 * pi * sine_integral(2.0 * pi)) / 12.0;
}

double c1() {
  const double pi = std::acos(-1.0);
  return (2.0 + 4.0 * pi * sine_integral(2.0 * pi) - 1.0 / (pi * pi)) / (160.0 * c0());
}

double heis_cut_time(double w) {
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  const double pi = std::acos(-1.0);
  return 2.0 * pi / std::abs(w);
}

}  // namespace srvol
