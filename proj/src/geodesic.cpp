#include "srvol/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <utility>

namespace srvol {

namespace {

// ---------------------------------------------------------------------------
// Phase vector (x, y, z, theta, w) used inside the stepper.
// ---------------------------------------------------------------------------

using Vec5 = std::array<double, 5>;

void eval_rhs(const CompiledStructure& cs, double rho, const Vec5& y,
              Vec5& dy) {
  const CompiledStructure::Values v = cs.eval({y[0], y[1], y[2]});
  const double ct = std::cos(y[3]), st = std::sin(y[3]);
  const double a =
      v.c011 * ct * ct + v.c012_plus_c021 * ct * st + v.c022 * st * st;
  const double b = v.c121 * ct + v.c122 * st;
  for (int k = 0; k < 3; ++k) dy[k] = rho * (ct * v.X1[k] + st * v.X2[k]);
  dy[3] = y[4] - rho * b;
  dy[4] = -rho * rho * a;
}

// Dormand-Prince 5(4) tableau.  The fifth-order weights coincide with the
// last stage row (first-same-as-last), so k7 carries over as the next k1.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0,
                 kA74 = 125.0 / 192.0, kA75 = -2187.0 / 6784.0,
                 kA76 = 11.0 / 84.0;
// Difference between the fifth- and fourth-order weights (error estimator).
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr int kMaxSteps = 1000000;

/// Adaptive embedded integration of the geodesic system from state y0 over
/// [0, t_final].  Every time in `mandatory` (sorted, in (0, t_final]) is
/// landed on exactly by clamping the step.  on_sample, when set, receives
/// every accepted step including the initial state.  Returns the final state.
Vec5 run_dopri5(const CompiledStructure& cs, double rho, Vec5 y,
                double t_final, double tol,
                const std::vector<double>& mandatory,
                const std::function<void(double, const Vec5&)>& on_sample) {
  constexpr int n = 5;
  double t = 0.0;
  Vec5 k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;

  if (on_sample) on_sample(t, y);
  eval_rhs(cs, rho, y, k1);

  std::size_t next_mand = 0;
  // Initial step guess: small against both the total span and the fastest
  // angular scale; the controller corrects it within a few steps.
  double h = std::min(t_final / 16.0,
                      0.1 / (1.0 + std::abs(rho) + std::abs(y[4])));
  const double t_floor = t_final * 1e-14;

  for (int step = 0; step < kMaxSteps; ++step) {
    if (t >= t_final - t_floor) return y;

    double h_try = std::min(h, t_final - t);
    bool clamped = false;
    if (next_mand < mandatory.size()) {
      const double tm = mandatory[next_mand];
      if (t + h_try >= tm - t_floor) {
        h_try = tm - t;
        clamped = true;
      }
    }
    if (h_try < t_floor)
      throw ConvergenceError(
          "geodesic integration: step size underflow (local error cannot be "
          "met at the requested tolerance)");

    const double hh = h_try;
    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + hh * kA21 * k1[i];
    eval_rhs(cs, rho, ytmp, k2);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (kA31 * k1[i] + kA32 * k2[i]);
    eval_rhs(cs, rho, ytmp, k3);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    eval_rhs(cs, rho, ytmp, k4);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] +
                             kA54 * k4[i]);
    eval_rhs(cs, rho, ytmp, k5);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + hh * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                             kA64 * k4[i] + kA65 * k5[i]);
    eval_rhs(cs, rho, ytmp, k6);
    for (int i = 0; i < n; ++i)
      ynew[i] = y[i] + hh * (kA71 * k1[i] + kA73 * k3[i] + kA74 * k4[i] +
                             kA75 * k5[i] + kA76 * k6[i]);
    eval_rhs(cs, rho, ynew, k7);

    double err_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      err[i] = hh * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                     kE6 * k6[i] + kE7 * k7[i]);
      const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double q = err[i] / sc;
      err_norm += q * q;
    }
    err_norm = std::sqrt(err_norm / n);

    if (err_norm <= 1.0) {
      t += hh;
      y = ynew;
      k1 = k7;
      if (clamped) {
        t = mandatory[next_mand];  // land exactly, no rounding drift
        ++next_mand;
      }
      if (on_sample) on_sample(t, y);
      const double grow =
          (err_norm == 0.0)
              ? 5.0
              : std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
      h = hh * grow;
    } else {
      h = hh * std::min(1.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
    }
  }
  throw ConvergenceError(
      "geodesic integration: step limit (1e6) exhausted before t_final");
}

void check_tol(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6))
    throw ConfigError(
        "integration tolerance must lie in [1e-13, 1e-6], got " +
        std::to_string(tol));
}

Vec5 initial_state(const CylCovector& cov) {
  return {0.0, 0.0, 0.0, cov.theta, cov.w};
}

Point3 endpoint(const CompiledStructure& cs, const CylCovector& cov,
                double tol) {
  if (cov.rho == 0.0) return {0.0, 0.0, 0.0};
  const Vec5 yf =
      run_dopri5(cs, cov.rho, initial_state(cov), 1.0, tol, {}, nullptr);
  return {yf[0], yf[1], yf[2]};
}

/// Raw central-difference Jacobian matrix of the time-1 endpoint in
/// (rho, theta, w) at one step size.
CylCovector shifted(CylCovector c, int axis, double d) {
  if (axis == 0)
    c.rho += d;
  else if (axis == 1)
    c.theta += d;
  else
    c.w += d;
  return c;
}

std::array<std::array<double, 3>, 3> fd_matrix(const CompiledStructure& cs,
                                               const CylCovector& cov,
                                               double h, double tol) {
  std::array<std::array<double, 3>, 3> J;
  for (int j = 0; j < 3; ++j) {
    const Point3 fp = endpoint(cs, shifted(cov, j, h), tol);
    const Point3 fm = endpoint(cs, shifted(cov, j, -h), tol);
    for (int i = 0; i < 3; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * h);
  }
  return J;
}

double det3(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double jacobian_impl(const CompiledStructure& cs, const CylCovector& cov,
                     double fd_step, double ode_tol) {
  const auto Jh = fd_matrix(cs, cov, fd_step, ode_tol);
  const auto Jh2 = fd_matrix(cs, cov, fd_step / 2.0, ode_tol);
  std::array<std::array<double, 3>, 3> JR;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      JR[i][j] = (4.0 * Jh2[i][j] - Jh[i][j]) / 3.0;
  return det3(JR);
}

}  // namespace

// ---------------------------------------------------------------------------
// CompiledStructure
// ---------------------------------------------------------------------------

CompiledStructure::CompiledStructure(const ContactStructure& s) {
  const RationalFn* fields[6] = {&s.frame.X1.c[0], &s.frame.X1.c[1],
                                 &s.frame.X1.c[2], &s.frame.X2.c[0],
                                 &s.frame.X2.c[1], &s.frame.X2.c[2]};
  const RationalFn* consts[6] = {&s.c.c01_1, &s.c.c01_2, &s.c.c02_1,
                                 &s.c.c02_2, &s.c.c12_1, &s.c.c12_2};
  auto build = [this](const RationalFn& r, Ratio& out) {
    out.num = CompiledPoly::compile(r.num());
    out.den_is_one = r.den().is_constant(1.0);
    if (!out.den_is_one) out.den = CompiledPoly::compile(r.den());
    for (int a = 0; a < 3; ++a) {
      max_exp_[a] = std::max(max_exp_[a], out.num.max_exponents[a]);
      if (!out.den_is_one)
        max_exp_[a] = std::max(max_exp_[a], out.den.max_exponents[a]);
    }
  };
  for (int k = 0; k < 6; ++k) build(*fields[k], fields_[k]);
  for (int k = 0; k < 6; ++k) build(*consts[k], consts_[k]);
  for (int a = 0; a < 3; ++a)
    if (max_exp_[a] > PowerTable::kMaxDegree)
      throw Error("structure constants exceed the compiled degree limit");
}

double CompiledStructure::eval_ratio(const Ratio& r,
                                     const PowerTable& t) const {
  const double n = r.num.eval(t);
  if (r.den_is_one) return n;
  const double d = r.den.eval(t);
  if (d == 0.0)
    throw PoleError("structure constant evaluated at a denominator zero");
  return n / d;
}

CompiledStructure::Values CompiledStructure::eval(const Point3& p) const {
  PowerTable t;
  t.build(p, max_exp_);
  Values v;
  for (int k = 0; k < 3; ++k) {
    v.X1[k] = eval_ratio(fields_[k], t);
    v.X2[k] = eval_ratio(fields_[k + 3], t);
  }
  const double c011 = eval_ratio(consts_[0], t);
  const double c012 = eval_ratio(consts_[1], t);
  const double c021 = eval_ratio(consts_[2], t);
  const double c022 = eval_ratio(consts_[3], t);
  v.c011 = c011;
  v.c012_plus_c021 = c012 + c021;
  v.c022 = c022;
  v.c121 = eval_ratio(consts_[4], t);
  v.c122 = eval_ratio(consts_[5], t);
  return v;
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

GeodesicState rhs(const ContactStructure& s, double rho,
                  const GeodesicState& st) {
  const Point3& p = st.pt;
  const double ct = std::cos(st.theta), st_ = std::sin(st.theta);
  const double c011 = s.c.c01_1.eval(p), c012 = s.c.c01_2.eval(p),
               c021 = s.c.c02_1.eval(p), c022 = s.c.c02_2.eval(p),
               c121 = s.c.c12_1.eval(p), c122 = s.c.c12_2.eval(p);
  const double a = c011 * ct * ct + (c012 + c021) * ct * st_ +
                   c022 * st_ * st_;
  const double b = c121 * ct + c122 * st_;
  GeodesicState d;
  for (int k = 0; k < 3; ++k)
    d.pt[k] = rho * (ct * s.frame.X1.c[k].eval(p) +
                     st_ * s.frame.X2.c[k].eval(p));
  d.theta = st.w - rho * b;
  d.w = -rho * rho * a;
  return d;
}

GeodesicTrace integrate(const ContactStructure& s, const CylCovector& cov,
                        double t_final, double tol) {
  if (!(t_final > 0.0))
    throw ConfigError("integration horizon t_final must be positive");
  check_tol(tol);

  const CompiledStructure cs(s);
  GeodesicTrace trace;
  trace.rho = cov.rho;
  trace.tolerance = tol;

  constexpr int kUniform = 64;
  std::vector<double> mandatory;
  mandatory.reserve(kUniform);
  for (int k = 1; k <= kUniform; ++k)
    mandatory.push_back(t_final * static_cast<double>(k) / kUniform);

  auto sink = [&trace](double t, const Vec5& y) {
    if (!trace.samples.empty() && !(t > trace.samples.back().t)) return;
    trace.samples.push_back(
        {t, GeodesicState{{y[0], y[1], y[2]}, y[3], y[4]}});
  };
  run_dopri5(cs, cov.rho, initial_state(cov), t_final, tol, mandatory, sink);
  return trace;
}

Point3 exp_map(const CompiledStructure& cs, const CylCovector& cov,
               double tol) {
  check_tol(tol);
  if (cov.rho == 0.0) return {0.0, 0.0, 0.0};
  return endpoint(cs, cov, tol);
}

Point3 exp_map(const ContactStructure& s, const CylCovector& cov,
               double tol) {
  return exp_map(CompiledStructure(s), cov, tol);
}

double jacobian_exp(const CompiledStructure& cs, const CylCovector& cov,
                    double fd_step, double ode_tol) {
  if (!(cov.rho > 0.0))
    throw ConfigError("jacobian_exp requires rho > 0");
  if (!(fd_step > 0.0))
    throw ConfigError("jacobian_exp requires a positive fd_step");
  check_tol(ode_tol);
  return jacobian_impl(cs, cov, fd_step, ode_tol);
}

double jacobian_exp(const ContactStructure& s, const CylCovector& cov,
                    double fd_step, double ode_tol) {
  return jacobian_exp(CompiledStructure(s), cov, fd_step, ode_tol);
}

double first_conjugate_time(const ContactStructure& s, double theta, double w,
                            double tol) {
  if (w == 0.0)
    throw ConfigError("first_conjugate_time requires w != 0");
  if (!(tol > 0.0))
    throw ConfigError("first_conjugate_time requires a positive tolerance");

  const CompiledStructure cs(s);
  const double period = 2.0 * M_PI / std::abs(w);
  const double dt = 0.02 * period;
  const double t_max = 3.0 * period;
  const double fd_step = 1e-4, ode_tol = 1e-11;

  auto jac_at = [&](double t) {
    return jacobian_impl(cs, CylCovector{t, theta, t * w}, fd_step, ode_tol);
  };

  double t_prev = dt;
  double j_prev = jac_at(t_prev);
  for (double t = 2.0 * dt; t <= t_max * (1.0 + 1e-12); t += dt) {
    const double j = jac_at(t);
    if (j == 0.0) return t;
    if (j_prev * j < 0.0) {
      double a = t_prev, b = t;
      double ja = j_prev;
      while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double jm = jac_at(m);
        if (jm == 0.0) return m;
        if (ja * jm < 0.0) {
          b = m;
        } else {
          a = m;
          ja = jm;
        }
      }
      return 0.5 * (a + b);
    }
    t_prev = t;
    j_prev = j;
  }
  throw ConvergenceError(
      "no conjugate time found before three periods of the vertical "
      "frequency");
}

std::string GeodesicTrace::to_csv() const {
  std::string out = "t,x,y,z,theta,w\n";
  char line[256];
  for (const Sample& s : samples) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  s.t, s.state.pt[0], s.state.pt[1], s.state.pt[2],
                  s.state.theta, s.state.w);
    out += line;
  }
  return out;
}

namespace detail {
double jacobian_fd_det(const ContactStructure& s, const CylCovector& cov,
                       double fd_step, double ode_tol) {
  const CompiledStructure cs(s);
  return det3(fd_matrix(cs, cov, fd_step, ode_tol));
}
}  // namespace detail

}  // namespace srvol
