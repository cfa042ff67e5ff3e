#include "srvol/acceptance.hpp"

#include <gsl/gsl_integration.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "srvol/connection.hpp"
#include "srvol/contact.hpp"
#include "srvol/cutdomain.hpp"
#include "srvol/dilation.hpp"
#include "srvol/errors.hpp"
#include "srvol/geodesic.hpp"
#include "srvol/heisenberg.hpp"
#include "srvol/volume.hpp"

namespace srvol {
namespace {

constexpr double kPi = std::numbers::pi;

struct CheckResult {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& detail) {
    if (!ok) {
      pass = false;
      details.push_back(detail);
    }
  }
};

std::string fmt(const char* format, double a, double b = 0.0,
                double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

ContactStructure quadratic_structure(double a, double b, double c,
                                     const std::string& beta = "0") {
  char gamma[160];
  std::snprintf(gamma, sizeof(gamma), "%.17g*x^2 + %.17g*x*y + %.17g*y^2", a,
                b, c);
  return derive(build_normal_frame({parse_poly(beta), parse_poly(gamma)}));
}

// --- check 1: flat unit-ball constant from direct quadrature --------------

void check_unit_ball_constant(unsigned, CheckResult& r) {
  gsl_integration_glfixed_table* trho = gsl_integration_glfixed_table_alloc(32);
  gsl_integration_glfixed_table* tw = gsl_integration_glfixed_table_alloc(96);
  if (trho == nullptr || tw == nullptr)
    throw ConfigError("could not allocate Gauss-Legendre tables");
  double integral = 0.0;
  for (std::size_t i = 0; i < 32; ++i) {
    double rho = 0.0, wr = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, i, &rho, &wr, trho);
    double inner = 0.0;
    for (std::size_t j = 0; j < 96; ++j) {
      double w = 0.0, ww = 0.0;
      gsl_integration_glfixed_point(-2.0 * kPi, 2.0 * kPi, j, &w, &ww, tw);
      inner += ww * heis_jacobian(rho, 0.0, w);
    }
    integral += wr * inner;
  }
  integral *= 2.0 * kPi;  // the integrand does not depend on theta
  gsl_integration_glfixed_table_free(trho);
  gsl_integration_glfixed_table_free(tw);

  r.require(std::abs(integral - c0()) <= 1e-6,
            fmt("quadrature %.12g vs closed form %.12g (|diff| > 1e-6)",
                integral, c0()));
  r.require(std::abs(integral - 0.826) <= 1e-3,
            fmt("quadrature %.12g vs reference 0.826 (|diff| > 1e-3)",
                integral));
}

// --- check 2: second-order integral identity ------------------------------

void check_integral_identity(unsigned, CheckResult& r) {
  const auto [lhs, rhs] = u2_integral_check();
  r.require(std::abs(lhs - rhs) <= 1e-9,
            fmt("quadrature %.12g vs closed form %.12g (|diff| > 1e-9)", lhs,
                rhs));
  const double ratio = -rhs / c0();
  r.require(std::abs(ratio - c1()) <= 1e-15,
            fmt("-rhs/c0 = %.17g but c1 = %.17g", ratio, c1()));
  r.require(std::abs(c1() - 0.149) <= 1e-3,
            fmt("c1 = %.12g vs reference 0.149 (|diff| > 1e-3)", c1()));
}

// --- check 3: numerical exponential against the closed form ---------------

void check_exponential_oracle(unsigned, CheckResult& r) {
  const ContactStructure s = derive(heisenberg_frame());
  const double thetas[] = {0.0, kPi / 3.0, kPi / 2.0, 1.1 * kPi, 1.9 * kPi};
  const double wmax = 2.0 * kPi - 0.1;
  const double ws[] = {0.0,  0.25, -0.25, 1.0,  -1.0,  2.0,  -2.0,
                       kPi,  -kPi, 5.0,  -5.0,  wmax, -wmax};
  double sup = 0.0;
  for (double theta : thetas)
    for (double w : ws) {
      const GeodesicTrace trace = integrate(s, {1.0, theta, w}, 1.0, 1e-10);
      for (const auto& sample : trace.samples) {
        const Point3 oracle = heis_exp(1.0, theta, w, sample.t);
        for (int k = 0; k < 3; ++k)
          sup = std::max(sup, std::abs(sample.state.pt[k] - oracle[k]));
      }
    }
  r.require(sup <= 1e-8,
            fmt("sup endpoint error %.3g over the oracle grid (> 1e-8)", sup));

  double jac_rel = 0.0;
  for (double w : {1.0, -1.0, 2.0, -2.0, kPi, -kPi, 5.0, -5.0}) {
    const double num = jacobian_exp(s, {1.0, 0.3, w});
    const double ref = heis_jacobian(1.0, 0.3, w);
    jac_rel = std::max(jac_rel, std::abs(num - ref) / std::abs(ref));
  }
  r.require(jac_rel <= 1e-5,
            fmt("max relative Jacobian error %.3g (> 1e-5)", jac_rel));
}

// --- check 4: origin invariants on the quadratic family -------------------

void check_invariant_formulas(unsigned seed, CheckResult& r) {
  std::mt19937_64 rng(seed + 4);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const Point3 origin{0.0, 0.0, 0.0};
  double worst_kappa = 0.0, worst_chi = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = U(rng), b = U(rng), c = U(rng);
    const ContactStructure s = quadratic_structure(a, b, c);
    const double kappa_err = std::abs(kappa_at(s, origin) - 2.0 * (a + c));
    const double chi_err = std::abs(
        chi_at(s, origin) - 2.0 * std::sqrt(b * b + (c - a) * (c - a)));
    worst_kappa = std::max(worst_kappa, kappa_err);
    worst_chi = std::max(worst_chi, chi_err);
  }
  r.require(worst_kappa <= 1e-10,
            fmt("worst kappa formula error %.3g (> 1e-10)", worst_kappa));
  r.require(worst_chi <= 1e-10,
            fmt("worst chi formula error %.3g (> 1e-10)", worst_chi));
}

// --- check 5: curvature identity across random structures -----------------

void check_curvature_identity(unsigned seed, CheckResult& r) {
  std::mt19937_64 rng(seed + 5);
  std::uniform_real_distribution<double> C(-1.5, 1.5);
  std::uniform_real_distribution<double> B(-0.4, 0.4);
  std::uniform_real_distribution<double> P(-0.05, 0.05);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::string beta = fmt("%.17g*x + %.17g*y", B(rng), B(rng));
    const ContactStructure s =
        quadratic_structure(C(rng), C(rng), C(rng), beta);
    worst = std::max(worst,
                     std::abs(verify_sec_identity(s, {0.0, 0.0, 0.0})));
    for (int k = 0; k < 5; ++k) {
      const Point3 pt{P(rng), P(rng), P(rng)};
      worst = std::max(worst, std::abs(verify_sec_identity(s, pt)));
    }
  }
  r.require(worst <= 1e-8, fmt("worst identity residual %.3g (> 1e-8)", worst));
}

// --- check 6: theta-averaged second-order Jacobian coefficient ------------

void check_v2_limit(unsigned, CheckResult& r) {
  const ContactStructure s = quadratic_structure(1.0, 0.0, 1.0);  // kappa = 4
  const std::vector<double> ladder{0.1, 0.05, 0.025};
  for (double w : {1.0, 2.0, kPi}) {
    double order = 0.0;
    const double limit = v2_theta_average(s, 1.0, w, ladder, &order);
    const double predicted = 2.0 * g0(w);  // kappa/2 = 2
    r.require(std::isfinite(order) && order >= 1.8,
              fmt("w = %.6g: observed order %.3g (< 1.8)", w, order));
    r.require(std::abs(limit - predicted) <= 0.05 * std::abs(predicted),
              fmt("w = %.6g: limit %.6g vs predicted %.6g (> 5%%)", w, limit,
                  predicted));
  }
}

// --- check 7: fitted expansion slope against the curvature prediction -----

void check_expansion_slopes(unsigned, CheckResult& r) {
  const std::vector<double> ladder{0.20, 0.15, 0.10, 0.07, 0.05};
  const QuadratureSpec quad{};  // default node counts

  struct Target {
    double a, c;      // quadratic data a x^2 + c y^2
    double kappa;     // 2 (a + c)
    const char* tag;
  };
  for (const Target& t : {Target{0.5, 0.5, 2.0, "kappa = 2"},
                          Target{1.0, 1.0, 4.0, "kappa = 4"}}) {
    const ContactStructure s = quadratic_structure(t.a, 0.0, t.c);
    const ExpansionReport report = fit_expansion(s, ladder, quad);
    const double predicted = -c1() * t.kappa;
    r.require(
        std::abs(report.slope_est - predicted) <= 0.1 * std::abs(predicted),
        fmt("slope %.6g vs predicted %.6g (> 10%%)", report.slope_est,
            predicted) +
            " [" + t.tag + "]");
  }

  // kappa = 0, chi = 4: the eps^2 coefficient must not see chi.
  const ContactStructure sx = quadratic_structure(1.0, 0.0, -1.0);
  const ExpansionReport report = fit_expansion(sx, ladder, quad);
  r.require(std::abs(report.slope_est) <= 0.05,
            fmt("chi-only structure: |slope| = %.6g (> 0.05)",
                std::abs(report.slope_est)));
}

// --- check 8: dilation homogeneity and the rescaling diagram --------------

void check_dilation_laws(unsigned seed, CheckResult& r) {
  std::mt19937_64 rng(seed + 8);
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  const FrameField frames[] = {
      build_normal_frame(
          {parse_poly(fmt("%.17g*x + %.17g*y", 0.4 * U(rng), 0.4 * U(rng))),
           parse_poly(fmt("%.17g*x^2 + %.17g*x*y + "
                          "1.1*y^2 + 0.3*x^2*y - 0.2*y^3",
                          U(rng), U(rng)))}),
      build_normal_frame(
          {Polynomial(),
           parse_poly(fmt("%.17g*x^2 + %.17g*y^2 + 0.25*x^3", U(rng),
                          U(rng)))}),
  };

  double worst_hom = 0.0;
  for (const FrameField& f : frames) {
    const ContactStructure parent = derive(f);
    for (double eps : {0.5, 0.1, 0.02}) {
      const ContactStructure dil = derive(dilate_frame(eps, f));
      struct Entry {
        const RationalFn* dilated;
        const RationalFn* base;
        int weight;
      };
      const Entry table[] = {
          {&dil.c.c01_1, &parent.c.c01_1, 2},
          {&dil.c.c01_2, &parent.c.c01_2, 2},
          {&dil.c.c02_1, &parent.c.c02_1, 2},
          {&dil.c.c02_2, &parent.c.c02_2, 2},
          {&dil.c.c12_1, &parent.c.c12_1, 1},
          {&dil.c.c12_2, &parent.c.c12_2, 1},
          {&dil.c.c01_0, &parent.c.c01_0, 1},
          {&dil.c.c02_0, &parent.c.c02_0, 1},
          {&dil.c.c12_0, &parent.c.c12_0, 0},
      };
      for (int trial = 0; trial < 5; ++trial) {
        const Point3 q{0.4 * U(rng), 0.4 * U(rng), 0.4 * U(rng)};
        const Point3 dq = dilate_point(eps, q);
        for (const Entry& e : table)
          worst_hom =
              std::max(worst_hom, std::abs(e.dilated->eval(q) -
                                           std::pow(eps, e.weight) *
                                               e.base->eval(dq)));
      }
    }
  }
  r.require(worst_hom <= 1e-9,
            fmt("worst homogeneity mismatch %.3g (> 1e-9)", worst_hom));

  double worst_diag = 0.0;
  for (const FrameField& f : frames) {
    const ContactStructure parent = derive(f);
    for (double eps : {0.5, 0.2}) {
      const ContactStructure dil = derive(make_dilated(eps, f).frame);
      for (int trial = 0; trial < 5; ++trial) {
        const double rho = 0.2 + 0.8 * std::abs(U(rng));
        const double theta = kPi * (U(rng) + 1.0);
        const double w = kPi * U(rng);
        const CylCovector cov{rho, theta, w};
        const Point3 lhs = dilate_point(eps, exp_map(dil, cov, 1e-10));
        const Point3 rhs = exp_map(parent, tau(eps, cov), 1e-10);
        for (int k = 0; k < 3; ++k)
          worst_diag = std::max(worst_diag, std::abs(lhs[k] - rhs[k]));
      }
    }
  }
  r.require(worst_diag <= 1e-7,
            fmt("worst rescaling-diagram mismatch %.3g (> 1e-7)", worst_diag));
}

// --- check 9: intrinsic density expansion at the base point ---------------

void check_density_expansion(unsigned seed, CheckResult& r) {
  std::mt19937_64 rng(seed + 9);
  std::normal_distribution<double> N(0.0, 1.0);
  const NormalFormSpec data{
      parse_poly("0.3*x - 0.2*y"),
      parse_poly("x^2 + 0.5*x*y - y^2 + 0.4*x^3 - 0.3*x*y^2 + 0.2*y^3")};
  const ContactStructure s = derive(build_normal_frame(data));
  const std::array<double, 3> g2 = gamma2(data);  // a, b, c with 2b cross term

  const double ts[] = {0.1, 0.05, 0.025};
  std::array<double, 3> sup{};  // max_q |residual| per ladder step
  for (int trial = 0; trial < 10; ++trial) {
    double qx = N(rng), qy = N(rng), qz = N(rng);
    const double norm = std::sqrt(qx * qx + qy * qy + qz * qz);
    qx /= norm;
    qy /= norm;
    qz /= norm;
    const double quad_val =
        g2[0] * qx * qx + 2.0 * g2[1] * qx * qy + g2[2] * qy * qy;
    for (int i = 0; i < 3; ++i) {
      const double t = ts[i];
      const double psi = popp_density(s, dilate_point(t, {qx, qy, qz}));
      const double resid = (psi - 1.0) / (t * t) + 2.0 * quad_val;
      sup[i] = std::max(sup[i], std::abs(resid));
    }
  }
  r.require(sup[0] > 1e-4,
            fmt("third-order term too small to observe (sup %.3g)", sup[0]));
  r.require(sup[0] <= 1.0, fmt("residual scale %.3g out of range", sup[0]));
  r.require(sup[1] <= 0.65 * sup[0] && sup[2] <= 0.65 * sup[1],
            fmt("residuals %.3g, %.3g, %.3g do not decay linearly", sup[0],
                sup[1], sup[2]));
}

}  // namespace

int run_acceptance(unsigned seed, std::ostream& out) {
  struct Check {
    const char* name;
    double time_limit_s;
    void (*body)(unsigned, CheckResult&);
  };
  const Check checks[] = {
      {"flat unit-ball constant from direct quadrature", 5.0,
       check_unit_ball_constant},
      {"second-order integral identity and its ratio", 1.0,
       check_integral_identity},
      {"numerical exponential against the closed form", 30.0,
       check_exponential_oracle},
      {"origin invariant formulas on the quadratic family", 5.0,
       check_invariant_formulas},
      {"curvature identity across random structures", 60.0,
       check_curvature_identity},
      {"theta-averaged second-order Jacobian coefficient", 300.0,
       check_v2_limit},
      {"fitted expansion slope against the curvature prediction", 900.0,
       check_expansion_slopes},
      {"dilation homogeneity and the rescaling diagram", 60.0,
       check_dilation_laws},
      {"intrinsic density expansion at the base point", 30.0,
       check_density_expansion},
  };

  int failures = 0;
  const int total = static_cast<int>(std::size(checks));
  for (int i = 0; i < total; ++i) {
    const Check& check = checks[i];
    CheckResult result;
    const auto start = std::chrono::steady_clock::now();
    try {
      check.body(seed, result);
    } catch (const Error& e) {
      result.require(false, std::string("unexpected error: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed >= check.time_limit_s)
      result.require(false, fmt("runtime %.1f s exceeds the %.0f s budget",
                                elapsed, check.time_limit_s));

    char line[160];
    std::snprintf(line, sizeof(line), "[%d/%d] %-58s %s  (%.2f s)", i + 1,
                  total, check.name, result.pass ? "PASS" : "FAIL", elapsed);
    out << line << "\n";
    for (const std::string& detail : result.details)
      out << "      " << detail << "\n";
    out.flush();
    if (!result.pass) ++failures;
  }
  return failures;
}

}  // namespace srvol
