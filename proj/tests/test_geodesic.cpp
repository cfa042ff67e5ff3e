#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "srvol/contact.hpp"
#include "srvol/dilation.hpp"
#include "srvol/geodesic.hpp"
#include "srvol/heisenberg.hpp"

using namespace srvol;

namespace {

Polynomial P(const char* s) { return parse_poly(s); }

ContactStructure flat_structure() { return derive(heisenberg_frame()); }

// Quadratic model used throughout: gamma = x^2 + x y + 2 y^2, i.e.
// (a, b, c) = (1, 0.5, 2) in gamma = a x^2 + 2 b x y + c y^2.
ContactStructure quadratic_structure() {
  return derive(build_normal_frame({Polynomial{}, P("x^2 + x*y + 2*y^2")}));
}

ContactStructure curved_structure() {
  return derive(build_normal_frame(
      {P("x"), P("x^2 + x*y + 2*y^2 + x^2*y - 0.5*x^3")}));
}

double dist3(const Point3& a, const Point3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

}  // namespace

TEST_SUITE("geodesic") {

TEST_CASE("flat right-hand side reduces to the planar rotation system") {
  const ContactStructure s = flat_structure();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const GeodesicState st{{U(rng), U(rng), U(rng)}, 2.0 * U(rng),
                           3.0 * U(rng)};
    const double rho = 0.2 + std::abs(U(rng));
    const GeodesicState d = rhs(s, rho, st);
    const double ct = std::cos(st.theta), sn = std::sin(st.theta);
    CHECK(d.pt[0] == doctest::Approx(rho * ct).epsilon(1e-14));
    CHECK(d.pt[1] == doctest::Approx(rho * sn).epsilon(1e-14));
    CHECK(d.pt[2] ==
          doctest::Approx(rho * (sn * st.pt[0] - ct * st.pt[1]) / 2.0)
              .epsilon(1e-13));
    // No vertical torsion and no horizontal curvature in the flat case.
    CHECK(d.theta == doctest::Approx(st.w).epsilon(1e-15));
    CHECK(d.w == 0.0);
  }
}

TEST_CASE("zero speed freezes everything except the fiber angle") {
  for (const ContactStructure& s : {flat_structure(), curved_structure()}) {
    const GeodesicState st{{0.2, -0.1, 0.3}, 1.1, -0.8};
    const GeodesicState d = rhs(s, 0.0, st);
    CHECK(d.pt[0] == 0.0);
    CHECK(d.pt[1] == 0.0);
    CHECK(d.pt[2] == 0.0);
    CHECK(d.theta == st.w);
    CHECK(d.w == 0.0);
  }
}

TEST_CASE("compiled evaluator agrees with the exact rational functions") {
  const ContactStructure s = curved_structure();
  const CompiledStructure cs(s);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  for (int trial = 0; trial < 30; ++trial) {
    const Point3 p{U(rng), U(rng), U(rng)};
    const CompiledStructure::Values v = cs.eval(p);
    for (int k = 0; k < 3; ++k) {
      CHECK(v.X1[k] ==
            doctest::Approx(s.frame.X1.c[k].eval(p)).epsilon(1e-12));
      CHECK(v.X2[k] ==
            doctest::Approx(s.frame.X2.c[k].eval(p)).epsilon(1e-12));
    }
    CHECK(v.c011 == doctest::Approx(s.c.c01_1.eval(p)).epsilon(1e-11));
    CHECK(v.c012_plus_c021 ==
          doctest::Approx(s.c.c01_2.eval(p) + s.c.c02_1.eval(p))
              .epsilon(1e-11));
    CHECK(v.c022 == doctest::Approx(s.c.c02_2.eval(p)).epsilon(1e-11));
    CHECK(v.c121 == doctest::Approx(s.c.c12_1.eval(p)).epsilon(1e-11));
    CHECK(v.c122 == doctest::Approx(s.c.c12_2.eval(p)).epsilon(1e-11));
  }
}

TEST_CASE("flat integration matches the closed-form endpoint map") {
  const ContactStructure s = flat_structure();
  const double thetas[] = {0.0, M_PI / 3.0, M_PI / 2.0, 1.1 * M_PI,
                           1.9 * M_PI};
  const double ws[] = {-(2.0 * M_PI - 0.1), -2.0, -0.1, 0.5, M_PI,
                       2.0 * M_PI - 0.1};
  double sup = 0.0;
  for (double theta : thetas) {
    for (double w : ws) {
      // Mid-trajectory state through the dense integrator.
      const double t_mid = 0.31;
      const GeodesicTrace tr = integrate(s, {1.0, theta, w}, t_mid, 1e-10);
      const GeodesicState& end = tr.samples.back().state;
      sup = std::max(sup, dist3(end.pt, heis_exp(1.0, theta, w, t_mid)));
      CHECK(end.theta == doctest::Approx(theta + w * t_mid).epsilon(1e-9));
      CHECK(end.w == doctest::Approx(w).epsilon(1e-9));

      // Time-1 endpoint through the fast path.
      sup = std::max(sup, dist3(exp_map(s, {1.0, theta, w}, 1e-10),
                                heis_exp(1.0, theta, w, 1.0)));
    }
  }
  CHECK(sup <= 1e-8);
}

TEST_CASE("traces sample a uniform grid on top of the adaptive steps") {
  const ContactStructure s = flat_structure();
  const GeodesicTrace tr = integrate(s, {1.0, 0.3, 2.0}, 1.0, 1e-9);

  CHECK(tr.rho == 1.0);
  CHECK(tr.tolerance == 1e-9);
  REQUIRE(tr.samples.size() >= 65);
  CHECK(tr.samples.front().t == 0.0);
  CHECK(tr.samples.front().state.pt[0] == 0.0);
  CHECK(tr.samples.front().state.pt[1] == 0.0);
  CHECK(tr.samples.front().state.pt[2] == 0.0);
  CHECK(tr.samples.front().state.theta == 0.3);
  CHECK(tr.samples.front().state.w == 2.0);
  CHECK(tr.samples.back().t == 1.0);

  for (std::size_t i = 1; i < tr.samples.size(); ++i)
    CHECK(tr.samples[i].t > tr.samples[i - 1].t);

  for (int k = 1; k <= 64; ++k) {
    const double target = static_cast<double>(k) / 64.0;
    const bool hit = std::any_of(
        tr.samples.begin(), tr.samples.end(),
        [&](const GeodesicTrace::Sample& smp) {
          return std::abs(smp.t - target) <= 1e-12;
        });
    CHECK(hit);
  }
}

TEST_CASE("vertical momentum is conserved when the fiber torsion vanishes") {
  const ContactStructure s = flat_structure();
  const double tol = 1e-9;
  const GeodesicTrace tr = integrate(s, {1.0, 0.4, 1.7}, 2.5, tol);
  for (const GeodesicTrace::Sample& smp : tr.samples)
    CHECK(std::abs(smp.state.w - 1.7) <= 10.0 * tol);
}

TEST_CASE("scaling the covector reparametrizes the geodesic") {
  const ContactStructure s = quadratic_structure();
  const double rho = 0.8, theta = 0.7, w = 1.3;
  for (double t : {0.3, 0.7}) {
    const GeodesicTrace tr = integrate(s, {rho, theta, w}, t, 1e-10);
    const Point3 via_time = tr.samples.back().state.pt;
    const Point3 via_scale = exp_map(s, {t * rho, theta, t * w}, 1e-10);
    CHECK(dist3(via_time, via_scale) <= 5e-9);
  }
}

TEST_CASE("endpoint map fixes the base point at zero speed") {
  for (const ContactStructure& s : {flat_structure(), curved_structure()}) {
    const Point3 e = exp_map(s, {0.0, 1.2, -0.5}, 1e-9);
    CHECK(e[0] == 0.0);
    CHECK(e[1] == 0.0);
    CHECK(e[2] == 0.0);
  }
}

TEST_CASE("finite-difference jacobian matches the flat closed form") {
  const ContactStructure s = flat_structure();
  for (double w : {1.0, -1.0, 2.0, -2.0, M_PI, -M_PI, 5.0, -5.0}) {
    const double oracle = heis_jacobian(1.0, 0.4, w);
    const double fd = jacobian_exp(s, {1.0, 0.4, w});
    CHECK(std::abs(fd - oracle) <= 1e-5 * std::abs(oracle));
  }
}

TEST_CASE("jacobian stays positive before the first flat conjugate point") {
  const ContactStructure s = flat_structure();
  for (double w : {0.5, -0.5, 3.0, -3.0, 5.5, -5.5, 6.2, -6.2})
    CHECK(jacobian_exp(s, {1.0, 0.9, w}) > 0.0);
}

TEST_CASE("central differences converge at second order") {
  const ContactStructure s = flat_structure();
  const CylCovector cov{1.0, 0.4, 2.0};
  const double oracle = heis_jacobian(cov.rho, cov.theta, cov.w);
  const double e4 =
      std::abs(detail::jacobian_fd_det(s, cov, 4e-3, 1e-11) - oracle);
  const double e2 =
      std::abs(detail::jacobian_fd_det(s, cov, 2e-3, 1e-11) - oracle);
  const double e1 =
      std::abs(detail::jacobian_fd_det(s, cov, 1e-3, 1e-11) - oracle);
  REQUIRE(e2 > 0.0);
  const double order = std::log2(e4 / e2);
  CHECK(order >= 1.8);
  CHECK(e1 < e4);
  // The extrapolated value beats every raw step size.
  const double extrapolated = jacobian_exp(s, cov);
  CHECK(std::abs(extrapolated - oracle) < e1);
}

TEST_CASE("flat conjugate times sit at the known multiples of the period") {
  const ContactStructure s = flat_structure();
  const double t1 = first_conjugate_time(s, 0.0, 2.0 * M_PI, 1e-8);
  CHECK(std::abs(t1 - 1.0) <= 1e-6);
  const double t2 = first_conjugate_time(s, 0.3, M_PI, 1e-8);
  CHECK(std::abs(t2 - 2.0) <= 1e-6);
}

TEST_CASE("conjugate times of dilated structures approach the flat period") {
  const FrameField frame =
      build_normal_frame({Polynomial{}, P("x^2 + x*y + 2*y^2")});
  double r_prev = 0.0;
  bool have_prev = false;
  for (double eps : {0.1, 0.05}) {
    const ContactStructure se = derive(dilate_frame(eps, frame));
    const double tc = first_conjugate_time(se, 0.0, 2.0 * M_PI, 1e-8);
    CHECK(std::abs(tc - 1.0) < 0.05);
    const double r = std::abs(tc - 1.0) / (eps * eps);
    if (have_prev) CHECK(r <= 3.0 * r_prev + 0.3);
    r_prev = r;
    have_prev = true;
  }
}

TEST_CASE("dilated endpoints converge to the flat ones at quadratic order") {
  const FrameField frame = build_normal_frame(
      {Polynomial{}, P("x^2 + x*y + 2*y^2 + x^2*y - 0.5*x^3")});
  const CylCovector covs[] = {{1.0, 0.5, 2.0}, {0.7, 2.0, -1.0}};
  for (const CylCovector& cov : covs) {
    const Point3 flat = heis_exp(cov.rho, cov.theta, cov.w, 1.0);
    double r_base = 0.0;
    bool first = true;
    for (double eps : {0.2, 0.1, 0.05}) {
      const ContactStructure se = derive(dilate_frame(eps, frame));
      const double d = dist3(exp_map(se, cov, 1e-10), flat);
      const double r = d / (eps * eps);
      if (first) {
        CHECK(d < 0.1);
        r_base = r;
        first = false;
      } else {
        // d/eps^2 bounded along the ladder <=> first-order term vanishes.
        CHECK(r <= 2.0 * r_base + 0.1);
      }
    }
  }
}

TEST_CASE("dilating a geodesic commutes with rescaling its covector") {
  // Exact in the flat case.
  {
    const FrameField frame = heisenberg_frame();
    const ContactStructure s = derive(frame);
    for (double eps : {0.5, 0.2}) {
      const ContactStructure se = derive(dilate_frame(eps, frame));
      const CylCovector cov{1.0, 0.9, 0.9 * M_PI};
      const Point3 lhs = dilate_point(eps, exp_map(se, cov, 1e-10));
      const Point3 rhs_pt = exp_map(s, tau(eps, cov), 1e-10);
      CHECK(dist3(lhs, rhs_pt) <= 1e-9);
    }
  }
  // Within integration tolerance for a curved structure.
  {
    const FrameField frame = build_normal_frame(
        {P("x"), P("x^2 + x*y + 2*y^2 + x^2*y - 0.5*x^3")});
    const ContactStructure s = derive(frame);
    const CylCovector covs[] = {
        {0.5, 0.9, 0.5}, {1.0, 0.9, 0.9 * M_PI}, {1.0, 4.0, -2.0}};
    for (double eps : {0.5, 0.2}) {
      const ContactStructure se = derive(dilate_frame(eps, frame));
      for (const CylCovector& cov : covs) {
        const Point3 lhs = dilate_point(eps, exp_map(se, cov, 1e-10));
        const Point3 rhs_pt = exp_map(s, tau(eps, cov), 1e-10);
        CHECK(dist3(lhs, rhs_pt) <= 1e-8);
      }
    }
  }
}

TEST_CASE("dilation suppresses the vertical dynamics at quadratic order") {
  // gamma = x^2 + x*y + 2 y^2: quadratic coefficients (a, b, c) = (1, 0.5, 2).
  const FrameField frame =
      build_normal_frame({Polynomial{}, P("x^2 + x*y + 2*y^2")});
  const double a = 1.0, b = 0.5, c = 2.0;
  for (double eps : {0.5, 0.1}) {
    const ContactStructure se = derive(dilate_frame(eps, frame));
    for (double theta : {0.0, 0.7, 2.0}) {
      const GeodesicState st{{0.0, 0.0, 0.0}, theta, 1.2};
      const double rho = 0.9;
      const GeodesicState d = rhs(se, rho, st);
      // No fiber torsion at the center at any dilation scale.
      CHECK(d.theta == doctest::Approx(st.w).epsilon(1e-14));
      // The curvature drive scales exactly with eps^2 for quadratic data.
      const double ct = std::cos(theta), sn = std::sin(theta);
      const double a_theta = -4.0 * b * ct * ct +
                             4.0 * (a - c) * ct * sn + 4.0 * b * sn * sn;
      const double expect = -rho * rho * eps * eps * a_theta;
      CHECK(d.w == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("trace export lists the sampled columns") {
  const ContactStructure s = flat_structure();
  const GeodesicTrace tr = integrate(s, {1.0, 0.25, 1.5}, 0.5, 1e-9);
  const std::string csv = tr.to_csv();

  CHECK(csv.rfind("t,x,y,z,theta,w\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<std::ptrdiff_t>(tr.samples.size() + 1));

  // First data row is the initial state.
  const std::size_t first = csv.find('\n') + 1;
  double t, x, y, z, th, w;
  REQUIRE(std::sscanf(csv.c_str() + first, "%lf,%lf,%lf,%lf,%lf,%lf", &t, &x,
                      &y, &z, &th, &w) == 6);
  CHECK(t == 0.0);
  CHECK(x == 0.0);
  CHECK(y == 0.0);
  CHECK(z == 0.0);
  CHECK(th == 0.25);
  CHECK(w == 1.5);

  // Last row reproduces the final sample to full precision.
  const std::size_t last = csv.rfind('\n', csv.size() - 2) + 1;
  REQUIRE(std::sscanf(csv.c_str() + last, "%lf,%lf,%lf,%lf,%lf,%lf", &t, &x,
                      &y, &z, &th, &w) == 6);
  CHECK(t == tr.samples.back().t);
  CHECK(x == tr.samples.back().state.pt[0]);
  CHECK(th == tr.samples.back().state.theta);
}

TEST_CASE("integration validates its inputs") {
  const ContactStructure s = flat_structure();
  const CylCovector cov{1.0, 0.0, 1.0};
  CHECK_THROWS_AS(integrate(s, cov, 1.0, 1e-14), ConfigError);
  CHECK_THROWS_AS(integrate(s, cov, 1.0, 1e-5), ConfigError);
  CHECK_THROWS_AS(integrate(s, cov, 0.0, 1e-9), ConfigError);
  CHECK_THROWS_AS(integrate(s, cov, -1.0, 1e-9), ConfigError);
  CHECK_THROWS_AS(exp_map(s, cov, 2e-6), ConfigError);
  CHECK_THROWS_AS(jacobian_exp(s, {0.0, 0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(jacobian_exp(s, cov, -1e-4), ConfigError);
  CHECK_THROWS_AS(first_conjugate_time(s, 0.0, 0.0, 1e-8), ConfigError);
}

TEST_CASE("trajectories that run into a frame pole fail loudly") {
  // X1's first component blows up on the plane x = 1/2; the geodesic with
  // theta = 0 drives straight into it.
  const RationalField3 X1{RationalFn(P("1"), P("1 - 2*x")), RationalFn(),
                          RationalFn(P("-0.5*y"))};
  const RationalField3 X2{RationalFn(), RationalFn(P("1")),
                          RationalFn(P("0.5*x"))};
  const ContactStructure s = derive(FrameField(X1, X2));
  CHECK_THROWS_AS(integrate(s, {1.0, 0.0, 0.0}, 2.0, 1e-9), Error);
}

}  // TEST_SUITE
