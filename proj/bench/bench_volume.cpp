// Benchmark: OpenMP-parallel ball-volume quadrature against the serial
// reference on a curved structure.  Both paths evaluate identical node sets
// and reduce in fixed order, so they must agree bitwise; the benchmark
// reports wall times, the speedup, and that agreement.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "srvol/contact.hpp"
#include "srvol/volume.hpp"

using namespace srvol;
using Clock = std::chrono::steady_clock;

static double run_ms(double (*fn)(const ContactStructure&, double,
                                  const QuadratureSpec&, BallVolumeDiag*),
                     const ContactStructure& s, double eps,
                     const QuadratureSpec& q, double* value) {
  const auto t0 = Clock::now();
  *value = fn(s, eps, q, nullptr);
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

int main(int argc, char** argv) {
  double eps = 0.1;
  QuadratureSpec q{10, 16, 24, 1e-9};
  if (argc > 1) eps = std::atof(argv[1]);
  if (argc > 4) {
    q.n_rho = std::atoi(argv[2]);
    q.n_theta = std::atoi(argv[3]);
    q.n_w = std::atoi(argv[4]);
  }

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif

  const ContactStructure s =
      derive(build_normal_frame({Polynomial{}, parse_poly("x^2 + y^2")}));

  double v_serial = 0.0, v_parallel = 0.0;
  const double ms_serial = run_ms(&ball_volume_serial, s, eps, q, &v_serial);
  const double ms_parallel = run_ms(&ball_volume, s, eps, q, &v_parallel);

  std::printf(
      "ball-volume quadrature, eps=%g, nodes %dx%dx%d (%ld geodesic "
      "integrations)\n",
      eps, q.n_rho, q.n_theta, q.n_w,
      13L * q.n_rho * q.n_theta * q.n_w);
  std::printf("threads=%d  serial=%.1f ms  parallel=%.1f ms  speedup=%.2fx  "
              "bitwise_equal=%s\n",
              threads, ms_serial, ms_parallel, ms_serial / ms_parallel,
              v_serial == v_parallel ? "yes" : "NO");
  std::printf("volume=%.12g\n", v_parallel);
  return v_serial == v_parallel ? 0 : 1;
}
