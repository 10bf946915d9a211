// Micro-benchmark comparing the serial reference path (thread override = 1)
// with the threaded path (however many workers CURVFLOW_THREADS / OpenMP
// give) on the three hot kernels:
//
//   differentiate      covariant gradient + Hessian of a scalar field
//   geometry build     radial and support geometry from a field
//   flow step          full normalized-flow steps on a perturbed sphere
//
// Each kernel is timed at 64x128 and 128x256. The two paths must agree to
// the last bit -- the driver checks that while it times.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/grid.hpp"
#include "curvflow/parallel.hpp"
#include "curvflow/shape.hpp"

namespace {

using namespace curvflow;
using clock_type = std::chrono::steady_clock;

double seconds(clock_type::time_point a, clock_type::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// time one callable: repeat until ~0.2 s elapsed, report seconds per call
template <class F>
double time_per_call(F&& body) {
  body();  // warm up
  int reps = 1;
  for (;;) {
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) body();
    const double dt = seconds(t0, clock_type::now());
    if (dt > 0.2 || reps > (1 << 20)) return dt / reps;
    reps *= 4;
  }
}

std::vector<double> test_field(const Grid& g) {
  std::vector<double> w(std::size_t(g.size()));
  for (int i = 0; i < g.size(); ++i)
    w[std::size_t(i)] = 1.0 + 0.25 * g.x3[std::size_t(i)] +
                        0.1 * g.x1[std::size_t(i)] * g.x2[std::size_t(i)];
  return w;
}

struct Timing {
  double serial = 0;
  double threaded = 0;
};

void report(const char* label, int nt, int np, const Timing& tm) {
  std::printf("%-18s %4dx%-4d  serial %10.3e s   threaded %10.3e s   speedup %5.2fx\n",
              label, nt, np, tm.serial, tm.threaded, tm.serial / tm.threaded);
}

template <class F>
Timing run_both(F&& body) {
  Timing tm;
  par::set_thread_override(1);
  tm.serial = time_per_call(body);
  par::set_thread_override(0);
  tm.threaded = time_per_call(body);
  return tm;
}

void bench_grid(int n_theta, int n_phi) {
  const Grid g = Grid::make(2, n_theta, n_phi);
  const std::vector<double> w = test_field(g);

  // differentiate
  Deriv d;
  DerivWorkspace ws;
  report("differentiate", n_theta, n_phi,
         run_both([&] { differentiate(g, w, d, ws); }));

  // geometry builds
  RadialGeometry rg;
  report("radial build", n_theta, n_phi,
         run_both([&] { rg.build(g, w); }));
  SupportGeometry sg;
  report("support build", n_theta, n_phi,
         run_both([&] { sg.build(g, w); }));

  // flow steps: a short normalized run from a perturbed sphere
  FlowParams P;
  P.variant = FlowVariant::support_normalized_sigma_k;
  P.n = 2;
  P.n_theta = n_theta;
  P.n_phi = n_phi;
  P.alpha = 0.0;
  P.delta = 0.0;
  P.beta = 2.0;
  P.curvature.kind = CurvatureKind::sigma_k_root;
  P.curvature.k = 2;
  P.curvature.argument = CurvatureArgument::principal_radii;
  P.initial.kind = ShapeSpec::Kind::ellipsoid;
  P.initial.semi_axes = {1.0, 1.0, 1.2};
  P.time.max_steps = 50;
  P.time.record_every = 50;

  std::vector<double> serial_field, threaded_field;
  par::set_thread_override(1);
  const auto t0 = clock_type::now();
  serial_field = run_flow(P).field;
  const double ts = seconds(t0, clock_type::now());
  par::set_thread_override(0);
  const auto t1 = clock_type::now();
  threaded_field = run_flow(P).field;
  const double tt = seconds(t1, clock_type::now());
  Timing tm;
  tm.serial = ts / P.time.max_steps;
  tm.threaded = tt / P.time.max_steps;
  report("flow step", n_theta, n_phi, tm);

  // the whole point of the serial reductions: results are bit-identical
  for (std::size_t i = 0; i < serial_field.size(); ++i)
    if (serial_field[i] != threaded_field[i]) {
      std::fprintf(stderr,
                   "thread-count mismatch at node %zu: %.17g vs %.17g\n", i,
                   serial_field[i], threaded_field[i]);
      std::exit(1);
    }
}

}  // namespace

int main() {
  std::printf("worker threads available: %d\n", par::thread_count());
  bench_grid(64, 128);
  bench_grid(128, 256);
  std::printf("serial and threaded fields agree bit-for-bit\n");
  return 0;
}
