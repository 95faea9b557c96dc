// Serial reference against OpenMP kernels. Prints wall time per flavour and
// checks that both flavours return the same bits.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>

#include "trilinear/ensemble.hpp"
#include "trilinear/fock_oracle.hpp"
#include "trilinear/parallel.hpp"

using namespace trilinear;

namespace {

double best_of(int reps, const std::function<Trajectory()>& kernel, Trajectory& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    out = kernel();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

void compare(const char* name, int reps, const std::function<Trajectory(Execution)>& kernel) {
  Trajectory serial, parallel;
  const double ts = best_of(reps, [&] { return kernel(Execution::serial); }, serial);
  const double tp = best_of(reps, [&] { return kernel(Execution::parallel); }, parallel);
  const bool same = serial.mean_ne == parallel.mean_ne && serial.variance_ne == parallel.variance_ne;
  std::printf("%-34s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, ts / tp, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP timings"};
  int reps = 3;
  int n_exact = 1000;
  double nbar = 100.0;
  app.add_option("--reps", reps, "repetitions, best time reported")->check(CLI::PositiveNumber);
  app.add_option("--n-exact", n_exact, "atom number for the exact-evolution kernel")->check(CLI::PositiveNumber);
  app.add_option("--nbar", nbar, "mean atom number for the ensemble kernels")->check(CLI::Range(10.0, 300.0));
  CLI11_PARSE(app, argc, argv);

  configure_threads_from_env();
  std::printf("threads: %d\n", max_threads());
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

  const fock::ExactPropagator prop(SystemSpec::number_state(n_exact));
  const auto exact_grid = uniform_grid(10.0, 2001);
  compare("evolve_exact", reps, [&](Execution e) { return fock::evolve_exact(prop, exact_grid, e); });

  const auto long_grid = uniform_grid(250.0, 20001);
  compare("ensemble_mean closed_form", reps, [&](Execution e) {
    return ensemble::ensemble_mean(ensemble::EnsembleSpec::poisson(nbar), long_grid, e);
  });

  const auto short_grid = uniform_grid(20.0, 1001);
  compare("ensemble_mean exact", reps, [&](Execution e) {
    return ensemble::ensemble_mean(ensemble::EnsembleSpec::poisson(nbar, ensemble::PerLMethod::exact),
                                   short_grid, e);
  });
  return 0;
}
