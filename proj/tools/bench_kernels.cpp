// Times the serial reference kernels against their OpenMP variants.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cgthermo/kernels.hpp"

using cgthermo::kernels::cplx;

namespace {

std::vector<cplx> random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> m(size_t(n) * n);
  for (auto& z : m) z = cplx(g(rng), g(rng));
  return m;
}

template <typename F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; parallel variants run serially\n");
#endif
  std::printf("%-20s %6s %12s %12s %8s\n", "kernel", "n", "serial[ms]", "openmp[ms]", "speedup");

  std::mt19937_64 rng(7);
  for (int n : {32, 64, 128, 256, 384}) {
    auto a = random_matrix(rng, n);
    auto b = random_matrix(rng, n);
    std::vector<cplx> c(size_t(n) * n), c2(size_t(n) * n);
    int reps = n <= 128 ? 20 : 5;

    double ts = time_ms([&] { cgthermo::kernels::serial::matmul(a.data(), b.data(), c.data(), n); }, reps);
    double tp = time_ms([&] { cgthermo::kernels::par::matmul(a.data(), b.data(), c2.data(), n); }, reps);
    bool same = c == c2;
    std::printf("%-20s %6d %12.3f %12.3f %7.2fx%s\n", "matmul", n, ts, tp, ts / tp,
                same ? "" : "  MISMATCH");

    std::vector<cplx> w(n);
    for (auto& z : w) z = cplx(0.3, -0.1);
    ts = time_ms([&] { cgthermo::kernels::serial::spectral_sandwich(a.data(), w.data(), c.data(), n); }, reps);
    tp = time_ms([&] { cgthermo::kernels::par::spectral_sandwich(a.data(), w.data(), c2.data(), n); }, reps);
    same = c == c2;
    std::printf("%-20s %6d %12.3f %12.3f %7.2fx%s\n", "spectral_sandwich", n, ts, tp, ts / tp,
                same ? "" : "  MISMATCH");

    std::vector<double> rho(size_t(n) * n, 0.5);
    std::vector<double> d(n), d2(n);
    ts = time_ms([&] { cgthermo::kernels::serial::basis_diagonal(a.data(), b.data(), d.data(), n); }, reps);
    tp = time_ms([&] { cgthermo::kernels::par::basis_diagonal(a.data(), b.data(), d2.data(), n); }, reps);
    same = d == d2;
    std::printf("%-20s %6d %12.3f %12.3f %7.2fx%s\n", "basis_diagonal", n, ts, tp, ts / tp,
                same ? "" : "  MISMATCH");
  }
  return 0;
}
