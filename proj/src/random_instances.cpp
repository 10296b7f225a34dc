#include "cgthermo/random_instances.hpp"

#include <algorithm>
#include <cmath>

namespace cgthermo {

std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

ComplexMatrix random_hermitian(std::mt19937_64& rng, int dim, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix m(dim);
  for (int r = 0; r < dim; ++r) {
    m(r, r) = g(rng);
    for (int c = r + 1; c < dim; ++c) {
      cplx z(g(rng) * 0.5, g(rng) * 0.5);
      m(r, c) = z;
      m(c, r) = std::conj(z);
    }
  }
  return m;
}

ComplexMatrix random_real_symmetric(std::mt19937_64& rng, int dim, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix m(dim);
  for (int r = 0; r < dim; ++r) {
    m(r, r) = g(rng);
    for (int c = r + 1; c < dim; ++c) {
      double x = g(rng) * 0.5;
      m(r, c) = x;
      m(c, r) = x;
    }
  }
  return m;
}

ComplexMatrix random_unitary(std::mt19937_64& rng, int dim) {
  return propagator(HermitianOperator(random_hermitian(rng, dim)), 1.0);
}

DensityMatrix random_density(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = cplx(g(rng), g(rng));
  ComplexMatrix w(dim);
  kernels::matmul_adjr(a.data(), a.data(), w.data(), dim);
  double tr = w.trace().real();
  // enforce exact Hermiticity of the Wishart product before normalizing
  for (int r = 0; r < dim; ++r) {
    w(r, r) = w(r, r).real() / tr;
    for (int c = r + 1; c < dim; ++c) {
      cplx z = 0.5 * (w(r, c) + std::conj(w(c, r))) / tr;
      w(r, c) = z;
      w(c, r) = std::conj(z);
    }
  }
  return DensityMatrix(HermitianOperator(std::move(w)));
}

SlotPartition random_explicit_partition(std::mt19937_64& rng, const EigenSystem& spectrum,
                                        int min_slots) {
  const int n = int(spectrum.eigenvalues.size());
  std::uniform_int_distribution<int> n_slots_dist(min_slots, std::max(min_slots, n / 2));
  int n_slots = std::min(n, n_slots_dist(rng));
  // random composition: choose n_slots-1 distinct interior cut points
  std::vector<int> cuts;
  std::uniform_int_distribution<int> cut_dist(1, n - 1);
  while (int(cuts.size()) < n_slots - 1) {
    int c = cut_dist(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(n);
  std::vector<int> sizes;
  int prev = 0;
  for (int c : cuts) {
    sizes.push_back(c - prev);
    prev = c;
  }
  return explicit_slots(spectrum, sizes);
}

Protocol random_protocol(std::mt19937_64& rng, int dim, int max_segments) {
  std::uniform_int_distribution<int> nseg_dist(1, max_segments);
  std::uniform_real_distribution<double> dt_dist(0.3, 1.2);
  // Moderate spectral ranges keep beta * range bounded, so coarse Gibbs
  // weights stay inside the relative-entropy support cutoff up to beta = 4.
  const double scale = 0.6;
  HermitianOperator pre(random_real_symmetric(rng, dim, scale));
  std::vector<ProtocolSegment> segs;
  int nseg = nseg_dist(rng);
  for (int k = 0; k < nseg; ++k) {
    segs.push_back({HermitianOperator(random_real_symmetric(rng, dim, scale)), dt_dist(rng)});
  }
  return Protocol(std::move(pre), std::move(segs));
}

RandomTpmInstance random_tpm_instance(std::mt19937_64& rng, int dim_min, int dim_max,
                                      double beta_min, double beta_max) {
  std::uniform_int_distribution<int> dim_dist(dim_min, dim_max);
  std::uniform_real_distribution<double> beta_dist(beta_min, beta_max);
  int dim = dim_dist(rng);
  Protocol protocol = random_protocol(rng, dim);
  EigenSystem es0 = hermitian_eig(protocol.initial_hamiltonian());
  EigenSystem est = hermitian_eig(protocol.final_hamiltonian());
  return RandomTpmInstance{protocol, random_explicit_partition(rng, es0),
                           random_explicit_partition(rng, est), beta_dist(rng)};
}

}  // namespace cgthermo
