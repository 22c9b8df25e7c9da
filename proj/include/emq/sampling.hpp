// Synthetic quadrature data from a known density matrix: Husimi Q evaluation
// and Monte Carlo rejection sampling, with optional added thermal noise.
#pragma once

#include "emq/fock.hpp"
#include "emq/types.hpp"

#include <cstdint>
#include <vector>

namespace emq {

// Q(alpha) = <alpha|rho|alpha>/pi
double husimi_q(const DensityMatrix& rho, cxd alpha);

// integral of Q over the disc |alpha| <= radius (Gauss-Legendre radial grid)
double q_mass_within(const DensityMatrix& rho, double radius, int n_radial = 96,
                     int n_angular = 128);

// smallest radius from the doubling search {2,4,8,...} enclosing at least
// `mass` of the Q distribution
double default_sampling_radius(const DensityMatrix& rho, double mass = 0.999);

struct SampleStats {
    double radius = 0.0;
    double envelope = 0.0;         // rejection bound on Q
    double acceptance_rate = 0.0;  // accepted / proposed
    std::uint64_t proposals = 0;
};

// i.i.d. samples from Q by rejection on the disc. The envelope is the exact
// bound max Q <= lambda_max(rho)/pi. Deterministic under fixed seed and
// independent of thread count (fixed-size sample blocks with derived seeds).
std::vector<QuadratureSample> sample_q(const DensityMatrix& rho, std::int64_t n_samples,
                                       double radius, std::uint64_t seed,
                                       SampleStats* stats = nullptr, int n_threads = 1);

// sample_q plus i.i.d. per-quadrature Gaussian noise of variance n_th/2, the
// convention pinned by the displaced-thermal POVM equivalence. With n_th = 0
// the output is bit-identical to sample_q under the same seed.
std::vector<QuadratureSample> sample_q_with_noise(const DensityMatrix& rho, double n_th,
                                                  std::int64_t n_samples, double radius,
                                                  std::uint64_t seed,
                                                  SampleStats* stats = nullptr,
                                                  int n_threads = 1);

}  // namespace emq
