// Maximum-likelihood density-matrix reconstruction from heterodyne quadrature
// samples via the iterated R rho R fixed point.
#pragma once

#include "emq/fock.hpp"
#include "emq/povm.hpp"
#include "emq/types.hpp"

#include <cstdint>
#include <vector>

namespace emq {

enum class PovmKind { Coherent, DisplacedThermal };

struct MlConfig {
    int dim = 16;
    int iterations = 500;
    PovmKind povm_kind = PovmKind::Coherent;
    double n_th = 0.0;     // added noise of the displaced-thermal POVM
    double dilution = 1.0; // 1 = plain R rho R; < 1 applies (1-eps) I + eps R
    // Accumulation dimension for the displaced-thermal path; the coherent-state
    // vectors are carried at this size so that large-|alpha| outcomes keep their
    // amplitudes. 0 selects dim for coherent and 3*dim/2 for displaced-thermal.
    int working_dim = 0;
    int n_threads = 1;

    void validate() const;
};

struct MlResult {
    DensityMatrix rho_est;
    std::vector<double> log_likelihood_trace;
    double converged_delta = 0.0;      // max element change over the last iteration
    bool likelihood_monotone = true;   // non-decreasing within 1e-9 per step
    bool diluted = false;
};

// R(rho) = (1/N) sum_k E_k / tr(rho E_k) over explicit POVM elements.
// Throws a degenerate-support error naming the first zero-probability outcome.
Matrix r_operator(const Matrix& rho, const std::vector<PovmElement>& elements);

// sum_k log tr(rho E_k); throws on a nonpositive probability.
double log_likelihood(const Matrix& rho, const std::vector<PovmElement>& elements);

// Iterates rho <- N R rho R from the maximally mixed state. For the
// displaced-thermal POVM the R sum is evaluated in the algebraically equal
// factorized form E_k = (1/pi) Phi(|a_k><a_k|) with Phi the thermal-noise
// channel, so the per-sample work stays rank one. Deterministic accumulation:
// fixed-size sample blocks combined in order, independent of thread count.
MlResult run_ml(const std::vector<QuadratureSample>& samples, const MlConfig& config);

// Explicit POVM elements for a sample list (unit-test scale; materializes one
// dense operator per sample).
std::vector<PovmElement> materialize_povm(const std::vector<QuadratureSample>& samples,
                                          const MlConfig& config);

}  // namespace emq
