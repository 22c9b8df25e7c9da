// Scalar figures of merit: g2(0), entanglement fidelity, average fidelity with
// the higher-dimensional-output correction, and a Haar-average test oracle.
#pragma once

#include "emq/fock.hpp"

#include <cstdint>
#include <vector>

namespace emq {

// g2(0) = sum n(n-1) rho_nn / (sum n rho_nn)^2 over all diagonal elements.
double g2_zero(const DensityMatrix& rho);

// Linear map on the dim_in x dim_in operator space, reconstructed from
// input/output state pairs. Inputs may be given at a dimension larger than
// dim_in; the expansion of the qubit basis operators |i><j| is then solved by
// least squares over the full input matrices (each training input is in the
// span, so the map still interpolates every pair exactly).
class ProcessMap {
  public:
    static ProcessMap reconstruct(const std::vector<Matrix>& inputs,
                                  const std::vector<Matrix>& outputs, int dim_in);

    int dim_in() const { return dim_in_; }
    int dim_out() const { return dim_out_; }
    double condition_number() const { return cond_; }

    // E(|i><j|)
    const Matrix& basis_image(int i, int j) const;
    // linear extension to any dim_in x dim_in operator
    Matrix apply(const Matrix& x) const;

  private:
    int dim_in_ = 0;
    int dim_out_ = 0;
    double cond_ = 0.0;
    std::vector<Matrix> images_;  // row-major over (i,j)
};

ProcessMap reconstruct_process(const std::vector<DensityMatrix>& inputs,
                               const std::vector<DensityMatrix>& outputs, int dim_in);

struct FidelityReport {
    double f_e = 0.0;                // entanglement fidelity
    double a_correction = 0.0;       // A(E), leakage-corrected completeness term
    double f_avg = 0.0;              // d/(d+1) (F_e + A)
    double f_avg_uncorrected = 0.0;  // (d F_e + 1)/(d+1)
    double imag_residual = 0.0;
    double min_output_eigenvalue = 0.0;  // smallest eigenvalue of any basis image
};

double entanglement_fidelity(const ProcessMap& map);
FidelityReport average_fidelity(const ProcessMap& map);

// Monte Carlo of the fidelity Haar average over pure qubit inputs; test oracle.
double haar_average_fidelity_oracle(const ProcessMap& map, int n_states, std::uint64_t seed);

}  // namespace emq
