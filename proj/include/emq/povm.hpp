// Measurement operators for heterodyne outcomes: coherent-state projectors
// (quantum-limited) and displaced-thermal projectors (excess added noise).
#pragma once

#include "emq/fock.hpp"

namespace emq {

// Positive operator for one heterodyne outcome, including the 1/pi prefactor.
struct PovmElement {
    cxd alpha;
    double n_add = 0.0;
    Matrix op;
};

// E = (1/pi) |alpha><alpha| with the truncated (unnormalized) coherent vector,
// so tr(rho E) equals the Husimi Q of low-occupation states exactly.
PovmElement coherent_povm(cxd alpha, int dim);

// E = (1/pi) D(alpha) rho_th(n_add) D^dag(alpha), built at a larger working
// dimension (default 2x) and projected down.
PovmElement displaced_thermal_povm(cxd alpha, double n_add, int dim, int working_dim = 0);

// The Gaussian additive-noise channel Phi(A) = integral d^2b P_th(b) D(b) A D^dag(b)
// with P_th(b) = e^{-|b|^2/n_th}/(pi n_th): displacing by thermally distributed
// amplitudes adds n_th/2 of variance per quadrature. Self-adjoint, positive,
// trace preserving on the low-occupation block, and displacement covariant:
// Phi(|a><a|) = D(a) rho_th D^dag(a). Discretized with Gauss-Hermite nodes so
// these properties hold exactly for the materialized map.
class NoiseChannel {
  public:
    // identity channel (n_th = 0)
    static NoiseChannel identity(int dim);
    // working_dim defaults to 2*dim, gh_order to 32
    static NoiseChannel thermal(double n_th, int dim, int working_dim = 0, int gh_order = 32);

    int dim() const { return dim_; }
    double n_th() const { return n_th_; }
    bool is_identity() const { return is_identity_; }

    Matrix apply(const Matrix& a) const;

  private:
    int dim_ = 0;
    double n_th_ = 0.0;
    bool is_identity_ = true;
    Matrix super_;  // (dim^2) x (dim^2), acts on column-major vec(A)
};

// Convolution kernel of the equivalence theorem: probabilities of the
// displaced-thermal POVM equal the Q function smoothed by
// e^{-|a-a'|^2/n_th}/(pi n_th). Evaluated by Gauss-Hermite quadrature.
double convolved_q_oracle(const DensityMatrix& rho, cxd alpha, double n_th, int gh_order = 40);

}  // namespace emq
