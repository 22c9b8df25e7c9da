// Cascaded two-beamsplitter heuristic model of the capture process: internal
// circuit loss (B1, against a thermal ancilla) followed by imperfect mode swap
// onto the thermal mechanical mode (B2).
#pragma once

#include "emq/fock.hpp"

namespace emq {

struct CaptureModelParams {
    double r1 = 0.14;         // loss beamsplitter reflection, sin^2(theta_1)
    double r2 = 0.95;         // capture-efficiency reflection, sin^2(theta_2)
    double n_th_target = 0.1; // mean occupancy the vacuum input must map to
    int dim = 16;

    void validate() const;
};

// Thermal ancilla occupancy defined implicitly by: vacuum input -> thermal
// intermediate state of mean n_th_target. Solved by bisection on the two-mode
// computation; the analytic value n_th/R1 serves as a cross-check only.
double solve_ancilla_occupancy(const CaptureModelParams& params);

// Precomputes the beamsplitters and thermal states once; apply() is then two
// dense two-mode conjugations and partial traces.
class CaptureModel {
  public:
    explicit CaptureModel(const CaptureModelParams& params);

    const CaptureModelParams& params() const { return params_; }
    double ancilla_occupancy() const { return n_ancilla_; }

    // linear action on an arbitrary dim x dim operator
    Matrix apply_matrix(const Matrix& rho_e) const;
    DensityMatrix apply(const DensityMatrix& rho_e) const;

  private:
    CaptureModelParams params_;
    double n_ancilla_ = 0.0;
    Matrix b1_, b2_;
    Matrix rho_an_, rho_th_;
};

DensityMatrix apply_capture_model(const DensityMatrix& rho_e, const CaptureModelParams& params);

// Corrected average fidelity of the model map over the canonical qubit basis
// {|0><0|, |1><1|, |+><+|, |+i><+i|}; exact by linearity.
double model_average_fidelity(const CaptureModelParams& params);

}  // namespace emq
