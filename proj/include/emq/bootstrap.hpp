// Parametric bootstrap: synthetic data sets from estimated states, repeated
// tomography, histograms and basic-bootstrap confidence intervals.
#pragma once

#include "emq/capture_model.hpp"
#include "emq/metrics.hpp"
#include "emq/tomography.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emq {

struct BootstrapConfig {
    int n_sets = 1000;
    std::int64_t n_samples_per_set = 102400;
    double level = 0.90;
    std::uint64_t seed = 0;
    int n_threads = 1;

    void validate() const;
};

struct ConfidenceInterval {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Basic bootstrap: with percentiles (theta_lo, theta_up) of the replicate
// values at (1-level)/2 and 1-(1-level)/2 (nearest rank), the interval is
// inverted around the estimate: [2 theta - theta_up, 2 theta - theta_lo].
ConfidenceInterval basic_bootstrap_ci(double theta, std::vector<double> values, double level);

struct ElementStats {
    std::string name;
    double estimate = 0.0;
    ConfidenceInterval ci;
    std::vector<double> values;   // one per successful replicate
    std::vector<int> histogram;   // 50 bins over [hist_lo, hist_hi]
    double hist_lo = 0.0;
    double hist_hi = 0.0;
};

struct StateBootstrap {
    std::vector<ElementStats> elements;  // P0..P3, |rho01|, arg rho01
    int n_failed = 0;
};

// Synthetic data sets from rho_est, re-estimated with the given ML settings;
// tracked elements get histograms and basic-bootstrap CIs. Sampling matches
// the POVM: displaced-thermal adds the corresponding Gaussian noise.
StateBootstrap bootstrap_state(const DensityMatrix& rho_est, const MlConfig& ml,
                               const BootstrapConfig& cfg);

struct FidelityBootstrap {
    double theta = 0.0;  // corrected F_avg of the generating pairs
    ConfidenceInterval ci;
    std::vector<double> values;
    int n_failed = 0;
};

// Full resample -> tomograph -> reconstruct -> fidelity chain per replicate.
// Inputs are sampled with the displaced-thermal noise of ml_inputs; outputs
// with the quantum-limited POVM of ml_outputs.
FidelityBootstrap bootstrap_fidelity(const std::vector<DensityMatrix>& inputs,
                                     const std::vector<DensityMatrix>& outputs,
                                     const MlConfig& ml_inputs, const MlConfig& ml_outputs,
                                     const BootstrapConfig& cfg);

struct BiasRun {
    double model_f_avg = 0.0;  // exact model value
    double mean_f = 0.0;       // mean of the simulated-experiment estimates
    double bias = 0.0;         // mean_f - model_f_avg
    std::vector<double> values;
    int n_failed = 0;
};

// Simulates the whole experiment with the capture model standing in for the
// physical process: tomograph the known inputs, push the estimates through the
// model, tomograph the model outputs, compute F_avg.
BiasRun model_fidelity_bias(const std::vector<DensityMatrix>& inputs,
                            const CaptureModelParams& model_params, const MlConfig& ml_inputs,
                            const MlConfig& ml_outputs, const BootstrapConfig& cfg);

struct NthSweepRow {
    double n_th = 0.0;
    double e_diag[3] = {0, 0, 0};
    double m_diag[3] = {0, 0, 0};
};

// Re-runs the amplitude scaling and the tomography of both protocols under a
// range of assumed thermal occupancies. Samples are taken as calibrated at
// n_th_assumed; for each row they are rescaled by sqrt((1+n_th)/(1+n_th_assumed))
// and refit (displaced-thermal POVM for the calibration set, coherent for the
// capture set).
std::vector<NthSweepRow> nth_sensitivity_sweep(const std::vector<QuadratureSample>& cal_samples,
                                               const std::vector<QuadratureSample>& cap_samples,
                                               double n_th_assumed,
                                               const std::vector<double>& nth_values,
                                               const MlConfig& base);

}  // namespace emq
