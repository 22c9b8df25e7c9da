// Master-equation evolution of stored mechanical populations and extraction of
// the characteristic storage time by fitting diagonal trajectories.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace emq {

// P_n = nbar^n / (nbar+1)^(n+1)
Eigen::VectorXd thermal_distribution(double nbar, int dim);

// Single-parameter variant (N+1 ~ N, gamma = kappa*N):
//   dP_n/dt = -gamma [ (2n+1) P_n - (n+1) P_{n+1} - n P_{n-1} ]
// Reflecting top level; returns one row of populations per grid time.
// Total population is conserved to the integrator tolerance.
Eigen::MatrixXd evolve_populations(const Eigen::VectorXd& p0, double gamma,
                                   const std::vector<double>& t_grid);

// Full damped-oscillator master equation with bath occupation N and coupling
// kappa; thermal_distribution(N) is stationary. *leakage, when given, receives
// an estimate of the population flux blocked at the truncation edge.
Eigen::MatrixXd evolve_populations_full(const Eigen::VectorXd& p0, double kappa, double N,
                                        const std::vector<double>& t_grid,
                                        double* leakage = nullptr);

struct StorageObservation {
    double tau_s = 0.0;                // storage time, seconds
    std::vector<double> populations;   // tracked diagonals P_0..P_k
    std::vector<double> sigmas;        // 1-sigma weights (empty = unweighted)
};

struct StorageFit {
    double tau_m = 0.0;     // 1/gamma_m, seconds
    double stderr_tau = 0.0;
    double gamma_m = 0.0;
    double ssr = 0.0;       // weighted sum of squared residuals at the optimum
    int n_residuals = 0;
};

// Least-squares fit of the single decoherence rate gamma_m to observed diagonal
// trajectories; p0 is fixed (tomography of the earliest point). Golden-section
// minimization over log(gamma); standard error from the residual curvature.
StorageFit fit_storage_time(const std::vector<StorageObservation>& observed,
                            const Eigen::VectorXd& p0, bool weighted = true);

// CSV exchange format: tau_s_us,P0,P1,P2,sigma0,sigma1,sigma2
std::vector<StorageObservation> observations_from_csv(const std::string& text);
std::string observations_to_csv(const std::vector<StorageObservation>& obs);

}  // namespace emq
