#include "emq/capture_model.hpp"

#include "emq/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace emq {

void CaptureModelParams::validate() const {
    if (r1 < 0.0 || r1 > 1.0 || r2 < 0.0 || r2 > 1.0)
        throw std::invalid_argument("reflection coefficients must lie in [0, 1]");
    if (n_th_target < 0.0) throw std::invalid_argument("n_th_target must be nonnegative");
    if (dim < 2) throw std::invalid_argument("dim must be >= 2");
}

namespace {

// mean occupancy of the kept mode after mixing ancilla(n_an) with vacuum on B1
double vacuum_response(double n_an, double theta1, int dim) {
    TruncationPolicy pol;
    pol.max_tail = 0.2;  // the solver may probe large trial occupancies
    const auto s = tensor_product(thermal_state(n_an, dim, pol), thermal_state(0.0, dim));
    const Matrix b1 = beamsplitter_unitary(theta1, dim);
    const Matrix out = b1 * s.m * b1.adjoint();
    const Matrix red = partial_trace_matrix(out, dim, dim, Mode::B);
    double mean = 0.0;
    for (int n = 0; n < dim; ++n) mean += n * red(n, n).real();
    return mean;
}

}  // namespace

double solve_ancilla_occupancy(const CaptureModelParams& params) {
    params.validate();
    if (params.n_th_target == 0.0) return 0.0;
    if (params.r1 == 0.0)
        throw std::invalid_argument("R1 = 0 cannot produce a thermal intermediate state");
    const double theta1 = std::asin(std::sqrt(params.r1));

    double lo = 0.0, hi = std::max(1.0, 4.0 * params.n_th_target / params.r1);
    while (vacuum_response(hi, theta1, params.dim) < params.n_th_target) {
        hi *= 2.0;
        if (hi > 1e4) throw std::runtime_error("ancilla occupancy search diverged");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (vacuum_response(mid, theta1, params.dim) < params.n_th_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CaptureModel::CaptureModel(const CaptureModelParams& params) : params_(params) {
    params_.validate();
    n_ancilla_ = solve_ancilla_occupancy(params_);
    const double theta1 = std::asin(std::sqrt(params_.r1));
    const double theta2 = std::asin(std::sqrt(params_.r2));
    b1_ = beamsplitter_unitary(theta1, params_.dim);
    b2_ = beamsplitter_unitary(theta2, params_.dim);
    TruncationPolicy pol;
    pol.max_tail = 0.05;
    rho_an_ = thermal_state(n_ancilla_, params_.dim, pol).matrix();
    rho_th_ = thermal_state(params_.n_th_target, params_.dim, pol).matrix();
}

Matrix CaptureModel::apply_matrix(const Matrix& rho_e) const {
    const int d = params_.dim;
    if (rho_e.rows() != d || rho_e.cols() != d)
        throw std::invalid_argument("capture model: input dimension mismatch");

    // stage 1: rho' = tr_an(B1 rho_an (x) rho_e B1^dag)
    Matrix s1(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            s1.block(i * d, j * d, d, d) = rho_an_(i, j) * rho_e;
    const Matrix rho_p = partial_trace_matrix(b1_ * s1 * b1_.adjoint(), d, d, Mode::B);

    // stage 2: rho_out = tr_e(B2 rho' (x) rho_th B2^dag)
    Matrix s2(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            s2.block(i * d, j * d, d, d) = rho_p(i, j) * rho_th_;
    return partial_trace_matrix(b2_ * s2 * b2_.adjoint(), d, d, Mode::B);
}

DensityMatrix CaptureModel::apply(const DensityMatrix& rho_e) const {
    const Matrix out = hermitize(apply_matrix(rho_e.matrix()));
    // the model is trace preserving; carry through any deficit of the input
    StateTolerances tol;
    tol.trace = std::abs(1.0 - out.trace().real()) + 1e-9;
    return DensityMatrix::from_matrix(out, tol);
}

DensityMatrix apply_capture_model(const DensityMatrix& rho_e,
                                  const CaptureModelParams& params) {
    return CaptureModel(params).apply(rho_e);
}

double model_average_fidelity(const CaptureModelParams& params) {
    const CaptureModel model(params);
    const int d = params.dim;
    // push the qubit basis operators |i><j| directly; the model is linear
    cxd fe = 0.0, a = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Matrix e = Matrix::Zero(d, d);
            e(i, j) = 1.0;
            const Matrix img = model.apply_matrix(e);
            fe += img(i, j);
            a += (i == j) ? (img(0, 0) + img(1, 1)) : cxd(0.0);
        }
    const double f_e = fe.real() / 4.0;
    const double a_corr = a.real() / 4.0;
    return 2.0 / 3.0 * (f_e + a_corr);
}

}  // namespace emq
