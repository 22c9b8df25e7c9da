#include "emq/povm.hpp"

#include "emq/gauss.hpp"
#include "emq/sampling.hpp"

#include <stdexcept>

namespace emq {

PovmElement coherent_povm(cxd alpha, int dim) {
    PovmElement e;
    e.alpha = alpha;
    e.n_add = 0.0;
    const Vector v = coherent_amplitudes(alpha, dim);
    e.op = (v * v.adjoint()) / kPi;
    return e;
}

PovmElement displaced_thermal_povm(cxd alpha, double n_add, int dim, int working_dim) {
    if (n_add < 0.0) throw std::invalid_argument("added thermal occupancy must be nonnegative");
    if (n_add == 0.0) return coherent_povm(alpha, dim);
    const int wdim = working_dim > 0 ? working_dim : 2 * dim;
    if (wdim < dim) throw std::invalid_argument("working_dim must be >= dim");
    const Matrix d = displacement_operator(alpha, wdim, wdim);
    const Eigen::VectorXd p = thermal_populations(n_add, wdim);
    const Matrix full = d * p.cast<cxd>().asDiagonal() * d.adjoint() / kPi;
    PovmElement e;
    e.alpha = alpha;
    e.n_add = n_add;
    e.op = hermitize(full.topLeftCorner(dim, dim));
    return e;
}

NoiseChannel NoiseChannel::identity(int dim) {
    NoiseChannel c;
    c.dim_ = dim;
    c.n_th_ = 0.0;
    c.is_identity_ = true;
    return c;
}

NoiseChannel NoiseChannel::thermal(double n_th, int dim, int working_dim, int gh_order) {
    if (n_th < 0.0) throw std::invalid_argument("n_th must be nonnegative");
    if (n_th == 0.0) return identity(dim);
    const int wdim = working_dim > 0 ? working_dim : 2 * dim;
    NoiseChannel c;
    c.dim_ = dim;
    c.n_th_ = n_th;
    c.is_identity_ = false;
    c.super_ = Matrix::Zero(dim * dim, dim * dim);
    const QuadratureRule gh = gauss_hermite(gh_order);
    const double s = std::sqrt(n_th);
    for (int i = 0; i < gh_order; ++i) {
        for (int j = 0; j < gh_order; ++j) {
            const cxd beta = s * cxd(gh.nodes(i), gh.nodes(j));
            const double w = gh.weights(i) * gh.weights(j) / kPi;
            const Matrix d = displacement_operator(beta, dim, wdim);
            // column-major vec: vec(D A D^dag) = (conj(D) kron D) vec(A)
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    c.super_.block(a * dim, b * dim, dim, dim) += (w * std::conj(d(a, b))) * d;
        }
    }
    return c;
}

Matrix NoiseChannel::apply(const Matrix& a) const {
    if (a.rows() != dim_ || a.cols() != dim_)
        throw std::invalid_argument("NoiseChannel::apply: dimension mismatch");
    if (is_identity_) return a;
    const Eigen::Map<const Vector> va(a.data(), dim_ * dim_);
    Vector vb = super_ * va;
    return Eigen::Map<Matrix>(vb.data(), dim_, dim_);
}

double convolved_q_oracle(const DensityMatrix& rho, cxd alpha, double n_th, int gh_order) {
    if (n_th == 0.0) return husimi_q(rho, alpha);
    const QuadratureRule gh = gauss_hermite(gh_order);
    const double s = std::sqrt(n_th);
    double total = 0.0;
    for (int i = 0; i < gh_order; ++i)
        for (int j = 0; j < gh_order; ++j)
            total += gh.weights(i) * gh.weights(j) *
                     husimi_q(rho, alpha + s * cxd(gh.nodes(i), gh.nodes(j)));
    return total / kPi;
}

}  // namespace emq
