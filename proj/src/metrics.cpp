#include "emq/metrics.hpp"

#include "emq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace emq {

double g2_zero(const DensityMatrix& rho) {
    double num = 0.0, mean = 0.0;
    for (int n = 0; n < rho.dim(); ++n) {
        const double p = rho.population(n);
        num += double(n) * double(n - 1) * p;
        mean += double(n) * p;
    }
    if (!(mean > 0.0))
        throw std::runtime_error("g2 is undefined for zero mean occupancy");
    return num / (mean * mean);
}

ProcessMap ProcessMap::reconstruct(const std::vector<Matrix>& inputs,
                                   const std::vector<Matrix>& outputs, int dim_in) {
    if (dim_in < 2) throw std::invalid_argument("reconstruct_process: dim_in must be >= 2");
    const std::size_t need = static_cast<std::size_t>(dim_in) * dim_in;
    if (inputs.size() != need || outputs.size() != need)
        throw std::invalid_argument("reconstruct_process: need dim_in^2 input/output pairs");

    const auto din = inputs.front().rows();
    const auto dout = outputs.front().rows();
    if (din < dim_in) throw std::invalid_argument("inputs smaller than dim_in");
    for (const auto& m : inputs)
        if (m.rows() != din || m.cols() != din)
            throw std::invalid_argument("inputs must share one dimension");
    for (const auto& m : outputs)
        if (m.rows() != dout || m.cols() != dout)
            throw std::invalid_argument("outputs must share one dimension");

    Matrix basis(din * din, need);
    for (std::size_t k = 0; k < need; ++k)
        basis.col(k) = Eigen::Map<const Vector>(inputs[k].data(), din * din);

    Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e6)
        throw std::invalid_argument("reconstruct_process: input basis is singular (condition " +
                                    std::to_string(smin > 0 ? smax / smin : INFINITY) + ")");

    ProcessMap map;
    map.dim_in_ = dim_in;
    map.dim_out_ = static_cast<int>(dout);
    map.cond_ = smax / smin;
    map.images_.resize(need);
    for (int i = 0; i < dim_in; ++i)
        for (int j = 0; j < dim_in; ++j) {
            Matrix target = Matrix::Zero(din, din);
            target(i, j) = 1.0;
            const Vector coeff =
                svd.solve(Eigen::Map<const Vector>(target.data(), din * din));
            Matrix img = Matrix::Zero(dout, dout);
            for (std::size_t k = 0; k < need; ++k) img += coeff(k) * outputs[k];
            map.images_[static_cast<std::size_t>(i) * dim_in + j] = std::move(img);
        }
    return map;
}

ProcessMap reconstruct_process(const std::vector<DensityMatrix>& inputs,
                               const std::vector<DensityMatrix>& outputs, int dim_in) {
    std::vector<Matrix> in, out;
    in.reserve(inputs.size());
    out.reserve(outputs.size());
    for (const auto& r : inputs) in.push_back(r.matrix());
    for (const auto& r : outputs) out.push_back(r.matrix());
    return ProcessMap::reconstruct(in, out, dim_in);
}

const Matrix& ProcessMap::basis_image(int i, int j) const {
    return images_.at(static_cast<std::size_t>(i) * dim_in_ + j);
}

Matrix ProcessMap::apply(const Matrix& x) const {
    if (x.rows() != dim_in_ || x.cols() != dim_in_)
        throw std::invalid_argument("ProcessMap::apply: operator must be dim_in x dim_in");
    Matrix out = Matrix::Zero(dim_out_, dim_out_);
    for (int i = 0; i < dim_in_; ++i)
        for (int j = 0; j < dim_in_; ++j) out += x(i, j) * basis_image(i, j);
    return out;
}

double entanglement_fidelity(const ProcessMap& map) {
    cxd fe = 0.0;
    const int d = map.dim_in();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) fe += map.basis_image(i, j)(i, j);
    return fe.real() / double(d * d);
}

FidelityReport average_fidelity(const ProcessMap& map) {
    const int d = map.dim_in();
    cxd fe = 0.0, a = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            fe += map.basis_image(i, j)(i, j);
            a += map.basis_image(j, j)(i, i);
        }
    FidelityReport rep;
    rep.f_e = fe.real() / double(d * d);
    rep.a_correction = a.real() / double(d * d);
    rep.imag_residual = std::max(std::abs(fe.imag()), std::abs(a.imag())) / double(d * d);
    rep.f_avg = double(d) / double(d + 1) * (rep.f_e + rep.a_correction);
    rep.f_avg_uncorrected = (double(d) * rep.f_e + 1.0) / double(d + 1);
    double lam_min = 0.0;
    for (int j = 0; j < d; ++j)
        lam_min = std::min(lam_min, min_eigenvalue(hermitize(map.basis_image(j, j))));
    rep.min_output_eigenvalue = lam_min;
    return rep;
}

double haar_average_fidelity_oracle(const ProcessMap& map, int n_states, std::uint64_t seed) {
    if (map.dim_in() != 2)
        throw std::invalid_argument("haar oracle implemented for qubit inputs");
    if (n_states < 1) throw std::invalid_argument("need at least one Haar sample");
    Rng rng(seed);
    double acc = 0.0;
    for (int k = 0; k < n_states; ++k) {
        cxd psi0(rng.gaussian(), rng.gaussian());
        cxd psi1(rng.gaussian(), rng.gaussian());
        const double norm = std::sqrt(std::norm(psi0) + std::norm(psi1));
        psi0 /= norm;
        psi1 /= norm;
        Matrix proj(2, 2);
        proj(0, 0) = std::norm(psi0);
        proj(0, 1) = psi0 * std::conj(psi1);
        proj(1, 0) = std::conj(proj(0, 1));
        proj(1, 1) = std::norm(psi1);
        const Matrix out = map.apply(proj);
        const cxd f = std::conj(psi0) * (out(0, 0) * psi0 + out(0, 1) * psi1) +
                      std::conj(psi1) * (out(1, 0) * psi0 + out(1, 1) * psi1);
        acc += f.real();
    }
    return acc / double(n_states);
}

}  // namespace emq
