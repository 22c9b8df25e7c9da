#include "emq/fock.hpp"

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace emq {

namespace {

void check_dim(int dim) {
    if (dim < 2) throw std::invalid_argument("Fock dimension must be >= 2");
}

}  // namespace

DensityMatrix DensityMatrix::from_matrix(const Matrix& m, const StateTolerances& tol) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument("density matrix must be square");
    const double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > tol.hermiticity)
        throw std::invalid_argument("density matrix not Hermitian (max asymmetry " +
                                    std::to_string(herm_err) + ")");
    const double tr_err = std::abs(m.trace().real() - 1.0) + std::abs(m.trace().imag());
    if (tr_err > tol.trace)
        throw std::invalid_argument("density matrix trace deviates from 1 by " +
                                    std::to_string(tr_err));
    const double lam_min = min_eigenvalue(hermitize(m));
    if (lam_min < -tol.psd)
        throw std::invalid_argument("density matrix not positive semidefinite (lambda_min " +
                                    std::to_string(lam_min) + ")");
    DensityMatrix rho;
    rho.m_ = hermitize(m);
    return rho;
}

DensityMatrix DensityMatrix::embed(const Matrix& block, int dim, bool renormalize,
                                   double* trace_deficit) {
    if (block.rows() != block.cols())
        throw std::invalid_argument("embed: block must be square");
    if (block.rows() > dim)
        throw std::invalid_argument("embed: block larger than target dimension");
    Matrix m = Matrix::Zero(dim, dim);
    m.topLeftCorner(block.rows(), block.cols()) = block;
    const double tr = m.trace().real();
    if (trace_deficit) *trace_deficit = 1.0 - tr;
    if (renormalize) {
        if (tr <= 0.0) throw std::invalid_argument("embed: nonpositive trace");
        m /= tr;
    }
    StateTolerances tol;
    if (!renormalize) tol.trace = std::abs(1.0 - tr) + 1e-10;
    return from_matrix(m, tol);
}

double DensityMatrix::mean_occupation() const {
    double s = 0.0;
    for (int n = 0; n < dim(); ++n) s += n * m_(n, n).real();
    return s;
}

std::string DensityMatrix::to_json() const {
    nlohmann::json j;
    j["dim"] = dim();
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int i = 0; i < dim(); ++i) {
        nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
        for (int k = 0; k < dim(); ++k) {
            rrow.push_back(m_(i, k).real());
            irow.push_back(m_(i, k).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j.dump();
}

DensityMatrix DensityMatrix::from_json(const std::string& text, const StateTolerances& tol) {
    const auto j = nlohmann::json::parse(text);
    const int d = j.at("dim").get<int>();
    check_dim(d);
    Matrix m(d, d);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
        throw std::invalid_argument("density matrix JSON has wrong row count");
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            m(i, k) = cxd(re[i][k].get<double>(), im[i][k].get<double>());
    return from_matrix(m, tol);
}

Vector coherent_amplitudes(cxd alpha, int dim) {
    check_dim(dim);
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw std::invalid_argument("coherent amplitude must be finite");
    Vector v(dim);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
    return v;
}

DensityMatrix coherent_state(cxd alpha, int dim, const TruncationPolicy& pol) {
    Vector v = coherent_amplitudes(alpha, dim);
    const double kept = v.squaredNorm();
    if (1.0 - kept > pol.max_tail)
        throw std::invalid_argument("coherent state truncation discards " +
                                    std::to_string(1.0 - kept) + " of the population");
    Matrix m = v * v.adjoint();
    if (pol.renormalize) m /= kept;
    return DensityMatrix::from_matrix(m);
}

Eigen::VectorXd thermal_populations(double nbar, int dim) {
    check_dim(dim);
    if (nbar < 0.0 || !std::isfinite(nbar))
        throw std::invalid_argument("thermal occupancy must be nonnegative");
    Eigen::VectorXd p(dim);
    if (nbar == 0.0) {
        p.setZero();
        p(0) = 1.0;
        return p;
    }
    const double ratio = nbar / (nbar + 1.0);
    p(0) = 1.0 / (nbar + 1.0);
    for (int n = 1; n < dim; ++n) p(n) = p(n - 1) * ratio;
    return p;
}

DensityMatrix thermal_state(double nbar, int dim, const TruncationPolicy& pol) {
    Eigen::VectorXd p = thermal_populations(nbar, dim);
    const double kept = p.sum();
    if (1.0 - kept > pol.max_tail)
        throw std::invalid_argument("thermal state truncation discards " +
                                    std::to_string(1.0 - kept) + " of the population");
    if (pol.renormalize) p /= kept;
    Matrix m = p.cast<cxd>().asDiagonal();
    return DensityMatrix::from_matrix(m);
}

DensityMatrix fock_state(int n, int dim) {
    check_dim(dim);
    if (n < 0 || n >= dim) throw std::invalid_argument("Fock index out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(n, n) = 1.0;
    return DensityMatrix::from_matrix(m);
}

Matrix annihilation_operator(int dim) {
    check_dim(dim);
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

Eigen::VectorXd number_operator_diagonal(int dim) {
    check_dim(dim);
    Eigen::VectorXd n(dim);
    for (int k = 0; k < dim; ++k) n(k) = k;
    return n;
}

Matrix number_operator(int dim) {
    return number_operator_diagonal(dim).cast<cxd>().asDiagonal();
}

Matrix displacement_operator(cxd alpha, int dim, int working_dim) {
    check_dim(dim);
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw std::invalid_argument("displacement amplitude must be finite");
    const int wdim = working_dim > 0 ? working_dim : 2 * dim;
    if (wdim < dim) throw std::invalid_argument("working_dim must be >= dim");
    const Matrix a = annihilation_operator(wdim);
    const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
    const Matrix d = gen.exp();
    return d.topLeftCorner(dim, dim);
}

TwoModeState tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    TwoModeState s;
    s.dim_a = a.dim();
    s.dim_b = b.dim();
    s.m = Matrix(s.dim_a * s.dim_b, s.dim_a * s.dim_b);
    for (int i = 0; i < s.dim_a; ++i)
        for (int j = 0; j < s.dim_a; ++j)
            s.m.block(i * s.dim_b, j * s.dim_b, s.dim_b, s.dim_b) =
                a.matrix()(i, j) * b.matrix();
    return s;
}

Matrix partial_trace_matrix(const Matrix& m, int dim_a, int dim_b, Mode keep) {
    if (m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b)
        throw std::invalid_argument("partial trace: dimension mismatch");
    if (keep == Mode::A) {
        Matrix r = Matrix::Zero(dim_a, dim_a);
        for (int i = 0; i < dim_a; ++i)
            for (int j = 0; j < dim_a; ++j)
                for (int k = 0; k < dim_b; ++k) r(i, j) += m(i * dim_b + k, j * dim_b + k);
        return r;
    }
    Matrix r = Matrix::Zero(dim_b, dim_b);
    for (int i = 0; i < dim_b; ++i)
        for (int j = 0; j < dim_b; ++j)
            for (int k = 0; k < dim_a; ++k) r(i, j) += m(k * dim_b + i, k * dim_b + j);
    return r;
}

DensityMatrix partial_trace(const TwoModeState& state, Mode keep, const StateTolerances& tol) {
    return DensityMatrix::from_matrix(
        hermitize(partial_trace_matrix(state.m, state.dim_a, state.dim_b, keep)), tol);
}

Matrix beamsplitter_unitary(double theta, int dim) {
    check_dim(dim);
    const int n2 = dim * dim;
    const Matrix a = annihilation_operator(dim);
    const Matrix id = Matrix::Identity(dim, dim);
    Matrix a1(n2, n2), a2(n2, n2);
    // a1 = a (x) I, a2 = I (x) a in lexicographic ordering
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            a1.block(i * dim, j * dim, dim, dim) = a(i, j) * id;
            a2.block(i * dim, j * dim, dim, dim) = (i == j) ? a : Matrix::Zero(dim, dim);
        }
    const Matrix gen = theta * (a1 * a2.adjoint() - a1.adjoint() * a2);
    return gen.exp();
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace emq
