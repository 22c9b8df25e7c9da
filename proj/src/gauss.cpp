#include "emq/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace emq {

namespace {

QuadratureRule from_jacobi(const Eigen::VectorXd& offdiag, double weight_integral) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        j(k, k + 1) = offdiag(k);
        j(k + 1, k) = offdiag(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    QuadratureRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        const double c0 = es.eigenvectors()(0, k);
        rule.weights(k) = weight_integral * c0 * c0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: order must be positive");
    Eigen::VectorXd off(n - 1);
    for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k / 2.0);
    return from_jacobi(off, std::sqrt(M_PI));
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    Eigen::VectorXd off(n - 1);
    for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    return from_jacobi(off, 2.0);
}

}  // namespace emq
