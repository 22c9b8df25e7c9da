// Gaussian quadrature rules via Golub-Welsch.
#pragma once

#include <Eigen/Dense>

namespace emq {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// weight e^{-x^2} on (-inf, inf)
QuadratureRule gauss_hermite(int n);

// weight 1 on [-1, 1]
QuadratureRule gauss_legendre(int n);

}  // namespace emq
