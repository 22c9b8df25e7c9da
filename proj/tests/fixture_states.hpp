// Published 3x3 density-matrix blocks shared by the metrics/capture tests.
#pragma once

#include "emq/fock.hpp"

#include <vector>

namespace emq::testdata {

inline Matrix block3(std::initializer_list<cxd> upper) {
    // upper = {m00, m01, m02, m11, m12, m22}
    auto it = upper.begin();
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = *it++;
    m(0, 1) = *it++;
    m(0, 2) = *it++;
    m(1, 1) = *it++;
    m(1, 2) = *it++;
    m(2, 2) = *it++;
    m(1, 0) = std::conj(m(0, 1));
    m(2, 0) = std::conj(m(0, 2));
    m(2, 1) = std::conj(m(1, 2));
    return m;
}

inline std::vector<Matrix> table_inputs() {
    return {
        block3({0.994, {0.007, 0.005}, {0.005, -0.026}, 0.004, {-0.000, 0.001}, 0.001}),
        block3({0.660, {-0.013, -0.039}, {0.030, -0.010}, 0.283, {0.040, -0.021}, 0.042}),
        block3({0.826, {0.256, -0.019}, {0.020, -0.003}, 0.173, {0.010, -0.005}, 0.001}),
        block3({0.775, {0.0451, 0.294}, {-0.037, -0.015}, 0.217, {-0.027, 0.018}, 0.006}),
    };
}

inline std::vector<Matrix> table_mechanical() {
    return {
        block3({0.919, {0.005, 0.001}, {0.010, -0.006}, 0.0620, {-0.016, 0.001}, 0.017}),
        block3({0.636, {0.004, -0.016}, {-0.034, -0.008}, 0.281, {0.021, -0.012}, 0.075}),
        block3({0.763, {0.180, -0.035}, {0.018, -0.015}, 0.197, {0.024, -0.011}, 0.036}),
        block3({0.759, {0.000, 0.21}, {-0.031, -0.014}, 0.234, {0.019, -0.017}, 0.004}),
    };
}

inline Matrix embed_raw(const Matrix& block, int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    m.topLeftCorner(block.rows(), block.cols()) = block;
    return m;
}

}  // namespace emq::testdata
