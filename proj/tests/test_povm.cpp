#include "emq/povm.hpp"

#include "emq/sampling.hpp"

#include <doctest.h>

#include <cmath>

using namespace emq;

namespace {

DensityMatrix mixed_photon_state(int dim) {
    Matrix blk = Matrix::Zero(3, 3);
    blk(0, 0) = 0.660;
    blk(1, 1) = 0.283;
    blk(2, 2) = 0.042;
    blk(0, 1) = cxd(-0.013, -0.039);
    blk(1, 0) = std::conj(blk(0, 1));
    blk(0, 2) = cxd(0.030, -0.010);
    blk(2, 0) = std::conj(blk(0, 2));
    blk(1, 2) = cxd(0.040, -0.021);
    blk(2, 1) = std::conj(blk(1, 2));
    return DensityMatrix::embed(blk, dim, true);
}

}  // namespace

TEST_CASE("coherent POVM") {
    const auto e0 = coherent_povm(0.0, 16);
    CHECK(e0.op(0, 0).real() == doctest::Approx(1.0 / kPi).epsilon(1e-14));

    const auto vac = coherent_state(0.0, 16);
    CHECK((vac.matrix() * e0.op).trace().real() == doctest::Approx(1.0 / kPi).epsilon(1e-12));

    const auto e1 = coherent_povm(1.0, 16);
    const auto fock1 = fock_state(1, 16);
    CHECK((fock1.matrix() * e1.op).trace().real() ==
          doctest::Approx(std::exp(-1.0) / kPi).epsilon(1e-10));
}

TEST_CASE("displaced thermal POVM") {
    SUBCASE("n_add = 0 reduces to the coherent projector") {
        const auto a = displaced_thermal_povm(cxd(0.7, -0.4), 0.0, 16);
        const auto b = coherent_povm(cxd(0.7, -0.4), 16);
        CHECK((a.op - b.op).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("alpha = 0 is the thermal state over pi") {
        const auto e = displaced_thermal_povm(0.0, 0.1, 16, 32);
        const auto p = thermal_populations(0.1, 16);
        for (int n = 0; n < 16; ++n)
            CHECK(e.op(n, n).real() == doctest::Approx(p(n) / kPi).epsilon(1e-10));
        CHECK((e.op - Matrix(e.op.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("operators are PSD and give nonnegative probabilities") {
        const auto e = displaced_thermal_povm(cxd(1.2, 0.8), 0.1, 16, 32);
        CHECK(min_eigenvalue(e.op) > -1e-12);
    }
}

TEST_CASE("equivalence theorem: displaced-thermal POVM = Gaussian-convolved Q") {
    const auto rho = mixed_photon_state(16);
    const double n_th = 0.1;
    double max_err = 0.0;
    for (double x : {-2.0, -0.9, 0.0, 1.1, 2.0}) {
        for (double y : {-1.7, 0.0, 0.8, 2.0}) {
            const cxd a(x, y);
            const auto e = displaced_thermal_povm(a, n_th, 16, 32);
            const double p_povm = (rho.matrix() * e.op).trace().real();
            const double p_conv = convolved_q_oracle(rho, a, n_th);
            max_err = std::max(max_err, std::abs(p_povm - p_conv));
        }
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("POVM completeness on a disc grid") {
    // (1/pi) integral |a><a| d^2a = I, approximated over |a|<=6 at dim 16
    const int dim = 16;
    Matrix acc = Matrix::Zero(dim, dim);
    const double radius = 6.0, step = 0.1;
    for (double x = -radius; x <= radius; x += step)
        for (double y = -radius; y <= radius; y += step) {
            if (x * x + y * y > radius * radius) continue;
            const Vector v = coherent_amplitudes(cxd(x, y), dim);
            acc += (step * step / kPi) * (v * v.adjoint());
        }
    // identity on the low-Fock block within 1%
    for (int n = 0; n < 10; ++n) CHECK(acc(n, n).real() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("noise channel properties") {
    const int dim = 12;
    const double n_th = 0.1;
    const auto phi = NoiseChannel::thermal(n_th, dim);

    SUBCASE("displacement covariance: Phi(|a><a|) = D(a) rho_th D^dag(a)") {
        // reference POVM built with deep working-dim headroom; the channel side
        // carries the truncated coherent vector's tail
        for (cxd a : {cxd(0.0, 0.0), cxd(0.8, -0.5), cxd(1.5, 1.0)}) {
            const Vector v = coherent_amplitudes(a, dim);
            const Matrix lhs = phi.apply(v * v.adjoint());
            const auto e = displaced_thermal_povm(a, n_th, dim, 4 * dim);
            // the truncated projector differs from |a><a| by cross terms of
            // magnitude sqrt(tail), which the smear folds back into the block
            const double tail = std::max(0.0, 1.0 - v.squaredNorm());
            CHECK((lhs - kPi * e.op).cwiseAbs().maxCoeff() < 1e-8 + std::sqrt(tail));
        }
    }
    SUBCASE("self-adjointness: tr(A Phi(B)) = tr(Phi(A) B)") {
        Matrix a = Matrix::Zero(dim, dim), b = Matrix::Zero(dim, dim);
        a(1, 2) = cxd(0.3, 0.1);
        a(2, 1) = std::conj(a(1, 2));
        a(0, 0) = 0.7;
        b(3, 3) = 1.0;
        b(0, 3) = cxd(0.0, 0.2);
        b(3, 0) = std::conj(b(0, 3));
        const cxd lhs = (a * phi.apply(b)).trace();
        const cxd rhs = (phi.apply(a) * b).trace();
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
    SUBCASE("trace preserving on the low-occupation block") {
        const auto rho16 = thermal_state(0.2, 16);
        const auto phi16 = NoiseChannel::thermal(n_th, 16);
        CHECK(phi16.apply(rho16.matrix()).trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("probabilities match direct POVM traces") {
        const auto rho = mixed_photon_state(dim);
        const Matrix phirho = phi.apply(rho.matrix());
        for (cxd a : {cxd(0.3, 0.2), cxd(1.5, -1.0), cxd(2.2, 1.4)}) {
            const Vector v = coherent_amplitudes(a, dim);
            const double p_fast = ((v.adjoint() * phirho * v)(0).real()) / kPi;
            const auto e = displaced_thermal_povm(a, n_th, dim, 2 * dim);
            const double p_dir = (rho.matrix() * e.op).trace().real();
            CHECK(p_fast == doctest::Approx(p_dir).epsilon(1e-8));
        }
    }
}
