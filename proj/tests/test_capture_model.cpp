#include "emq/capture_model.hpp"

#include "emq/metrics.hpp"
#include "emq/rng.hpp"

#include "fixture_states.hpp"

#include <doctest.h>

#include <cmath>

using namespace emq;

TEST_CASE("ancilla occupancy solve") {
    CaptureModelParams p;
    SUBCASE("zero target needs no ancilla") {
        p.n_th_target = 0.0;
        CHECK(solve_ancilla_occupancy(p) == 0.0);
    }
    SUBCASE("defaults land on n_th / R1") {
        const double n_an = solve_ancilla_occupancy(p);
        CHECK(n_an == doctest::Approx(0.1 / 0.14).epsilon(2e-3));
    }
    SUBCASE("R1 = 0 with a thermal target is infeasible") {
        p.r1 = 0.0;
        CHECK_THROWS_AS(solve_ancilla_occupancy(p), std::invalid_argument);
    }
    SUBCASE("vacuum pushed through B1 is thermal at the target") {
        const CaptureModel model(p);
        // run only the first stage by using R2 = 0 (B2 = identity) and a zero-
        // occupancy mechanical mode: output = rho'
        CaptureModelParams stage1 = p;
        stage1.r2 = 0.0;
        CaptureModelParams probe = stage1;
        probe.n_th_target = p.n_th_target;
        // easiest: full model with R2=0 swaps nothing; mechanical stays thermal.
        // Instead verify via the model internals: vacuum in, the intermediate is
        // diagonal and thermal within 1e-6.
        const auto vac = thermal_state(0.0, p.dim);
        const auto out = CaptureModel(p).apply(vac);
        // with both arms thermal at 0.1, the output mean is 0.1
        CHECK(out.mean_occupation() == doctest::Approx(0.1).epsilon(1e-4));
        const Matrix offdiag = out.matrix() - Matrix(out.matrix().diagonal().asDiagonal());
        CHECK(offdiag.cwiseAbs().maxCoeff() < 1e-8);
        const auto ref = thermal_state(0.1, p.dim);
        CHECK((out.matrix() - ref.matrix()).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("capture model prediction for the fig-3 input state") {
    // single-photon run input diagonals (0.649, 0.334, 0.015)
    Matrix blk = Matrix::Zero(3, 3);
    blk(0, 0) = 0.649;
    blk(1, 1) = 0.334;
    blk(2, 2) = 0.015;
    const auto rho_e = DensityMatrix::embed(blk, 16, true);
    const auto out = apply_capture_model(rho_e, CaptureModelParams{});
    CHECK(out.population(0) == doctest::Approx(0.67).epsilon(0.0075));
    CHECK(out.population(1) == doctest::Approx(0.27).epsilon(0.019));
    CHECK(out.population(2) == doctest::Approx(0.05).epsilon(0.1));
    // absolute windows of the acceptance criterion
    CHECK(std::abs(out.population(0) - 0.67) < 0.005);
    CHECK(std::abs(out.population(1) - 0.27) < 0.005);
    CHECK(std::abs(out.population(2) - 0.05) < 0.005);
}

TEST_CASE("perfect parameters give the identity channel") {
    CaptureModelParams p;
    p.r1 = 0.0;
    p.r2 = 1.0;
    p.n_th_target = 0.0;
    const CaptureModel model(p);
    Matrix blk = Matrix::Zero(2, 2);
    blk(0, 0) = 0.62;
    blk(1, 1) = 0.38;
    blk(0, 1) = cxd(0.21, -0.1);
    blk(1, 0) = std::conj(blk(0, 1));
    const auto rho = DensityMatrix::embed(blk, p.dim, true);
    const auto out = model.apply(rho);
    CHECK((out.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("model map is trace preserving, positive and linear") {
    const CaptureModel model(CaptureModelParams{});
    Rng rng(4);
    // random qubit-supported test states
    auto random_state = [&]() {
        Matrix g(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = cxd(rng.gaussian(), rng.gaussian());
        Matrix m = g * g.adjoint();
        m /= m.trace().real();
        return DensityMatrix::embed(m, 16, true);
    };
    const auto r1 = random_state(), r2 = random_state();
    const auto o1 = model.apply(r1), o2 = model.apply(r2);
    CHECK(o1.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(min_eigenvalue(o1.matrix()) > -1e-9);

    // linearity on a mixture
    const double a = 0.37;
    Matrix mix = a * r1.matrix() + (1.0 - a) * r2.matrix();
    const Matrix out_mix = model.apply_matrix(mix);
    const Matrix expect = a * o1.matrix() + (1.0 - a) * o2.matrix();
    CHECK((out_mix - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("two thermal inputs stay diagonal through a beamsplitter") {
    const int d = 12;
    const double theta = 0.7;
    const Matrix u = beamsplitter_unitary(theta, d);
    TruncationPolicy pol;
    pol.max_tail = 0.05;
    const auto s = tensor_product(thermal_state(0.4, d, pol), thermal_state(0.15, d, pol));
    TwoModeState out{d, d, u * s.m * u.adjoint()};
    for (Mode keep : {Mode::A, Mode::B}) {
        const auto red = partial_trace(out, keep);
        const Matrix offdiag =
            red.matrix() - Matrix(red.matrix().diagonal().asDiagonal());
        CHECK(offdiag.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("model average fidelity") {
    SUBCASE("defaults reproduce the published model value") {
        CHECK(model_average_fidelity(CaptureModelParams{}) ==
              doctest::Approx(0.8165).epsilon(2e-3));
        CHECK(std::abs(model_average_fidelity(CaptureModelParams{}) - 0.82) < 0.005);
    }
    SUBCASE("perfect parameters give unit fidelity") {
        CaptureModelParams p;
        p.r1 = 0.0;
        p.r2 = 1.0;
        p.n_th_target = 0.0;
        CHECK(model_average_fidelity(p) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("monotone decreasing in R1 near the defaults") {
        CaptureModelParams p;
        double prev = 1.0;
        for (double r1 : {0.08, 0.11, 0.14, 0.17, 0.20}) {
            p.r1 = r1;
            const double f = model_average_fidelity(p);
            CHECK(f < prev);
            prev = f;
        }
    }
    SUBCASE("agrees with the metrics-module reconstruction over the canonical basis") {
        const CaptureModelParams params;
        const CaptureModel model(params);
        const int d = params.dim;
        const cxd half(0.5, 0.0), ih(0.0, 0.5);
        std::vector<Matrix> ins, outs;
        Matrix p0 = Matrix::Zero(d, d), p1 = Matrix::Zero(d, d), pl = Matrix::Zero(d, d),
               pi = Matrix::Zero(d, d);
        p0(0, 0) = 1.0;
        p1(1, 1) = 1.0;
        pl.topLeftCorner(2, 2) << half, half, half, half;
        pi.topLeftCorner(2, 2) << half, -ih, ih, half;
        for (const Matrix& x : {p0, p1, pl, pi}) {
            ins.push_back(x);
            outs.push_back(model.apply_matrix(x));
        }
        const auto map = ProcessMap::reconstruct(ins, outs, 2);
        const auto rep = average_fidelity(map);
        CHECK(rep.f_avg == doctest::Approx(model_average_fidelity(params)).epsilon(1e-9));
        // Haar oracle agreement within Monte Carlo error
        const double mc = haar_average_fidelity_oracle(map, 200000, 8);
        CHECK(std::abs(mc - rep.f_avg) < 3.0 / std::sqrt(200000.0));
    }
}
