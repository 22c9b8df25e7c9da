#include "emq/sampling.hpp"

#include "emq/povm.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace emq;

namespace {

double var_x(const std::vector<QuadratureSample>& s) {
    double mx = 0.0;
    for (const auto& q : s) mx += q.x;
    mx /= double(s.size());
    double v = 0.0;
    for (const auto& q : s) v += (q.x - mx) * (q.x - mx);
    return v / double(s.size() - 1);
}

double var_y(const std::vector<QuadratureSample>& s) {
    double my = 0.0;
    for (const auto& q : s) my += q.y;
    my /= double(s.size());
    double v = 0.0;
    for (const auto& q : s) v += (q.y - my) * (q.y - my);
    return v / double(s.size() - 1);
}

}  // namespace

TEST_CASE("husimi q values") {
    const auto vac = coherent_state(0.0, 16);
    CHECK(husimi_q(vac, 0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-12));

    const auto fock1 = fock_state(1, 16);
    CHECK(husimi_q(fock1, 1.0) == doctest::Approx(std::exp(-1.0) / kPi).epsilon(1e-12));
    CHECK(husimi_q(fock1, 0.0) == doctest::Approx(0.0));

    // normalization over a radius-6 disc
    const auto mixed = thermal_state(0.4, 16);
    CHECK(q_mass_within(mixed, 6.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(q_mass_within(fock1, 6.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("rejection sampler statistics") {
    const auto vac = coherent_state(0.0, 16);
    SampleStats st;
    const auto s = sample_q(vac, 100000, 0.0, 42, &st);
    REQUIRE(s.size() == 100000);
    CHECK(var_x(s) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(var_y(s) == doctest::Approx(0.5).epsilon(0.02));
    // acceptance-rate bound: enclosed mass / (pi r^2 envelope)
    const double bound = q_mass_within(vac, st.radius) / (kPi * st.radius * st.radius * st.envelope);
    CHECK(st.acceptance_rate > 0.95 * bound);

    SUBCASE("seeded determinism") {
        const auto s2 = sample_q(vac, 100000, 0.0, 42);
        REQUIRE(s2.size() == s.size());
        bool same = true;
        for (std::size_t i = 0; i < s.size(); ++i)
            same = same && s[i].x == s2[i].x && s[i].y == s2[i].y;
        CHECK(same);
        // thread count does not change the stream
        const auto s4 = sample_q(vac, 100000, 0.0, 42, nullptr, 4);
        bool same4 = true;
        for (std::size_t i = 0; i < s.size(); ++i)
            same4 = same4 && s[i].x == s4[i].x && s[i].y == s4[i].y;
        CHECK(same4);
    }
}

TEST_CASE("fock-1 sampling avoids the origin") {
    const auto fock1 = fock_state(1, 16);
    const auto s = sample_q(fock1, 50000, 0.0, 7);
    int near_origin = 0;
    for (const auto& q : s)
        if (q.x * q.x + q.y * q.y < 0.01) ++near_origin;
    // density vanishes at the origin; a uniform disc of that area would give ~25
    CHECK(near_origin < 10);
}

TEST_CASE("coherent state sample mean") {
    const auto rho = coherent_state(1.0, 16);
    const auto s = sample_q(rho, 100000, 0.0, 11);
    double mx = 0.0, my = 0.0;
    for (const auto& q : s) {
        mx += q.x;
        my += q.y;
    }
    mx /= double(s.size());
    my /= double(s.size());
    // Q centroid is alpha; 3 sigma of the mean with per-quadrature variance 1/2
    const double tol = 3.0 * std::sqrt(0.5 / double(s.size()));
    CHECK(std::abs(mx - 1.0) < tol);
    CHECK(std::abs(my) < tol);
}

TEST_CASE("noisy sampling convention") {
    const auto vac = coherent_state(0.0, 16);
    SUBCASE("n_th = 0 is bit-identical to sample_q") {
        const auto a = sample_q(vac, 20000, 0.0, 5);
        const auto b = sample_q_with_noise(vac, 0.0, 20000, 0.0, 5);
        bool same = true;
        for (std::size_t i = 0; i < a.size(); ++i)
            same = same && a[i].x == b[i].x && a[i].y == b[i].y;
        CHECK(same);
    }
    SUBCASE("vacuum + n_th=0.1 has per-quadrature variance 0.55") {
        // 0.5 + n_th/2, the convention pinned by the POVM equivalence theorem
        const auto s = sample_q_with_noise(vac, 0.1, 200000, 0.0, 13);
        CHECK(var_x(s) == doctest::Approx(0.55).epsilon(0.02));
        CHECK(var_y(s) == doctest::Approx(0.55).epsilon(0.02));
    }
    SUBCASE("heterodyne moment identity") {
        const auto th = thermal_state(0.3, 16);
        const double n_th = 0.12;
        const auto s = sample_q_with_noise(th, n_th, 200000, 0.0, 17);
        double m2 = 0.0;
        for (const auto& q : s) m2 += q.x * q.x + q.y * q.y;
        m2 /= double(s.size());
        CHECK(m2 - 1.0 == doctest::Approx(0.3 + n_th).epsilon(0.03));
    }
}

TEST_CASE("noisy samples match displaced-thermal POVM probabilities") {
    // chi^2 against tr(rho E_alpha) on a coarse grid
    Matrix blk = Matrix::Zero(2, 2);
    blk(0, 0) = 0.7;
    blk(1, 1) = 0.3;
    blk(0, 1) = cxd(0.15, 0.1);
    blk(1, 0) = std::conj(blk(0, 1));
    const auto rho = DensityMatrix::embed(blk, 16, true);
    const double n_th = 0.1;
    const std::int64_t n = 100000;
    const auto s = sample_q_with_noise(rho, n_th, n, 0.0, 23);

    const double lo = -3.0, hi = 3.0, cell = 0.75;
    const int ncell = int((hi - lo) / cell);
    std::vector<double> expected(ncell * ncell, 0.0);
    std::vector<int> observed(ncell * ncell, 0);
    // expected mass per cell by 3x3 Gauss-Legendre on the convolved Q
    for (int i = 0; i < ncell; ++i)
        for (int j = 0; j < ncell; ++j) {
            const double gl[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
            const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            double m = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const double x = lo + (i + 0.5 + 0.5 * gl[a]) * cell;
                    const double y = lo + (j + 0.5 + 0.5 * gl[b]) * cell;
                    m += gw[a] * gw[b] * convolved_q_oracle(rho, cxd(x, y), n_th, 24);
                }
            expected[i * ncell + j] = m * cell * cell / 4.0 * double(n);
        }
    int outside = 0;
    for (const auto& q : s) {
        const int i = int(std::floor((q.x - lo) / cell));
        const int j = int(std::floor((q.y - lo) / cell));
        if (i < 0 || j < 0 || i >= ncell || j >= ncell)
            ++outside;
        else
            ++observed[i * ncell + j];
    }
    double chi2 = 0.0;
    int dof = 0;
    for (int k = 0; k < ncell * ncell; ++k) {
        if (expected[k] < 5.0) continue;
        const double d = observed[k] - expected[k];
        chi2 += d * d / expected[k];
        ++dof;
    }
    // dof is ~52 here; the 0.99 quantile of chi^2_60 is 88.4 — use a safe cap
    CHECK(dof > 30);
    CHECK(chi2 < 1.6 * dof + 40.0);
    CHECK(outside < n / 200);
}
