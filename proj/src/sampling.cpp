#include "emq/sampling.hpp"

#include "emq/gauss.hpp"
#include "emq/parallel.hpp"
#include "emq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace emq {

double husimi_q(const DensityMatrix& rho, cxd alpha) {
    const Vector v = coherent_amplitudes(alpha, rho.dim());
    const cxd q = v.adjoint() * rho.matrix() * v;
    return q.real() / kPi;
}

double q_mass_within(const DensityMatrix& rho, double radius, int n_radial, int n_angular) {
    // polar quadrature: Gauss-Legendre in r, uniform in angle
    const QuadratureRule gl = gauss_legendre(n_radial);
    double mass = 0.0;
    for (int i = 0; i < n_radial; ++i) {
        const double r = 0.5 * radius * (gl.nodes(i) + 1.0);
        const double wr = 0.5 * radius * gl.weights(i) * r;
        double ring = 0.0;
        for (int k = 0; k < n_angular; ++k) {
            const double th = 2.0 * kPi * k / n_angular;
            ring += husimi_q(rho, cxd(r * std::cos(th), r * std::sin(th)));
        }
        mass += wr * ring * (2.0 * kPi / n_angular);
    }
    return mass;
}

double default_sampling_radius(const DensityMatrix& rho, double mass) {
    for (double r = 2.0; r <= 64.0; r *= 2.0) {
        if (q_mass_within(rho, r) >= mass) return r;
    }
    throw std::runtime_error("no sampling radius up to 64 encloses the requested Q mass");
}

namespace {

constexpr std::int64_t kSampleBlock = 8192;

std::vector<QuadratureSample> sample_impl(const DensityMatrix& rho, double n_th,
                                          std::int64_t n_samples, double radius,
                                          std::uint64_t seed, SampleStats* stats,
                                          int n_threads) {
    if (n_samples < 0) throw std::invalid_argument("sample count must be nonnegative");
    if (radius <= 0.0) radius = default_sampling_radius(rho);
    const double enclosed = q_mass_within(rho, radius);
    if (enclosed < 0.999) {
        const double suggested = default_sampling_radius(rho);
        throw std::invalid_argument("sampling radius " + std::to_string(radius) +
                                    " encloses only " + std::to_string(enclosed) +
                                    " of the Q mass; need >= 0.999 (try radius " +
                                    std::to_string(suggested) + ")");
    }
    const double envelope = min_eigenvalue(-rho.matrix()) * (-1.0) / kPi;  // lambda_max/pi

    const int n_blocks = static_cast<int>((n_samples + kSampleBlock - 1) / kSampleBlock);
    std::vector<QuadratureSample> out(static_cast<std::size_t>(n_samples));
    std::vector<std::uint64_t> proposals(std::max(n_blocks, 1), 0);

    const Matrix& m = rho.matrix();
    const int dim = rho.dim();
    const double noise_sigma = n_th > 0.0 ? std::sqrt(0.5 * n_th) : 0.0;

    parallel_for(n_blocks, n_threads, [&](int blk) {
        Rng rng = Rng::split(seed, static_cast<std::uint64_t>(blk));
        Rng noise = Rng::split(seed ^ 0x6e6f697365ull, static_cast<std::uint64_t>(blk));
        const std::int64_t begin = blk * kSampleBlock;
        const std::int64_t end = std::min(n_samples, begin + kSampleBlock);
        Vector v(dim);
        std::uint64_t tries = 0;
        for (std::int64_t k = begin; k < end;) {
            // uniform in the disc
            const double r = radius * std::sqrt(rng.uniform());
            const double th = 2.0 * kPi * rng.uniform();
            const double x = r * std::cos(th);
            const double y = r * std::sin(th);
            ++tries;
            // Q evaluation inline (hot loop)
            const cxd alpha(x, y);
            v(0) = std::exp(-0.5 * std::norm(alpha));
            for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
            const double q = (v.adjoint() * m * v)(0).real() / kPi;
            if (rng.uniform() * envelope <= q) {
                double sx = x, sy = y;
                if (noise_sigma > 0.0) {
                    sx += noise_sigma * noise.gaussian();
                    sy += noise_sigma * noise.gaussian();
                }
                out[static_cast<std::size_t>(k)] = {sx, sy};
                ++k;
            }
        }
        proposals[blk] = tries;
    });

    if (stats) {
        stats->radius = radius;
        stats->envelope = envelope;
        std::uint64_t total = 0;
        for (auto p : proposals) total += p;
        stats->proposals = total;
        stats->acceptance_rate = total > 0 ? double(n_samples) / double(total) : 0.0;
    }
    return out;
}

}  // namespace

std::vector<QuadratureSample> sample_q(const DensityMatrix& rho, std::int64_t n_samples,
                                       double radius, std::uint64_t seed, SampleStats* stats,
                                       int n_threads) {
    return sample_impl(rho, 0.0, n_samples, radius, seed, stats, n_threads);
}

std::vector<QuadratureSample> sample_q_with_noise(const DensityMatrix& rho, double n_th,
                                                  std::int64_t n_samples, double radius,
                                                  std::uint64_t seed, SampleStats* stats,
                                                  int n_threads) {
    if (n_th < 0.0) throw std::invalid_argument("n_th must be nonnegative");
    return sample_impl(rho, n_th, n_samples, radius, seed, stats, n_threads);
}

}  // namespace emq
