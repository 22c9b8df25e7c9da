#include "emq/tomography.hpp"

#include "emq/parallel.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace emq {

void MlConfig::validate() const {
    if (dim < 2) throw std::invalid_argument("MlConfig: dim must be >= 2");
    if (iterations < 1) throw std::invalid_argument("MlConfig: iterations must be >= 1");
    if (dilution <= 0.0 || dilution > 1.0)
        throw std::invalid_argument("MlConfig: dilution must be in (0, 1]");
    if (povm_kind == PovmKind::DisplacedThermal && n_th < 0.0)
        throw std::invalid_argument("MlConfig: n_th must be nonnegative");
}

Matrix r_operator(const Matrix& rho, const std::vector<PovmElement>& elements) {
    if (elements.empty()) throw std::invalid_argument("r_operator: no POVM elements");
    const auto dim = rho.rows();
    Matrix r = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < elements.size(); ++k) {
        const double p = (rho * elements[k].op).trace().real();
        if (!(p > 0.0))
            throw std::runtime_error("degenerate support: outcome " + std::to_string(k) +
                                     " has probability " + std::to_string(p));
        r += elements[k].op / p;
    }
    r /= double(elements.size());
    return hermitize(r);
}

double log_likelihood(const Matrix& rho, const std::vector<PovmElement>& elements) {
    double ll = 0.0;
    for (std::size_t k = 0; k < elements.size(); ++k) {
        const double p = (rho * elements[k].op).trace().real();
        if (!(p > 0.0))
            throw std::runtime_error("log_likelihood: outcome " + std::to_string(k) +
                                     " has nonpositive probability");
        ll += std::log(p);
    }
    if (!std::isfinite(ll)) throw std::runtime_error("log_likelihood is not finite");
    return ll;
}

std::vector<PovmElement> materialize_povm(const std::vector<QuadratureSample>& samples,
                                          const MlConfig& config) {
    config.validate();
    std::vector<PovmElement> out;
    out.reserve(samples.size());
    const int wdim = config.working_dim > 0 ? config.working_dim : 2 * config.dim;
    for (const auto& s : samples) {
        const cxd a(s.x, s.y);
        out.push_back(config.povm_kind == PovmKind::Coherent
                          ? coherent_povm(a, config.dim)
                          : displaced_thermal_povm(a, config.n_th, config.dim, wdim));
    }
    return out;
}

namespace {

constexpr std::int64_t kBlock = 8192;

struct BlockAccum {
    Matrix s;          // sum of v v^dag / q
    Matrix w;          // Phi(rho) * V workspace
    Matrix vw;         // V scaled by 1/sqrt(q)
    Eigen::RowVectorXd q;
    double log_q_sum = 0.0;
    std::int64_t bad_index = -1;  // first nonpositive-probability sample
};

// channels are expensive to build and immutable; share them across fits
const NoiseChannel& cached_channel(double n_th, int dim) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, std::unique_ptr<NoiseChannel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n_th, dim}];
    if (!slot) slot = std::make_unique<NoiseChannel>(NoiseChannel::thermal(n_th, dim));
    return *slot;
}

}  // namespace

MlResult run_ml(const std::vector<QuadratureSample>& samples, const MlConfig& config) {
    config.validate();
    if (samples.empty()) throw std::invalid_argument("run_ml: sample list is empty");

    const int dim = config.dim;
    const bool thermal = config.povm_kind == PovmKind::DisplacedThermal && config.n_th > 0.0;
    const int acc_dim = config.working_dim > 0 ? config.working_dim
                                               : (thermal ? (3 * dim) / 2 : dim);
    if (acc_dim < dim) throw std::invalid_argument("run_ml: working_dim must be >= dim");
    const auto n = static_cast<std::int64_t>(samples.size());

    const NoiseChannel identity = NoiseChannel::identity(acc_dim);
    const NoiseChannel& phi = thermal ? cached_channel(config.n_th, acc_dim) : identity;

    // Stack the coherent amplitude vectors once; columns are samples.
    Matrix v(acc_dim, n);
    for (std::int64_t k = 0; k < n; ++k) {
        const cxd a(samples[k].x, samples[k].y);
        cxd* col = v.data() + k * acc_dim;
        col[0] = std::exp(-0.5 * std::norm(a));
        for (int m = 1; m < acc_dim; ++m) col[m] = col[m - 1] * a / std::sqrt(double(m));
    }

    const int n_blocks = static_cast<int>((n + kBlock - 1) / kBlock);
    std::vector<BlockAccum> partial(n_blocks);
    for (int blk = 0; blk < n_blocks; ++blk) {
        const std::int64_t count =
            std::min<std::int64_t>(kBlock, n - std::int64_t(blk) * kBlock);
        partial[blk].s.resize(acc_dim, acc_dim);
        partial[blk].w.resize(acc_dim, count);
        partial[blk].vw.resize(acc_dim, count);
    }

    Matrix rho = Matrix::Identity(dim, dim) / double(dim);
    MlResult res;
    res.log_likelihood_trace.reserve(config.iterations);
    res.diluted = config.dilution < 1.0;

    const double log_pi_total = double(n) * std::log(kPi);
    Matrix rho_prev;

    for (int it = 0; it < config.iterations; ++it) {
        // A = Phi(rho) at the accumulation dim; probabilities are q_k/pi with
        // q_k = v^dag A v (the 1/pi cancels inside R).
        Matrix a_mat = Matrix::Zero(acc_dim, acc_dim);
        a_mat.topLeftCorner(dim, dim) = rho;
        a_mat = phi.apply(a_mat);
        a_mat = hermitize(a_mat);

        parallel_for(n_blocks, config.n_threads, [&](int blk) {
            BlockAccum& acc = partial[blk];
            const std::int64_t begin = std::int64_t(blk) * kBlock;
            const std::int64_t count = std::min<std::int64_t>(kBlock, n - begin);
            const auto vb = v.middleCols(begin, count);
            acc.w.noalias() = a_mat * vb;
            acc.bad_index = -1;
            acc.log_q_sum = 0.0;
            // Re(v^dag w) columnwise via the real reinterpretation of the
            // interleaved complex storage (vectorizes cleanly)
            const Eigen::Map<const Eigen::MatrixXd> vr(
                reinterpret_cast<const double*>(v.data() + begin * acc_dim), 2 * acc_dim,
                count);
            const Eigen::Map<const Eigen::MatrixXd> wr(
                reinterpret_cast<const double*>(acc.w.data()), 2 * acc_dim, count);
            acc.q = vr.cwiseProduct(wr).colwise().sum();
            for (std::int64_t k = 0; k < count; ++k) {
                if (!(acc.q(k) > 0.0)) {
                    acc.bad_index = begin + k;
                    return;
                }
                acc.log_q_sum += std::log(acc.q(k));
            }
            Eigen::Map<Eigen::MatrixXd> vwr(reinterpret_cast<double*>(acc.vw.data()),
                                            2 * acc_dim, count);
            vwr = vr.array().rowwise() * acc.q.array().rsqrt();
            // plain GEMM beats Eigen's complex rank update here
            acc.s.noalias() = acc.vw * acc.vw.adjoint();
        });

        Matrix s = Matrix::Zero(acc_dim, acc_dim);
        double log_q = 0.0;
        for (const auto& acc : partial) {
            if (acc.bad_index >= 0)
                throw std::runtime_error("degenerate support: sample " +
                                         std::to_string(acc.bad_index) +
                                         " has zero probability under the current iterate");
            s += acc.s;
            log_q += acc.log_q_sum;
        }
        s = s.selfadjointView<Eigen::Lower>();

        const double ll = log_q - log_pi_total;
        if (!std::isfinite(ll)) throw std::runtime_error("run_ml: log-likelihood not finite");
        if (!res.log_likelihood_trace.empty() &&
            ll < res.log_likelihood_trace.back() - 1e-9)
            res.likelihood_monotone = false;
        res.log_likelihood_trace.push_back(ll);

        Matrix r = phi.apply(s).topLeftCorner(dim, dim) / double(n);
        r = hermitize(r);
        if (config.dilution < 1.0)
            r = (1.0 - config.dilution) * Matrix::Identity(dim, dim) + config.dilution * r;

        rho_prev = rho;
        rho = r * rho * r;
        rho = hermitize(rho);
        const double tr = rho.trace().real();
        if (!(tr > 0.0)) throw std::runtime_error("run_ml: iterate lost its trace");
        rho /= tr;

        if ((it + 1) % 50 == 0 && min_eigenvalue(rho) < -1e-9)
            throw std::runtime_error("run_ml: iterate left the PSD cone");

        res.converged_delta = (rho - rho_prev).cwiseAbs().maxCoeff();
    }

    res.rho_est = DensityMatrix::from_matrix(rho);
    return res;
}

}  // namespace emq
