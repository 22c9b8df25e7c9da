#include "emq/storage.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace emq {

Eigen::VectorXd thermal_distribution(double nbar, int dim) {
    if (nbar < 0.0) throw std::invalid_argument("nbar must be nonnegative");
    if (dim < 1) throw std::invalid_argument("dim must be positive");
    Eigen::VectorXd p(dim);
    if (nbar == 0.0) {
        p.setZero();
        p(0) = 1.0;
        return p;
    }
    for (int n = 0; n < dim; ++n)
        p(n) = std::pow(nbar, n) / std::pow(nbar + 1.0, n + 1);
    return p;
}

namespace {

// generic RK4 driver over the rate equations; rhs fills dp from p
template <typename Rhs>
Eigen::MatrixXd evolve(const Eigen::VectorXd& p0, const std::vector<double>& t_grid,
                       double dt_cap, Rhs&& rhs) {
    if (std::abs(p0.sum() - 1.0) > 1e-8)
        throw std::invalid_argument("initial populations must sum to 1");
    if ((p0.array() < -1e-12).any())
        throw std::invalid_argument("initial populations must be nonnegative");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (t_grid[k] <= t_grid[k - 1])
            throw std::invalid_argument("time grid must be strictly increasing");

    const auto dim = p0.size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(t_grid.size()), dim);
    Eigen::VectorXd p = p0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    double t = 0.0;
    for (std::size_t row = 0; row < t_grid.size(); ++row) {
        const double target = t_grid[row];
        if (target < t) throw std::invalid_argument("time grid must start at or after 0");
        while (t < target) {
            const double dt = std::min(dt_cap, target - t);
            rhs(p, k1);
            tmp = p + 0.5 * dt * k1;
            rhs(tmp, k2);
            tmp = p + 0.5 * dt * k2;
            rhs(tmp, k3);
            tmp = p + dt * k3;
            rhs(tmp, k4);
            p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
        }
        out.row(static_cast<Eigen::Index>(row)) = p;
    }
    return out;
}

}  // namespace

Eigen::MatrixXd evolve_populations(const Eigen::VectorXd& p0, double gamma,
                                   const std::vector<double>& t_grid) {
    if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
    const auto dim = p0.size();
    const double grid_step =
        t_grid.size() > 1 ? (t_grid[1] - t_grid[0]) : (t_grid.empty() ? 1.0 : t_grid[0]);
    const double dt_cap =
        gamma > 0.0 ? std::min(1e-3 / gamma, std::max(grid_step / 10.0, 1e-12))
                    : std::max(grid_step, 1e-12);
    return evolve(p0, t_grid, dt_cap, [&](const Eigen::VectorXd& p, Eigen::VectorXd& dp) {
        for (Eigen::Index n = 0; n < dim; ++n) {
            const double up = (n + 1 < dim) ? gamma * (n + 1) : 0.0;  // reflecting top
            const double down = gamma * n;
            dp(n) = -(up + down) * p(n);
            if (n + 1 < dim) dp(n) += gamma * (n + 1) * p(n + 1);
            if (n > 0) dp(n) += gamma * n * p(n - 1);
        }
    });
}

Eigen::MatrixXd evolve_populations_full(const Eigen::VectorXd& p0, double kappa, double N,
                                        const std::vector<double>& t_grid, double* leakage) {
    if (kappa < 0.0 || N < 0.0)
        throw std::invalid_argument("kappa and N must be nonnegative");
    const auto dim = p0.size();
    const double gamma_eff = kappa * std::max(N, 1.0);
    const double grid_step =
        t_grid.size() > 1 ? (t_grid[1] - t_grid[0]) : (t_grid.empty() ? 1.0 : t_grid[0]);
    const double dt_cap =
        gamma_eff > 0.0 ? std::min(1e-3 / gamma_eff, std::max(grid_step / 10.0, 1e-12))
                        : std::max(grid_step, 1e-12);
    auto res = evolve(p0, t_grid, dt_cap, [&](const Eigen::VectorXd& p, Eigen::VectorXd& dp) {
        for (Eigen::Index n = 0; n < dim; ++n) {
            const double up = (n + 1 < dim) ? kappa * N * (n + 1) : 0.0;  // reflecting top
            const double down = kappa * (N + 1.0) * n;
            dp(n) = -(up + down) * p(n);
            if (n + 1 < dim) dp(n) += kappa * (N + 1.0) * (n + 1) * p(n + 1);
            if (n > 0) dp(n) += kappa * N * n * p(n - 1);
        }
    });
    if (leakage) {
        // blocked up-flux kappa N dim P_top integrated over the output grid
        double leaked = 0.0;
        for (std::size_t k = 1; k < t_grid.size(); ++k) {
            const double top = 0.5 * (res(static_cast<Eigen::Index>(k), dim - 1) +
                                      res(static_cast<Eigen::Index>(k - 1), dim - 1));
            leaked += kappa * N * double(dim) * top * (t_grid[k] - t_grid[k - 1]);
        }
        *leakage = leaked;
    }
    return res;
}

namespace {

double fit_ssr(const std::vector<StorageObservation>& observed, const Eigen::VectorXd& p0,
               double gamma, bool weighted, int* count = nullptr) {
    std::vector<double> grid;
    grid.reserve(observed.size());
    for (const auto& o : observed) grid.push_back(o.tau_s);
    const Eigen::MatrixXd traj = evolve_populations(p0, gamma, grid);
    double ssr = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const auto& o = observed[k];
        for (std::size_t j = 0; j < o.populations.size(); ++j) {
            if (static_cast<Eigen::Index>(j) >= p0.size()) break;
            double r = traj(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) -
                       o.populations[j];
            if (weighted && j < o.sigmas.size() && o.sigmas[j] > 0.0) r /= o.sigmas[j];
            ssr += r * r;
            ++n;
        }
    }
    if (count) *count = n;
    return ssr;
}

}  // namespace

StorageFit fit_storage_time(const std::vector<StorageObservation>& observed,
                            const Eigen::VectorXd& p0, bool weighted) {
    if (observed.size() < 3)
        throw std::invalid_argument("storage fit needs at least 3 time points");

    // golden-section search over log10(gamma)
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::log10(1.0 / 10e-3), hi = std::log10(1.0 / 1e-6);  // tau in [1us, 10ms]
    auto f = [&](double lg) { return fit_ssr(observed, p0, std::pow(10.0, lg), weighted); };
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double lg = 0.5 * (lo + hi);
    const double gamma = std::pow(10.0, lg);

    StorageFit fit;
    int n = 0;
    fit.gamma_m = gamma;
    fit.tau_m = 1.0 / gamma;
    fit.ssr = fit_ssr(observed, p0, gamma, weighted, &n);
    fit.n_residuals = n;
    if (n <= 1) throw std::runtime_error("storage fit is underdetermined");

    // curvature-based standard error: Var(gamma) ~ 2 s^2 / (d^2 SSR / d gamma^2)
    const double h = 0.01 * gamma;
    const double fp = fit_ssr(observed, p0, gamma + h, weighted);
    const double fm = fit_ssr(observed, p0, gamma - h, weighted);
    const double curv = (fp - 2.0 * fit.ssr + fm) / (h * h);
    if (curv <= 0.0) throw std::runtime_error("storage fit did not converge to a minimum");
    const double s2 = fit.ssr / std::max(1, n - 1);
    const double var_gamma = 2.0 * s2 / curv;
    fit.stderr_tau = std::sqrt(std::max(var_gamma, 0.0)) / (gamma * gamma);
    return fit;
}

std::vector<StorageObservation> observations_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("tau_s_us", 0) != 0)
        throw std::invalid_argument("storage CSV must start with header tau_s_us,P0,P1,P2,...");
    std::vector<StorageObservation> obs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() < 4) throw std::invalid_argument("storage CSV row too short: " + line);
        StorageObservation o;
        o.tau_s = vals[0] * 1e-6;
        const std::size_t k = (vals.size() - 1) / 2;
        for (std::size_t j = 0; j < k; ++j) o.populations.push_back(vals[1 + j]);
        for (std::size_t j = 1 + k; j < vals.size(); ++j) o.sigmas.push_back(vals[j]);
        obs.push_back(std::move(o));
    }
    return obs;
}

std::string observations_to_csv(const std::vector<StorageObservation>& obs) {
    std::ostringstream os;
    os.precision(17);
    os << "tau_s_us,P0,P1,P2,sigma0,sigma1,sigma2\n";
    for (const auto& o : obs) {
        os << o.tau_s * 1e6;
        for (std::size_t j = 0; j < 3; ++j)
            os << ',' << (j < o.populations.size() ? o.populations[j] : 0.0);
        for (std::size_t j = 0; j < 3; ++j)
            os << ',' << (j < o.sigmas.size() ? o.sigmas[j] : 0.0);
        os << '\n';
    }
    return os.str();
}

}  // namespace emq
