#include "emq/bootstrap.hpp"

#include "emq/parallel.hpp"
#include "emq/rng.hpp"
#include "emq/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace emq {

void BootstrapConfig::validate() const {
    if (n_sets < 1 || n_samples_per_set < 1)
        throw std::invalid_argument("bootstrap counts must be positive");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("confidence level must lie in (0, 1)");
}

ConfidenceInterval basic_bootstrap_ci(double theta, std::vector<double> values, double level) {
    if (values.size() < 100)
        throw std::invalid_argument("basic bootstrap needs at least 100 replicate values");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    std::sort(values.begin(), values.end());
    const double q = 0.5 * (1.0 - level);
    const auto n = values.size();
    // nearest-rank percentiles
    auto rank = [n](double p) {
        const auto r = static_cast<std::size_t>(std::ceil(p * double(n)));
        return std::min(std::max<std::size_t>(r, 1), n) - 1;
    };
    const double lo_pct = values[rank(q)];
    const double up_pct = values[rank(1.0 - q)];
    return {theta, 2.0 * theta - up_pct, 2.0 * theta - lo_pct};
}

namespace {

constexpr int kHistogramBins = 50;

ElementStats make_stats(std::string name, double estimate, std::vector<double> values,
                        double level) {
    ElementStats s;
    s.name = std::move(name);
    s.estimate = estimate;
    s.ci = basic_bootstrap_ci(estimate, values, level);
    s.hist_lo = *std::min_element(values.begin(), values.end());
    s.hist_hi = *std::max_element(values.begin(), values.end());
    if (s.hist_hi <= s.hist_lo) s.hist_hi = s.hist_lo + 1e-12;
    s.histogram.assign(kHistogramBins, 0);
    for (double v : values) {
        auto bin = static_cast<int>(double(kHistogramBins) * (v - s.hist_lo) /
                                    (s.hist_hi - s.hist_lo));
        bin = std::min(std::max(bin, 0), kHistogramBins - 1);
        ++s.histogram[static_cast<std::size_t>(bin)];
    }
    s.values = std::move(values);
    return s;
}

std::vector<QuadratureSample> sample_for_povm(const DensityMatrix& rho, const MlConfig& ml,
                                              std::int64_t n, double radius,
                                              std::uint64_t seed) {
    if (ml.povm_kind == PovmKind::DisplacedThermal && ml.n_th > 0.0)
        return sample_q_with_noise(rho, ml.n_th, n, radius, seed);
    return sample_q(rho, n, radius, seed);
}

}  // namespace

StateBootstrap bootstrap_state(const DensityMatrix& rho_est, const MlConfig& ml,
                               const BootstrapConfig& cfg) {
    cfg.validate();
    ml.validate();
    const double radius = default_sampling_radius(rho_est);

    struct Row {
        double p[4] = {0, 0, 0, 0};
        double abs01 = 0.0, arg01 = 0.0;
        bool ok = false;
    };
    std::vector<Row> rows(static_cast<std::size_t>(cfg.n_sets));

    MlConfig worker_ml = ml;
    worker_ml.n_threads = 1;
    parallel_for(cfg.n_sets, cfg.n_threads, [&](int rep) {
        Row& row = rows[static_cast<std::size_t>(rep)];
        try {
            const auto samples =
                sample_for_povm(rho_est, worker_ml, cfg.n_samples_per_set, radius,
                                splitmix_key(cfg.seed, static_cast<std::uint64_t>(rep)));
            const auto res = run_ml(samples, worker_ml);
            for (int n = 0; n < 4; ++n) row.p[n] = res.rho_est.population(n);
            const cxd r01 = res.rho_est.element(0, 1);
            row.abs01 = std::abs(r01);
            row.arg01 = std::arg(r01);
            row.ok = true;
        } catch (const std::exception&) {
            row.ok = false;  // dropped and counted
        }
    });

    StateBootstrap out;
    std::vector<double> vals;
    vals.reserve(rows.size());
    for (const auto& row : rows)
        if (!row.ok) ++out.n_failed;
    if (static_cast<std::size_t>(out.n_failed) + 100 > rows.size())
        throw std::runtime_error("bootstrap_state: too many failed replicates");

    const cxd est01 = rho_est.element(0, 1);
    for (int n = 0; n < 4; ++n) {
        vals.clear();
        for (const auto& row : rows)
            if (row.ok) vals.push_back(row.p[n]);
        out.elements.push_back(
            make_stats("p" + std::to_string(n), rho_est.population(n), vals, cfg.level));
    }
    vals.clear();
    for (const auto& row : rows)
        if (row.ok) vals.push_back(row.abs01);
    out.elements.push_back(make_stats("abs01", std::abs(est01), vals, cfg.level));
    vals.clear();
    for (const auto& row : rows)
        if (row.ok) vals.push_back(row.arg01);
    out.elements.push_back(make_stats("arg01", std::arg(est01), vals, cfg.level));
    return out;
}

namespace {

// one synthetic experiment: tomograph all four inputs and four outputs, then
// reconstruct the map and evaluate the corrected average fidelity
double fidelity_replicate(const std::vector<DensityMatrix>& inputs,
                          const std::vector<DensityMatrix>& outputs,
                          const std::vector<double>& radius_in,
                          const std::vector<double>& radius_out, const MlConfig& ml_in,
                          const MlConfig& ml_out, std::int64_t n_samples,
                          std::uint64_t seed) {
    std::vector<Matrix> in_est, out_est;
    in_est.reserve(inputs.size());
    out_est.reserve(outputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const auto s = sample_for_povm(inputs[k], ml_in, n_samples, radius_in[k],
                                       splitmix_key(seed, 2 * k));
        in_est.push_back(run_ml(s, ml_in).rho_est.matrix());
    }
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        const auto s = sample_for_povm(outputs[k], ml_out, n_samples, radius_out[k],
                                       splitmix_key(seed, 2 * k + 1));
        out_est.push_back(run_ml(s, ml_out).rho_est.matrix());
    }
    const auto map = ProcessMap::reconstruct(in_est, out_est, 2);
    return average_fidelity(map).f_avg;
}

std::vector<double> radii_of(const std::vector<DensityMatrix>& states) {
    std::vector<double> r;
    r.reserve(states.size());
    for (const auto& s : states) r.push_back(default_sampling_radius(s));
    return r;
}

}  // namespace

FidelityBootstrap bootstrap_fidelity(const std::vector<DensityMatrix>& inputs,
                                     const std::vector<DensityMatrix>& outputs,
                                     const MlConfig& ml_inputs, const MlConfig& ml_outputs,
                                     const BootstrapConfig& cfg) {
    cfg.validate();
    if (inputs.size() != 4 || outputs.size() != 4)
        throw std::invalid_argument("bootstrap_fidelity needs four input/output pairs");

    std::vector<Matrix> in_m, out_m;
    for (const auto& r : inputs) in_m.push_back(r.matrix());
    for (const auto& r : outputs) out_m.push_back(r.matrix());
    FidelityBootstrap out;
    out.theta = average_fidelity(ProcessMap::reconstruct(in_m, out_m, 2)).f_avg;

    const auto radius_in = radii_of(inputs);
    const auto radius_out = radii_of(outputs);

    std::vector<double> vals(static_cast<std::size_t>(cfg.n_sets),
                             std::numeric_limits<double>::quiet_NaN());
    MlConfig mi = ml_inputs, mo = ml_outputs;
    mi.n_threads = mo.n_threads = 1;
    parallel_for(cfg.n_sets, cfg.n_threads, [&](int rep) {
        try {
            vals[static_cast<std::size_t>(rep)] = fidelity_replicate(
                inputs, outputs, radius_in, radius_out, mi, mo, cfg.n_samples_per_set,
                splitmix_key(cfg.seed, 0x10000ull + static_cast<std::uint64_t>(rep)));
        } catch (const std::exception&) {
        }
    });
    for (double v : vals)
        if (std::isnan(v))
            ++out.n_failed;
        else
            out.values.push_back(v);
    if (out.values.size() < 100)
        throw std::runtime_error("bootstrap_fidelity: too many failed replicates");
    out.ci = basic_bootstrap_ci(out.theta, out.values, cfg.level);
    return out;
}

BiasRun model_fidelity_bias(const std::vector<DensityMatrix>& inputs,
                            const CaptureModelParams& model_params, const MlConfig& ml_inputs,
                            const MlConfig& ml_outputs, const BootstrapConfig& cfg) {
    cfg.validate();
    if (inputs.size() != 4)
        throw std::invalid_argument("model_fidelity_bias needs the four input states");
    const CaptureModel model(model_params);

    const auto radius_in = radii_of(inputs);
    std::vector<double> vals(static_cast<std::size_t>(cfg.n_sets),
                             std::numeric_limits<double>::quiet_NaN());
    MlConfig mi = ml_inputs, mo = ml_outputs;
    mi.n_threads = mo.n_threads = 1;

    parallel_for(cfg.n_sets, cfg.n_threads, [&](int rep) {
        try {
            const std::uint64_t seed =
                splitmix_key(cfg.seed, 0x20000ull + static_cast<std::uint64_t>(rep));
            std::vector<Matrix> in_est;
            std::vector<DensityMatrix> model_out;
            for (std::size_t k = 0; k < inputs.size(); ++k) {
                const auto s = sample_for_povm(inputs[k], mi, cfg.n_samples_per_set,
                                               radius_in[k], splitmix_key(seed, 2 * k));
                const auto est = run_ml(s, mi).rho_est;
                in_est.push_back(est.matrix());
                model_out.push_back(model.apply(est));
            }
            std::vector<Matrix> out_est;
            for (std::size_t k = 0; k < model_out.size(); ++k) {
                const auto s = sample_q(model_out[k], cfg.n_samples_per_set, 0.0,
                                        splitmix_key(seed, 2 * k + 1));
                out_est.push_back(run_ml(s, mo).rho_est.matrix());
            }
            const auto map = ProcessMap::reconstruct(in_est, out_est, 2);
            vals[static_cast<std::size_t>(rep)] = average_fidelity(map).f_avg;
        } catch (const std::exception&) {
        }
    });

    BiasRun run;
    run.model_f_avg = model_average_fidelity(model_params);
    for (double v : vals)
        if (std::isnan(v))
            ++run.n_failed;
        else
            run.values.push_back(v);
    if (run.values.empty()) throw std::runtime_error("model_fidelity_bias: all replicates failed");
    double mean = 0.0;
    for (double v : run.values) mean += v;
    run.mean_f = mean / double(run.values.size());
    run.bias = run.mean_f - run.model_f_avg;
    return run;
}

std::vector<NthSweepRow> nth_sensitivity_sweep(const std::vector<QuadratureSample>& cal_samples,
                                               const std::vector<QuadratureSample>& cap_samples,
                                               double n_th_assumed,
                                               const std::vector<double>& nth_values,
                                               const MlConfig& base) {
    std::vector<NthSweepRow> rows;
    rows.reserve(nth_values.size());
    for (double n_th : nth_values) {
        const double scale = std::sqrt((1.0 + n_th) / (1.0 + n_th_assumed));
        auto rescaled = [scale](const std::vector<QuadratureSample>& in) {
            std::vector<QuadratureSample> out(in.size());
            for (std::size_t k = 0; k < in.size(); ++k)
                out[k] = {in[k].x * scale, in[k].y * scale};
            return out;
        };
        NthSweepRow row;
        row.n_th = n_th;

        MlConfig cal_cfg = base;
        cal_cfg.povm_kind = PovmKind::DisplacedThermal;
        cal_cfg.n_th = n_th;
        const auto e_est = run_ml(rescaled(cal_samples), cal_cfg).rho_est;
        for (int n = 0; n < 3; ++n) row.e_diag[n] = e_est.population(n);

        MlConfig cap_cfg = base;
        cap_cfg.povm_kind = PovmKind::Coherent;
        cap_cfg.n_th = 0.0;
        const auto m_est = run_ml(rescaled(cap_samples), cap_cfg).rho_est;
        for (int n = 0; n < 3; ++n) row.m_diag[n] = m_est.population(n);

        rows.push_back(row);
    }
    return rows;
}

}  // namespace emq
