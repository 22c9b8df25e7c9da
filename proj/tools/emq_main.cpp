// emq: electromechanical quantum-conversion simulator and tomography toolkit.
#include "emq/bootstrap.hpp"
#include "emq/capture_model.hpp"
#include "emq/dynamics.hpp"
#include "emq/metrics.hpp"
#include "emq/parallel.hpp"
#include "emq/pipeline.hpp"
#include "emq/quadrature.hpp"
#include "emq/sampling.hpp"
#include "emq/storage.hpp"
#include "emq/tomography.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    if (const auto dir = fs::path(path).parent_path(); !dir.empty())
        fs::create_directories(dir);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
}

emq::MlConfig parse_povm(emq::MlConfig cfg, const std::string& povm) {
    if (povm == "coherent") {
        cfg.povm_kind = emq::PovmKind::Coherent;
        cfg.n_th = 0.0;
    } else if (povm.rfind("thermal:", 0) == 0) {
        cfg.povm_kind = emq::PovmKind::DisplacedThermal;
        cfg.n_th = std::stod(povm.substr(8));
    } else {
        throw std::runtime_error("--povm must be 'coherent' or 'thermal:<n_th>'");
    }
    return cfg;
}

std::vector<emq::DensityMatrix> load_pair_file(const std::string& path, const char* key,
                                               int dim, bool sampling_grade) {
    // sampling_grade: unit-trace PSD-repaired states (needed as generators);
    // otherwise the published blocks as-is
    std::vector<emq::DensityMatrix> out;
    if (path == "fixtures") {
        const auto kind = std::string(key) == "inputs" ? emq::fixtures::StateKind::Input
                                                       : emq::fixtures::StateKind::Mechanical;
        for (int k = 1; k <= 4; ++k)
            out.push_back(emq::fixtures::density_matrix(kind, k, dim, sampling_grade,
                                                        sampling_grade));
        return out;
    }
    const auto j = json::parse(read_file(path));
    for (const auto& entry : j.at(key))
        out.push_back(emq::DensityMatrix::from_json(entry.dump()));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"electromechanical conversion simulator and tomography toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::uint64_t seed = 1;
    std::string out_dir = "runs/out";
    int threads = 0;
    app.add_option("--seed", seed, "global random seed")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = hardware)")
        ->capture_default_str();

    // --- run ---
    auto* run = app.add_subcommand("run", "run a configured experiment end to end");
    std::string config_path;
    run->add_option("--config", config_path,
                    "config JSON path, or bundled name: photon-capture | fidelity")
        ->required();

    // --- tomo fit ---
    auto* tomo = app.add_subcommand("tomo", "tomography commands");
    auto* fit = tomo->add_subcommand("fit", "maximum-likelihood state reconstruction");
    std::string samples_path, povm = "coherent", rho_out = "rho.json";
    int dim = 16, iters = 500;
    fit->add_option("--samples", samples_path, "input sample CSV (X,Y)")->required();
    fit->add_option("--dim", dim)->capture_default_str();
    fit->add_option("--iters", iters)->capture_default_str();
    fit->add_option("--povm", povm, "coherent | thermal:<n_th>")->capture_default_str();
    fit->add_option("--out", rho_out)->capture_default_str();

    // --- metrics ---
    auto* metrics = app.add_subcommand("metrics", "fidelity and g2 reports");
    auto* fidelity = metrics->add_subcommand("fidelity", "average process fidelity");
    std::string pairs_path = "fixtures", report_out = "report.json";
    int dim_in = 2;
    fidelity->add_option("--pairs", pairs_path, "pairs JSON or 'fixtures'")
        ->capture_default_str();
    fidelity->add_option("--dim", dim_in)->capture_default_str();
    fidelity->add_option("--out", report_out)->capture_default_str();
    auto* g2cmd = metrics->add_subcommand("g2", "second-order coherence of a state");
    std::string rho_path;
    g2cmd->add_option("--rho", rho_path, "density matrix JSON")->required();

    // --- boot ---
    auto* boot = app.add_subcommand("boot", "parametric bootstrap");
    auto* boot_state_cmd = boot->add_subcommand("state", "element CIs for one state");
    std::string boot_rho, boot_povm = "coherent";
    int boot_sets = 1000;
    std::int64_t boot_samples = 102400;
    double boot_level = 0.90;
    boot_state_cmd->add_option("--rho", boot_rho, "density matrix JSON")->required();
    boot_state_cmd->add_option("--sets", boot_sets)->capture_default_str();
    boot_state_cmd->add_option("--samples", boot_samples)->capture_default_str();
    boot_state_cmd->add_option("--level", boot_level)->capture_default_str();
    boot_state_cmd->add_option("--povm", boot_povm)->capture_default_str();
    auto* boot_fid_cmd = boot->add_subcommand("fidelity", "CI on the average fidelity");
    std::string boot_pairs = "fixtures";
    int bf_sets = 1000;
    std::int64_t bf_samples = 20480;
    double bf_nth = 0.1;
    boot_fid_cmd->add_option("--pairs", boot_pairs)->capture_default_str();
    boot_fid_cmd->add_option("--sets", bf_sets)->capture_default_str();
    boot_fid_cmd->add_option("--samples", bf_samples)->capture_default_str();
    boot_fid_cmd->add_option("--nth", bf_nth, "input-protocol added noise")
        ->capture_default_str();
    boot_fid_cmd->add_option("--level", boot_level)->capture_default_str();

    // --- model ---
    auto* model = app.add_subcommand("model", "capture-process model");
    auto* capture = model->add_subcommand("capture", "push a state through the model");
    std::string model_in, model_out = "pred.json";
    double r1 = 0.14, r2 = 0.95, model_nth = 0.1;
    capture->add_option("--rho", model_in, "input density matrix JSON")->required();
    capture->add_option("--r1", r1)->capture_default_str();
    capture->add_option("--r2", r2)->capture_default_str();
    capture->add_option("--nth", model_nth)->capture_default_str();
    capture->add_option("--out", model_out)->capture_default_str();

    // --- storage ---
    auto* storage = app.add_subcommand("storage", "stored-state decay analysis");
    auto* sfit = storage->add_subcommand("fit", "fit the characteristic storage time");
    std::string storage_data, storage_out = "fit.json";
    bool unweighted = false;
    sfit->add_option("--data", storage_data, "CSV tau_s_us,P0,P1,P2,sigma0,sigma1,sigma2")
        ->required();
    sfit->add_option("--out", storage_out)->capture_default_str();
    sfit->add_flag("--unweighted", unweighted, "ignore the sigma columns");

    // --- dynamics ---
    auto* dynamics = app.add_subcommand("dynamics", "mean-field pulse simulations");
    auto* simulate = dynamics->add_subcommand("simulate", "integrate the full equations");
    std::string sched_path, input_path, detuning = "red";
    double sim_dt = 0.0, t_end = 30e-6;
    simulate->add_option("--schedule", sched_path, "pump schedule JSON")->required();
    simulate->add_option("--input", input_path, "input field CSV (t,re,im)");
    simulate->add_option("--detuning", detuning, "red | blue")->capture_default_str();
    simulate->add_option("--dt", sim_dt, "integration step (0 = auto)")
        ->capture_default_str();
    simulate->add_option("--t-end", t_end)->capture_default_str();

    // --- fixtures ---
    auto* fixtures_cmd = app.add_subcommand("fixtures", "bundled data tables");
    auto* fx_export = fixtures_cmd->add_subcommand("export", "write tables and registry");

    CLI11_PARSE(app, argc, argv);
    if (threads <= 0) threads = emq::hardware_threads();

    try {
        if (*run) {
            std::string text;
            if (config_path == "photon-capture" || config_path == "fidelity")
                text = emq::pipeline::bundled_config(config_path);
            else
                text = read_file(config_path);
            auto j = json::parse(text);
            if (app.count("--seed")) j["seed"] = seed;
            if (app.count("--threads")) j["threads"] = threads;
            const auto res = emq::pipeline::run_experiment(j.dump(2), out_dir);
            std::cout << res.metrics_json << "\n";
            std::cout << "wrote " << res.files_written.size() << " files to " << res.out_dir
                      << "\n";
        } else if (*fit) {
            emq::MlConfig cfg;
            cfg.dim = dim;
            cfg.iterations = iters;
            cfg.n_threads = threads;
            cfg = parse_povm(cfg, povm);
            const auto samples = emq::samples_from_csv(read_file(samples_path));
            const auto res = emq::run_ml(samples, cfg);
            json out = json::parse(res.rho_est.to_json());
            out["log_likelihood_trace"] = res.log_likelihood_trace;
            out["converged_delta"] = res.converged_delta;
            out["likelihood_monotone"] = res.likelihood_monotone;
            write_file(rho_out, out.dump());
            std::cout << "p0=" << res.rho_est.population(0)
                      << " p1=" << res.rho_est.population(1)
                      << " p2=" << res.rho_est.population(2) << " -> " << rho_out << "\n";
        } else if (*fidelity) {
            const auto ins = load_pair_file(pairs_path, "inputs", 16, false);
            const auto outs = load_pair_file(pairs_path, "outputs", 16, false);
            const auto map = emq::reconstruct_process(ins, outs, dim_in);
            const auto rep = emq::average_fidelity(map);
            json out{{"f_e", rep.f_e},
                     {"a_correction", rep.a_correction},
                     {"f_avg", rep.f_avg},
                     {"f_avg_uncorrected", rep.f_avg_uncorrected},
                     {"condition_number", map.condition_number()},
                     {"min_output_eigenvalue", rep.min_output_eigenvalue}};
            write_file(report_out, out.dump(2));
            std::cout << out.dump(2) << "\n";
        } else if (*g2cmd) {
            const auto rho = emq::DensityMatrix::from_json(read_file(rho_path));
            std::cout << "g2 = " << emq::g2_zero(rho) << "\n";
        } else if (*boot_state_cmd) {
            const auto rho = emq::DensityMatrix::from_json(read_file(boot_rho));
            emq::MlConfig ml;
            ml = parse_povm(ml, boot_povm);
            emq::BootstrapConfig cfg;
            cfg.n_sets = boot_sets;
            cfg.n_samples_per_set = boot_samples;
            cfg.level = boot_level;
            cfg.seed = seed;
            cfg.n_threads = threads;
            const auto res = emq::bootstrap_state(rho, ml, cfg);
            json out;
            out["n_failed"] = res.n_failed;
            for (const auto& e : res.elements) {
                out["elements"][e.name] = json{
                    {"estimate", e.estimate}, {"ci_lo", e.ci.lo}, {"ci_hi", e.ci.hi}};
                std::ostringstream hist;
                hist << "bin_lo,count\n";
                for (std::size_t b = 0; b < e.histogram.size(); ++b)
                    hist << e.hist_lo + double(b) * (e.hist_hi - e.hist_lo) /
                                            double(e.histogram.size())
                         << ',' << e.histogram[b] << '\n';
                write_file((fs::path(out_dir) / ("hist_" + e.name + ".csv")).string(),
                           hist.str());
            }
            write_file((fs::path(out_dir) / "state_ci.json").string(), out.dump(2));
            std::cout << out.dump(2) << "\n";
        } else if (*boot_fid_cmd) {
            const auto ins = load_pair_file(boot_pairs, "inputs", 16, true);
            const auto outs = load_pair_file(boot_pairs, "outputs", 16, true);
            emq::MlConfig ml_in;
            ml_in.povm_kind = emq::PovmKind::DisplacedThermal;
            ml_in.n_th = bf_nth;
            emq::MlConfig ml_out;
            emq::BootstrapConfig cfg;
            cfg.n_sets = bf_sets;
            cfg.n_samples_per_set = bf_samples;
            cfg.level = boot_level;
            cfg.seed = seed;
            cfg.n_threads = threads;
            const auto res = emq::bootstrap_fidelity(ins, outs, ml_in, ml_out, cfg);
            json out{{"theta", res.theta},
                     {"ci_lo", res.ci.lo},
                     {"ci_hi", res.ci.hi},
                     {"level", cfg.level},
                     {"n_failed", res.n_failed}};
            write_file((fs::path(out_dir) / "fidelity_ci.json").string(), out.dump(2));
            std::cout << out.dump(2) << "\n";
        } else if (*capture) {
            const auto rho = emq::DensityMatrix::from_json(read_file(model_in));
            emq::CaptureModelParams params;
            params.r1 = r1;
            params.r2 = r2;
            params.n_th_target = model_nth;
            params.dim = rho.dim();
            const auto out = emq::apply_capture_model(rho, params);
            write_file(model_out, out.to_json());
            std::cout << "p0=" << out.population(0) << " p1=" << out.population(1)
                      << " p2=" << out.population(2) << " -> " << model_out << "\n";
        } else if (*sfit) {
            const auto obs = emq::observations_from_csv(read_file(storage_data));
            Eigen::VectorXd p0 = Eigen::VectorXd::Zero(16);
            for (std::size_t k = 0; k < obs.front().populations.size() && k < 16; ++k)
                p0(static_cast<Eigen::Index>(k)) = obs.front().populations[k];
            p0 /= p0.sum();
            const auto fitres = emq::fit_storage_time(obs, p0, !unweighted);
            json out{{"tau_m_us", fitres.tau_m * 1e6},
                     {"stderr_us", fitres.stderr_tau * 1e6},
                     {"gamma_m", fitres.gamma_m},
                     {"ssr", fitres.ssr},
                     {"n_residuals", fitres.n_residuals}};
            write_file(storage_out, out.dump(2));
            std::cout << out.dump(2) << "\n";
        } else if (*simulate) {
            const auto sched = emq::PumpSchedule::from_json(read_file(sched_path));
            const auto params = emq::fixtures::emc_device_params();
            emq::FieldTrace input;
            if (!input_path.empty()) input = emq::FieldTrace::from_csv(read_file(input_path));
            const bool red = detuning == "red";
            const auto& profile = red ? sched.gamma_r : sched.gamma_b;
            if (sim_dt <= 0.0) sim_dt = 0.045 / std::max(params.kappa_lc, params.omega_m);
            const auto res = emq::integrate_full_eom(
                params, red ? -params.omega_m : params.omega_m, profile, input, sim_dt,
                t_end);
            fs::create_directories(out_dir);
            write_file((fs::path(out_dir) / "b.csv").string(), res.b.to_csv());
            write_file((fs::path(out_dir) / "c.csv").string(), res.c.to_csv());
            write_file((fs::path(out_dir) / "b_out.csv").string(), res.b_out.to_csv());
            std::cout << "E_in = " << input.energy() << ", E_out = " << res.b_out.energy()
                      << ", |c(end)|^2 = "
                      << (res.c.values.empty() ? 0.0 : std::norm(res.c.values.back()))
                      << "\n";
        } else if (*fx_export) {
            emq::fixtures::verify_checksums();
            fs::create_directories(out_dir);
            json registry;
            for (const auto& name : emq::fixtures::names()) {
                write_file((fs::path(out_dir) / (name + ".json")).string(),
                           emq::fixtures::raw(name));
                std::ostringstream os;
                os << std::hex << emq::fixtures::checksum(name);
                registry[name] = os.str();
            }
            write_file((fs::path(out_dir) / "registry.json").string(), registry.dump(2));
            std::cout << "exported " << emq::fixtures::names().size() << " tables to "
                      << out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
