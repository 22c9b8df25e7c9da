#include "emq/pipeline.hpp"

#include "emq/bootstrap.hpp"
#include "emq/capture_model.hpp"
#include "emq/metrics.hpp"
#include "emq/parallel.hpp"
#include "emq/quadrature.hpp"
#include "emq/sampling.hpp"
#include "emq/rng.hpp"
#include "emq/tomography.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emq::fixtures {

namespace detail {
extern const char* kCqedParams;
extern const char* kEmcParams;
extern const char* kDensityMatrices;
extern const char* kNthSensitivity;
extern const char* kConfigPhotonCapture;
extern const char* kConfigFidelity;
}  // namespace detail

namespace {

// frozen FNV-1a checksums of the bundled tables; a mismatch means the bundled
// data was altered
struct Entry {
    const char* name;
    const char* text;
    std::uint64_t fnv;
};

constexpr std::uint64_t kCqedFnv = 0x9b59d5e89392d849ull;
constexpr std::uint64_t kEmcFnv = 0xbf620088c7717e53ull;
constexpr std::uint64_t kDmFnv = 0xe70d7e6878744e4dull;
constexpr std::uint64_t kNthFnv = 0x89785fcd70c670afull;

const Entry* table() {
    static const Entry entries[4] = {
        {"cqed_params", detail::kCqedParams, kCqedFnv},
        {"emc_params", detail::kEmcParams, kEmcFnv},
        {"density_matrices", detail::kDensityMatrices, kDmFnv},
        {"nth_sensitivity", detail::kNthSensitivity, kNthFnv},
    };
    return entries;
}

const Entry& find(const std::string& name) {
    for (int k = 0; k < 4; ++k)
        if (name == table()[k].name) return table()[k];
    throw std::invalid_argument("unknown fixture: " + name);
}

}  // namespace

const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"cqed_params", "emc_params", "density_matrices",
                                            "nth_sensitivity"};
    return n;
}

const std::string& raw(const std::string& name) {
    static std::vector<std::string> cache(4);
    for (int k = 0; k < 4; ++k)
        if (name == table()[k].name) {
            if (cache[k].empty()) cache[k] = table()[k].text;
            return cache[k];
        }
    throw std::invalid_argument("unknown fixture: " + name);
}

std::uint64_t checksum(const std::string& name) { return pipeline::fnv1a(raw(name)); }

void verify_checksums() {
    for (int k = 0; k < 4; ++k) {
        const Entry& e = table()[k];
        const std::uint64_t got = pipeline::fnv1a(e.text);
        if (got != e.fnv) {
            std::ostringstream os;
            os << "fixture checksum mismatch for " << e.name << ": expected " << std::hex
               << e.fnv << ", got " << got;
            throw std::runtime_error(os.str());
        }
    }
}

DeviceParams emc_device_params() {
    const auto j = nlohmann::json::parse(raw("emc_params"));
    const auto& v = j.at("values_hz");
    DeviceParams p;
    const double two_pi = 2.0 * kPi;
    p.omega_m = two_pi * v.at("omega_m").get<double>();
    p.kappa_m = two_pi * v.at("kappa_m").get<double>();
    p.kappa_lc = two_pi * v.at("kappa_lc").get<double>();
    p.kappa_ext = two_pi * v.at("kappa_ext").get<double>();
    p.g0 = two_pi * v.at("g0").get<double>();
    p.n_m = j.at("occupancies").at("n_m").get<double>();
    p.validate();
    return p;
}

double emc_value_hz(const std::string& key) {
    const auto j = nlohmann::json::parse(raw("emc_params"));
    if (key == "n_m") return j.at("occupancies").at("n_m").get<double>();
    return j.at("values_hz").at(key).get<double>();
}

double cqed_value_hz(const std::string& key) {
    return nlohmann::json::parse(raw("cqed_params")).at("values_hz").at(key).get<double>();
}

Matrix density_block(StateKind kind, int index) {
    if (index < 1 || index > 4)
        throw std::invalid_argument("fixture state index must be in 1..4");
    const auto j = nlohmann::json::parse(raw("density_matrices"));
    const auto& entry =
        j.at(kind == StateKind::Input ? "input" : "mechanical").at(index - 1);
    Matrix m(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            m(r, c) = cxd(entry.at("re")[r][c].get<double>(),
                          entry.at("im")[r][c].get<double>());
    return m;
}

namespace {

Matrix clip_to_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
    Matrix repaired =
        es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    const double target = m.trace().real();
    const double got = repaired.trace().real();
    if (got > 0.0) repaired *= target / got;
    return repaired;
}

}  // namespace

DensityMatrix density_matrix(StateKind kind, int index, int dim, bool renormalize,
                             bool psd_repair, double* trace_deficit) {
    Matrix blk = density_block(kind, index);
    if (psd_repair) blk = clip_to_psd(blk);
    const double tr = blk.trace().real();
    if (trace_deficit) *trace_deficit = 1.0 - tr;
    Matrix m = Matrix::Zero(dim, dim);
    m.topLeftCorner(3, 3) = blk;
    if (renormalize) m /= tr;
    StateTolerances tol;
    if (!renormalize) tol.trace = std::abs(1.0 - tr) + 1e-12;
    if (!psd_repair) tol.psd = 5e-3;  // published 3-digit rounding
    return DensityMatrix::from_matrix(hermitize(m), tol);
}

std::vector<NthRow> nth_sensitivity_rows() {
    const auto j = nlohmann::json::parse(raw("nth_sensitivity"));
    std::vector<NthRow> rows;
    for (const auto& r : j.at("rows")) {
        NthRow row{};
        row.n_th = r[0].get<double>();
        for (int k = 0; k < 3; ++k) row.e_diag[k] = r[1 + k].get<double>();
        for (int k = 0; k < 3; ++k) row.m_diag[k] = r[4 + k].get<double>();
        rows.push_back(row);
    }
    return rows;
}

namespace {

DensityMatrix diag_state(const double (&d)[3], int dim) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int k = 0; k < 3; ++k) m(k, k) = d[k];
    m /= m.trace().real();
    return DensityMatrix::from_matrix(m);
}

}  // namespace

DensityMatrix fig3_input_state(int dim) {
    for (const auto& row : nth_sensitivity_rows())
        if (std::abs(row.n_th - 0.10) < 1e-12) return diag_state(row.e_diag, dim);
    throw std::runtime_error("n_th = 0.10 row missing from the sensitivity table");
}

DensityMatrix fig3_mechanical_state(int dim) {
    for (const auto& row : nth_sensitivity_rows())
        if (std::abs(row.n_th - 0.10) < 1e-12) return diag_state(row.m_diag, dim);
    throw std::runtime_error("n_th = 0.10 row missing from the sensitivity table");
}

}  // namespace emq::fixtures

namespace emq::pipeline {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a_hex(const std::string& text) {
    std::ostringstream os;
    os << std::hex << fnv1a(text);
    return os.str();
}

const std::string& bundled_config(const std::string& name) {
    static const std::string capture = fixtures::detail::kConfigPhotonCapture;
    static const std::string fidelity = fixtures::detail::kConfigFidelity;
    if (name == "photon-capture") return capture;
    if (name == "fidelity") return fidelity;
    throw std::invalid_argument("unknown bundled config: " + name);
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Validated {
    std::string mode;
    std::uint64_t seed = 0;
    int threads = 1;
    // photon-capture
    std::string fixture;
    bool capture_enabled = true;
    CaptureModelParams model;
    std::int64_t n_samples = 0;
    double sample_n_th = 0.0;
    double radius = 0.0;
    MlConfig ml;
    bool want_g2 = false;
    // fidelity
    bool bootstrap_enabled = false;
    BootstrapConfig boot;
};

Validated validate_config(const json& j) {
    std::vector<std::string> errors;
    auto need = [&](const json& obj, const char* key, const char* where) -> const json* {
        if (!obj.contains(key)) {
            errors.push_back(std::string(where) + "." + key + " is missing");
            return nullptr;
        }
        return &obj.at(key);
    };

    Validated v;
    if (const auto* m = need(j, "mode", "config")) {
        v.mode = m->get<std::string>();
        if (v.mode != "photon-capture" && v.mode != "fidelity")
            errors.push_back("config.mode must be photon-capture or fidelity");
    }
    v.seed = j.value("seed", 0ull);
    v.threads = j.value("threads", 1);
    if (v.threads == 0) v.threads = hardware_threads();

    if (const auto* s = need(j, "sampling", "config")) {
        if (const auto* n = need(*s, "n_samples", "sampling")) {
            v.n_samples = n->get<std::int64_t>();
            if (v.n_samples <= 0) errors.push_back("sampling.n_samples must be positive");
        }
        v.sample_n_th = s->value("n_th", 0.0);
        if (v.sample_n_th < 0) errors.push_back("sampling.n_th must be nonnegative");
        v.radius = s->value("radius", 0.0);
    }
    if (const auto* t = need(j, "tomography", "config")) {
        v.ml.dim = t->value("dim", 16);
        v.ml.iterations = t->value("iterations", 500);
        if (v.ml.dim < 2) errors.push_back("tomography.dim must be >= 2");
        if (v.ml.iterations < 1) errors.push_back("tomography.iterations must be >= 1");
    }

    if (v.mode == "photon-capture") {
        if (const auto* s = need(j, "state_source", "config")) {
            v.fixture = s->value("fixture", "");
            if (v.fixture != "fig3-input" && v.fixture.rfind("pair:", 0) != 0)
                errors.push_back("state_source.fixture must be fig3-input or pair:<1-4>");
        }
        if (j.contains("capture")) {
            const auto& c = j.at("capture");
            v.capture_enabled = c.value("enabled", true);
            v.model.r1 = c.value("r1", 0.14);
            v.model.r2 = c.value("r2", 0.95);
            v.model.n_th_target = c.value("n_th", 0.1);
            v.model.dim = v.ml.dim;
            try {
                v.model.validate();
            } catch (const std::exception& e) {
                errors.push_back(std::string("capture: ") + e.what());
            }
        }
        v.want_g2 = j.contains("metrics") && j.at("metrics").value("g2", false);
    } else if (v.mode == "fidelity") {
        if (const auto* b = need(j, "bootstrap", "config")) {
            v.bootstrap_enabled = b->value("enabled", false);
            v.boot.n_sets = b->value("n_sets", 200);
            v.boot.n_samples_per_set = b->value("n_samples", 20480);
            v.boot.level = b->value("level", 0.9);
            if (v.bootstrap_enabled && v.boot.n_sets < 100)
                errors.push_back("bootstrap.n_sets must be >= 100 for a CI");
            if (v.boot.n_samples_per_set <= 0)
                errors.push_back("bootstrap.n_samples must be positive");
            if (!(v.boot.level > 0 && v.boot.level < 1))
                errors.push_back("bootstrap.level must lie in (0,1)");
        }
    }

    if (!errors.empty()) {
        std::string msg = "configuration errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
    return v;
}

void write_file(const fs::path& p, const std::string& text, std::vector<std::string>& files) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << text;
    files.push_back(p.filename().string());
}

json manifest_base(const std::string& config_text, const Validated& v) {
    json m;
    m["config_hash_fnv1a"] = fnv1a_hex(config_text);
    m["seed"] = v.seed;
    json fx;
    for (const auto& name : fixtures::names()) {
        std::ostringstream os;
        os << std::hex << fixtures::checksum(name);
        fx[name] = os.str();
    }
    m["fixture_checksums"] = fx;
    return m;
}

RunResult run_photon_capture(const std::string& config_text, const Validated& v,
                             const fs::path& dir) {
    RunResult res;
    res.out_dir = dir.string();

    DensityMatrix rho_e_true =
        v.fixture == "fig3-input"
            ? fixtures::fig3_input_state(v.ml.dim)
            : fixtures::density_matrix(fixtures::StateKind::Input,
                                       std::stoi(v.fixture.substr(5)), v.ml.dim, true, true);

    // calibration protocol: noisy heterodyne of the input field
    const auto samples_e = sample_q_with_noise(rho_e_true, v.sample_n_th, v.n_samples,
                                               v.radius, splitmix_key(v.seed, 1), nullptr,
                                               v.threads);
    MlConfig ml_e = v.ml;
    ml_e.povm_kind = PovmKind::DisplacedThermal;
    ml_e.n_th = v.sample_n_th;
    ml_e.n_threads = v.threads;
    const auto est_e = run_ml(samples_e, ml_e);

    json metrics;
    metrics["rho_e"] = json{{"p0", est_e.rho_est.population(0)},
                            {"p1", est_e.rho_est.population(1)},
                            {"p2", est_e.rho_est.population(2)}};

    std::vector<std::string> files;
    write_file(dir / "rho_e_true.json", rho_e_true.to_json(), files);
    write_file(dir / "samples_e.csv", samples_to_csv(samples_e), files);
    write_file(dir / "rho_e_est.json", est_e.rho_est.to_json(), files);

    if (v.capture_enabled) {
        // capture protocol on the estimated input state
        const CaptureModel model(v.model);
        const auto rho_m_model = model.apply(est_e.rho_est);
        const auto samples_m = sample_q(rho_m_model, v.n_samples, v.radius,
                                        splitmix_key(v.seed, 2), nullptr, v.threads);
        MlConfig ml_m = v.ml;
        ml_m.povm_kind = PovmKind::Coherent;
        ml_m.n_threads = v.threads;
        const auto est_m = run_ml(samples_m, ml_m);

        write_file(dir / "rho_m_model.json", rho_m_model.to_json(), files);
        write_file(dir / "samples_m.csv", samples_to_csv(samples_m), files);
        write_file(dir / "rho_m_est.json", est_m.rho_est.to_json(), files);

        metrics["rho_m"] = json{{"p0", est_m.rho_est.population(0)},
                                {"p1", est_m.rho_est.population(1)},
                                {"p2", est_m.rho_est.population(2)}};
        if (v.want_g2) {
            metrics["g2_mechanical"] = g2_zero(est_m.rho_est);
            metrics["g2_input"] = g2_zero(est_e.rho_est);
        }
    }

    res.metrics_json = metrics.dump(2);
    write_file(dir / "metrics.json", res.metrics_json, files);
    json man = manifest_base(config_text, v);
    man["files"] = files;
    write_file(dir / "manifest.json", man.dump(2), files);
    res.files_written = files;
    return res;
}

RunResult run_fidelity(const std::string& config_text, const Validated& v,
                       const fs::path& dir) {
    RunResult res;
    res.out_dir = dir.string();
    std::vector<std::string> files;

    // headline numbers from the published blocks as-is
    std::vector<Matrix> in_m, out_m;
    for (int k = 1; k <= 4; ++k) {
        Matrix in16 = Matrix::Zero(v.ml.dim, v.ml.dim);
        in16.topLeftCorner(3, 3) = fixtures::density_block(fixtures::StateKind::Input, k);
        Matrix out16 = Matrix::Zero(v.ml.dim, v.ml.dim);
        out16.topLeftCorner(3, 3) =
            fixtures::density_block(fixtures::StateKind::Mechanical, k);
        in_m.push_back(in16);
        out_m.push_back(out16);
    }
    const auto map = ProcessMap::reconstruct(in_m, out_m, 2);
    const auto rep = average_fidelity(map);

    json report;
    report["f_e"] = rep.f_e;
    report["a_correction"] = rep.a_correction;
    report["f_avg"] = rep.f_avg;
    report["f_avg_uncorrected"] = rep.f_avg_uncorrected;
    report["condition_number"] = map.condition_number();

    if (v.bootstrap_enabled) {
        std::vector<DensityMatrix> ins, outs;
        for (int k = 1; k <= 4; ++k) {
            ins.push_back(
                fixtures::density_matrix(fixtures::StateKind::Input, k, v.ml.dim, true, true));
            outs.push_back(fixtures::density_matrix(fixtures::StateKind::Mechanical, k,
                                                    v.ml.dim, true, true));
        }
        MlConfig ml_in = v.ml;
        ml_in.povm_kind = PovmKind::DisplacedThermal;
        ml_in.n_th = v.sample_n_th;
        MlConfig ml_out = v.ml;
        ml_out.povm_kind = PovmKind::Coherent;
        BootstrapConfig boot = v.boot;
        boot.seed = v.seed;
        boot.n_threads = v.threads;
        const auto fb = bootstrap_fidelity(ins, outs, ml_in, ml_out, boot);
        report["bootstrap"] = json{{"theta", fb.theta},
                                   {"ci_lo", fb.ci.lo},
                                   {"ci_hi", fb.ci.hi},
                                   {"level", boot.level},
                                   {"n_sets", boot.n_sets},
                                   {"n_failed", fb.n_failed}};
        std::ostringstream vals;
        vals.precision(17);
        vals << "f_avg\n";
        for (double f : fb.values) vals << f << '\n';
        write_file(dir / "bootstrap_values.csv", vals.str(), files);
    }

    res.metrics_json = report.dump(2);
    write_file(dir / "fidelity_report.json", res.metrics_json, files);
    json man = manifest_base(config_text, v);
    man["files"] = files;
    write_file(dir / "manifest.json", man.dump(2), files);
    res.files_written = files;
    return res;
}

}  // namespace

RunResult run_experiment(const std::string& config_json, const std::string& out_dir) {
    json j;
    try {
        j = json::parse(config_json);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("configuration is not valid JSON: ") +
                                    e.what());
    }
    const Validated v = validate_config(j);  // throws before anything is written
    fixtures::verify_checksums();

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    return v.mode == "photon-capture" ? run_photon_capture(config_json, v, dir)
                                      : run_fidelity(config_json, v, dir);
}

RunResult run_experiment_file(const std::string& config_path, const std::string& out_dir) {
    std::ifstream is(config_path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot read config file: " + config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return run_experiment(ss.str(), out_dir);
}

}  // namespace emq::pipeline
