// Bundled fixture tables and end-to-end experiment orchestration.
#pragma once

#include "emq/dynamics.hpp"
#include "emq/fock.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emq::fixtures {

// bundled machine-readable tables: "cqed_params", "emc_params",
// "density_matrices", "nth_sensitivity"
const std::vector<std::string>& names();
const std::string& raw(const std::string& name);
std::uint64_t checksum(const std::string& name);  // FNV-1a over the raw text
void verify_checksums();                          // throws on mismatch

DeviceParams emc_device_params();  // angular rates (rad/s)
double emc_value_hz(const std::string& key);
double cqed_value_hz(const std::string& key);

enum class StateKind { Input, Mechanical };

// published 3x3 block as-is (3-digit rounding leaves some blocks marginally
// non-positive; lambda_min down to about -4e-3)
Matrix density_block(StateKind kind, int index);  // index 1..4

// embedded at `dim`; when psd_repair is set, negative eigenvalues are clipped
// and the original trace restored (needed for sampling)
DensityMatrix density_matrix(StateKind kind, int index, int dim, bool renormalize,
                             bool psd_repair, double* trace_deficit = nullptr);

struct NthRow {
    double n_th;
    double e_diag[3];
    double m_diag[3];
};
std::vector<NthRow> nth_sensitivity_rows();

// diagonal states of the single-photon run (middle row of the sensitivity
// table, the analysis point at n_th = 0.10)
DensityMatrix fig3_input_state(int dim);
DensityMatrix fig3_mechanical_state(int dim);

}  // namespace emq::fixtures

namespace emq::pipeline {

// bundled experiment configurations: "photon-capture", "fidelity"
const std::string& bundled_config(const std::string& name);

struct RunResult {
    std::string out_dir;
    std::vector<std::string> files_written;
    std::string metrics_json;  // contents of the main report
};

// Validates the configuration (collecting every offending key), then runs the
// configured chain and writes all artifacts plus a manifest into out_dir.
// Nothing is written if validation fails.
RunResult run_experiment(const std::string& config_json, const std::string& out_dir);
RunResult run_experiment_file(const std::string& config_path, const std::string& out_dir);

std::uint64_t fnv1a(const std::string& text);
std::string fnv1a_hex(const std::string& text);

}  // namespace emq::pipeline
