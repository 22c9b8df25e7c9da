// Detector voltage records to quadrature-amplitude pairs: matched-filter IQ
// demodulation and gain calibration against vacuum references.
#pragma once

#include "emq/dynamics.hpp"
#include "emq/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace emq {

// Time-stamped voltages on a uniform grid t_k = t0 + k/R_s.
struct VoltageRecord {
    double t0 = 0.0;
    double sample_period = 0.0;  // T_s = 1/R_s
    std::vector<double> v;

    double time(std::size_t k) const { return t0 + sample_period * static_cast<double>(k); }
};

// Detector gain scale and its assumptions.
struct GainCalibration {
    double g_scale = 1.0;   // script-G, volts^2 s / quanta
    double n_th = 0.0;      // assumed mechanical occupancy entering the scale
    double filter_norm = 0.0;  // C = sum |f(t_k)|^2 of the last extraction

    void validate() const;
};

// Matched-filter demodulation:
//   X = sqrt(2 T_s / (G C)) sum_k V_k f(t_k) cos(w_if t_k + lo_phase)
//   Y = sqrt(2 T_s / (G C)) sum_k V_k f(t_k) sin(w_if t_k + lo_phase)
// with the rising-exponential filter f(t) = exp(Gamma_b t / 2) and
// C = sum f(t_k)^2. Shifting lo_phase rotates (X, Y) exactly.
QuadratureSample extract_quadratures(const VoltageRecord& record, double gamma_b,
                                     double omega_if, GainCalibration& cal,
                                     double lo_phase = 0.0);

// Determines G from reference (vacuum-input) samples: G = (Var X + Var Y)/(1 + n_th).
// Rescaled samples then have total variance exactly 1 + n_th.
GainCalibration calibrate_gain(const std::vector<QuadratureSample>& reference, double n_th);

std::vector<QuadratureSample> rescale(const std::vector<QuadratureSample>& raw,
                                      const GainCalibration& cal);

// Mixes a simulated output field down to the intermediate frequency and samples
// it: V(t) = Re[b_out(t) e^{i w_if t}] at rate R_s, plus optional white noise.
VoltageRecord synthesize_voltage_record(const FieldTrace& b_out, double omega_if,
                                        double sample_rate, std::uint64_t noise_seed = 0,
                                        double noise_sigma = 0.0);

// Sample CSV exchange: header "X,Y", one pair per row; the JSON sidecar carries
// the calibration scale, assumed n_th and free-form batch tags.
std::string samples_to_csv(const std::vector<QuadratureSample>& samples);
std::vector<QuadratureSample> samples_from_csv(const std::string& text);
std::string sidecar_to_json(const GainCalibration& cal, const std::string& batch_tag);

}  // namespace emq
