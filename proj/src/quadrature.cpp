#include "emq/quadrature.hpp"

#include "emq/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace emq {

void GainCalibration::validate() const {
    if (!(g_scale > 0.0)) throw std::invalid_argument("gain scale must be positive");
    if (n_th < 0.0) throw std::invalid_argument("n_th must be nonnegative");
}

QuadratureSample extract_quadratures(const VoltageRecord& record, double gamma_b,
                                     double omega_if, GainCalibration& cal,
                                     double lo_phase) {
    if (record.v.empty()) throw std::invalid_argument("voltage record is empty");
    if (record.sample_period <= 0.0)
        throw std::invalid_argument("voltage record needs a positive sample period");
    cal.validate();

    double c = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < record.v.size(); ++k) {
        const double t = record.sample_period * static_cast<double>(k);
        const double f = std::exp(0.5 * gamma_b * t);
        c += f * f;
        sx += record.v[k] * f * std::cos(omega_if * t + lo_phase);
        sy += record.v[k] * f * std::sin(omega_if * t + lo_phase);
    }
    cal.filter_norm = c;
    const double scale = std::sqrt(2.0 * record.sample_period / (cal.g_scale * c));
    return {scale * sx, scale * sy};
}

GainCalibration calibrate_gain(const std::vector<QuadratureSample>& reference, double n_th) {
    if (reference.size() < 2)
        throw std::invalid_argument("gain calibration needs at least 2 reference samples");
    if (n_th < 0.0) throw std::invalid_argument("n_th must be nonnegative");
    double mx = 0.0, my = 0.0;
    for (const auto& s : reference) {
        mx += s.x;
        my += s.y;
    }
    mx /= double(reference.size());
    my /= double(reference.size());
    double var = 0.0;
    for (const auto& s : reference)
        var += (s.x - mx) * (s.x - mx) + (s.y - my) * (s.y - my);
    var /= double(reference.size() - 1);
    if (var <= 0.0) throw std::invalid_argument("reference samples have zero variance");
    GainCalibration cal;
    cal.g_scale = var / (1.0 + n_th);
    cal.n_th = n_th;
    return cal;
}

std::vector<QuadratureSample> rescale(const std::vector<QuadratureSample>& raw,
                                      const GainCalibration& cal) {
    cal.validate();
    const double s = 1.0 / std::sqrt(cal.g_scale);
    std::vector<QuadratureSample> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) out[k] = {raw[k].x * s, raw[k].y * s};
    return out;
}

VoltageRecord synthesize_voltage_record(const FieldTrace& b_out, double omega_if,
                                        double sample_rate, std::uint64_t noise_seed,
                                        double noise_sigma) {
    if (sample_rate <= 0.0) throw std::invalid_argument("sample rate must be positive");
    VoltageRecord rec;
    rec.t0 = b_out.t0;
    rec.sample_period = 1.0 / sample_rate;
    const double span = b_out.dt * double(b_out.size() > 0 ? b_out.size() - 1 : 0);
    const auto n = static_cast<std::size_t>(std::floor(span * sample_rate)) + 1;
    rec.v.resize(b_out.size() == 0 ? 0 : n);
    Rng rng(noise_seed);
    for (std::size_t k = 0; k < rec.v.size(); ++k) {
        const double t = rec.sample_period * static_cast<double>(k);
        const cxd b = b_out.at_time(b_out.t0 + t);
        double v = (b * std::exp(cxd(0.0, omega_if * t))).real();
        if (noise_sigma > 0.0) v += noise_sigma * rng.gaussian();
        rec.v[k] = v;
    }
    return rec;
}

std::string samples_to_csv(const std::vector<QuadratureSample>& samples) {
    std::ostringstream os;
    os.precision(17);
    os << "X,Y\n";
    for (const auto& s : samples) os << s.x << ',' << s.y << '\n';
    return os.str();
}

std::vector<QuadratureSample> samples_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("X,Y", 0) != 0)
        throw std::invalid_argument("sample CSV must start with header X,Y");
    std::vector<QuadratureSample> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double x, y;
        char comma;
        if (!(ls >> x >> comma >> y)) throw std::invalid_argument("malformed sample row: " + line);
        out.push_back({x, y});
    }
    return out;
}

std::string sidecar_to_json(const GainCalibration& cal, const std::string& batch_tag) {
    nlohmann::json j;
    j["g_scale"] = cal.g_scale;
    j["n_th"] = cal.n_th;
    j["filter_norm"] = cal.filter_norm;
    j["batch_tag"] = batch_tag;
    return j.dump(2);
}

}  // namespace emq
