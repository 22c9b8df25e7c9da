#include "emq/dynamics.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace emq {

void DeviceParams::validate() const {
    if (!(omega_m > 0 && kappa_m > 0 && kappa_lc > 0 && kappa_ext > 0 && g0 > 0))
        throw std::invalid_argument("device rates must be positive");
    if (kappa_ext > kappa_lc)
        throw std::invalid_argument("kappa_ext must not exceed kappa_lc");
    if (n_m < 0) throw std::invalid_argument("bath occupancy must be nonnegative");
}

cxd FieldTrace::at_time(double t) const {
    if (values.empty()) return 0.0;
    const double s = (t - t0) / dt;
    if (s <= 0.0) return s > -0.5 ? values.front() : cxd(0.0);
    const auto i = static_cast<std::size_t>(s);
    if (i + 1 >= values.size()) {
        return s < double(values.size() - 1) + 0.5 ? values.back() : cxd(0.0);
    }
    const double f = s - double(i);
    return (1.0 - f) * values[i] + f * values[i + 1];
}

double FieldTrace::energy() const {
    if (values.size() < 2) return 0.0;
    double e = 0.5 * (std::norm(values.front()) + std::norm(values.back()));
    for (std::size_t k = 1; k + 1 < values.size(); ++k) e += std::norm(values[k]);
    return e * dt;
}

std::string FieldTrace::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,re,im\n";
    for (std::size_t k = 0; k < values.size(); ++k)
        os << time(k) << ',' << values[k].real() << ',' << values[k].imag() << '\n';
    return os.str();
}

FieldTrace FieldTrace::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("t,re,im", 0) != 0)
        throw std::invalid_argument("field trace CSV must start with header t,re,im");
    std::vector<double> ts;
    FieldTrace tr;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double t, re, im;
        char comma;
        if (!(ls >> t >> comma >> re >> comma >> im))
            throw std::invalid_argument("malformed field trace row: " + line);
        ts.push_back(t);
        tr.values.emplace_back(re, im);
    }
    if (ts.size() >= 2) {
        tr.t0 = ts.front();
        tr.dt = ts[1] - ts[0];
        for (std::size_t k = 1; k < ts.size(); ++k)
            if (std::abs(ts[k] - ts[k - 1] - tr.dt) > 1e-9 * std::max(1.0, std::abs(tr.dt)) ||
                tr.dt <= 0)
                throw std::invalid_argument("field trace grid must be uniform and increasing");
    } else if (ts.size() == 1) {
        tr.t0 = ts.front();
        tr.dt = 1.0;
    }
    return tr;
}

namespace {

double smooth_step(double t, double sigma) {
    if (sigma <= 0.0) return t >= 0.0 ? 1.0 : 0.0;
    return 0.5 * (1.0 + std::erf(t / (std::sqrt(2.0) * sigma)));
}

double segment_value(const RateProfile::Segment& s, double t) {
    double raw = 0.0;
    switch (s.type) {
        case RateProfile::Segment::Type::Constant:
            raw = s.rate;
            break;
        case RateProfile::Segment::Type::DecayCatch: {
            const double u = t - s.t_begin;
            if (u < 0.0 && s.edge_sigma <= 0.0) return 0.0;
            raw = u >= 0.0 ? optimal_capture_pulse(s.gamma, s.gamma_r0, 0.0, u)
                           : s.gamma_r0;  // the smoothed leading edge ramps from 0
            break;
        }
    }
    // error-function smoothed window
    return raw * smooth_step(t - s.t_begin, s.edge_sigma) *
           smooth_step(s.t_end - t, s.edge_sigma);
}

}  // namespace

RateProfile RateProfile::constant(double rate, double t_begin, double t_end,
                                  double edge_sigma) {
    RateProfile p;
    Segment s;
    s.type = Segment::Type::Constant;
    s.rate = rate;
    s.t_begin = t_begin;
    s.t_end = t_end;
    s.edge_sigma = edge_sigma;
    p.add(s);
    return p;
}

RateProfile RateProfile::decay_catch(double gamma, double gamma_r0, double t_begin,
                                     double t_end, double edge_sigma) {
    RateProfile p;
    Segment s;
    s.type = Segment::Type::DecayCatch;
    s.gamma = gamma;
    s.gamma_r0 = gamma_r0;
    s.t_begin = t_begin;
    s.t_end = t_end;
    s.edge_sigma = edge_sigma;
    p.add(s);
    return p;
}

double RateProfile::at(double t) const {
    double v = 0.0;
    for (const auto& s : segments_) v += segment_value(s, t);
    return v;
}

std::string RateProfile::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : segments_) {
        nlohmann::json j;
        j["t_begin"] = s.t_begin;
        j["t_end"] = s.t_end;
        j["edge_sigma"] = s.edge_sigma;
        if (s.type == Segment::Type::Constant) {
            j["type"] = "constant";
            j["rate"] = s.rate;
        } else {
            j["type"] = "decaycatch";
            j["gamma"] = s.gamma;
            j["gamma_r0"] = s.gamma_r0;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

RateProfile RateProfile::from_json(const std::string& text) {
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw std::invalid_argument("rate profile JSON must be an array");
    RateProfile p;
    for (const auto& j : arr) {
        Segment s;
        const std::string type = j.at("type").get<std::string>();
        s.t_begin = j.at("t_begin").get<double>();
        s.t_end = j.at("t_end").get<double>();
        s.edge_sigma = j.value("edge_sigma", 200e-9);
        if (type == "constant") {
            s.type = Segment::Type::Constant;
            s.rate = j.at("rate").get<double>();
        } else if (type == "decaycatch") {
            s.type = Segment::Type::DecayCatch;
            s.gamma = j.at("gamma").get<double>();
            s.gamma_r0 = j.at("gamma_r0").get<double>();
        } else if (type == "gaussian-edge") {
            // modifier segment: applies its sigma to all previously parsed segments
            for (auto& prev : p.segments_) prev.edge_sigma = j.at("sigma").get<double>();
            continue;
        } else {
            throw std::invalid_argument("unknown pump segment type: " + type);
        }
        p.add(s);
    }
    return p;
}

std::string PumpSchedule::to_json() const {
    nlohmann::json j;
    j["gamma_r"] = nlohmann::json::parse(gamma_r.to_json());
    j["gamma_b"] = nlohmann::json::parse(gamma_b.to_json());
    j["psi_b"] = psi_b;
    j["tau_b"] = tau_b;
    j["tau_r"] = tau_r;
    j["tau_s"] = tau_s;
    return j.dump(2);
}

PumpSchedule PumpSchedule::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    PumpSchedule s;
    s.gamma_r = RateProfile::from_json(j.at("gamma_r").dump());
    s.gamma_b = RateProfile::from_json(j.at("gamma_b").dump());
    s.psi_b = j.value("psi_b", 0.0);
    s.tau_b = j.value("tau_b", 0.0);
    s.tau_r = j.value("tau_r", 0.0);
    s.tau_s = j.value("tau_s", 0.0);
    for (const auto& seg : s.gamma_r.segments())
        if (seg.rate < 0 || seg.gamma < 0 || seg.gamma_r0 < 0)
            throw std::invalid_argument("pump rates must be nonnegative");
    return s;
}

double optimal_capture_pulse(double gamma, double gamma_r0, double tau_r, double t) {
    if (gamma <= 0.0 || gamma_r0 <= 0.0)
        throw std::invalid_argument("optimal_capture_pulse: rates must be positive");
    const double s = t + tau_r;
    if (s < 0.0) return 0.0;
    const double e = std::exp(-gamma * s);
    return gamma * e / (1.0 - e + gamma / gamma_r0);
}

double energy_gain(double r, GainMode mode) {
    if (r < 0.0) throw std::invalid_argument("energy_gain: r must be nonnegative");
    const double c = std::cosh(0.5 * r), s = std::sinh(0.5 * r);
    return mode == GainMode::Direct ? c * c : s * s;
}

double hot_cold_ratio(double n_m, double n_th) {
    if (n_m < 0.0 || n_th < 0.0) throw std::invalid_argument("occupancies must be nonnegative");
    return (n_m + 1.0) / (n_th + 1.0);
}

double hot_cold_ratio_invert(double ratio, double n_m) {
    if (ratio <= 0.0) throw std::invalid_argument("ratio must be positive");
    return (n_m + 1.0) / ratio - 1.0;
}

FullEomResult integrate_full_eom(const DeviceParams& params, double detuning,
                                 const RateProfile& pump_rate, const FieldTrace& input,
                                 double dt, double t_end, cxd c0) {
    params.validate();
    const double fastest = std::max(params.kappa_lc, params.omega_m);
    if (dt <= 0.0 || dt > 0.05 / fastest) {
        throw std::invalid_argument("integration step too large; need dt <= " +
                                    std::to_string(0.05 / fastest) + " s");
    }
    const auto n = static_cast<std::size_t>(std::ceil(t_end / dt));
    const double sq_ext = std::sqrt(params.kappa_ext);
    const cxd i1(0.0, 1.0);

    FullEomResult res;
    res.b.dt = res.c.dt = res.b_out.dt = dt;
    res.b.values.resize(n + 1);
    res.c.values.resize(n + 1);
    res.b_out.values.resize(n + 1);

    cxd b = 0.0, c = std::conj(c0);  // caller specifies the mechanical state as c*(0)

    auto g_of = [&](double t) {
        const double rate = pump_rate.at(t);
        return rate > 0.0 ? 0.5 * std::sqrt(rate * params.kappa_lc) : 0.0;
    };
    auto bin_pf = [&](double t) {
        return input.at_time(t) * std::exp(i1 * detuning * t);
    };
    auto rhs = [&](double t, cxd bb, cxd cc, cxd& db, cxd& dc) {
        const double g = g_of(t);
        db = (i1 * detuning - 0.5 * params.kappa_lc) * bb - i1 * g * (cc + std::conj(cc)) +
             sq_ext * bin_pf(t);
        dc = (-i1 * params.omega_m - 0.5 * params.kappa_m) * cc -
             i1 * g * (bb + std::conj(bb));
    };

    auto store = [&](std::size_t k, double t) {
        res.b.values[k] = b * std::exp(-i1 * detuning * t);
        res.c.values[k] = c * std::exp(i1 * params.omega_m * t);
        res.b_out.values[k] = (sq_ext * b - bin_pf(t)) * std::exp(-i1 * detuning * t);
    };
    store(0, 0.0);

    for (std::size_t k = 0; k < n; ++k) {
        const double t = dt * static_cast<double>(k);
        cxd db1, dc1, db2, dc2, db3, dc3, db4, dc4;
        rhs(t, b, c, db1, dc1);
        rhs(t + 0.5 * dt, b + 0.5 * dt * db1, c + 0.5 * dt * dc1, db2, dc2);
        rhs(t + 0.5 * dt, b + 0.5 * dt * db2, c + 0.5 * dt * dc2, db3, dc3);
        rhs(t + dt, b + dt * db3, c + dt * dc3, db4, dc4);
        b += dt / 6.0 * (db1 + 2.0 * db2 + 2.0 * db3 + db4);
        c += dt / 6.0 * (dc1 + 2.0 * dc2 + 2.0 * dc3 + dc4);
        store(k + 1, t + dt);
    }
    return res;
}

FieldTrace integrate_adiabatic_blue(double gamma0, double eta, double psi_b, cxd c0,
                                    const FieldTrace& input) {
    if (gamma0 <= 0.0) throw std::invalid_argument("gamma0 must be positive");
    FieldTrace out;
    out.t0 = input.t0;
    out.dt = input.dt;
    out.values.resize(input.size());
    const cxd phase = std::exp(cxd(0.0, psi_b));
    const double root = std::sqrt(eta * gamma0);

    // running trapezoidal convolution (h * b_in)(t) = int_0^t e^{Gamma0 (t-s)/2} b_in(s) ds
    cxd conv = 0.0;
    const double grow = std::exp(0.5 * gamma0 * input.dt);
    for (std::size_t k = 0; k < input.size(); ++k) {
        const double t = input.time(k);
        if (k > 0) {
            conv = conv * grow +
                   0.5 * input.dt * (input.values[k] + grow * input.values[k - 1]);
        }
        out.values[k] = std::conj(c0) * root * phase * std::exp(0.5 * gamma0 * t) +
                        gamma0 * eta * conv + (2.0 * eta - 1.0) * input.values[k];
    }
    return out;
}

double reflected_energy_fraction(const DeviceParams& params, double gamma, double gamma_r0,
                                 double window, double edge_sigma, double dt) {
    if (dt <= 0.0) dt = 0.045 / std::max(params.kappa_lc, params.omega_m);
    const auto profile = RateProfile::decay_catch(gamma, gamma_r0, 0.0, window, edge_sigma);

    FieldTrace in;
    in.t0 = 0.0;
    in.dt = dt;
    const auto n = static_cast<std::size_t>(std::ceil(window / dt));
    in.values.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        in.values[k] = std::sqrt(gamma) * std::exp(-0.5 * gamma * in.time(k));

    const auto res = integrate_full_eom(params, -params.omega_m, profile, in, dt, window);
    return res.b_out.energy() / (1.0 - std::exp(-gamma * window));  // E_in total = 1
}

}  // namespace emq
