// Classical mean-field simulator of the electromechanical equations of motion
// under pulsed pump schedules: capture, storage, amplification.
#pragma once

#include "emq/fock.hpp"

#include <functional>
#include <string>
#include <vector>

namespace emq {

// Physical constants of the electromechanical device (angular rates, rad/s).
struct DeviceParams {
    double omega_m = 0.0;
    double kappa_m = 0.0;
    double kappa_lc = 0.0;
    double kappa_ext = 0.0;
    double g0 = 0.0;
    double n_m = 0.0;

    double eta() const { return kappa_ext / kappa_lc; }
    void validate() const;
};

// Complex field trace on a uniform time grid. Units: (quanta/s)^(1/2) for
// propagating fields, (quanta)^(1/2) for the mechanical amplitude.
struct FieldTrace {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<cxd> values;

    std::size_t size() const { return values.size(); }
    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    cxd at_time(double t) const;  // linear interpolation, 0 outside the grid
    double energy() const;        // trapezoidal integral of |v|^2

    std::string to_csv() const;  // header "t,re,im"
    static FieldTrace from_csv(const std::string& text);
};

// Time-dependent pump coupling rate built from piecewise segments. Segment
// edges are Gaussian-smoothed (error-function profile) with per-segment sigma.
class RateProfile {
  public:
    struct Segment {
        enum class Type { Constant, DecayCatch };
        Type type = Type::Constant;
        double t_begin = 0.0;
        double t_end = 0.0;
        double rate = 0.0;          // Constant
        double gamma = 0.0;         // DecayCatch: signal power decay rate
        double gamma_r0 = 0.0;      // DecayCatch: initial coupling rate
        double edge_sigma = 200e-9; // Gaussian edge smoothing
    };

    static RateProfile zero() { return RateProfile{}; }
    static RateProfile constant(double rate, double t_begin, double t_end,
                                double edge_sigma = 200e-9);
    static RateProfile decay_catch(double gamma, double gamma_r0, double t_begin, double t_end,
                                   double edge_sigma = 200e-9);

    void add(const Segment& s) { segments_.push_back(s); }
    double at(double t) const;
    const std::vector<Segment>& segments() const { return segments_; }

    std::string to_json() const;
    static RateProfile from_json(const std::string& text);

  private:
    std::vector<Segment> segments_;
};

// Pump schedule: red (capture) and blue (amplification) coupling rates plus
// the blue pump phase and protocol timing.
struct PumpSchedule {
    RateProfile gamma_r;
    RateProfile gamma_b;
    double psi_b = 0.0;
    double tau_b = 0.0;
    double tau_r = 0.0;
    double tau_s = 0.0;

    std::string to_json() const;
    static PumpSchedule from_json(const std::string& text);
};

// Optimal capture rate for a decaying-exponential input; zero for t + tau_r < 0.
double optimal_capture_pulse(double gamma, double gamma_r0, double tau_r, double t);

enum class GainMode { Direct, Conjugate };

// cosh^2(r/2) for direct amplification, sinh^2(r/2) for the phase-conjugating
// channel; r = Gamma_b * tau_b.
double energy_gain(double r, GainMode mode);

// Var(S_h)/Var(S_c) = (n_m + 1)/(n_th + 1)
double hot_cold_ratio(double n_m, double n_th);
double hot_cold_ratio_invert(double ratio, double n_m);  // solve for n_th

struct FullEomResult {
    FieldTrace b;      // LC-circuit field, demodulated to the LC frame
    FieldTrace c;      // mechanical amplitude, demodulated to the mechanical frame
    FieldTrace b_out;  // output field, LC frame
};

// Integrates the coupled mean-field equations (no rotating-wave approximation)
// in the frame rotating at the pump frequency:
//   db/dt = (i Delta - kappa_LC/2) b - i g(t) (c + c*) + sqrt(kappa_ext) b_in
//   dc/dt = (-i omega_m - kappa_m/2) c - i g(t) (b + b*)
//   b_out = sqrt(kappa_ext) b - b_in
// with g(t) = sqrt(Gamma(t) kappa_LC)/2 induced by the pump. `input` is the
// signal envelope at the LC resonance; detuning is +omega_m (blue pump) or
// -omega_m (red pump). Fixed-step RK4; throws if dt > 0.05/max(kappa_LC, omega_m).
FullEomResult integrate_full_eom(const DeviceParams& params, double detuning,
                                 const RateProfile& pump_rate, const FieldTrace& input,
                                 double dt, double t_end, cxd c0 = 0.0);

// Closed-form adiabatic solution for the constant blue pump:
//   b_out(t) = c0 sqrt(eta Gamma0) e^{i psi_b} h(t) + Gamma0 eta (h * b_in)(t)
//              + (2 eta - 1) b_in(t),  h(t) = exp(Gamma0 t / 2)
// evaluated on the input grid (trapezoidal convolution).
FieldTrace integrate_adiabatic_blue(double gamma0, double eta, double psi_b, cxd c0,
                                    const FieldTrace& input);

// Convenience: fraction of the input pulse energy reflected off the circuit
// during optimal capture (full-EOM integration over the capture window).
double reflected_energy_fraction(const DeviceParams& params, double gamma, double gamma_r0,
                                 double window, double edge_sigma, double dt = 0.0);

}  // namespace emq
