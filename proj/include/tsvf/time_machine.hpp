#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsvf/numerics.hpp"
#include "tsvf/wide.hpp"

namespace tsvf {

inline constexpr double kGravitationalConstant = 6.67430e-11;  // m^3 kg^-1 s^-2
inline constexpr double kSpeedOfLight = 299792458.0;           // m/s

struct BinomialSchedule {
    int n_terms = 0;
    double eta = 0.0;
    std::vector<double> shifts;    // c_n = n/N
    std::vector<Wide> weights;     // alpha_n = C(N,n) eta^n (1-eta)^(N-n)
    std::vector<double> log_abs;   // ln|alpha_n|, -inf for a zero weight
    std::vector<int> sign;         // -1, 0, +1

    Wide sum() const;
    Wide sum_abs_squared() const;
    std::vector<double> weights_double() const;
};

BinomialSchedule binomial_schedule(int n_terms, double eta);

// Real test function evaluated in extended precision.
using WideFunction = std::function<Wide(const Wide&)>;

// A test function plus an optional fast path for uniform lattices. Every
// extended-precision exp costs tens of microseconds, so the Gaussian samples
// a lattice through the exact ratio recurrence instead.
class WideSignal {
public:
    WideSignal(WideFunction f);  // NOLINT: implicit on purpose
    // (pi sigma^2)^(-1/4) exp(-(t - center)^2 / (2 sigma^2)), unit L2 norm.
    static WideSignal gaussian(double sigma, double center = 0.0);

    Wide operator()(const Wide& t) const;
    // f(t0 + i h) for i = 0 .. count-1.
    std::vector<Wide> lattice(const Wide& t0, const Wide& h, std::size_t count) const;
    explicit operator bool() const { return static_cast<bool>(f_); }

private:
    using LatticeFn = std::function<std::vector<Wide>(const Wide&, const Wide&, std::size_t)>;
    WideSignal(WideFunction f, LatticeFn lattice);
    WideFunction f_;
    LatticeFn lattice_;
};

struct AmplifiedShift {
    WaveFunction1D original;
    WaveFunction1D shifted;  // sum alpha_n f(t - c_n delta_t)
    WaveFunction1D ideal;    // f(t - eta delta_t)
    double distortion = 0.0; // ||shifted - ideal|| / ||f||
    double high_band_fraction = 0.0;  // spectral weight above a quarter of Nyquist
    std::optional<std::string> warning;
};

// Samples on the grid go through double precision, so the result is only
// meaningful while sum|alpha_n| times machine epsilon stays small.
AmplifiedShift amplified_shift(const WaveFunction1D& fn, int n_terms, double eta, double delta_t);

// Samples f in extended precision on grid points t_j = min + j h, where
// h = delta_t / (N k) for the integer k = round(delta_t / (N grid.spacing())).
// With delta_t = 0, h is the grid spacing.
AmplifiedShift amplified_shift(const WideSignal& f, const Grid1D& grid, int n_terms, double eta, double delta_t);

double sr_dilation(double velocity, double external_time, double light_speed = kSpeedOfLight);
double gr_dilation(double mass, double radius, double external_time, double grav_const = kGravitationalConstant,
                   double light_speed = kSpeedOfLight);
// T(sqrt(1 - rs/R0) - sqrt(1 - rs/R)), evaluated without cancellation.
double gr_dilation_difference(double mass, double r0, double radius, double external_time,
                              double grav_const = kGravitationalConstant, double light_speed = kSpeedOfLight);

struct TimeMachineConfig {
    int n_terms = 13;
    double eta = 10.0;
    double delta_t = 1.0;
    double external_time = 100.0; // T, in the units of delta_t
    double shell_mass = 5.972e24; // kg
    double r0 = 6.4e6;            // m
    double grav_const = kGravitationalConstant;
    double light_speed = kSpeedOfLight;

    void validate() const;
    double schwarzschild_radius() const { return 2.0 * grav_const * shell_mass / (light_speed * light_speed); }
};

enum class RadiusForm { full, simplified, automatic };

// Radii R_n realizing delta t_n = n delta_t / N. The full form measures the
// shift relative to the shell at R_0; the simplified form neglects the
// dilation at R_0 and is chosen automatically when rs/R_0 < 1e-12.
std::vector<double> radius_schedule(const TimeMachineConfig& cfg, RadiusForm form = RadiusForm::automatic);

// Normalized QOS register states.
Vector qos_initial_state(const BinomialSchedule& s);
Vector qos_final_state(int n_terms);

struct MachineRun {
    BinomialSchedule schedule;
    std::vector<double> radii;
    std::vector<double> realized_shifts;  // delta t_n recovered from the radii
    Vector qos_initial;
    Vector qos_final;
    Grid1D grid;
    Matrix product_state;     // rows n: Norm alpha_n f(t), shell at R_0 / R_n
    Matrix correlated_state;  // rows n: Norm alpha_n f(t - delta t_n)
    WaveFunction1D final_fn;  // sum alpha_n f(t - delta t_n)
    double success_prob = 0.0;
    double log10_success_prob = 0.0;
    double direct_projection_prob = 0.0;  // Prob(system found in f(t - eta delta_t)) before post-selection
    double final_fidelity = 0.0;          // |<f(t - eta delta_t)|final_fn>|^2 for normalized states
    double distortion = 0.0;
};

// System functions are taken to be normalized on the grid; the free
// Hamiltonian is zero and the shells act only through rigid time shifts.
MachineRun run_machine(const WaveFunction1D& system_fn, const TimeMachineConfig& cfg);
MachineRun run_machine(const WideSignal& system_fn, const Grid1D& grid, const TimeMachineConfig& cfg);

struct SuccessScaling {
    std::vector<int> n_values;
    std::vector<double> log10_prob;  // with unit overlaps: Norm^2 (sum alpha)^2 / (N+1)
    // Per-unit-step ratio (Prob(b)/Prob(a))^(1/(b-a)) for consecutive entries a < b.
    std::vector<double> ratios;
    double reference = 0.0;          // 1/(2 eta - 1)
};

SuccessScaling success_scaling_probe(double eta, const std::vector<int>& n_values);

}  // namespace tsvf
