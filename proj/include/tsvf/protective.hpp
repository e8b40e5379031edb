#pragma once

#include <array>
#include <vector>

#include "tsvf/pointer.hpp"
#include "tsvf/weak_measurement.hpp"

namespace tsvf {

class LargeSpin {
public:
    explicit LargeSpin(int spin_n);

    int spin() const { return n_; }
    Eigen::Index dim() const { return 2 * n_ + 1; }
    const DenseOperator& sx() const { return sx_; }
    const DenseOperator& sy() const { return sy_; }
    const DenseOperator& sz() const { return sz_; }
    DenseOperator along(const std::array<double, 3>& n) const;
    // |S_n = N> for a unit direction n.
    Vector top_state(const std::array<double, 3>& n) const;

private:
    int n_;
    DenseOperator sx_, sy_, sz_;
};

// g(t): cosine rise over ramp_fraction * T, plateau, cosine fall; integral 1.
struct AdiabaticSchedule {
    double total_time = 10.0;
    double ramp_fraction = 0.1;
    int steps = 1000;  // Magnus steps shared between the two ramps; the plateau is exact

    void validate() const;
    double plateau() const { return 1.0 / (total_time * (1.0 - ramp_fraction)); }
    double g(double t) const;
};

struct ProtectiveBranch {
    double energy = 0.0;
    double weight = 0.0;       // |alpha_i|^2 as realized by the simulation
    double shift = 0.0;        // pointer displacement within this branch
    double expectation = 0.0;  // <E_i|A|E_i>
    WaveFunction1D pointer;    // pointer state (position) attached to |E_i>
};

struct AdiabaticResult {
    double pointer_shift = 0.0;  // mean displacement of the full pointer distribution
    std::vector<double> outcome_probabilities;
    std::vector<ProtectiveBranch> branches;
    Matrix eigenbasis;           // columns |E_i>
    double gap = 0.0;
    double leakage = 0.0;        // largest transition probability out of an eigenstate, averaged over P
    bool adiabaticity_flag = false;  // leakage > 1%
    PointerResult pointer;
};

// Exact per-momentum-block evolution under H0 + g(t) P A.
AdiabaticResult adiabatic_protective_measurement(const DenseOperator& h0, const DenseOperator& obs,
                                                 const StateVector& initial, const AdiabaticSchedule& schedule,
                                                 const GaussianPointer& pointer);
// Same, starting from an arbitrary position-space pointer state.
AdiabaticResult adiabatic_protective_measurement(const DenseOperator& h0, const DenseOperator& obs,
                                                 const StateVector& initial, const AdiabaticSchedule& schedule,
                                                 const WaveFunction1D& pointer_state);

struct EffectiveHamiltonian {
    WeakVector spin_weak;    // S_w
    DenseOperator h_eff;     // -lambda S_w . sigma, generally non-Hermitian
};

// Protector given as a two-state vector on a 2N+1 dimensional spin.
EffectiveHamiltonian weak_value_substituted_hamiltonian(const TwoStateVector& protector, double lambda);

struct ProtectedMeasurement {
    double shift = 0.0;         // mean of the post-selected pointer
    Complex target_weak;        // (sigma_xi)_w of the target two-state vector
    double error = 0.0;         // shift - Re(target_weak)
    double lambda_n_over_p0 = 0.0;
    double postselection_amplitude = 0.0;  // sqrt of the post-selection probability
    PointerResult pointer;
};

// Protector pre-selected in |S_alpha = N>, target in |up_alpha>; both
// post-selected along beta after unit time under -lambda S.sigma + P obs.
// The pointer has momentum spread P0 = 1/Delta.
ProtectedMeasurement protected_two_state_measurement(const std::array<double, 3>& alpha,
                                                     const std::array<double, 3>& beta, const DenseOperator& obs,
                                                     int spin_n, double lambda, double p0,
                                                     std::size_t points = 2048);

struct ModelSpinProtection {
    Complex a, b;                 // |Psi2> = a |Psi1> + b |Psi_perp>
    Vector psi_perp;
    std::array<double, 3> chi{};  // Bloch direction of (a, b)
    DenseOperator sigma_x, sigma_y, sigma_z;  // model-spin operators on the system
    TwoStateVector protector;     // <S_chi = N|| S_z = N>
    DenseOperator h_prot;         // -lambda S . sigma~ on protector (x) system
    EffectiveHamiltonian effective;  // -lambda S_w . sigma~ on the system
};

ModelSpinProtection model_spin_protection(const StateVector& pre, const StateVector& post, int spin_n, double lambda);

}  // namespace tsvf
