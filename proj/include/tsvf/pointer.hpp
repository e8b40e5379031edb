#pragma once

#include <cstdint>
#include <vector>

#include "tsvf/states.hpp"
#include "tsvf/weak_measurement.hpp"

namespace tsvf {

// G(Q) = (Delta^2 pi)^(-1/4) exp(-Q^2 / 2 Delta^2)
class GaussianPointer {
public:
    GaussianPointer(double delta, Grid1D grid);
    // 4096 points over +-(max|c| + 8 Delta).
    static GaussianPointer for_range(double delta, double min_shift, double max_shift, std::size_t points = 4096);

    double delta() const { return delta_; }
    const Grid1D& grid() const { return grid_; }
    double amplitude(double q) const;
    // Throws unless the grid spans [min_shift - 6 Delta, max_shift + 6 Delta].
    void require_covers(double min_shift, double max_shift) const;

private:
    double delta_;
    Grid1D grid_;
};

struct MeasurementModel {
    double coupling_integral = 1.0;  // integral of g(t); eigenvalue c shifts the pointer by c times this
    bool impulsive = true;
};

struct JointState {
    Grid1D grid;
    Matrix amplitudes;  // rows: system basis, columns: pointer grid
};

struct PointerResult {
    Grid1D q_grid;
    std::vector<double> q_prob;  // sum q_prob dq = 1
    Grid1D p_grid;
    std::vector<double> p_prob;  // sum p_prob dp = 1
    double peak = 0.0;
    double mean = 0.0;
    double p_mean = 0.0;
    double projected_norm = 1.0;  // integral of |Phi(Q)|^2 before normalization
};

JointState joint_state_after_impulse(const StateVector& pre, const DenseOperator& obs, const GaussianPointer& pointer,
                                     const MeasurementModel& model = {});

PointerResult pointer_distribution_preselected(const StateVector& pre, const DenseOperator& obs,
                                               const GaussianPointer& pointer, const MeasurementModel& model = {});

// Unnormalized pointer state sum_n <Phi|P_n|Psi> G(Q - c_n) for normalized Phi, Psi.
WaveFunction1D postselected_pointer_state(const TwoStateVector& tsv, const DenseOperator& obs,
                                          const GaussianPointer& pointer, const MeasurementModel& model = {});

PointerResult pointer_distribution_postselected(const TwoStateVector& tsv, const DenseOperator& obs,
                                                const GaussianPointer& pointer, const MeasurementModel& model = {});

// Distribution summary from a pointer wavefunction (normalizes it).
PointerResult summarize(const WaveFunction1D& position_state);

struct MomentumShift {
    double measured = 0.0;   // mean of the post-selected momentum distribution
    double predicted = 0.0;  // coupling * Im(C_w) / Delta^2
    double scale = 0.0;      // 1 / Delta^2
    double imag_weak = 0.0;
    bool weak_regime = true; // Delta >= 10 max|c_n|
};

MomentumShift momentum_shift_imaginary_part(const TwoStateVector& tsv, const DenseOperator& obs,
                                            const GaussianPointer& pointer, const MeasurementModel& model = {});

struct MomentResidual {
    double residual = 0.0;            // || exact - <Phi|Psi> e^{-iPC_w} G~ ||
    double truncated_residual = 0.0;  // with the moment corrections up to `order` added back
    int order = 2;
};

MomentResidual moment_expansion_residual(const TwoStateVector& tsv, const DenseOperator& obs,
                                         const GaussianPointer& pointer, int order);

struct EnsembleEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    double sample_std = 0.0;
    std::size_t n = 0;
};

// Draws readings from a tabulated distribution by inverse-CDF sampling.
EnsembleEstimate ensemble_mean_estimator(const PointerResult& dist, std::size_t n_samples, std::uint64_t seed);
EnsembleEstimate ensemble_mean_estimator(const StateVector& pre, const DenseOperator& obs,
                                         const GaussianPointer& pointer, std::size_t n_samples, std::uint64_t seed);
EnsembleEstimate ensemble_mean_estimator(const TwoStateVector& tsv, const DenseOperator& obs,
                                         const GaussianPointer& pointer, std::size_t n_samples, std::uint64_t seed);

enum class NSpinCenters { derived, printed };

// n spins pre-selected in |up_x>, post-selected in <up_y|, C = (sum sigma_xi)/n.
// derived centers: (n - 2k)/n; printed centers: (2n - k)/n.
PointerResult n_spin_pointer_closed_form(int n, const GaussianPointer& pointer,
                                         NSpinCenters centers = NSpinCenters::derived);
// Same quantity built on the full 2^n space.
PointerResult n_spin_pointer_tensor(int n, const GaussianPointer& pointer);
TwoStateVector n_spin_description(int n);
DenseOperator n_spin_observable(int n);

// sum_n w_n f(Q - s_n), unnormalized. Shifts that are whole multiples of the
// grid spacing are applied by index with extended-precision accumulation;
// other shifts go through the momentum representation.
WaveFunction1D shift_superposition(const WaveFunction1D& fn, const std::vector<Complex>& weights,
                                   const std::vector<double>& shifts);

std::vector<std::size_t> local_maxima(const std::vector<double>& y, double rel_threshold);
double interpolated_peak(const Grid1D& grid, const std::vector<double>& y);

// sigma_xi = (sigma_x + sigma_y)/sqrt(2)
DenseOperator sigma_xi();

}  // namespace tsvf
