#include "tsvf/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "shift_detail.hpp"

namespace tsvf {

GaussianPointer::GaussianPointer(double delta, Grid1D grid) : delta_(delta), grid_(grid) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::invalid_argument, "pointer width must be positive");
}

GaussianPointer GaussianPointer::for_range(double delta, double min_shift, double max_shift, std::size_t points) {
    if (!(delta > 0.0)) throw Error(ErrorCode::invalid_argument, "pointer width must be positive");
    const double reach = std::max(std::abs(min_shift), std::abs(max_shift)) + 8.0 * delta;
    return GaussianPointer(delta, Grid1D(-reach, reach, points));
}

double GaussianPointer::amplitude(double q) const {
    const double norm = std::pow(delta_ * delta_ * std::numbers::pi, -0.25);
    return norm * std::exp(-q * q / (2.0 * delta_ * delta_));
}

void GaussianPointer::require_covers(double min_shift, double max_shift) const {
    if (grid_.min() > min_shift - 6.0 * delta_ || grid_.max() < max_shift + 6.0 * delta_)
        throw Error(ErrorCode::invalid_argument, "pointer grid too narrow for the eigenvalue range plus 6 widths");
}

DenseOperator sigma_xi() {
    const double r = 1.0 / std::sqrt(2.0);
    return pauli_along(r, r, 0.0);
}

namespace {

struct Shifted {
    SpectralDecomposition sd;
    std::vector<double> centers;
};

Shifted shifted_spectrum(const DenseOperator& obs, const GaussianPointer& pointer, const MeasurementModel& model) {
    if (!model.impulsive) throw Error(ErrorCode::invalid_argument, "only the impulsive coupling is simulated exactly");
    if (!(model.coupling_integral > 0.0)) throw Error(ErrorCode::invalid_argument, "coupling integral must be positive");
    Shifted s{hermitian_eigendecomposition(obs), {}};
    for (double c : s.sd.eigenvalues) s.centers.push_back(c * model.coupling_integral);
    pointer.require_covers(*std::min_element(s.centers.begin(), s.centers.end()),
                           *std::max_element(s.centers.begin(), s.centers.end()));
    return s;
}

std::vector<double> normalized_density(const std::vector<double>& d, double dx) {
    double total = 0.0;
    for (double v : d) total += v;
    total *= dx;
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] / total;
    return out;
}

double first_moment(const Grid1D& g, const std::vector<double>& prob) {
    double m = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) m += g.at(i) * prob[i];
    return m * g.spacing();
}

}  // namespace

std::vector<std::size_t> local_maxima(const std::vector<double>& y, double rel_threshold) {
    std::vector<std::size_t> out;
    if (y.size() < 3) return out;
    const double top = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > rel_threshold * top) out.push_back(i);
    return out;
}

double interpolated_peak(const Grid1D& grid, const std::vector<double>& y) {
    const auto it = std::max_element(y.begin(), y.end());
    const std::size_t i = static_cast<std::size_t>(it - y.begin());
    if (i == 0 || i + 1 == y.size()) return grid.at(i);
    const double a = y[i - 1], b = y[i], c = y[i + 1];
    const double den = a - 2.0 * b + c;
    const double off = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
    return grid.at(i) + off * grid.spacing();
}

PointerResult summarize(const WaveFunction1D& wf) {
    PointerResult r;
    r.q_grid = wf.grid;
    const double dx = wf.grid.spacing();
    const auto dens = wf.density();
    double total = 0.0;
    for (double v : dens) total += v;
    r.projected_norm = total * dx;
    r.q_prob = normalized_density(dens, dx);
    r.peak = interpolated_peak(r.q_grid, r.q_prob);
    r.mean = first_moment(r.q_grid, r.q_prob);
    const auto mom = fourier_pair(wf);
    r.p_grid = mom.grid;
    r.p_prob = normalized_density(mom.density(), mom.grid.spacing());
    r.p_mean = first_moment(r.p_grid, r.p_prob);
    return r;
}

JointState joint_state_after_impulse(const StateVector& pre, const DenseOperator& obs, const GaussianPointer& pointer,
                                     const MeasurementModel& model) {
    if (obs.dim() != pre.dim()) throw Error(ErrorCode::dimension_mismatch, "observable dimension differs from state");
    const auto s = shifted_spectrum(obs, pointer, model);
    const Vector psi = pre.normalized().amplitudes();
    const Grid1D& g = pointer.grid();
    JointState js{g, Matrix::Zero(pre.dim(), static_cast<Eigen::Index>(g.points()))};
    for (std::size_t n = 0; n < s.sd.size(); ++n) {
        const Vector branch = s.sd.projectors[n].matrix() * psi;
        Eigen::VectorXd gauss(static_cast<Eigen::Index>(g.points()));
        for (std::size_t j = 0; j < g.points(); ++j) gauss(static_cast<Eigen::Index>(j)) = pointer.amplitude(g.at(j) - s.centers[n]);
        js.amplitudes += branch * gauss.transpose().cast<Complex>();
    }
    return js;
}

PointerResult pointer_distribution_preselected(const StateVector& pre, const DenseOperator& obs,
                                               const GaussianPointer& pointer, const MeasurementModel& model) {
    const JointState js = joint_state_after_impulse(pre, obs, pointer, model);
    const Grid1D& g = js.grid;
    PointerResult r;
    r.q_grid = g;
    std::vector<double> dens(g.points());
    for (std::size_t j = 0; j < g.points(); ++j) dens[j] = js.amplitudes.col(static_cast<Eigen::Index>(j)).squaredNorm();
    r.projected_norm = 1.0;
    r.q_prob = normalized_density(dens, g.spacing());
    r.peak = interpolated_peak(g, r.q_prob);
    r.mean = first_moment(g, r.q_prob);

    std::vector<double> pd;
    for (Eigen::Index i = 0; i < js.amplitudes.rows(); ++i) {
        const auto mom = fourier_pair(WaveFunction1D(g, js.amplitudes.row(i).transpose()));
        if (pd.empty()) {
            pd.assign(mom.grid.points(), 0.0);
            r.p_grid = mom.grid;
        }
        const auto d = mom.density();
        for (std::size_t k = 0; k < d.size(); ++k) pd[k] += d[k];
    }
    r.p_prob = normalized_density(pd, r.p_grid.spacing());
    r.p_mean = first_moment(r.p_grid, r.p_prob);
    return r;
}

WaveFunction1D postselected_pointer_state(const TwoStateVector& tsv, const DenseOperator& obs,
                                          const GaussianPointer& pointer, const MeasurementModel& model) {
    if (obs.dim() != tsv.dim()) throw Error(ErrorCode::dimension_mismatch, "observable dimension differs from state");
    const auto s = shifted_spectrum(obs, pointer, model);
    const auto n = tsv.normalized();
    const Grid1D& g = pointer.grid();
    Vector phi = Vector::Zero(static_cast<Eigen::Index>(g.points()));
    for (std::size_t k = 0; k < s.sd.size(); ++k) {
        const Complex a = n.bra.sandwich(s.sd.projectors[k].matrix(), n.ket.amplitudes());
        if (a == Complex(0.0, 0.0)) continue;
        for (std::size_t j = 0; j < g.points(); ++j)
            phi(static_cast<Eigen::Index>(j)) += a * pointer.amplitude(g.at(j) - s.centers[k]);
    }
    return WaveFunction1D(g, std::move(phi));
}

PointerResult pointer_distribution_postselected(const TwoStateVector& tsv, const DenseOperator& obs,
                                                const GaussianPointer& pointer, const MeasurementModel& model) {
    const auto phi = postselected_pointer_state(tsv, obs, pointer, model);
    if (!(phi.amplitudes.squaredNorm() * phi.grid.spacing() >= 1e-20))
        throw Error(ErrorCode::numerical, "post-selection impossible: projected pointer state vanishes");
    return summarize(phi);
}

MomentumShift momentum_shift_imaginary_part(const TwoStateVector& tsv, const DenseOperator& obs,
                                            const GaussianPointer& pointer, const MeasurementModel& model) {
    MomentumShift m;
    const auto wv = weak_value(tsv, obs);
    const auto sd = hermitian_eigendecomposition(obs);
    const double d = pointer.delta();
    m.imag_weak = wv.value.imag();
    m.scale = 1.0 / (d * d);
    m.predicted = model.coupling_integral * m.imag_weak * m.scale;
    m.weak_regime = d >= 10.0 * sd.spectral_radius() * model.coupling_integral;
    m.measured = pointer_distribution_postselected(tsv, obs, pointer, model).p_mean;
    return m;
}

MomentResidual moment_expansion_residual(const TwoStateVector& tsv, const DenseOperator& obs,
                                         const GaussianPointer& pointer, int order) {
    if (order < 2) throw Error(ErrorCode::invalid_argument, "expansion order must be at least 2");
    const auto n = tsv.normalized();
    const auto sd = hermitian_eigendecomposition(obs);
    std::vector<Complex> a;
    Complex overlap(0.0, 0.0);
    for (const auto& p : sd.projectors) {
        a.push_back(n.bra.sandwich(p.matrix(), n.ket.amplitudes()));
        overlap += a.back();
    }
    if (!(std::abs(overlap) > kOverlapEpsilon))
        throw Error(ErrorCode::numerical, "pre- and post-selected states are orthogonal; weak value diverges");

    // (C^k)_w for k = 0..order
    std::vector<Complex> moments(static_cast<std::size_t>(order) + 1, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < moments.size(); ++k) {
        for (std::size_t j = 0; j < a.size(); ++j) moments[k] += a[j] * std::pow(sd.eigenvalues[j], static_cast<double>(k));
        moments[k] /= overlap;
    }
    const Complex cw = moments[1];

    const double d = pointer.delta();
    const double gnorm = std::pow(d * d / std::numbers::pi, 0.25);
    const Grid1D pg = fourier_pair(WaveFunction1D(pointer.grid(), Vector::Zero(static_cast<Eigen::Index>(pointer.grid().points())))).grid;

    double r1 = 0.0, rk = 0.0;
    for (std::size_t i = 0; i < pg.points(); ++i) {
        const double p = pg.at(i);
        const double g = gnorm * std::exp(-d * d * p * p / 2.0);
        if (g == 0.0) continue;
        Complex exact(0.0, 0.0);
        for (std::size_t j = 0; j < a.size(); ++j) exact += a[j] * std::exp(Complex(0.0, -p * sd.eigenvalues[j]));
        exact *= g;
        const Complex first = overlap * std::exp(Complex(0.0, -p) * cw) * g;
        Complex corr(0.0, 0.0);
        Complex term(1.0, 0.0);  // (-iP)^k / k!
        for (int k = 1; k <= order; ++k) {
            term *= Complex(0.0, -p) / static_cast<double>(k);
            if (k >= 2) corr += term * (moments[static_cast<std::size_t>(k)] - std::pow(cw, k));
        }
        corr *= overlap * g;
        r1 += std::norm(exact - first);
        rk += std::norm(exact - first - corr);
    }
    return {std::sqrt(r1 * pg.spacing()), std::sqrt(rk * pg.spacing()), order};
}

EnsembleEstimate ensemble_mean_estimator(const PointerResult& dist, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw Error(ErrorCode::invalid_argument, "need at least one sample");
    const Grid1D& g = dist.q_grid;
    const double dx = g.spacing();
    std::vector<double> cdf(dist.q_prob.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += dist.q_prob[i] * dx;
        cdf[i] = acc;
    }
    std::mt19937_64 rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        // 53 random bits -> [0, 1), independent of the library's distribution code
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
        const double lo = i == 0 ? 0.0 : cdf[i - 1];
        const double w = cdf[i] - lo;
        const double frac = w > 0.0 ? (u - lo) / w : 0.5;
        const double q = g.at(i) + (frac - 0.5) * dx;
        sum += q;
        sum2 += q * q;
    }
    EnsembleEstimate e;
    e.n = n_samples;
    const double nn = static_cast<double>(n_samples);
    e.mean = sum / nn;
    if (n_samples > 1) {
        const double var = std::max(0.0, (sum2 - nn * e.mean * e.mean) / (nn - 1.0));
        e.sample_std = std::sqrt(var);
        e.standard_error = e.sample_std / std::sqrt(nn);
    }
    return e;
}

EnsembleEstimate ensemble_mean_estimator(const StateVector& pre, const DenseOperator& obs,
                                         const GaussianPointer& pointer, std::size_t n_samples, std::uint64_t seed) {
    return ensemble_mean_estimator(pointer_distribution_preselected(pre, obs, pointer), n_samples, seed);
}

EnsembleEstimate ensemble_mean_estimator(const TwoStateVector& tsv, const DenseOperator& obs,
                                         const GaussianPointer& pointer, std::size_t n_samples, std::uint64_t seed) {
    return ensemble_mean_estimator(pointer_distribution_postselected(tsv, obs, pointer), n_samples, seed);
}

TwoStateVector n_spin_description(int n) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "need at least one spin");
    Vector psi = Vector::Ones(1), phi = Vector::Ones(1);
    for (int i = 0; i < n; ++i) {
        psi = tensor_product(psi, spin_up('x'));
        phi = tensor_product(phi, spin_up('y'));
    }
    return TwoStateVector::from_kets(phi, psi);
}

DenseOperator n_spin_observable(int n) {
    const DenseOperator xi = sigma_xi();
    Matrix c = Matrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (int i = 0; i < n; ++i) c += embed(xi, i, n).matrix();
    return DenseOperator(c / static_cast<double>(n), true);
}

PointerResult n_spin_pointer_tensor(int n, const GaussianPointer& pointer) {
    return pointer_distribution_postselected(n_spin_description(n), n_spin_observable(n), pointer);
}

PointerResult n_spin_pointer_closed_form(int n, const GaussianPointer& pointer, NSpinCenters centers) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "need at least one spin");
    // Single-spin amplitudes <up_y|P_{xi=+-1}|up_x>; their ratio is -tan^2(pi/8).
    const auto sd = hermitian_eigendecomposition(sigma_xi());
    const auto bra = CoStateVector::from_ket(spin_up('y'));
    const Complex u = bra.sandwich(sd.projectors[1].matrix(), spin_up('x'));
    const Complex v = bra.sandwich(sd.projectors[0].matrix(), spin_up('x'));
    const Complex ratio = v / u;

    const double nd = static_cast<double>(n);
    std::vector<Complex> coef(static_cast<std::size_t>(n) + 1);
    std::vector<double> shift(coef.size());
    Complex c(1.0, 0.0);
    for (int k = 0; k <= n; ++k) {
        if (k > 0) c *= ratio * (nd - k + 1) / static_cast<double>(k);
        coef[static_cast<std::size_t>(k)] = c;
        shift[static_cast<std::size_t>(k)] = centers == NSpinCenters::derived ? (nd - 2.0 * k) / nd : (2.0 * nd - k) / nd;
    }
    const double lo = *std::min_element(shift.begin(), shift.end());
    const double hi = *std::max_element(shift.begin(), shift.end());
    pointer.require_covers(lo, hi);

    const Grid1D& g = pointer.grid();
    Vector phi = Vector::Zero(static_cast<Eigen::Index>(g.points()));
    for (std::size_t j = 0; j < g.points(); ++j) {
        Complex s(0.0, 0.0);
        for (std::size_t k = 0; k < coef.size(); ++k) s += coef[k] * pointer.amplitude(g.at(j) - shift[k]);
        phi(static_cast<Eigen::Index>(j)) = s;
    }
    return summarize(WaveFunction1D(g, std::move(phi)));
}

WaveFunction1D shift_superposition(const WaveFunction1D& fn, const std::vector<Complex>& weights,
                                   const std::vector<double>& shifts) {
    if (weights.size() != shifts.size() || weights.empty())
        throw Error(ErrorCode::invalid_argument, "weights and shifts must be non-empty and of equal length");
    if (fn.representation != Representation::position)
        throw Error(ErrorCode::invalid_argument, "shift superposition acts on position-space functions");
    const double dx = fn.grid.spacing();

    if (auto m = detail::commensurate_offsets(shifts, dx)) {
        for (long k : *m) detail::check_overflow(fn.amplitudes, k);
        std::vector<detail::WideComplex> f(fn.grid.points()), w(weights.size());
        for (std::size_t j = 0; j < f.size(); ++j) {
            f[j].re = fn.amplitudes(static_cast<Eigen::Index>(j)).real();
            f[j].im = fn.amplitudes(static_cast<Eigen::Index>(j)).imag();
        }
        for (std::size_t k = 0; k < w.size(); ++k) {
            w[k].re = weights[k].real();
            w[k].im = weights[k].imag();
        }
        const auto out = detail::index_shift_sum(f, w, *m);
        Vector v(static_cast<Eigen::Index>(out.size()));
        for (std::size_t j = 0; j < out.size(); ++j)
            v(static_cast<Eigen::Index>(j)) = Complex(static_cast<double>(out[j].re), static_cast<double>(out[j].im));
        return WaveFunction1D(fn.grid, std::move(v));
    }

    for (double s : shifts) detail::check_overflow(fn.amplitudes, static_cast<long>(std::ceil(std::abs(s) / dx)) * (s >= 0 ? 1 : -1));
    auto mom = fourier_pair(fn);
    for (std::size_t k = 0; k < mom.grid.points(); ++k) {
        const double p = mom.grid.at(k);
        Complex factor(0.0, 0.0);
        for (std::size_t n = 0; n < weights.size(); ++n) factor += weights[n] * std::exp(Complex(0.0, -p * shifts[n]));
        mom.amplitudes(static_cast<Eigen::Index>(k)) *= factor;
    }
    auto out = fourier_pair(mom);
    out.grid = fn.grid;
    return out;
}

}  // namespace tsvf
