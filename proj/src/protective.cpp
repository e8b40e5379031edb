#include "tsvf/protective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace tsvf {

namespace {

Matrix expm_hermitian(const Matrix& k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    const Eigen::VectorXd& w = es.eigenvalues();
    Vector phase(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phase(i) = std::exp(Complex(0.0, -w(i)));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

std::array<double, 3> unit(const std::array<double, 3>& n) {
    const double r = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::invalid_argument, "direction must be a non-zero finite vector");
    return {n[0] / r, n[1] / r, n[2] / r};
}

// Top eigenvector with the largest-magnitude entry made real and positive.
Vector top_eigenvector(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Vector v = es.eigenvectors().col(m.rows() - 1);
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    return v * (std::abs(v(k)) / v(k));
}

Vector spin_half_up(const std::array<double, 3>& n) {
    const auto u = unit(n);
    return top_eigenvector(pauli_along(u[0], u[1], u[2]).matrix());
}

double grid_mean(const Grid1D& g, const std::vector<double>& d) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        m0 += d[i];
        m1 += d[i] * g.at(i);
    }
    return m0 > 0.0 ? m1 / m0 : 0.0;
}

std::vector<double> normalized(std::vector<double> d, double dx) {
    double s = 0.0;
    for (double v : d) s += v;
    s *= dx;
    if (s > 0.0)
        for (double& v : d) v /= s;
    return d;
}

// Momentum-space amplitudes of a position-space pointer state.
WaveFunction1D momentum_of(const WaveFunction1D& pointer_state) {
    if (pointer_state.representation != Representation::position)
        throw Error(ErrorCode::invalid_argument, "pointer state must be given in position space");
    return fourier_pair(pointer_state);
}

WaveFunction1D back_to_position(const WaveFunction1D& mom, Vector amps) {
    WaveFunction1D w(mom.grid, std::move(amps), Representation::momentum);
    w.conjugate_min = mom.conjugate_min;
    return fourier_pair(w);
}

}  // namespace

LargeSpin::LargeSpin(int spin_n) : n_(spin_n) {
    if (spin_n < 1) throw Error(ErrorCode::invalid_argument, "spin N must be a positive integer");
    if (spin_n > 500) throw Error(ErrorCode::resource, "spin N above 500 is not supported");
    const Eigen::Index d = 2 * spin_n + 1;
    Matrix sp = Matrix::Zero(d, d), z = Matrix::Zero(d, d);
    // basis index k <-> m = N - k
    for (Eigen::Index k = 0; k < d; ++k) {
        const double m = static_cast<double>(spin_n - k);
        z(k, k) = m;
        if (k > 0) sp(k - 1, k) = std::sqrt(static_cast<double>(spin_n) * (spin_n + 1) - m * (m + 1.0));
    }
    const Matrix sm = sp.adjoint();
    sx_ = DenseOperator((sp + sm) / 2.0, true);
    sy_ = DenseOperator((sp - sm) / Complex(0.0, 2.0), true);
    sz_ = DenseOperator(z, true);
}

DenseOperator LargeSpin::along(const std::array<double, 3>& n) const {
    return DenseOperator(n[0] * sx_.matrix() + n[1] * sy_.matrix() + n[2] * sz_.matrix(), true);
}

Vector LargeSpin::top_state(const std::array<double, 3>& n) const { return top_eigenvector(along(unit(n)).matrix()); }

void AdiabaticSchedule::validate() const {
    if (!(total_time > 0.0) || !std::isfinite(total_time)) throw Error(ErrorCode::invalid_argument, "total time must be positive");
    if (!(ramp_fraction > 0.0 && ramp_fraction < 0.5)) throw Error(ErrorCode::invalid_argument, "ramp fraction must lie in (0, 0.5)");
    if (steps < 100) throw Error(ErrorCode::invalid_argument, "at least 100 time steps are required");
}

double AdiabaticSchedule::g(double t) const {
    const double tr = ramp_fraction * total_time;
    const double g0 = plateau();
    if (t <= 0.0 || t >= total_time) return 0.0;
    if (t < tr) return g0 * 0.5 * (1.0 - std::cos(std::numbers::pi * t / tr));
    if (t > total_time - tr) return g0 * 0.5 * (1.0 - std::cos(std::numbers::pi * (total_time - t) / tr));
    return g0;
}

AdiabaticResult adiabatic_protective_measurement(const DenseOperator& h0, const DenseOperator& obs,
                                                 const StateVector& initial, const AdiabaticSchedule& schedule,
                                                 const GaussianPointer& pointer) {
    const Grid1D& g = pointer.grid();
    Vector amps(static_cast<Eigen::Index>(g.points()));
    for (std::size_t j = 0; j < g.points(); ++j) amps(static_cast<Eigen::Index>(j)) = pointer.amplitude(g.at(j));
    return adiabatic_protective_measurement(h0, obs, initial, schedule, WaveFunction1D(g, amps));
}

AdiabaticResult adiabatic_protective_measurement(const DenseOperator& h0, const DenseOperator& obs,
                                                 const StateVector& initial, const AdiabaticSchedule& schedule,
                                                 const WaveFunction1D& pointer_state) {
    schedule.validate();
    if (h0.dim() != obs.dim() || h0.dim() != initial.dim())
        throw Error(ErrorCode::dimension_mismatch, "H0, observable and state must share a dimension");
    if (!is_hermitian(h0.matrix())) throw Error(ErrorCode::not_hermitian, "H0 must be Hermitian");
    if (!is_hermitian(obs.matrix())) throw Error(ErrorCode::not_hermitian, "observable must be Hermitian");

    const Eigen::Index d = h0.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h0.matrix());
    const Eigen::VectorXd energies = es.eigenvalues();
    const double radius = std::max(1.0, energies.cwiseAbs().maxCoeff());
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < d; ++i) gap = std::min(gap, energies(i) - energies(i - 1));
    if (d > 1 && gap <= 1e-9 * radius) throw Error(ErrorCode::invalid_argument, "H0 has a degenerate spectrum; the state is not protected");

    AdiabaticResult res;
    res.eigenbasis = es.eigenvectors();
    res.gap = d > 1 ? gap : 0.0;
    const Matrix& v = res.eigenbasis;
    const Vector psi0 = initial.normalized().amplitudes();

    const auto mom = momentum_of(pointer_state);
    const std::size_t np = mom.grid.points();
    const double amp_max = mom.amplitudes.cwiseAbs().maxCoeff();

    const Matrix& H0 = h0.matrix();
    const Matrix& A = obs.matrix();
    const double T = schedule.total_time;
    const double tr = schedule.ramp_fraction * T;
    const int ramp_steps = std::max(50, schedule.steps / 2);
    const double h = tr / ramp_steps;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const Complex comm_coef(0.0, -std::sqrt(3.0) / 12.0 * h * h);

    Matrix branch_p = Matrix::Zero(d, static_cast<Eigen::Index>(np));  // rows: eigenbasis
    Eigen::VectorXd leak = Eigen::VectorXd::Zero(d);
    double leak_weight = 0.0;

    for (std::size_t k = 0; k < np; ++k) {
        const Complex phi = mom.amplitudes(static_cast<Eigen::Index>(k));
        if (std::abs(phi) <= 1e-13 * amp_max) continue;
        const double p = mom.grid.at(k);
        Matrix U = Matrix::Identity(d, d);
        auto ramp = [&](double t_start) {
            for (int s = 0; s < ramp_steps; ++s) {
                const double t = t_start + h * s;
                const Matrix H1 = H0 + schedule.g(t + c1 * h) * p * A;
                const Matrix H2 = H0 + schedule.g(t + c2 * h) * p * A;
                const Matrix K = 0.5 * h * (H1 + H2) + comm_coef * (H2 * H1 - H1 * H2);
                U = expm_hermitian(K) * U;
            }
        };
        ramp(0.0);
        U = expm_hermitian((H0 + schedule.plateau() * p * A) * (T - 2.0 * tr)) * U;
        ramp(T - tr);

        const Matrix Ue = v.adjoint() * U * v;
        const double w = std::norm(phi);
        for (Eigen::Index i = 0; i < d; ++i) leak(i) += w * (1.0 - std::norm(Ue(i, i)));
        leak_weight += w;
        branch_p.col(static_cast<Eigen::Index>(k)) = (v.adjoint() * (U * psi0)) * phi;
    }
    res.leakage = leak_weight > 0.0 ? leak.maxCoeff() / leak_weight : 0.0;
    res.adiabaticity_flag = res.leakage > 0.01;

    const double pointer_norm2 = pointer_state.amplitudes.squaredNorm();
    const double mean0 = grid_mean(pointer_state.grid, pointer_state.density());

    std::vector<double> q_total, p_total(np, 0.0);
    Grid1D q_grid;
    for (Eigen::Index i = 0; i < d; ++i) {
        ProtectiveBranch b;
        b.energy = energies(i);
        b.expectation = (v.col(i).adjoint() * A * v.col(i))(0, 0).real();
        b.pointer = back_to_position(mom, branch_p.row(i).transpose());
        const auto dens = b.pointer.density();
        double mass = 0.0;
        for (double x : dens) mass += x;
        b.weight = mass / pointer_norm2;
        b.shift = mass > 0.0 ? grid_mean(b.pointer.grid, dens) - mean0 : 0.0;
        if (q_total.empty()) {
            q_total.assign(dens.size(), 0.0);
            q_grid = b.pointer.grid;
        }
        for (std::size_t j = 0; j < dens.size(); ++j) q_total[j] += dens[j];
        for (std::size_t k = 0; k < np; ++k) p_total[k] += std::norm(branch_p(i, static_cast<Eigen::Index>(k)));
        res.outcome_probabilities.push_back(b.weight);
        res.branches.push_back(std::move(b));
    }

    res.pointer.q_grid = q_grid;
    res.pointer.q_prob = normalized(q_total, q_grid.spacing());
    res.pointer.mean = grid_mean(q_grid, q_total);
    res.pointer.peak = interpolated_peak(q_grid, res.pointer.q_prob);
    res.pointer.p_grid = mom.grid;
    res.pointer.p_prob = normalized(p_total, mom.grid.spacing());
    res.pointer.p_mean = grid_mean(mom.grid, p_total);
    res.pointer_shift = res.pointer.mean - mean0;
    return res;
}

EffectiveHamiltonian weak_value_substituted_hamiltonian(const TwoStateVector& protector, double lambda) {
    const Eigen::Index dim = protector.dim();
    if (dim < 3 || dim % 2 == 0) throw Error(ErrorCode::dimension_mismatch, "protector must be a spin of dimension 2N+1");
    const LargeSpin s(static_cast<int>((dim - 1) / 2));
    EffectiveHamiltonian e;
    e.spin_weak.wx = weak_value(protector, s.sx()).value;
    e.spin_weak.wy = weak_value(protector, s.sy()).value;
    e.spin_weak.wz = weak_value(protector, s.sz()).value;
    const Matrix h = -lambda * (e.spin_weak.wx * pauli_x().matrix() + e.spin_weak.wy * pauli_y().matrix() +
                                e.spin_weak.wz * pauli_z().matrix());
    e.h_eff = DenseOperator(h);
    return e;
}

ProtectedMeasurement protected_two_state_measurement(const std::array<double, 3>& alpha,
                                                     const std::array<double, 3>& beta, const DenseOperator& obs,
                                                     int spin_n, double lambda, double p0, std::size_t points) {
    if (obs.dim() != 2) throw Error(ErrorCode::dimension_mismatch, "target observable must act on a spin 1/2");
    if (!is_hermitian(obs.matrix())) throw Error(ErrorCode::not_hermitian, "target observable must be Hermitian");
    if (!(p0 > 0.0) || !std::isfinite(p0)) throw Error(ErrorCode::invalid_argument, "momentum scale P0 must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::invalid_argument, "lambda must be non-negative");
    const LargeSpin s(spin_n);

    ProtectedMeasurement out;
    const Vector up_a = spin_half_up(alpha), up_b = spin_half_up(beta);
    out.target_weak = weak_value(TwoStateVector::from_kets(up_b, up_a), obs).value;
    out.lambda_n_over_p0 = lambda * spin_n / p0;

    const Vector pre = tensor_product(s.top_state(alpha), up_a);
    const Vector post = tensor_product(s.top_state(beta), up_b);
    const Matrix i_s = Matrix::Identity(s.dim(), s.dim());
    const Matrix h_prot = -lambda * (tensor_product(s.sx().matrix(), pauli_x().matrix()) +
                                     tensor_product(s.sy().matrix(), pauli_y().matrix()) +
                                     tensor_product(s.sz().matrix(), pauli_z().matrix()));
    const Matrix coupling = tensor_product(i_s, obs.matrix());

    const double delta = 1.0 / p0;
    const auto sd = hermitian_eigendecomposition(obs);
    const double reach = std::max(std::abs(out.target_weak.real()), sd.spectral_radius()) + 1.0;
    const GaussianPointer pointer = GaussianPointer::for_range(delta, -reach, reach, points);
    const Grid1D& g = pointer.grid();
    Vector q_amps(static_cast<Eigen::Index>(g.points()));
    for (std::size_t j = 0; j < g.points(); ++j) q_amps(static_cast<Eigen::Index>(j)) = pointer.amplitude(g.at(j));
    const auto mom = fourier_pair(WaveFunction1D(g, q_amps));
    const double amp_max = mom.amplitudes.cwiseAbs().maxCoeff();

    Vector out_p = Vector::Zero(static_cast<Eigen::Index>(mom.grid.points()));
    for (std::size_t k = 0; k < mom.grid.points(); ++k) {
        const Complex phi = mom.amplitudes(static_cast<Eigen::Index>(k));
        if (std::abs(phi) <= 1e-13 * amp_max) continue;
        const Matrix u = expm_hermitian(h_prot + mom.grid.at(k) * coupling);  // unit duration
        out_p(static_cast<Eigen::Index>(k)) = post.dot(u * pre) * phi;
    }
    const auto q = back_to_position(mom, out_p);
    out.postselection_amplitude = std::sqrt(q.amplitudes.squaredNorm() / q_amps.squaredNorm());
    if (!(out.postselection_amplitude >= 1e-20))
        throw Error(ErrorCode::numerical, "post-selection amplitude below 1e-20");
    out.pointer = summarize(q);
    out.shift = out.pointer.mean;
    out.error = out.shift - out.target_weak.real();
    return out;
}

ModelSpinProtection model_spin_protection(const StateVector& pre, const StateVector& post, int spin_n, double lambda) {
    if (pre.dim() != post.dim()) throw Error(ErrorCode::dimension_mismatch, "pre- and post-selected states differ in dimension");
    if (pre.dim() < 2) throw Error(ErrorCode::invalid_argument, "model spin needs a system of dimension at least 2");
    const Vector p1 = pre.normalized().amplitudes();
    const Vector p2 = post.normalized().amplitudes();
    ModelSpinProtection m;
    m.a = p1.dot(p2);
    if (std::abs(m.a) < kOverlapEpsilon) throw Error(ErrorCode::numerical, "orthogonal pre- and post-selected states cannot be protected");
    Vector r = p2 - m.a * p1;
    double b = r.norm();
    if (b > 1e-14) {
        m.psi_perp = r / b;
    } else {
        // Any unit vector orthogonal to Psi1 completes the model spin.
        b = 0.0;
        for (Eigen::Index k = 0; k < p1.size(); ++k) {
            Vector e = Vector::Unit(p1.size(), k);
            e -= p1.dot(e) * p1;
            if (e.norm() > 0.5) {
                m.psi_perp = e.normalized();
                break;
            }
        }
    }
    m.b = Complex(b, 0.0);
    const double nrm = std::norm(m.a) + std::norm(m.b);
    const Complex ab = std::conj(m.a) * m.b / nrm;
    m.chi = {2.0 * ab.real(), 2.0 * ab.imag(), (std::norm(m.a) - std::norm(m.b)) / nrm};

    const Vector& up = p1;
    const Vector& dn = m.psi_perp;
    const Matrix ud = up * dn.adjoint(), du = dn * up.adjoint();
    m.sigma_x = DenseOperator(ud + du, true);
    m.sigma_y = DenseOperator(Complex(0.0, -1.0) * ud + Complex(0.0, 1.0) * du, true);
    m.sigma_z = DenseOperator(up * up.adjoint() - dn * dn.adjoint(), true);

    const LargeSpin s(spin_n);
    m.protector = TwoStateVector::from_kets(s.top_state(m.chi), s.top_state({0.0, 0.0, 1.0}));
    m.h_prot = DenseOperator(-lambda * (tensor_product(s.sx().matrix(), m.sigma_x.matrix()) +
                                        tensor_product(s.sy().matrix(), m.sigma_y.matrix()) +
                                        tensor_product(s.sz().matrix(), m.sigma_z.matrix())),
                             true);
    auto& e = m.effective;
    e.spin_weak.wx = weak_value(m.protector, s.sx()).value;
    e.spin_weak.wy = weak_value(m.protector, s.sy()).value;
    e.spin_weak.wz = weak_value(m.protector, s.sz()).value;
    e.h_eff = DenseOperator(-lambda * (e.spin_weak.wx * m.sigma_x.matrix() + e.spin_weak.wy * m.sigma_y.matrix() +
                                       e.spin_weak.wz * m.sigma_z.matrix()));
    return m;
}

}  // namespace tsvf
