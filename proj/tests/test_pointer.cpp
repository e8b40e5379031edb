#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsvf/pointer.hpp"

using namespace tsvf;

namespace {

const TwoStateVector& xi_tsv() {
    static const TwoStateVector t = TwoStateVector::from_kets(spin_up('y'), spin_up('x'));
    return t;
}

double integral(const Grid1D& g, const std::vector<double>& y) {
    double s = 0.0;
    for (double v : y) s += v;
    return s * g.spacing();
}

}  // namespace

TEST_SUITE("pointer") {

TEST_CASE("Gaussian pointer is normalized and validates coverage") {
    const GaussianPointer p = GaussianPointer::for_range(0.5, -1.0, 1.0);
    double s = 0.0;
    for (std::size_t j = 0; j < p.grid().points(); ++j) s += std::norm(p.amplitude(p.grid().at(j)));
    CHECK(s * p.grid().spacing() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(p.require_covers(-1.0, 1.0));
    CHECK_THROWS_AS(p.require_covers(-10.0, 1.0), Error);
    CHECK_THROWS_AS(GaussianPointer(0.0, Grid1D(-1, 1, 64)), Error);
}

TEST_CASE("pre-selected pointer: eigenvalue peaks for a sharp pointer, expectation for a wide one") {
    const StateVector pre(spin_up('x'));
    const PointerResult sharp = pointer_distribution_preselected(pre, sigma_xi(), GaussianPointer::for_range(0.1, -1, 1));
    CHECK(integral(sharp.q_grid, sharp.q_prob) == doctest::Approx(1.0).epsilon(1e-10));
    const auto maxima = local_maxima(sharp.q_prob, 0.01);
    REQUIRE(maxima.size() == 2);
    CHECK(std::abs(sharp.q_grid.at(maxima[0]) + 1.0) <= 0.01);
    CHECK(std::abs(sharp.q_grid.at(maxima[1]) - 1.0) <= 0.01);

    const PointerResult wide = pointer_distribution_preselected(pre, sigma_xi(), GaussianPointer::for_range(10.0, -1, 1));
    CHECK(std::abs(wide.mean - 1 / std::numbers::sqrt2) <= 0.02);
}

TEST_CASE("post-selected pointer peaks at the weak value when the pointer is weak") {
    const PointerResult r = pointer_distribution_postselected(xi_tsv(), sigma_xi(), GaussianPointer::for_range(10.0, -1, 1));
    CHECK(std::abs(r.peak - std::numbers::sqrt2) <= 0.05);
    CHECK(integral(r.q_grid, r.q_prob) == doctest::Approx(1.0).epsilon(1e-10));
    // A sharp pointer only shows the eigenvalues.
    const PointerResult s = pointer_distribution_postselected(xi_tsv(), sigma_xi(), GaussianPointer::for_range(0.1, -1, 1));
    CHECK(std::abs(std::abs(s.peak) - 1.0) <= 0.01);
}

TEST_CASE("joint state rows are shifted copies of the pointer") {
    const GaussianPointer p = GaussianPointer::for_range(0.3, -1, 1);
    const JointState j = joint_state_after_impulse(StateVector(spin_up('z')), pauli_z(), p);
    REQUIRE(j.amplitudes.rows() == 2);
    // |up_z> row carries G(Q - 1); the other row is empty.
    double worst = 0.0;
    for (std::size_t k = 0; k < p.grid().points(); ++k)
        worst = std::max(worst, std::abs(j.amplitudes(0, static_cast<Eigen::Index>(k)) - p.amplitude(p.grid().at(k) - 1.0)));
    CHECK(worst <= 1e-12);
    CHECK(j.amplitudes.row(1).norm() <= 1e-12);
}

TEST_CASE("momentum shift tracks the imaginary part of the weak value") {
    // Complex weak value: <up_y| sigma_z |up_x> / <up_y|up_x> = i.
    const TwoStateVector tsv = TwoStateVector::from_kets(spin_up('y'), spin_up('x'));
    const MomentumShift ms = momentum_shift_imaginary_part(tsv, pauli_z(), GaussianPointer::for_range(20.0, -1, 1, 8192));
    CHECK(ms.imag_weak == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ms.weak_regime);
    CHECK(ms.predicted == doctest::Approx(1.0 / 400.0).epsilon(1e-12));
    CHECK(ms.measured == doctest::Approx(ms.predicted).epsilon(0.01));
}

TEST_CASE("moment expansion residual shrinks with order and with pointer width") {
    const TwoStateVector& tsv = xi_tsv();
    const MomentResidual r5 = moment_expansion_residual(tsv, sigma_xi(), GaussianPointer::for_range(5.0, -1, 1), 4);
    const MomentResidual r20 = moment_expansion_residual(tsv, sigma_xi(), GaussianPointer::for_range(20.0, -1, 1), 4);
    CHECK(r20.residual < r5.residual);
    CHECK(r5.truncated_residual < r5.residual);
}

TEST_CASE("ensemble estimator is reproducible and scales like 1/sqrt(n)") {
    const StateVector pre(spin_up('x'));
    const GaussianPointer p = GaussianPointer::for_range(10.0, -1, 1);
    const EnsembleEstimate a = ensemble_mean_estimator(pre, sigma_xi(), p, 5000, 42);
    const EnsembleEstimate b = ensemble_mean_estimator(pre, sigma_xi(), p, 5000, 42);
    const EnsembleEstimate c = ensemble_mean_estimator(pre, sigma_xi(), p, 5000, 43);
    CHECK(a.mean == b.mean);
    CHECK(a.standard_error == b.standard_error);
    CHECK(a.mean != c.mean);
    // Width of the reading distribution: sqrt(Delta^2 / 2 + Var(sigma_xi)).
    const double sd = std::sqrt(50.0 + 0.5);
    CHECK(a.sample_std == doctest::Approx(sd).epsilon(0.03));
    CHECK(a.standard_error == doctest::Approx(a.sample_std / std::sqrt(5000.0)).epsilon(1e-12));
    CHECK(std::abs(a.mean - 1 / std::numbers::sqrt2) <= 4 * a.standard_error);
}

TEST_CASE("N-spin closed form matches the tensor construction") {
    for (int n : {1, 2, 3, 4, 6, 8}) {
        const GaussianPointer p = GaussianPointer::for_range(0.25, -1, 2, 4096);
        const PointerResult c = n_spin_pointer_closed_form(n, p);
        const PointerResult t = n_spin_pointer_tensor(n, p);
        double dev = 0.0;
        for (std::size_t j = 0; j < c.q_prob.size(); ++j) dev = std::max(dev, std::abs(c.q_prob[j] - t.q_prob[j]));
        CHECK_MESSAGE(dev <= 1e-10, "n = " << n);
    }
}

TEST_CASE("N-spin observable has the sqrt 2 weak value") {
    for (int n : {1, 3, 5}) CHECK(std::abs(weak_value(n_spin_description(n), n_spin_observable(n)).value - std::numbers::sqrt2) <= 1e-12);
}

TEST_CASE("a very sharp pointer shows the eigenvalue comb (n - 2k)/n") {
    const int n = 20;
    const PointerResult r = n_spin_pointer_closed_form(n, GaussianPointer::for_range(0.01, -1, 2, 16384));
    const auto maxima = local_maxima(r.q_prob, 1e-6);
    REQUIRE(maxima.size() >= 3);
    for (auto i : maxima) {
        const double q = r.q_grid.at(i);
        const double k = (n - q * n) / 2.0;
        CHECK(std::abs(k - std::round(k)) <= 0.02);
    }
}

TEST_CASE("shift superposition agrees between index and Fourier paths") {
    const Grid1D g(-20.0, 20.0, 4001);  // spacing 0.01
    Vector f(4001);
    for (std::size_t j = 0; j < 4001; ++j) f(static_cast<Eigen::Index>(j)) = std::exp(-0.5 * g.at(j) * g.at(j));
    const WaveFunction1D wf(g, f);
    const std::vector<Complex> w = {Complex(0.5, 0), Complex(-0.25, 0), Complex(1.0, 0)};
    const WaveFunction1D idx = shift_superposition(wf, w, {0.5, -1.0, 2.0});
    const WaveFunction1D fft = shift_superposition(wf, w, {0.5 + 1e-7, -1.0 + 1e-7, 2.0 + 1e-7});
    CHECK((idx.amplitudes - fft.amplitudes).cwiseAbs().maxCoeff() <= 1e-5);
    double worst = 0.0;
    for (std::size_t j = 0; j < 4001; ++j) {
        const double q = g.at(j);
        const double want = 0.5 * std::exp(-0.5 * (q - 0.5) * (q - 0.5)) - 0.25 * std::exp(-0.5 * (q + 1) * (q + 1)) +
                            std::exp(-0.5 * (q - 2) * (q - 2));
        worst = std::max(worst, std::abs(idx.amplitudes(static_cast<Eigen::Index>(j)) - want));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("local maxima and interpolated peak") {
    const std::vector<double> y = {0, 1, 0, 0.005, 0, 3, 2, 0};
    const auto m = local_maxima(y, 0.01);
    REQUIRE(m.size() == 2);
    CHECK(m[0] == 1);
    CHECK(m[1] == 5);
    const Grid1D g(0.0, 15.0, 16);
    std::vector<double> para(16);
    for (std::size_t j = 0; j < 16; ++j) para[j] = -std::pow(g.at(j) - 7.3, 2);
    CHECK(interpolated_peak(g, para) == doctest::Approx(7.3).epsilon(1e-12));
}

}  // TEST_SUITE
