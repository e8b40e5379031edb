#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsvf/protective.hpp"

using namespace tsvf;

TEST_SUITE("protective") {

TEST_CASE("large spin operators obey [Sx, Sy] = i Sz and S^2 = N(N+1)") {
    for (int n : {1, 3, 10}) {
        const LargeSpin s(n);
        const Matrix& x = s.sx().matrix();
        const Matrix& y = s.sy().matrix();
        const Matrix& z = s.sz().matrix();
        const Complex i(0, 1);
        CHECK(max_abs(x * y - y * x - i * z) <= 1e-12 * n);
        CHECK(max_abs(y * z - z * y - i * x) <= 1e-12 * n);
        const Matrix casimir = x * x + y * y + z * z;
        CHECK(max_abs(casimir - Matrix::Identity(s.dim(), s.dim()) * double(n * (n + 1))) <= 1e-10 * n * n);
    }
    CHECK_THROWS_AS(LargeSpin(0), Error);
}

TEST_CASE("top state is the S_n = N eigenvector") {
    const LargeSpin s(6);
    for (const std::array<double, 3>& n : {std::array<double, 3>{1, 0, 0}, {0, 1, 0}, {0.3, -0.4, 0.866}}) {
        const Vector v = s.top_state(n);
        const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        const Matrix a = s.along({n[0] / len, n[1] / len, n[2] / len}).matrix();
        CHECK((a * v - 6.0 * v).norm() <= 1e-10);
        CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("coupling schedule integrates to one") {
    AdiabaticSchedule s;
    s.total_time = 20.0;
    const int m = 200000;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += s.g((k + 0.5) * s.total_time / m);
    CHECK(sum * s.total_time / m == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.g(-1.0) == 0.0);
    CHECK(s.g(21.0) == 0.0);
    s.steps = 10;
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("adiabatic protective measurement converges to the expectation value") {
    const DenseOperator h0 = pauli_z();
    const DenseOperator a(pauli_z().matrix() + 0.3 * pauli_x().matrix(), true);
    const StateVector init(spin_up('z'));
    const GaussianPointer ptr = GaussianPointer::for_range(5.0, -1.5, 1.5);
    double prev = 0.0;
    for (double T : {10.0, 20.0, 40.0, 80.0}) {
        AdiabaticSchedule s;
        s.total_time = T;
        const AdiabaticResult r = adiabatic_protective_measurement(h0, a, init, s, ptr);
        const double err = std::abs(r.pointer_shift - 1.0);
        if (prev > 0.0) CHECK_MESSAGE(err / prev <= 0.75, "T = " << T);
        prev = err;
        CHECK_FALSE(r.adiabaticity_flag);
        CHECK(r.outcome_probabilities[0] + r.outcome_probabilities[1] == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("a superposition of energy eigenstates gives branch shifts, not an average") {
    const DenseOperator h0 = pauli_z();
    const DenseOperator a(pauli_z().matrix() + 0.3 * pauli_x().matrix(), true);
    double prev = 1.0;
    for (double T : {40.0, 80.0}) {
        AdiabaticSchedule s;
        s.total_time = T;
        const AdiabaticResult r = adiabatic_protective_measurement(h0, a, StateVector(spin_up('x')), s, GaussianPointer::for_range(0.2, -1.5, 1.5));
        REQUIRE(r.branches.size() == 2);
        double worst = 0.0;
        for (const auto& b : r.branches) {
            CHECK(b.weight == doctest::Approx(0.5).epsilon(1e-3));
            worst = std::max(worst, std::abs(b.shift - b.expectation));
        }
        CHECK_MESSAGE(worst < prev, "T = " << T);
        CHECK(worst <= 5e-3);
        prev = worst;
    }
}

TEST_CASE("degenerate protecting Hamiltonian is refused") {
    AdiabaticSchedule s;
    CHECK_THROWS_AS(adiabatic_protective_measurement(DenseOperator::identity(2), pauli_x(), StateVector(spin_up('z')), s,
                                                     GaussianPointer::for_range(1.0, -1, 1)),
                    Error);
}

TEST_CASE("weak-value substituted Hamiltonian has |alpha> and <beta| as eigenvectors") {
    const int n = 10;
    const double lambda = 2.0;
    const LargeSpin s(n);
    const std::array<double, 3> alpha{1, 0, 0}, beta{0, 1, 0};
    const TwoStateVector prot = TwoStateVector::from_kets(s.top_state(beta), s.top_state(alpha));
    const EffectiveHamiltonian eff = weak_value_substituted_hamiltonian(prot, lambda);
    const Matrix& h = eff.h_eff.matrix();
    CHECK((h * spin_up('x') + lambda * n * spin_up('x')).norm() <= 1e-9);
    CHECK((spin_up('y').adjoint() * h + lambda * n * spin_up('y').adjoint()).norm() <= 1e-9);
    // S_w is parallel to the sum of the two unit vectors' weak components.
    CHECK(std::abs(eff.spin_weak.wx - double(n)) <= 1e-9);
    CHECK(std::abs(eff.spin_weak.wy - double(n)) <= 1e-9);
}

TEST_CASE("two-state protection holds the pointer at the weak value; no protection does not") {
    const std::array<double, 3> alpha{1, 0, 0}, beta{0, 1, 0};
    const ProtectedMeasurement on = protected_two_state_measurement(alpha, beta, sigma_xi(), 10, 5.0, 1.0);
    const ProtectedMeasurement off = protected_two_state_measurement(alpha, beta, sigma_xi(), 10, 0.0, 1.0);
    CHECK(on.lambda_n_over_p0 == doctest::Approx(50.0));
    CHECK(std::abs(on.target_weak - std::numbers::sqrt2) <= 1e-12);
    CHECK(std::abs(on.error) <= 0.02 * std::numbers::sqrt2);
    CHECK(std::abs(off.error) > 0.02 * std::numbers::sqrt2);
}

TEST_CASE("model spin built from two non-orthogonal states") {
    const ModelSpinProtection m = model_spin_protection(StateVector(spin_up('x')), StateVector(spin_up('y')), 5, 1.0);
    // sigma~ operators act as Pauli matrices on span{Psi1, Psi_perp}.
    const Complex i(0, 1);
    const Matrix& x = m.sigma_x.matrix();
    const Matrix& y = m.sigma_y.matrix();
    const Matrix& z = m.sigma_z.matrix();
    CHECK(max_abs(x * y - y * x - 2.0 * i * z) <= 1e-12);
    CHECK((z * spin_up('x') - spin_up('x')).norm() <= 1e-12);
    CHECK(std::abs(std::norm(m.a) + std::norm(m.b) - 1.0) <= 1e-12);
    CHECK(m.h_prot.dim() == 11 * 2);
}

}  // TEST_SUITE
