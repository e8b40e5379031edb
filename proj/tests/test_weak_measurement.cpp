#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tsvf/pointer.hpp"
#include "tsvf/weak_measurement.hpp"
#include "test_support.hpp"

using namespace tsvf;

namespace {

GeneralizedTwoStateVector cone_state(double chi) {
    return GeneralizedTwoStateVector({{Complex(std::cos(chi), 0), CoStateVector::from_ket(spin_up('z')), StateVector(spin_up('z'))},
                                      {Complex(-std::sin(chi), 0), CoStateVector::from_ket(spin_down('z')), StateVector(spin_down('z'))}});
}

}  // namespace

TEST_SUITE("weak_measurement") {

TEST_CASE("weak value of sigma_xi between up_x and up_y is sqrt 2") {
    const WeakValue w = weak_value(TwoStateVector::from_kets(spin_up('y'), spin_up('x')), sigma_xi());
    CHECK(std::abs(w.value - std::numbers::sqrt2) <= 1e-12);
    CHECK(w.overlap_magnitude == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("weak values are conjugated by interchange (1000 random descriptions)") {
    std::mt19937_64 rng(31);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int d = 2 + t % 7;
        const TwoStateVector tsv = TwoStateVector::from_kets(test::random_state(d, rng), test::random_state(d, rng));
        const DenseOperator obs = test::random_hermitian(d, rng);
        const Complex a = weak_value(tsv, obs).value;
        const Complex b = weak_value(interchange(tsv), obs).value;
        worst = std::max(worst, std::abs(a - std::conj(b)) / std::max(1.0, std::abs(a)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("weak values are linear in the observable") {
    std::mt19937_64 rng(6);
    const TwoStateVector tsv = TwoStateVector::from_kets(test::random_state(4, rng), test::random_state(4, rng));
    const DenseOperator a = test::random_hermitian(4, rng), b = test::random_hermitian(4, rng);
    const Complex lhs = weak_value(tsv, DenseOperator(a.matrix() * 2.0 - b.matrix(), true)).value;
    const Complex rhs = 2.0 * weak_value(tsv, a).value - weak_value(tsv, b).value;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("nearly orthogonal descriptions are refused") {
    const Vector phi = (spin_down('z') + 1e-14 * spin_up('z')).normalized();
    try {
        weak_value(TwoStateVector::from_kets(phi, spin_up('z')), pauli_x());
        FAIL("expected a numerical error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::numerical);
    }
}

TEST_CASE("a certain outcome fixes the weak value (theorem i)") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        const int d = 2 + t % 5;
        const DenseOperator obs = test::random_degenerate(d, rng);
        const SpectralDecomposition sd = hermitian_eigendecomposition(obs);
        // Pre-select inside one eigenspace: the outcome is certain.
        const Vector psi = (sd.projectors[0].matrix() * test::random_state(d, rng)).normalized();
        const Vector phi = test::random_state(d, rng);
        const TwoStateVector tsv = TwoStateVector::from_kets(phi, psi);
        const TheoremReport r = theorem_i_check(tsv, obs);
        CHECK(r.status == TheoremStatus::pass);
        CHECK(std::abs(r.weak - sd.eigenvalues[0]) <= 1e-9 * std::max(1.0, sd.spectral_radius()));
    }
}

TEST_CASE("for two-valued observables an eigenvalue weak value implies certainty (theorem ii)") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        const Vector psi = test::random_state(2, rng);
        // Post-selecting on up_z makes (P)_w = 1 for P = |up_z><up_z|.
        const Vector phi = spin_up('z');
        const TwoStateVector tsv = TwoStateVector::from_kets(phi, psi);
        const DenseOperator p(spin_up('z') * spin_up('z').adjoint(), true);
        const TheoremReport r = theorem_ii_check(tsv, p);
        CHECK(r.status == TheoremStatus::pass);
        CHECK(r.certain_value.value() == doctest::Approx(1.0));
    }
    // Three boxes: (P3)_w = -1 is not an eigenvalue of P3.
    Vector psi(3), phi(3);
    psi << 1, 1, 1;
    phi << 1, 1, -1;
    Matrix p3 = Matrix::Zero(3, 3);
    p3(2, 2) = 1;
    const TheoremReport na = theorem_ii_check(TwoStateVector::from_kets(phi, psi), DenseOperator(p3, true));
    CHECK(na.status == TheoremStatus::not_applicable);
    CHECK_THROWS_AS(theorem_ii_check(TwoStateVector::from_kets(spin_up('x'), spin_up('z')), DenseOperator(Matrix::Identity(2, 2) * 3.0, true)),
                    Error);
}

TEST_CASE("weak vector of a generalized state") {
    const double chi = std::numbers::pi / 8;
    const WeakVector w = weak_vector(cone_state(chi));
    const double t = std::tan(chi);
    CHECK(std::abs(w.wz - (1 + t) / (1 - t)) <= 1e-12);
    CHECK(std::abs(w.wx) <= 1e-12);
    CHECK(std::abs(w.wy) <= 1e-12);
}

TEST_CASE("certainty cone satisfies cos(theta) = (1 - tan chi)/(1 + tan chi)") {
    for (double chi : {std::numbers::pi / 16, std::numbers::pi / 8, 3 * std::numbers::pi / 16}) {
        const ConeResult c = certainty_cone(cone_state(chi), 48);
        REQUIRE(c.kind == ConeKind::cone);
        CHECK(c.rejected == 0);
        REQUIRE(c.directions.size() == 48);
        const double t = std::tan(chi);
        for (const Direction& d : c.directions) {
            CHECK(d.probability >= 1.0 - 1e-10);
            CHECK(std::abs(std::cos(d.theta) - (1 - t) / (1 + t)) <= 1e-10);
        }
        CHECK(*c.half_angle == doctest::Approx(2 * std::atan(std::sqrt(t))).epsilon(1e-12));
    }
}

TEST_CASE("certainty cone degenerate and divergent cases") {
    const ConeResult z = certainty_cone(cone_state(0.0), 16);
    CHECK(z.kind == ConeKind::single_direction);
    REQUIRE(z.directions.size() == 1);
    CHECK(std::abs(z.directions[0].theta) <= 1e-12);
    CHECK(certainty_cone(cone_state(std::numbers::pi / 4), 16).kind == ConeKind::divergent);
    const GeneralizedTwoStateVector weakish = GeneralizedTwoStateVector::single(TwoStateVector::from_kets(spin_up('z'), spin_up('z')));
    CHECK(certainty_cone(weakish, 16).kind == ConeKind::single_direction);
    // |w| < 1: no direction is certain.
    const GeneralizedTwoStateVector mixed({{Complex(1, 0), CoStateVector::from_ket(spin_up('z')), StateVector(spin_up('z'))},
                                           {Complex(1, 0), CoStateVector::from_ket(spin_down('z')), StateVector(spin_down('z'))}});
    CHECK(certainty_cone(mixed, 16).kind == ConeKind::empty);
    CHECK_THROWS_AS(certainty_cone(cone_state(0.1), 4), Error);
}

TEST_CASE("complex weak vector gives at most two certain directions") {
    const GeneralizedTwoStateVector g = GeneralizedTwoStateVector::single(TwoStateVector::from_kets(spin_up('y'), spin_up('x')));
    const ConeResult c = certainty_cone(g, 16);
    CHECK(c.directions.size() <= 2);
    for (const Direction& d : c.directions) CHECK(d.probability >= 1.0 - 1e-10);
    // Both up_x and up_y are certain for <up_y||up_x>.
    CHECK(c.directions.size() == 2);
}

}  // TEST_SUITE
