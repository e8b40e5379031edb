#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsvf/lattice.hpp"

using namespace tsvf;

namespace {

const Grid1D kGrid(-15.9921875, 15.9921875, 2048);  // spacing 1/64, x = 2 on a site

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("kinetic weak value equals the ground energy where U = 0") {
    const LatticeGround g = lattice_ground_state(kGrid, SquareWell{});
    CHECK(g.e0 < 0.0);
    for (double x : {1.5, 2.0, 4.0, -3.0}) {
        const KineticWeak k = kinetic_weak_value(g, x);
        CHECK(k.potential == 0.0);
        CHECK_MESSAGE(std::abs(k.k_w - g.e0) <= 1e-10, "x = " << x);
        CHECK(k.eigen_residual <= 1e-9);
    }
}

TEST_CASE("inside the well the identity gives E0 - U") {
    const LatticeGround g = lattice_ground_state(kGrid, SquareWell{});
    CHECK_THROWS_AS(kinetic_weak_value(g, 0.5), Error);
    const KineticWeak k = kinetic_weak_value(g, 0.5, true);
    CHECK(k.potential == -5.0);
    CHECK(std::abs(k.k_w - (g.e0 + 5.0)) <= 1e-10);
    CHECK(k.k_w > 0.0);
}

TEST_CASE("lattice ground energy approaches the continuum value") {
    const SquareWell w;
    const double exact = continuum_ground_energy(w);
    const double coarse = lattice_ground_state(Grid1D(-15.9921875, 15.9921875, 1024), w).e0;
    const double fine = lattice_ground_state(kGrid, w).e0;
    CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
    CHECK(std::abs((fine - exact) / exact) < 1e-4);
}

TEST_CASE("deep well tends to the infinite-well level") {
    SquareWell deep;
    deep.depth = 400.0;
    const double e = continuum_ground_energy(deep);
    const double infinite = -deep.depth + std::numbers::pi * std::numbers::pi / 8.0;
    CHECK(e < infinite);
    CHECK(e == doctest::Approx(infinite).epsilon(0.01));
}

TEST_CASE("no bound state is reported as an error") {
    SquareWell none;
    none.depth = 0.0;
    CHECK_THROWS_AS(lattice_ground_state(kGrid, none), Error);
    CHECK_THROWS_AS(continuum_ground_energy(none), Error);
}

TEST_CASE("pointer coupled to the kinetic energy moves to negative readings") {
    const LatticeGround g = lattice_ground_state(kGrid, SquareWell{});
    const KineticWeak k = kinetic_weak_value(g, 2.0);
    const KineticPointer p = kinetic_pointer(g, k.site, 10.0);
    CHECK(p.pointer.mean < 0.0);
    CHECK(p.window_weight > 0.999);
    CHECK_THROWS_AS(kinetic_pointer(g, kGrid.points(), 10.0), Error);
}

}  // TEST_SUITE
