#pragma once

#include <vector>

#include "tsvf/pointer.hpp"

namespace tsvf {

// U(x) = -depth for |x - center| < half_width, 0 elsewhere. Units hbar = m = 1.
struct SquareWell {
    double depth = 5.0;
    double half_width = 1.0;
    double center = 0.0;

    double potential(double x) const;
};

// Dirichlet lattice H = K + U with K = -(1/2) second difference.
struct LatticeGround {
    Grid1D grid;
    SquareWell well;
    std::vector<double> potential;
    double e0 = 0.0;                 // Rayleigh quotient of psi
    std::vector<long double> psi;    // unit norm, positive at the well centre
};

LatticeGround lattice_ground_state(const Grid1D& grid, const SquareWell& well);

// (K psi)_j evaluated with the same stencil as H.
long double kinetic_apply(const LatticeGround& g, std::size_t site);

struct KineticWeak {
    std::size_t site = 0;
    double coordinate = 0.0;
    double potential = 0.0;   // U at the post-selected site
    double k_w = 0.0;         // <x_f|K|E0> / <x_f|E0>
    double e0 = 0.0;
    double eigen_residual = 0.0;  // |(H psi)_f - E0 psi_f| / |psi_f|
};

// Post-selection at the lattice site nearest x_f. Sites inside the well are
// refused unless allow_inside is set.
KineticWeak kinetic_weak_value(const LatticeGround& g, double x_f, bool allow_inside = false);

// Even ground state of the continuum well.
double continuum_ground_energy(const SquareWell& well);

struct KineticPointer {
    PointerResult pointer;
    double window_weight = 0.0;  // fraction of sum |a_k|^2 whose kinetic eigenvalue lies inside the pointer window
};

// Pointer coupled to K, pre-selected in the ground state, post-selected at the
// given site. Kinetic eigenstates are the lattice sine modes.
KineticPointer kinetic_pointer(const LatticeGround& g, std::size_t site, double delta, std::size_t points = 4096);

}  // namespace tsvf
