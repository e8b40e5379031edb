#include "tsvf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

namespace tsvf {

double SquareWell::potential(double x) const { return std::abs(x - center) < half_width ? -depth : 0.0; }

namespace {

// Solves (H - shift) x = b for the tridiagonal H; H - shift is positive
// definite here, so no pivoting is needed.
std::vector<long double> solve_shifted(const std::vector<long double>& diag, long double off, long double shift,
                                       const std::vector<long double>& b) {
    const std::size_t n = diag.size();
    std::vector<long double> c(n), d(n), x(n);
    long double den = diag[0] - shift;
    c[0] = off / den;
    d[0] = b[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
        den = diag[i] - shift - off * c[i - 1];
        c[i] = off / den;
        d[i] = (b[i] - off * d[i - 1]) / den;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

long double hop(const Grid1D& g) {
    const long double dx = g.spacing();
    return -0.5L / (dx * dx);
}

}  // namespace

LatticeGround lattice_ground_state(const Grid1D& grid, const SquareWell& well) {
    if (!(well.depth >= 0.0) || !(well.half_width > 0.0)) throw Error(ErrorCode::invalid_argument, "well depth must be >= 0 and width > 0");
    const std::size_t n = grid.points();
    LatticeGround out;
    out.grid = grid;
    out.well = well;
    const long double off = hop(grid);
    std::vector<long double> diag(n);
    Eigen::VectorXd dd(static_cast<Eigen::Index>(n)), sd = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n - 1), static_cast<double>(off));
    for (std::size_t j = 0; j < n; ++j) {
        const double u = well.potential(grid.at(j));
        out.potential.push_back(u);
        diag[j] = -2.0L * off + u;
        dd(static_cast<Eigen::Index>(j)) = static_cast<double>(diag[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(dd, sd, Eigen::EigenvaluesOnly);
    const double lowest = es.eigenvalues()(0);
    if (!(lowest < 0.0)) throw Error(ErrorCode::numerical, "the well has no bound state on this lattice");

    // Inverse iteration just below the lowest eigenvalue.
    const long double shift = lowest - 1e-7 * std::max(1.0, std::abs(lowest));
    std::vector<long double> v(n, 1.0L);
    for (int it = 0; it < 4; ++it) {
        v = solve_shifted(diag, off, shift, v);
        long double s = 0.0L;
        for (auto x : v) s += x * x;
        s = std::sqrt(s);
        for (auto& x : v) x /= s;
    }
    const std::size_t mid = static_cast<std::size_t>(std::clamp<double>(std::round((well.center - grid.min()) / grid.spacing()), 0.0, static_cast<double>(n - 1)));
    if (v[mid] < 0) for (auto& x : v) x = -x;

    long double num = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
        long double hv = diag[j] * v[j];
        if (j > 0) hv += off * v[j - 1];
        if (j + 1 < n) hv += off * v[j + 1];
        num += v[j] * hv;
    }
    out.e0 = static_cast<double>(num);
    out.psi = std::move(v);
    return out;
}

long double kinetic_apply(const LatticeGround& g, std::size_t site) {
    const long double off = hop(g.grid);
    const auto& v = g.psi;
    long double k = -2.0L * off * v[site];
    if (site > 0) k += off * v[site - 1];
    if (site + 1 < v.size()) k += off * v[site + 1];
    return k;
}

KineticWeak kinetic_weak_value(const LatticeGround& g, double x_f, bool allow_inside) {
    const Grid1D& grid = g.grid;
    if (x_f < grid.min() || x_f > grid.max()) throw Error(ErrorCode::invalid_argument, "post-selection site lies outside the lattice");
    KineticWeak w;
    w.site = static_cast<std::size_t>(std::lround((x_f - grid.min()) / grid.spacing()));
    w.coordinate = grid.at(w.site);
    w.potential = g.potential[w.site];
    if (w.potential != 0.0 && !allow_inside)
        throw Error(ErrorCode::invalid_argument, "post-selection site lies inside the well (U != 0)");
    const long double psi_f = g.psi[w.site];
    if (std::abs(static_cast<double>(psi_f)) < 1e-200) throw Error(ErrorCode::numerical, "ground state vanishes at the post-selection site");
    const long double kpsi = kinetic_apply(g, w.site);
    w.k_w = static_cast<double>(kpsi / psi_f);
    w.e0 = g.e0;
    w.eigen_residual = static_cast<double>(std::abs((kpsi + w.potential * psi_f - g.e0 * psi_f) / psi_f));
    return w;
}

double continuum_ground_energy(const SquareWell& well) {
    const double v0 = well.depth, a = well.half_width;
    if (!(v0 > 0.0)) throw Error(ErrorCode::invalid_argument, "a bound state needs positive depth");
    // k sin(ka) - kappa cos(ka) = 0 on (-V0, min(0, pi^2/(8a^2) - V0)).
    auto f = [&](double e) {
        const double k = std::sqrt(std::max(0.0, 2.0 * (e + v0)));
        const double kappa = std::sqrt(std::max(0.0, -2.0 * e));
        return k * std::sin(k * a) - kappa * std::cos(k * a);
    };
    const double lo = -v0;
    const double hi = std::min(0.0, std::numbers::pi * std::numbers::pi / (8.0 * a * a) - v0);
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

KineticPointer kinetic_pointer(const LatticeGround& g, std::size_t site, double delta, std::size_t points) {
    if (!(delta > 0.0)) throw Error(ErrorCode::invalid_argument, "pointer width must be positive");
    const std::size_t n = g.grid.points();
    if (site >= n) throw Error(ErrorCode::invalid_argument, "site index out of range");
    const double dx = g.grid.spacing();
    const double L = static_cast<double>(n + 1);
    const double norm = std::sqrt(2.0 / L);
    const double reach = std::abs(g.e0) + 10.0 * delta;
    const double cutoff = reach + 10.0 * delta;

    std::vector<double> ks;
    std::vector<double> amps;
    double total = 0.0, inside = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double kin = (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / L)) / (dx * dx);
        long double c = 0.0L;
        for (std::size_t j = 0; j < n; ++j)
            c += static_cast<long double>(std::sin(std::numbers::pi * static_cast<double>(k * (j + 1)) / L)) * g.psi[j];
        const double a = norm * norm * std::sin(std::numbers::pi * static_cast<double>(k * (site + 1)) / L) * static_cast<double>(c);
        total += a * a;
        if (kin <= reach) inside += a * a;
        if (kin <= cutoff) {
            ks.push_back(kin);
            amps.push_back(a);
        }
    }
    const GaussianPointer ptr(delta, Grid1D(-reach, reach, points));
    const Grid1D& q = ptr.grid();
    Vector phi = Vector::Zero(static_cast<Eigen::Index>(points));
    for (std::size_t j = 0; j < points; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < ks.size(); ++k) s += amps[k] * ptr.amplitude(q.at(j) - ks[k]);
        phi(static_cast<Eigen::Index>(j)) = s;
    }
    KineticPointer out;
    out.pointer = summarize(WaveFunction1D(q, std::move(phi)));
    out.window_weight = total > 0.0 ? inside / total : 0.0;
    return out;
}

}  // namespace tsvf
