#include "tsvf/weak_measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsvf {

namespace {

void require_dim(const DenseOperator& obs, Eigen::Index dim) {
    if (obs.dim() != dim) throw Error(ErrorCode::dimension_mismatch, "observable dimension differs from state");
}

WeakValue ratio(Complex num, Complex den) {
    const double mag = std::abs(den);
    if (!(mag > kOverlapEpsilon))
        throw Error(ErrorCode::numerical, "pre- and post-selected states are orthogonal; weak value diverges");
    return {num / den, mag};
}

}  // namespace

WeakValue weak_value(const TwoStateVector& tsv, const DenseOperator& obs) {
    require_dim(obs, tsv.dim());
    const auto n = tsv.normalized();
    return ratio(n.bra.sandwich(obs.matrix(), n.ket.amplitudes()), n.overlap());
}

WeakValue weak_value_generalized(const GeneralizedTwoStateVector& g, const DenseOperator& obs) {
    require_dim(obs, g.dim());
    const auto n = g.normalized();
    Complex num(0.0, 0.0), den(0.0, 0.0);
    for (const auto& t : n.terms) {
        num += t.alpha * t.bra.sandwich(obs.matrix(), t.ket.amplitudes());
        den += t.alpha * t.bra.pair(t.ket);
    }
    return ratio(num, den);
}

WeakValue weak_value_degenerate_post(const StateVector& pre, const DenseOperator& post_projector,
                                     const DenseOperator& obs) {
    require_dim(obs, pre.dim());
    require_dim(post_projector, pre.dim());
    require_projector(post_projector);
    const Vector psi = pre.normalized().amplitudes();
    const Vector pb = post_projector.matrix() * psi;
    // <Psi|P_B C|Psi> / <Psi|P_B|Psi>, with P_B Hermitian so <Psi|P_B = (P_B Psi)^dag
    return ratio(pb.dot(obs.matrix() * psi), pb.dot(psi));
}

WeakVector weak_vector(const GeneralizedTwoStateVector& g) {
    if (g.dim() != 2) throw Error(ErrorCode::invalid_argument, "weak vector needs a spin-1/2 description");
    return {weak_value_generalized(g, pauli_x()).value, weak_value_generalized(g, pauli_y()).value,
            weak_value_generalized(g, pauli_z()).value};
}

WeakVector weak_vector(const TwoStateVector& tsv) { return weak_vector(GeneralizedTwoStateVector::single(tsv)); }

std::array<double, 3> Direction::unit() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

std::string to_string(ConeKind k) {
    switch (k) {
        case ConeKind::empty: return "empty";
        case ConeKind::single_direction: return "single_direction";
        case ConeKind::cone: return "cone";
        case ConeKind::discrete: return "discrete";
        case ConeKind::divergent: return "divergent";
    }
    return "unknown";
}

namespace {

using V3 = std::array<double, 3>;

double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double len(const V3& a) { return std::sqrt(dot(a, a)); }
V3 scale(const V3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
V3 add(const V3& a, const V3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
V3 cross(const V3& a, const V3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Any unit vector orthogonal to a unit vector n.
V3 orthogonal(const V3& n) {
    const V3 e = std::abs(n[0]) < 0.9 ? V3{1.0, 0.0, 0.0} : V3{0.0, 1.0, 0.0};
    const V3 u = cross(n, e);
    return scale(u, 1.0 / len(u));
}

Direction certify(const GeneralizedTwoStateVector& g, const V3& eta) {
    Direction d;
    d.theta = std::acos(std::clamp(eta[2], -1.0, 1.0));
    d.phi = std::atan2(eta[1], eta[0]);
    const auto dist = abl_generalized(g, pauli_along(eta[0], eta[1], eta[2]));
    d.probability = dist.probability_of(1.0).value_or(0.0);
    return d;
}

}  // namespace

ConeResult certainty_cone(const GeneralizedTwoStateVector& g, int samples) {
    if (g.dim() != 2) throw Error(ErrorCode::invalid_argument, "certainty cone needs a spin-1/2 description");
    if (samples < 8) throw Error(ErrorCode::invalid_argument, "certainty cone needs at least 8 samples");

    ConeResult out;
    WeakVector w;
    try {
        w = weak_vector(g);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::numerical) throw;
        out.kind = ConeKind::divergent;
        return out;
    }
    const V3 re = w.real();
    const V3 im = w.imag();
    const double scale_w = std::max(1.0, len(re));
    const double tol = 1e-12 * scale_w;

    std::vector<V3> candidates;
    auto accept = [&](const std::vector<V3>& cand) {
        for (const auto& eta : cand) {
            const Direction d = certify(g, eta);
            if (d.probability >= 1.0 - kCertaintyTolerance)
                out.directions.push_back(d);
            else
                ++out.rejected;
        }
    };

    if (len(im) <= tol) {
        // eta . R = 1 on the unit sphere: a circle around R with cos(angle) = 1/|R|.
        const double r = len(re);
        if (r < 1.0 - 1e-12) {
            out.kind = ConeKind::empty;
            return out;
        }
        const V3 axis = scale(re, 1.0 / r);
        out.axis = axis;
        if (r <= 1.0 + 1e-12) {
            out.kind = ConeKind::single_direction;
            out.half_angle = 0.0;
            candidates.push_back(axis);
        } else {
            out.kind = ConeKind::cone;
            const double a = std::acos(1.0 / r);
            out.half_angle = a;
            const V3 u = orthogonal(axis);
            const V3 v = cross(axis, u);
            for (int k = 0; k < samples; ++k) {
                const double t = 2.0 * std::numbers::pi * k / samples;
                const V3 side = add(scale(u, std::cos(t)), scale(v, std::sin(t)));
                candidates.push_back(add(scale(axis, std::cos(a)), scale(side, std::sin(a))));
            }
        }
    } else {
        // eta must also be orthogonal to Im(w): at most two directions.
        const V3 ih = scale(im, 1.0 / len(im));
        const V3 rp = add(re, scale(ih, -dot(re, ih)));
        const double r = len(rp);
        if (r < 1.0 - 1e-12) {
            out.kind = ConeKind::empty;
            return out;
        }
        const V3 rh = scale(rp, 1.0 / r);
        out.axis = rh;
        const V3 base = scale(rh, 1.0 / r);
        if (r <= 1.0 + 1e-12) {
            out.kind = ConeKind::single_direction;
            candidates.push_back(rh);
        } else {
            out.kind = ConeKind::discrete;
            const double s = std::sqrt(1.0 - 1.0 / (r * r));
            const V3 side = cross(ih, rh);
            candidates.push_back(add(base, scale(side, s)));
            candidates.push_back(add(base, scale(side, -s)));
        }
    }
    accept(candidates);
    return out;
}

std::string to_string(TheoremStatus s) {
    switch (s) {
        case TheoremStatus::pass: return "pass";
        case TheoremStatus::fail: return "fail";
        case TheoremStatus::not_applicable: return "not_applicable";
    }
    return "unknown";
}

namespace {

TheoremReport theorem_i(std::optional<double> certain, WeakValue wv) {
    TheoremReport r;
    r.certain_value = certain;
    r.weak = wv.value;
    if (!certain) return r;
    r.status = std::abs(wv.value - Complex(*certain, 0.0)) <= 1e-10 ? TheoremStatus::pass : TheoremStatus::fail;
    return r;
}

void require_dichotomic(const DenseOperator& obs) {
    if (hermitian_eigendecomposition(obs).size() != 2)
        throw Error(ErrorCode::invalid_argument, "observable must have exactly two distinct eigenvalues");
}

TheoremReport theorem_ii(const DenseOperator& obs, std::optional<double> certain, WeakValue wv) {
    TheoremReport r;
    r.certain_value = certain;
    r.weak = wv.value;
    for (double a : hermitian_eigendecomposition(obs).eigenvalues) {
        if (std::abs(wv.value - Complex(a, 0.0)) <= 1e-10) {
            r.matched_eigenvalue = a;
            r.status = (certain && std::abs(*certain - a) <= 1e-10) ? TheoremStatus::pass : TheoremStatus::fail;
        }
    }
    return r;
}

}  // namespace

TheoremReport theorem_i_check(const TwoStateVector& tsv, const DenseOperator& obs) {
    return theorem_i(certain_outcome(tsv, obs), weak_value(tsv, obs));
}

TheoremReport theorem_i_check(const GeneralizedTwoStateVector& g, const DenseOperator& obs) {
    return theorem_i(certain_outcome(g, obs), weak_value_generalized(g, obs));
}

TheoremReport theorem_ii_check(const TwoStateVector& tsv, const DenseOperator& obs) {
    require_dichotomic(obs);
    return theorem_ii(obs, certain_outcome(tsv, obs), weak_value(tsv, obs));
}

TheoremReport theorem_ii_check(const GeneralizedTwoStateVector& g, const DenseOperator& obs) {
    require_dichotomic(obs);
    return theorem_ii(obs, certain_outcome(g, obs), weak_value_generalized(g, obs));
}

}  // namespace tsvf
