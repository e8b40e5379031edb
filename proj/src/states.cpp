#include "tsvf/states.hpp"

#include <cmath>

#include <json.hpp>

namespace tsvf {

namespace {

void check_vector(const Vector& v, const char* what) {
    if (v.size() == 0) throw Error(ErrorCode::invalid_argument, std::string(what) + ": dimension 0");
    if (!v.allFinite()) throw Error(ErrorCode::invalid_argument, std::string(what) + ": non-finite amplitude");
    if (!(v.norm() > 0.0)) throw Error(ErrorCode::invalid_argument, std::string(what) + ": zero vector");
}

}  // namespace

StateVector::StateVector(Vector amplitudes) : a_(std::move(amplitudes)) {
    check_vector(a_, "state");
}

CoStateVector CoStateVector::from_ket(const Vector& ket) {
    return from_entries(ket.conjugate());
}

CoStateVector CoStateVector::from_entries(Vector entries) {
    check_vector(entries, "co-state");
    CoStateVector c;
    c.e_ = std::move(entries);
    return c;
}

Complex CoStateVector::pair(const Vector& ket) const {
    if (ket.size() != e_.size()) throw Error(ErrorCode::dimension_mismatch, "bra and ket dimensions differ");
    return (e_.transpose() * ket)(0);
}

Complex CoStateVector::sandwich(const Matrix& op, const Vector& ket) const {
    if (op.rows() != e_.size() || op.cols() != ket.size())
        throw Error(ErrorCode::dimension_mismatch, "operator dimension mismatch");
    return (e_.transpose() * (op * ket))(0);
}

TwoStateVector::TwoStateVector(CoStateVector b, StateVector k) : bra(std::move(b)), ket(std::move(k)) {
    if (bra.dim() != ket.dim()) throw Error(ErrorCode::dimension_mismatch, "two-state vector members differ in dimension");
}

TwoStateVector TwoStateVector::from_kets(const Vector& phi, const Vector& psi) {
    return TwoStateVector(CoStateVector::from_ket(phi), StateVector(psi));
}

GeneralizedTwoStateVector::GeneralizedTwoStateVector(std::vector<GeneralizedTerm> t) : terms(std::move(t)) {
    if (terms.empty()) throw Error(ErrorCode::invalid_argument, "generalized two-state vector needs a term");
    bool any = false;
    for (const auto& term : terms) {
        if (term.bra.dim() != term.ket.dim() || term.ket.dim() != terms.front().ket.dim())
            throw Error(ErrorCode::dimension_mismatch, "generalized terms differ in dimension");
        if (!std::isfinite(term.alpha.real()) || !std::isfinite(term.alpha.imag()))
            throw Error(ErrorCode::invalid_argument, "non-finite coefficient");
        any = any || term.alpha != Complex(0.0, 0.0);
    }
    if (!any) throw Error(ErrorCode::invalid_argument, "all coefficients are zero");
}

GeneralizedTwoStateVector GeneralizedTwoStateVector::single(const TwoStateVector& tsv) {
    return GeneralizedTwoStateVector({GeneralizedTerm{Complex(1.0, 0.0), tsv.bra, tsv.ket}});
}

GeneralizedTwoStateVector GeneralizedTwoStateVector::normalized() const {
    double s = 0.0;
    for (const auto& t : terms) s += std::norm(t.alpha);
    const double inv = 1.0 / std::sqrt(s);
    std::vector<GeneralizedTerm> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back({t.alpha * inv, t.bra.normalized(), t.ket.normalized()});
    return GeneralizedTwoStateVector(std::move(out));
}

StateVector make_preselected(const StateVector& outcome, const DenseOperator& H, double t1, double t) {
    if (t < t1) throw Error(ErrorCode::invalid_argument, "pre-selection time must precede t");
    return StateVector(evolve_unitary(outcome.amplitudes(), H, t - t1));
}

CoStateVector make_postselected(const CoStateVector& outcome, const DenseOperator& H, double t, double t2) {
    if (t2 < t) throw Error(ErrorCode::invalid_argument, "post-selection time must follow t");
    // <Phi(t)| = <b| exp(-iH(t2 - t)), i.e. the ket exp(+iH(t2 - t))|b>
    return CoStateVector::from_ket(evolve_unitary(outcome.ket(), H, -(t2 - t)));
}

TwoStateVector interchange(const TwoStateVector& tsv) {
    return TwoStateVector(CoStateVector::from_ket(tsv.ket), StateVector(tsv.bra.ket()));
}

GeneralizedTwoStateVector interchange(const GeneralizedTwoStateVector& g) {
    std::vector<GeneralizedTerm> out;
    out.reserve(g.terms.size());
    for (const auto& t : g.terms)
        out.push_back({std::conj(t.alpha), CoStateVector::from_ket(t.ket), StateVector(t.bra.ket())});
    return GeneralizedTwoStateVector(std::move(out));
}

Vector spin_up(char axis) {
    const double r = 1.0 / std::sqrt(2.0);
    Vector v(2);
    switch (axis) {
        case 'x': v << r, r; break;
        case 'y': v << r, Complex(0.0, r); break;
        case 'z': v << 1.0, 0.0; break;
        default: throw Error(ErrorCode::invalid_argument, "axis must be x, y or z");
    }
    return v;
}

Vector spin_down(char axis) {
    const double r = 1.0 / std::sqrt(2.0);
    Vector v(2);
    switch (axis) {
        case 'x': v << r, -r; break;
        case 'y': v << r, Complex(0.0, -r); break;
        case 'z': v << 0.0, 1.0; break;
        default: throw Error(ErrorCode::invalid_argument, "axis must be x, y or z");
    }
    return v;
}

namespace {

nlohmann::json amplitudes_json(const Vector& v) {
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
    return arr;
}

Vector amplitudes_from(const nlohmann::json& j) {
    const auto& arr = j.at("amplitudes");
    const std::size_t dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : arr.size();
    if (arr.size() != dim) throw Error(ErrorCode::dimension_mismatch, "amplitude count differs from dim");
    Vector v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto& c = arr.at(i);
        if (!c.is_array() || c.size() != 2) throw Error(ErrorCode::invalid_argument, "amplitude must be [re, im]");
        v(static_cast<Eigen::Index>(i)) = Complex(c[0].get<double>(), c[1].get<double>());
    }
    return v;
}

}  // namespace

void to_json(nlohmann::json& j, const StateVector& s) {
    j = {{"dim", s.dim()}, {"amplitudes", amplitudes_json(s.amplitudes())}};
}

void from_json(const nlohmann::json& j, StateVector& s) { s = StateVector(amplitudes_from(j)); }

void to_json(nlohmann::json& j, const CoStateVector& s) {
    j = {{"dim", s.dim()}, {"amplitudes", amplitudes_json(s.entries())}};
}

void from_json(const nlohmann::json& j, CoStateVector& s) { s = CoStateVector::from_entries(amplitudes_from(j)); }

void to_json(nlohmann::json& j, const TwoStateVector& s) { j = {{"bra", s.bra}, {"ket", s.ket}}; }

void from_json(const nlohmann::json& j, TwoStateVector& s) {
    s = TwoStateVector(j.at("bra").get<CoStateVector>(), j.at("ket").get<StateVector>());
}

void to_json(nlohmann::json& j, const GeneralizedTwoStateVector& s) {
    auto terms = nlohmann::json::array();
    for (const auto& t : s.terms)
        terms.push_back({{"alpha", {t.alpha.real(), t.alpha.imag()}}, {"bra", t.bra}, {"ket", t.ket}});
    j = {{"terms", terms}};
}

void from_json(const nlohmann::json& j, GeneralizedTwoStateVector& s) {
    std::vector<GeneralizedTerm> terms;
    for (const auto& t : j.at("terms")) {
        const auto& a = t.at("alpha");
        terms.push_back({Complex(a.at(0).get<double>(), a.at(1).get<double>()), t.at("bra").get<CoStateVector>(),
                         t.at("ket").get<StateVector>()});
    }
    s = GeneralizedTwoStateVector(std::move(terms));
}

}  // namespace tsvf
