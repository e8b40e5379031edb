#pragma once

#include <vector>

#include <json.hpp>

#include "tsvf/numerics.hpp"

namespace tsvf {

// Divisions by <Phi|Psi> below this (normalized) magnitude are refused.
inline constexpr double kOverlapEpsilon = 1e-12;

class StateVector {
public:
    StateVector() = default;
    explicit StateVector(Vector amplitudes);

    Eigen::Index dim() const { return a_.size(); }
    const Vector& amplitudes() const { return a_; }
    double norm() const { return a_.norm(); }
    StateVector normalized() const { return StateVector(a_ / a_.norm()); }

private:
    Vector a_;
};

// A bra. Entries are stored already conjugated, so pairing with a ket is a
// plain transpose product.
class CoStateVector {
public:
    CoStateVector() = default;
    static CoStateVector from_ket(const Vector& ket);
    static CoStateVector from_ket(const StateVector& ket) { return from_ket(ket.amplitudes()); }
    static CoStateVector from_entries(Vector entries);

    Eigen::Index dim() const { return e_.size(); }
    const Vector& entries() const { return e_; }
    Vector ket() const { return e_.conjugate(); }
    double norm() const { return e_.norm(); }
    CoStateVector normalized() const { return from_entries(e_ / e_.norm()); }

    Complex pair(const Vector& ket) const;
    Complex pair(const StateVector& ket) const { return pair(ket.amplitudes()); }
    // <this| op |ket>
    Complex sandwich(const Matrix& op, const Vector& ket) const;

private:
    Vector e_;
};

struct TwoStateVector {
    CoStateVector bra;
    StateVector ket;

    TwoStateVector() = default;
    TwoStateVector(CoStateVector b, StateVector k);
    // <phi_ket| |psi> with the bra given as a ket.
    static TwoStateVector from_kets(const Vector& phi, const Vector& psi);

    Eigen::Index dim() const { return ket.dim(); }
    Complex overlap() const { return bra.pair(ket); }
    TwoStateVector normalized() const { return {bra.normalized(), ket.normalized()}; }
};

struct GeneralizedTerm {
    Complex alpha;
    CoStateVector bra;
    StateVector ket;
};

struct GeneralizedTwoStateVector {
    std::vector<GeneralizedTerm> terms;

    GeneralizedTwoStateVector() = default;
    explicit GeneralizedTwoStateVector(std::vector<GeneralizedTerm> t);
    static GeneralizedTwoStateVector single(const TwoStateVector& tsv);

    Eigen::Index dim() const { return terms.front().ket.dim(); }
    // Each member normalized, then the coefficient vector scaled to unit norm.
    GeneralizedTwoStateVector normalized() const;
};

StateVector make_preselected(const StateVector& outcome, const DenseOperator& H, double t1, double t);
CoStateVector make_postselected(const CoStateVector& outcome, const DenseOperator& H, double t, double t2);

// <Phi||Psi> -> <Psi||Phi>
TwoStateVector interchange(const TwoStateVector& tsv);
// sum a_i <Phi_i||Psi_i> -> sum a_i* <Psi_i||Phi_i>
GeneralizedTwoStateVector interchange(const GeneralizedTwoStateVector& g);

// Standard spin-1/2 states.
Vector spin_up(char axis);
Vector spin_down(char axis);

void to_json(nlohmann::json& j, const StateVector& s);
void from_json(const nlohmann::json& j, StateVector& s);
void to_json(nlohmann::json& j, const CoStateVector& s);
void from_json(const nlohmann::json& j, CoStateVector& s);
void to_json(nlohmann::json& j, const TwoStateVector& s);
void from_json(const nlohmann::json& j, TwoStateVector& s);
void to_json(nlohmann::json& j, const GeneralizedTwoStateVector& s);
void from_json(const nlohmann::json& j, GeneralizedTwoStateVector& s);

}  // namespace tsvf
