#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tsvf/ideal_measurement.hpp"
#include "tsvf/states.hpp"

namespace tsvf {

struct WeakValue {
    Complex value;
    double overlap_magnitude = 0.0;  // |<Phi|Psi>| of the normalized description
};

WeakValue weak_value(const TwoStateVector& tsv, const DenseOperator& obs);
WeakValue weak_value_generalized(const GeneralizedTwoStateVector& g, const DenseOperator& obs);
WeakValue weak_value_degenerate_post(const StateVector& pre, const DenseOperator& post_projector,
                                     const DenseOperator& obs);

struct WeakVector {
    Complex wx, wy, wz;
    std::array<double, 3> real() const { return {wx.real(), wy.real(), wz.real()}; }
    std::array<double, 3> imag() const { return {wx.imag(), wy.imag(), wz.imag()}; }
};

WeakVector weak_vector(const GeneralizedTwoStateVector& g);
WeakVector weak_vector(const TwoStateVector& tsv);

struct Direction {
    double theta = 0.0;  // polar angle from +z
    double phi = 0.0;    // azimuth
    double probability = 0.0;  // Prob(sigma_eta = +1) from the generalized ABL rule

    std::array<double, 3> unit() const;
};

enum class ConeKind { empty, single_direction, cone, discrete, divergent };

struct ConeResult {
    ConeKind kind = ConeKind::empty;
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    std::optional<double> half_angle;  // for the circular cone
    std::vector<Direction> directions; // only directions certified by the ABL cross-check
    std::size_t rejected = 0;          // candidates the ABL check did not certify
};

std::string to_string(ConeKind k);

// Directions eta with Prob(sigma_eta = 1) = 1, found from eta . w = 1 where w
// is the weak vector, and cross-checked with the generalized ABL rule.
ConeResult certainty_cone(const GeneralizedTwoStateVector& g, int samples);

enum class TheoremStatus { pass, fail, not_applicable };
std::string to_string(TheoremStatus s);

struct TheoremReport {
    TheoremStatus status = TheoremStatus::not_applicable;
    std::optional<double> certain_value;
    Complex weak;
    std::optional<double> matched_eigenvalue;
};

// Certain outcome c implies weak value c.
TheoremReport theorem_i_check(const TwoStateVector& tsv, const DenseOperator& obs);
TheoremReport theorem_i_check(const GeneralizedTwoStateVector& g, const DenseOperator& obs);
// For two-valued observables: weak value equal to an eigenvalue implies certainty.
TheoremReport theorem_ii_check(const TwoStateVector& tsv, const DenseOperator& obs);
TheoremReport theorem_ii_check(const GeneralizedTwoStateVector& g, const DenseOperator& obs);

}  // namespace tsvf
