#pragma once

#include <optional>
#include <vector>

#include "tsvf/states.hpp"

namespace tsvf {

inline constexpr double kCertaintyTolerance = 1e-10;
inline constexpr double kMinAblDenominator = 1e-24;

struct OutcomeDistribution {
    std::vector<double> eigenvalues;
    std::vector<double> probabilities;

    std::optional<double> probability_of(double eigenvalue, double tol = 1e-9) const;
};

OutcomeDistribution abl(const TwoStateVector& tsv, const DenseOperator& obs);
OutcomeDistribution abl_generalized(const GeneralizedTwoStateVector& g, const DenseOperator& obs);
OutcomeDistribution abl_degenerate_post(const StateVector& pre, const DenseOperator& post_projector,
                                        const DenseOperator& obs);
// Pre-selection only.
OutcomeDistribution born(const StateVector& pre, const DenseOperator& obs);

// Throws unless p is Hermitian and idempotent.
void require_projector(const DenseOperator& p);

std::optional<double> certain_outcome(const OutcomeDistribution& d);
std::optional<double> certain_outcome(const TwoStateVector& tsv, const DenseOperator& obs);
std::optional<double> certain_outcome(const GeneralizedTwoStateVector& g, const DenseOperator& obs);

struct ProductRuleReport {
    std::optional<double> a_certain;
    std::optional<double> b_certain;
    std::optional<double> ab_certain;
    std::optional<bool> product_rule_holds;  // empty unless all three are certain
    double commutator_norm = 0.0;
};

// The product observable is formed literally as A*B; non-Hermitian products throw.
ProductRuleReport product_rule_report(const TwoStateVector& tsv, const DenseOperator& a, const DenseOperator& b);

struct CounterfactualReport {
    std::vector<double> eigenvalues;          // of the intermediate observable C
    std::vector<double> born;                 // Prob(C = c_n) for the pre-selected state
    std::vector<double> final_eigenvalues;
    std::vector<double> final_prob_unmeasured;  // Prob(f) with no measurement of C
    std::vector<double> final_prob_measured;    // Prob(f) with C measured first
    std::vector<std::vector<double>> abl_conditional;  // [f][n] = Prob(c_n ; f)
    std::vector<double> reading_a;            // sum_f Prob_unmeasured(f) Prob(c_n ; f)
    std::vector<double> reading_b;            // sum_f Prob_measured(f) Prob(c_n ; f)
    double deviation_a = 0.0;                 // max_n |reading_a - born|
    double deviation_b = 0.0;
};

CounterfactualReport counterfactual_decomposition_check(const StateVector& pre, const DenseOperator& obs_c,
                                                        const DenseOperator& final_obs);

}  // namespace tsvf
