#include "tsvf/ideal_measurement.hpp"

#include <cmath>

namespace tsvf {

std::optional<double> OutcomeDistribution::probability_of(double eigenvalue, double tol) const {
    for (std::size_t n = 0; n < eigenvalues.size(); ++n)
        if (std::abs(eigenvalues[n] - eigenvalue) <= tol) return probabilities[n];
    return std::nullopt;
}

namespace {

SpectralDecomposition spectrum_of(const DenseOperator& obs, Eigen::Index dim) {
    if (obs.dim() != dim) throw Error(ErrorCode::dimension_mismatch, "observable dimension differs from state");
    return hermitian_eigendecomposition(obs);
}

OutcomeDistribution finish(const SpectralDecomposition& sd, std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > kMinAblDenominator))
        throw Error(ErrorCode::numerical, "post-selection incompatible with any outcome");
    for (double& w : weights) w /= total;
    return {sd.eigenvalues, std::move(weights)};
}

}  // namespace

OutcomeDistribution abl(const TwoStateVector& tsv, const DenseOperator& obs) {
    const auto n = tsv.normalized();
    const auto sd = spectrum_of(obs, tsv.dim());
    std::vector<double> w;
    for (const auto& p : sd.projectors) w.push_back(std::norm(n.bra.sandwich(p.matrix(), n.ket.amplitudes())));
    return finish(sd, std::move(w));
}

OutcomeDistribution abl_generalized(const GeneralizedTwoStateVector& g, const DenseOperator& obs) {
    const auto n = g.normalized();
    const auto sd = spectrum_of(obs, g.dim());
    std::vector<double> w;
    for (const auto& p : sd.projectors) {
        Complex amp(0.0, 0.0);
        for (const auto& t : n.terms) amp += t.alpha * t.bra.sandwich(p.matrix(), t.ket.amplitudes());
        w.push_back(std::norm(amp));
    }
    return finish(sd, std::move(w));
}

void require_projector(const DenseOperator& p) {
    if (!is_hermitian(p.matrix())) throw Error(ErrorCode::invalid_argument, "projector must be Hermitian");
    const Matrix& m = p.matrix();
    if (max_abs(m * m - m) > 1e-10 * std::max(1.0, max_abs(m)))
        throw Error(ErrorCode::invalid_argument, "projector must be idempotent");
}

OutcomeDistribution abl_degenerate_post(const StateVector& pre, const DenseOperator& post_projector,
                                        const DenseOperator& obs) {
    if (post_projector.dim() != pre.dim())
        throw Error(ErrorCode::dimension_mismatch, "projector dimension differs from state");
    require_projector(post_projector);
    const Vector psi = pre.normalized().amplitudes();
    const auto sd = spectrum_of(obs, pre.dim());
    std::vector<double> w;
    for (const auto& p : sd.projectors) w.push_back((post_projector.matrix() * (p.matrix() * psi)).squaredNorm());
    return finish(sd, std::move(w));
}

OutcomeDistribution born(const StateVector& pre, const DenseOperator& obs) {
    const Vector psi = pre.normalized().amplitudes();
    const auto sd = spectrum_of(obs, pre.dim());
    std::vector<double> w;
    for (const auto& p : sd.projectors) w.push_back((p.matrix() * psi).squaredNorm());
    return finish(sd, std::move(w));
}

std::optional<double> certain_outcome(const OutcomeDistribution& d) {
    for (std::size_t n = 0; n < d.probabilities.size(); ++n)
        if (d.probabilities[n] >= 1.0 - kCertaintyTolerance) return d.eigenvalues[n];
    return std::nullopt;
}

std::optional<double> certain_outcome(const TwoStateVector& tsv, const DenseOperator& obs) {
    return certain_outcome(abl(tsv, obs));
}

std::optional<double> certain_outcome(const GeneralizedTwoStateVector& g, const DenseOperator& obs) {
    return certain_outcome(abl_generalized(g, obs));
}

ProductRuleReport product_rule_report(const TwoStateVector& tsv, const DenseOperator& a, const DenseOperator& b) {
    ProductRuleReport r;
    const Matrix comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    r.commutator_norm = comm.norm();
    const DenseOperator ab = (a * b).as_hermitian();
    r.a_certain = certain_outcome(tsv, a);
    r.b_certain = certain_outcome(tsv, b);
    r.ab_certain = certain_outcome(tsv, ab);
    if (r.a_certain && r.b_certain && r.ab_certain)
        r.product_rule_holds = std::abs(*r.a_certain * *r.b_certain - *r.ab_certain) <= 1e-10;
    return r;
}

CounterfactualReport counterfactual_decomposition_check(const StateVector& pre, const DenseOperator& obs_c,
                                                        const DenseOperator& final_obs) {
    const Vector psi = pre.normalized().amplitudes();
    const auto sc = spectrum_of(obs_c, pre.dim());
    const auto sf = spectrum_of(final_obs, pre.dim());
    if (sf.size() < 2) throw Error(ErrorCode::invalid_argument, "final observable needs at least two outcomes");

    CounterfactualReport r;
    r.eigenvalues = sc.eigenvalues;
    r.final_eigenvalues = sf.eigenvalues;
    r.born = born(pre, obs_c).probabilities;
    r.reading_a.assign(sc.size(), 0.0);
    r.reading_b.assign(sc.size(), 0.0);

    for (const auto& pf : sf.projectors) {
        const double unmeasured = (pf.matrix() * psi).squaredNorm();
        double measured = 0.0;
        for (const auto& pc : sc.projectors) measured += (pf.matrix() * (pc.matrix() * psi)).squaredNorm();
        r.final_prob_unmeasured.push_back(unmeasured);
        r.final_prob_measured.push_back(measured);

        // A final outcome that cannot follow any c_n carries zero weight in both readings.
        std::vector<double> cond(sc.size(), 0.0);
        if (measured > kMinAblDenominator) cond = abl_degenerate_post(pre, pf, obs_c).probabilities;
        r.abl_conditional.push_back(cond);
        for (std::size_t n = 0; n < sc.size(); ++n) {
            r.reading_a[n] += unmeasured * cond[n];
            r.reading_b[n] += measured * cond[n];
        }
    }
    for (std::size_t n = 0; n < sc.size(); ++n) {
        r.deviation_a = std::max(r.deviation_a, std::abs(r.reading_a[n] - r.born[n]));
        r.deviation_b = std::max(r.deviation_b, std::abs(r.reading_b[n] - r.born[n]));
    }
    return r;
}

}  // namespace tsvf
