// Exit gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tsvf/ideal_measurement.hpp"
#include "tsvf/lattice.hpp"
#include "tsvf/pointer.hpp"
#include "tsvf/scenarios.hpp"
#include "tsvf/time_machine.hpp"
#include "tsvf/weak_measurement.hpp"
#include "test_support.hpp"

using namespace tsvf;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

struct Outcome {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        ok = ok && cond;
        if (!detail.empty()) detail += "; ";
        detail += (cond ? "" : "FAILED ") + what;
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Best of `reps` timed runs; the outcome of the last run is kept.
Outcome timed(int reps, double limit_s, const std::function<Outcome()>& body) {
    Outcome out;
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            out = body();
        } catch (const std::exception& e) {
            out = Outcome{};
            out.require(false, std::string("exception: ") + e.what());
        }
        best = std::min(best, seconds_since(t0));
    }
    out.require(best < limit_s, "runtime " + num(best * 1e3) + " ms < " + num(limit_s * 1e3) + " ms");
    return out;
}

DenseOperator diag_projector(int d, int k) {
    Matrix m = Matrix::Zero(d, d);
    m(k, k) = 1.0;
    return DenseOperator(m, true);
}

double max_diff(const OutcomeDistribution& a, const OutcomeDistribution& b) {
    if (a.probabilities.size() != b.probabilities.size()) return 1e300;
    double d = 0.0;
    for (std::size_t k = 0; k < a.probabilities.size(); ++k) {
        d = std::max(d, std::abs(a.eigenvalues[k] - b.eigenvalues[k]));
        d = std::max(d, std::abs(a.probabilities[k] - b.probabilities[k]));
    }
    return d;
}

Outcome criterion1() {
    Outcome o;
    Vector psi(3), phi(3);
    psi << 1, 1, 1;
    phi << 1, 1, -1;
    const TwoStateVector tsv = TwoStateVector::from_kets(phi.normalized(), psi.normalized());
    const DenseOperator p1 = diag_projector(3, 0), p2 = diag_projector(3, 1), p3 = diag_projector(3, 2);
    const double pr1 = abl(tsv, p1).probability_of(1.0).value_or(0.0);
    const double pr2 = abl(tsv, p2).probability_of(1.0).value_or(0.0);
    o.require(std::abs(pr1 - 1.0) <= 1e-12 && std::abs(pr2 - 1.0) <= 1e-12,
              "Prob(P1=1)=" + num(pr1) + " Prob(P2=1)=" + num(pr2));
    const ProductRuleReport pr = product_rule_report(tsv, p1, p2);
    o.require(pr.ab_certain && std::abs(*pr.ab_certain) <= 1e-12, "P1P2 certain " + (pr.ab_certain ? num(*pr.ab_certain) : "none"));
    const double dev = std::max({std::abs(weak_value(tsv, p1).value - 1.0), std::abs(weak_value(tsv, p2).value - 1.0),
                                 std::abs(weak_value(tsv, p3).value + 1.0)});
    o.require(dev <= 1e-12, "weak values (1,1,-1) dev " + num(dev));
    return o;
}

Outcome criterion2() {
    Outcome o;
    const Vector singlet = (tensor_product(spin_up('z'), spin_down('z')) - tensor_product(spin_down('z'), spin_up('z'))) / std::sqrt(2.0);
    const TwoStateVector tsv = TwoStateVector::from_kets(tensor_product(spin_up('x'), spin_up('y')), singlet);
    const ProductRuleReport pr = product_rule_report(tsv, embed(pauli_y(), 0, 2).as_hermitian(), embed(pauli_x(), 1, 2).as_hermitian());
    auto is = [](const std::optional<double>& v, double x) { return v && std::abs(*v - x) <= 1e-12; };
    o.require(is(pr.a_certain, -1.0) && is(pr.b_certain, -1.0), "sigma_1y, sigma_2x certain -1");
    o.require(is(pr.ab_certain, -1.0), "product certain -1");
    o.require(pr.product_rule_holds && !*pr.product_rule_holds, "product-rule violation flagged");
    return o;
}

Outcome criterion3() {
    Outcome o;
    const TwoStateVector tsv = TwoStateVector::from_kets(spin_up('y'), spin_up('x'));
    const DenseOperator sxi = sigma_xi();
    const double wdev = std::abs(weak_value(tsv, sxi).value - kSqrt2);
    o.require(wdev <= 1e-12, "(sigma_xi)_w - sqrt2 = " + num(wdev));
    const GaussianPointer ptr = GaussianPointer::for_range(10.0, -1.0, 1.0, 4096);
    const PointerResult post = pointer_distribution_postselected(tsv, sxi, ptr);
    const PointerResult pre = pointer_distribution_preselected(StateVector(spin_up('x')), sxi, ptr);
    o.require(std::abs(post.peak - kSqrt2) <= 0.05, "post-selected peak " + num(post.peak));
    o.require(std::abs(pre.mean - 1.0 / kSqrt2) <= 0.02, "pre-selected mean " + num(pre.mean));
    return o;
}

Outcome criterion4() {
    Outcome o;
    const TwoStateVector tsv = TwoStateVector::from_kets(spin_up('y'), spin_up('x'));
    const GaussianPointer ptr = GaussianPointer::for_range(10.0, -1.0, 1.0, 4096);
    const EnsembleEstimate post = ensemble_mean_estimator(tsv, sigma_xi(), ptr, 5000, kDefaultSeed);
    const EnsembleEstimate pre = ensemble_mean_estimator(StateVector(spin_up('x')), sigma_xi(), ptr, 5000, kDefaultSeed);
    o.require(pre.standard_error >= 0.10 && pre.standard_error <= 0.20,
              "pre-selected standard error " + num(pre.standard_error) + " (post-selected " + num(post.standard_error) + ")");
    o.require(std::abs(post.mean - kSqrt2) <= 3.0 * post.standard_error,
              "post-selected mean " + num(post.mean) + " within 3 se of sqrt2");
    return o;
}

Outcome criterion5() {
    Outcome o;
    double worst = 0.0;
    for (int n : {2, 4, 6, 8}) {
        const GaussianPointer ptr = GaussianPointer::for_range(0.25, -1.0, 2.0, 4096);
        const PointerResult a = n_spin_pointer_closed_form(n, ptr);
        const PointerResult b = n_spin_pointer_tensor(n, ptr);
        for (std::size_t j = 0; j < a.q_prob.size(); ++j) worst = std::max(worst, std::abs(a.q_prob[j] - b.q_prob[j]));
    }
    o.require(worst <= 1e-10, "closed form vs tensor max dev " + num(worst));
    const PointerResult r = n_spin_pointer_closed_form(20, GaussianPointer::for_range(0.25, -1.0, 2.0, 16384));
    const std::vector<std::size_t> maxima = local_maxima(r.q_prob, 0.01);
    std::string where;
    for (auto i : maxima) where += (where.empty() ? "" : ",") + num(r.q_grid.at(i));
    o.require(maxima.size() == 1, "n=20 delta=0.25 local maxima above 1%: " + std::to_string(maxima.size()) + " at q=" + where);
    o.require(std::abs(r.peak - kSqrt2) <= 0.05, "peak " + num(r.peak));
    return o;
}

Outcome criterion6() {
    Outcome o;
    const LatticeGround g = lattice_ground_state(Grid1D(-15.9921875, 15.9921875, 2048), SquareWell{});
    const KineticWeak k = kinetic_weak_value(g, 2.0);
    o.require(g.e0 < 0.0, "E0 = " + num(g.e0));
    o.require(std::abs(k.k_w - g.e0) <= 1e-10, "|K_w - E0| = " + num(std::abs(k.k_w - g.e0)));
    return o;
}

Outcome criterion7() {
    Outcome o;
    std::string notes;
    for (double chi : {std::numbers::pi / 16, std::numbers::pi / 8, 3 * std::numbers::pi / 16}) {
        const GeneralizedTwoStateVector g(
            {{Complex(std::cos(chi), 0.0), CoStateVector::from_ket(spin_up('z')), StateVector(spin_up('z'))},
             {Complex(-std::sin(chi), 0.0), CoStateVector::from_ket(spin_down('z')), StateVector(spin_down('z'))}});
        const ConeResult cone = certainty_cone(g, 16);
        const double t = std::tan(chi), want = (1.0 - t) / (1.0 + t);
        double min_p = 1.0, cos_dev = 0.0;
        for (const Direction& d : cone.directions) {
            min_p = std::min(min_p, d.probability);
            cos_dev = std::max(cos_dev, std::abs(std::cos(d.theta) - want));
        }
        const bool ok = !cone.directions.empty() && cone.rejected == 0 && min_p >= 1.0 - 1e-10 && cos_dev <= 1e-10;
        o.require(ok, "chi=" + num(chi) + " " + std::to_string(cone.directions.size()) + " dirs, min prob " + num(min_p));
        const double half = cone.half_angle.value_or(std::nan(""));
        notes += " chi=" + num(chi) + ": half-angle " + num(half) + ", printed 4 atan form " + num(4 * std::atan(std::sqrt(t)));
    }
    o.detail += "; printed formula is the full opening angle (2x the half-angle):" + notes;
    return o;
}

Outcome criterion8() {
    Outcome o;
    constexpr double kGoldenDistortion = 0.24686077610073902;
    const ScenarioResult r = run_scenario("time_machine", {{"distortion_sweep", true}});
    const double dist = r.results.at("distortion").get<double>();
    o.require(std::abs(dist - kGoldenDistortion) <= 1e-10, "N=13 eta=10 distortion " + num(dist) + " vs golden");
    std::vector<double> sweep;
    for (const auto& row : r.results.at("distortion_sweep")) sweep.push_back(row.at("distortion").get<double>());
    bool decreasing = sweep.size() == 4;
    for (std::size_t k = 1; k < sweep.size(); ++k) decreasing = decreasing && sweep[k] < sweep[k - 1];
    o.require(decreasing, "distortion N=8,13,21,34: " + num(sweep.at(0)) + " " + num(sweep.at(1)) + " " + num(sweep.at(2)) + " " + num(sweep.at(3)));
    const SuccessScaling sc = success_scaling_probe(10.0, {19, 20});
    const double gap = std::abs(sc.ratios.front() - sc.reference) / sc.reference;
    o.require(gap <= 0.20, "success ratio at N=20 " + num(sc.ratios.front()) + " vs 1/(2eta-1) " + num(sc.reference));
    return o;
}

Outcome criterion9() {
    Outcome o;
    const ScenarioResult r = run_scenario("protective_measurement");
    const auto ratios = r.results.at("single_state").at("error_ratios").get<std::vector<double>>();
    const double worst = ratios.empty() ? 1e300 : *std::max_element(ratios.begin(), ratios.end());
    o.require(ratios.size() == 3 && worst <= 0.75, "error(2T)/error(T) worst " + num(worst) + " over T=10,20,40,80");
    const auto& two = r.results.at("two_state");
    o.require(two.at("within_2pct").get<bool>() && std::abs(two.at("lambda_n_over_p0").get<double>() - 50.0) < 1e-9,
              "two-state shift " + num(two.at("shift").get<double>()) + " within 2% of sqrt2");
    const auto& ctrl = r.results.at("control");
    o.require(!ctrl.at("within_2pct").get<bool>(), "lambda=0 control shift " + num(ctrl.at("shift").get<double>()) + " outside 2%");
    return o;
}

Outcome criterion10() {
    Outcome o;
    std::mt19937_64 rng(kDefaultSeed);
    double abl_worst = 0.0, wv_worst = 0.0, chain_worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int d = 2 + t % 7;
        const Vector phi = test::random_state(d, rng), psi = test::random_state(d, rng);
        const TwoStateVector tsv = TwoStateVector::from_kets(phi, psi);
        const DenseOperator obs = t % 2 ? test::random_hermitian(d, rng) : test::random_degenerate(d, rng);
        abl_worst = std::max(abl_worst, max_diff(abl(tsv, obs), abl(interchange(tsv), obs)));
        const Complex a = weak_value(tsv, obs).value, b = weak_value(interchange(tsv), obs).value;
        wv_worst = std::max(wv_worst, std::abs(a - std::conj(b)) / std::max(1.0, std::abs(a)));

        const DenseOperator proj(Matrix(phi * phi.adjoint()), true);
        chain_worst = std::max(chain_worst, max_diff(abl_generalized(GeneralizedTwoStateVector::single(tsv), obs), abl(tsv, obs)));
        chain_worst = std::max(chain_worst, max_diff(abl_degenerate_post(StateVector(psi), proj, obs), abl(tsv, obs)));
        chain_worst = std::max(chain_worst, max_diff(abl_degenerate_post(StateVector(psi), DenseOperator::identity(d), obs),
                                                     born(StateVector(psi), obs)));
        const Complex w = weak_value_degenerate_post(StateVector(psi), DenseOperator::identity(d), obs).value;
        const Complex expect = psi.dot(obs.matrix() * psi);
        chain_worst = std::max(chain_worst, std::abs(w - expect) / std::max(1.0, std::abs(expect)));
    }
    o.require(abl_worst <= 1e-12, "ABL interchange dev " + num(abl_worst));
    o.require(wv_worst <= 1e-12, "weak-value conjugation dev " + num(wv_worst));
    o.require(chain_worst <= 1e-12, "reduction chain dev " + num(chain_worst));

    const StateVector pre(Vector((Vector(2) << std::cos(0.3), std::sin(0.3)).finished()));
    const CounterfactualReport cf = counterfactual_decomposition_check(pre, pauli_x(), pauli_z());
    o.require(cf.deviation_b <= 1e-12, "reading (b) dev " + num(cf.deviation_b));
    // sigma_x and sigma_z eigenbases are mutually unbiased, which makes reading (a) exact too.
    o.require(cf.deviation_a > 1e-6, "reading (a) dev on sigma_x/sigma_z " + num(cf.deviation_a));
    return o;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        int reps;
        double limit;
        Outcome (*fn)();
    };
    const std::vector<Entry> entries = {
        {1, 3, 1e-3, criterion1}, {2, 3, 1e-3, criterion2}, {3, 1, 1.0, criterion3},  {4, 1, 1.0, criterion4},
        {5, 1, 5.0, criterion5},  {6, 1, 1.0, criterion6},  {7, 3, 1e-2, criterion7}, {8, 1, 1.0, criterion8},
        {9, 1, 30.0, criterion9}, {10, 1, 10.0, criterion10}};
    int failures = 0;
    for (const Entry& e : entries) {
        const Outcome o = timed(e.reps, e.limit, e.fn);
        failures += o.ok ? 0 : 1;
        std::printf("Criterion %d: %s %s\n", e.id, o.ok ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(entries.size()) - failures, entries.size());
    return failures == 0 ? 0 : 1;
}
