#include "tsvf/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>


#include "tsvf/ideal_measurement.hpp"
#include "tsvf/lattice.hpp"
#include "tsvf/pointer.hpp"
#include "tsvf/protective.hpp"
#include "tsvf/time_machine.hpp"
#include "tsvf/weak_measurement.hpp"

namespace tsvf {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kSqrt2 = std::numbers::sqrt2;

std::string fmt(double v) { return format_double(v); }

json complex_json(Complex c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

ParamSpec num(std::string name, double def, std::string desc) {
    return {std::move(name), ParamType::number, def, std::move(desc), {}};
}
ParamSpec integer(std::string name, long long def, std::string desc) {
    return {std::move(name), ParamType::integer, def, std::move(desc), {}};
}
ParamSpec boolean(std::string name, bool def, std::string desc) {
    return {std::move(name), ParamType::boolean, def, std::move(desc), {}};
}
ParamSpec text(std::string name, std::string def, std::string desc, std::vector<std::string> choices = {}) {
    return {std::move(name), ParamType::string, std::move(def), std::move(desc), std::move(choices)};
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::bad_param, "parameter '" + key + "': " + why);
}

double positive(const json& p, const std::string& key) {
    const double v = p.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) bad(key, "must be a finite positive number");
    return v;
}

long long int_in(const json& p, const std::string& key, long long lo, long long hi) {
    const long long v = p.at(key).get<long long>();
    if (v < lo || v > hi) bad(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

double finite(const json& p, const std::string& key) {
    const double v = p.at(key).get<double>();
    if (!std::isfinite(v)) bad(key, "must be finite");
    return v;
}

std::vector<double> number_list(const json& p, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(p.at(key).get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            bad(key, "expected a comma-separated list of numbers, got '" + item + "'");
        }
    }
    if (out.empty()) bad(key, "list is empty");
    return out;
}

Series pointer_series(const std::string& name, const PointerResult& r) {
    Series s{name, {"q", "probability"}, {}};
    s.rows.reserve(r.q_prob.size());
    for (std::size_t j = 0; j < r.q_prob.size(); ++j) s.rows.push_back({r.q_grid.at(j), r.q_prob[j]});
    return s;
}

double variance(const PointerResult& r) {
    const double dq = r.q_grid.spacing();
    double v = 0.0;
    for (std::size_t j = 0; j < r.q_prob.size(); ++j) {
        const double d = r.q_grid.at(j) - r.mean;
        v += d * d * r.q_prob[j] * dq;
    }
    return v;
}

// Density of the mean of n readings, by the central limit theorem.
Series mean_density_series(const std::string& name, double center, double sd) {
    Series s{name, {"ensemble_mean", "density"}, {}};
    const int pts = 401;
    for (int k = 0; k < pts; ++k) {
        const double x = center + sd * (-6.0 + 12.0 * k / (pts - 1));
        const double z = (x - center) / sd;
        s.rows.push_back({x, std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi))});
    }
    return s;
}

class Builder {
public:
    explicit Builder(ScenarioResult& r) : r_(r) {}
    void check(const std::string& name, bool ok, const std::string& detail) { r_.checks.push_back({name, ok, detail}); }
    void scalar(const std::string& name, double v) { r_.scalars.emplace_back(name, v); }
    json& results() { return r_.results; }
    void series(Series s) { r_.series.push_back(std::move(s)); }
    void summary(std::string s) { r_.summary = std::move(s); }

private:
    ScenarioResult& r_;
};

DenseOperator box_projector(int dim, int box) {
    Matrix m = Matrix::Zero(dim, dim);
    m(box, box) = 1.0;
    return DenseOperator(m, true);
}

// ---------------------------------------------------------------------------

void run_three_box(const json& p, std::uint64_t, Builder& b) {
    const int n_particles = static_cast<int>(int_in(p, "n_particles", 1, 12));
    const double delta = positive(p, "delta");

    Vector psi(3), phi(3);
    psi << 1.0, 1.0, 1.0;
    phi << 1.0, 1.0, -1.0;
    psi /= std::sqrt(3.0);
    phi /= std::sqrt(3.0);
    const TwoStateVector tsv = TwoStateVector::from_kets(phi, psi);
    const DenseOperator p1 = box_projector(3, 0), p2 = box_projector(3, 1), p3 = box_projector(3, 2);

    const double prob1 = abl(tsv, p1).probability_of(1.0).value_or(kNaN);
    const double prob2 = abl(tsv, p2).probability_of(1.0).value_or(kNaN);
    b.check("prob_p1_certain", std::abs(prob1 - 1.0) <= 1e-12, "Prob(P1=1) = " + fmt(prob1));
    b.check("prob_p2_certain", std::abs(prob2 - 1.0) <= 1e-12, "Prob(P2=1) = " + fmt(prob2));

    const ProductRuleReport pr = product_rule_report(tsv, p1, p2);
    const bool product_ok = pr.ab_certain && std::abs(*pr.ab_certain) <= 1e-12 && pr.product_rule_holds &&
                            !*pr.product_rule_holds;
    b.check("product_p1p2_certain_zero", product_ok,
            "P1P2 certain " + (pr.ab_certain ? fmt(*pr.ab_certain) : std::string("none")));

    Matrix which = Matrix::Zero(3, 3);
    which.diagonal() << 1.0, 2.0, 3.0;
    const OutcomeDistribution joint = abl(tsv, DenseOperator(which, true));

    const Complex w1 = weak_value(tsv, p1).value, w2 = weak_value(tsv, p2).value, w3 = weak_value(tsv, p3).value;
    const double wdev = std::max({std::abs(w1 - 1.0), std::abs(w2 - 1.0), std::abs(w3 + 1.0)});
    b.check("weak_values_1_1_minus1", wdev <= 1e-12, "max deviation " + fmt(wdev));

    const TheoremReport th = theorem_i_check(tsv, p1);
    b.check("certainty_implies_weak_value_p1", th.status == TheoremStatus::pass, to_string(th.status));

    // Number of particles in box 3 for N independent particles.
    const double n3_closed = static_cast<double>(n_particles) * w3.real();
    json n3 = {{"n_particles", n_particles}, {"closed_form", n3_closed}};
    double n3_weak = n3_closed;
    std::size_t dim = 1;
    for (int k = 0; k < n_particles; ++k) dim *= 3;
    if (dim <= 729) {
        Vector big_psi = psi, big_phi = phi;
        for (int k = 1; k < n_particles; ++k) {
            big_psi = tensor_product(big_psi, psi);
            big_phi = tensor_product(big_phi, phi);
        }
        DenseOperator count = DenseOperator::zero(static_cast<Eigen::Index>(dim));
        for (int k = 0; k < n_particles; ++k) count = count + embed(p3, k, n_particles);
        const Complex wn = weak_value(TwoStateVector::from_kets(big_phi, big_psi), count.as_hermitian()).value;
        n3_weak = wn.real();
        n3["tensor"] = complex_json(wn);
        const double dev = std::abs(wn - Complex(-static_cast<double>(n_particles), 0.0));
        b.check("n3_weak_value_minus_n", dev <= 1e-10, "(N3)_w = " + fmt(wn.real()) + " vs " + std::to_string(-n_particles));
    } else {
        n3["tensor"] = nullptr;
    }

    // Pointers for P3 on one particle and for N3 on N particles, post-selected.
    const GaussianPointer ptr3 = GaussianPointer::for_range(delta, 0.0, 1.0);
    const PointerResult r3 = pointer_distribution_postselected(tsv, p3, ptr3);

    // Amplitude of N3 = k: C(N,k) <phi|1-P3|psi>^(N-k) <phi|P3|psi>^k, each factor relative to the overlap.
    const double a_out = (1.0 - w3.real()), a_in = w3.real();
    const GaussianPointer ptrn = GaussianPointer::for_range(delta, 0.0, static_cast<double>(n_particles));
    const Grid1D& q = ptrn.grid();
    Vector amp = Vector::Zero(static_cast<Eigen::Index>(q.points()));
    for (int k = 0; k <= n_particles; ++k) {
        const double c = std::exp(std::lgamma(n_particles + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n_particles - k + 1.0)) *
                         std::pow(a_out, n_particles - k) * std::pow(a_in, k);
        for (std::size_t j = 0; j < q.points(); ++j) amp(static_cast<Eigen::Index>(j)) += c * ptrn.amplitude(q.at(j) - k);
    }
    const PointerResult rn = summarize(WaveFunction1D(q, amp));

    b.series(pointer_series("pointer_p3", r3));
    b.series(pointer_series("pointer_n3", rn));

    json& res = b.results();
    res["prob_p1"] = prob1;
    res["prob_p2"] = prob2;
    res["product_rule"] = {{"p1_certain", optional_json(pr.a_certain)},
                           {"p2_certain", optional_json(pr.b_certain)},
                           {"p1p2_certain", optional_json(pr.ab_certain)},
                           {"holds", pr.product_rule_holds ? json(*pr.product_rule_holds) : json(nullptr)}};
    res["joint_opening"] = {{"eigenvalues", joint.eigenvalues}, {"probabilities", joint.probabilities}};
    res["weak_values"] = {complex_json(w1), complex_json(w2), complex_json(w3)};
    res["n3_weak_value"] = n3;
    res["pointer_p3"] = {{"delta", delta}, {"peak", r3.peak}, {"mean", r3.mean}};
    res["pointer_n3"] = {{"delta", delta}, {"peak", rn.peak}, {"mean", rn.mean}};

    b.scalar("prob_p1", prob1);
    b.scalar("prob_p2", prob2);
    b.scalar("p1p2_certain", opt_or_nan(pr.ab_certain));
    b.scalar("p1_weak", w1.real());
    b.scalar("p2_weak", w2.real());
    b.scalar("p3_weak", w3.real());
    b.scalar("n3_weak", n3_weak);
    b.scalar("p3_pointer_peak", r3.peak);
    b.scalar("p3_pointer_mean", r3.mean);
    b.scalar("n3_pointer_mean", rn.mean);
    b.summary("Prob(P1=1)=" + fmt(prob1) + " Prob(P2=1)=" + fmt(prob2) + " (P3)_w=" + fmt(w3.real()) +
              " (N3)_w=" + fmt(n3_weak) + " P3 pointer mean=" + fmt(r3.mean));
}

void run_n_box(const json& p, std::uint64_t, Builder& b) {
    const int n = static_cast<int>(int_in(p, "n", 3, 4096));
    Vector psi = Vector::Ones(n), phi = Vector::Ones(n);
    psi(n - 1) = std::sqrt(n - 2.0);
    phi(n - 1) = -std::sqrt(n - 2.0);
    psi.normalize();
    phi.normalize();
    const TwoStateVector tsv = TwoStateVector::from_kets(phi, psi);

    std::vector<double> probs, weaks;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const DenseOperator pi = box_projector(n, i);
        probs.push_back(abl(tsv, pi).probability_of(1.0).value_or(0.0));
        weaks.push_back(weak_value(tsv, pi).value.real());
        if (i < n - 1) worst = std::max(worst, std::abs(probs.back() - 1.0));
    }
    b.check("first_n_minus_1_boxes_certain", worst <= 1e-10, "max |Prob - 1| = " + fmt(worst));
    const double last_expected = -(n - 2.0);
    b.check("last_box_weak_value", std::abs(weaks.back() - last_expected) <= 1e-10 * n,
            "(P_N)_w = " + fmt(weaks.back()) + " vs " + fmt(last_expected));
    if (n == 3) {
        Vector psi3(3), phi3(3);
        psi3 << 1.0, 1.0, 1.0;
        phi3 << 1.0, 1.0, -1.0;
        const double d = std::max((psi - psi3.normalized()).norm(), (phi - phi3.normalized()).norm());
        b.check("reduces_to_three_box", d <= 1e-14, "state distance " + fmt(d));
    }

    json& res = b.results();
    res["n"] = n;
    res["prob_box_open"] = probs;
    res["weak_values"] = weaks;
    res["normalized_overlap"] = std::abs(tsv.normalized().overlap());
    b.scalar("n", n);
    b.scalar("max_certainty_deviation", worst);
    b.scalar("last_box_prob", probs.back());
    b.scalar("last_box_weak", weaks.back());
    b.summary("n=" + std::to_string(n) + ": boxes 1.." + std::to_string(n - 1) + " certain (max dev " + fmt(worst) +
              "), (P_N)_w=" + fmt(weaks.back()));
}

void run_epr(const json&, std::uint64_t, Builder& b) {
    const Vector singlet = (tensor_product(spin_up('z'), spin_down('z')) - tensor_product(spin_down('z'), spin_up('z'))) /
                           std::sqrt(2.0);
    const Vector post = tensor_product(spin_up('x'), spin_up('y'));
    const TwoStateVector tsv = TwoStateVector::from_kets(post, singlet);
    const DenseOperator s1y = embed(pauli_y(), 0, 2).as_hermitian();
    const DenseOperator s2x = embed(pauli_x(), 1, 2).as_hermitian();

    const ProductRuleReport pr = product_rule_report(tsv, s1y, s2x);
    auto is = [](const std::optional<double>& v, double x) { return v && std::abs(*v - x) <= 1e-12; };
    b.check("sigma1y_certain_minus1", is(pr.a_certain, -1.0), "sigma_1y certain " + (pr.a_certain ? fmt(*pr.a_certain) : "none"));
    b.check("sigma2x_certain_minus1", is(pr.b_certain, -1.0), "sigma_2x certain " + (pr.b_certain ? fmt(*pr.b_certain) : "none"));
    b.check("product_certain_minus1", is(pr.ab_certain, -1.0),
            "sigma_1y sigma_2x certain " + (pr.ab_certain ? fmt(*pr.ab_certain) : "none"));
    b.check("product_rule_violated", pr.product_rule_holds && !*pr.product_rule_holds, "product of values is +1");

    // Particle 1 alone carries only the backward state <up_x|.
    Matrix proj = Matrix::Zero(4, 4);
    proj = tensor_product(Matrix(spin_up('x') * spin_up('x').adjoint()), Matrix(Matrix::Identity(2, 2)));
    const DenseOperator post_proj(proj, true);
    double worst = 0.0;
    json backward = json::array();
    const std::vector<std::pair<std::string, std::array<double, 3>>> axes = {
        {"x", {1, 0, 0}}, {"y", {0, 1, 0}}, {"z", {0, 0, 1}}, {"xi", {1 / kSqrt2, 1 / kSqrt2, 0}}};
    for (const auto& [label, n] : axes) {
        const DenseOperator s = pauli_along(n[0], n[1], n[2]);
        const OutcomeDistribution d = abl_degenerate_post(StateVector(singlet), post_proj, embed(s, 0, 2).as_hermitian());
        const OutcomeDistribution ref = born(StateVector(spin_up('x')), s);
        double dev = 0.0;
        for (std::size_t k = 0; k < ref.eigenvalues.size(); ++k)
            dev = std::max(dev, std::abs(d.probability_of(ref.eigenvalues[k]).value_or(0.0) - ref.probabilities[k]));
        worst = std::max(worst, dev);
        backward.push_back({{"axis", label}, {"probabilities", d.probabilities}, {"born_backward", ref.probabilities}, {"deviation", dev}});
    }
    b.check("backward_only_description", worst <= 1e-12, "max deviation from Born with |up_x> " + fmt(worst));

    json& res = b.results();
    res["sigma1y_certain"] = optional_json(pr.a_certain);
    res["sigma2x_certain"] = optional_json(pr.b_certain);
    res["product_certain"] = optional_json(pr.ab_certain);
    res["product_rule_holds"] = pr.product_rule_holds ? json(*pr.product_rule_holds) : json(nullptr);
    res["commutator_norm"] = pr.commutator_norm;
    res["backward_only"] = backward;
    b.scalar("sigma1y", opt_or_nan(pr.a_certain));
    b.scalar("sigma2x", opt_or_nan(pr.b_certain));
    b.scalar("product", opt_or_nan(pr.ab_certain));
    b.scalar("backward_deviation", worst);
    b.summary("sigma_1y=" + fmt(opt_or_nan(pr.a_certain)) + " sigma_2x=" + fmt(opt_or_nan(pr.b_certain)) +
              " product=" + fmt(opt_or_nan(pr.ab_certain)) + " (product rule fails)");
}

void run_spin_xi_weak(const json& p, std::uint64_t seed, Builder& b) {
    const double delta = positive(p, "delta");
    const std::size_t ensemble = static_cast<std::size_t>(int_in(p, "ensemble", 2, 100000000));
    const bool postselect = p.at("postselect").get<bool>();
    const std::size_t points = static_cast<std::size_t>(int_in(p, "points", 256, 1 << 22));

    const StateVector pre(spin_up('x'));
    const TwoStateVector tsv = TwoStateVector::from_kets(spin_up('y'), spin_up('x'));
    const DenseOperator sxi = sigma_xi();
    const WeakValue wv = weak_value(tsv, sxi);
    b.check("weak_value_sqrt2", std::abs(wv.value - kSqrt2) <= 1e-12, "(sigma_xi)_w = " + fmt(wv.value.real()));
    const double expectation = 1.0 / kSqrt2;

    auto ptr = [&](double d) { return GaussianPointer::for_range(d, -1.0, 1.0, points); };

    const GaussianPointer main_ptr = ptr(delta);
    const PointerResult pre_r = pointer_distribution_preselected(pre, sxi, main_ptr);
    const PointerResult post_r = pointer_distribution_postselected(tsv, sxi, main_ptr);
    const EnsembleEstimate pre_e = ensemble_mean_estimator(pre_r, ensemble, seed);
    const EnsembleEstimate post_e = ensemble_mean_estimator(post_r, ensemble, seed);
    const PointerResult& chosen = postselect ? post_r : pre_r;
    const EnsembleEstimate& chosen_e = postselect ? post_e : pre_e;
    const double center = postselect ? wv.value.real() : expectation;

    if (postselect) {
        const std::vector<double> fig3 = {0.1, 0.25, 1.0, 3.0, 10.0};
        const char* names[] = {"fig3a", "fig3b", "fig3c", "fig3d", "fig3e"};
        json panels = json::array();
        for (std::size_t k = 0; k < fig3.size(); ++k) {
            const PointerResult r = pointer_distribution_postselected(tsv, sxi, ptr(fig3[k]));
            b.series(pointer_series(names[k], r));
            panels.push_back({{"series", names[k]}, {"delta", fig3[k]}, {"peak", r.peak}, {"mean", r.mean}});
        }
        b.results()["fig3"] = panels;
        b.series(mean_density_series("fig3f", center, std::sqrt(variance(post_r) / static_cast<double>(ensemble))));
    } else {
        const PointerResult a = pointer_distribution_preselected(pre, sxi, ptr(0.1));
        const PointerResult c = pointer_distribution_preselected(pre, sxi, ptr(10.0));
        b.series(pointer_series("fig2a", a));
        b.series(pointer_series("fig2b", c));
        const std::vector<std::size_t> maxima = local_maxima(a.q_prob, 0.01);
        json peaks = json::array();
        for (auto i : maxima) peaks.push_back(a.q_grid.at(i));
        b.results()["fig2a_maxima"] = peaks;
        b.results()["fig2b_mean"] = c.mean;
        b.series(mean_density_series("fig2c", center, std::sqrt(variance(pre_r) / static_cast<double>(ensemble))));
    }
    b.series(pointer_series("pointer", chosen));

    // Regime claims only apply to a weak pointer.
    if (delta >= 10.0) {
        if (postselect)
            b.check("postselected_peak_near_sqrt2", std::abs(post_r.peak - kSqrt2) <= 0.05, "peak " + fmt(post_r.peak));
        b.check("preselected_mean_near_expectation", std::abs(pre_r.mean - expectation) <= 0.02, "mean " + fmt(pre_r.mean));
    }

    const MomentumShift ms = momentum_shift_imaginary_part(tsv, sxi, main_ptr);

    json& res = b.results();
    res["weak_value"] = complex_json(wv.value);
    res["overlap_magnitude"] = wv.overlap_magnitude;
    res["expectation"] = expectation;
    res["preselected"] = {{"peak", pre_r.peak}, {"mean", pre_r.mean}, {"variance", variance(pre_r)},
                          {"ensemble_mean", pre_e.mean}, {"ensemble_stderr", pre_e.standard_error}};
    res["postselected"] = {{"peak", post_r.peak}, {"mean", post_r.mean}, {"variance", variance(post_r)},
                           {"ensemble_mean", post_e.mean}, {"ensemble_stderr", post_e.standard_error},
                           {"postselection_probability", post_r.projected_norm}};
    res["momentum_shift"] = {{"measured", ms.measured}, {"predicted", ms.predicted}, {"weak_regime", ms.weak_regime}};
    res["ensemble"] = {{"n", ensemble}, {"seed", seed}};

    b.scalar("delta", delta);
    b.scalar("weak_value", wv.value.real());
    b.scalar("peak", chosen.peak);
    b.scalar("mean", chosen.mean);
    b.scalar("ensemble_mean", chosen_e.mean);
    b.scalar("ensemble_stderr", chosen_e.standard_error);
    b.scalar("preselected_mean", pre_r.mean);
    b.scalar("postselected_peak", post_r.peak);
    b.summary(std::string(postselect ? "post-selected" : "pre-selected") + " delta=" + fmt(delta) + ": peak=" +
              fmt(chosen.peak) + " mean=" + fmt(chosen.mean) + " ensemble mean=" + fmt(chosen_e.mean) + " +- " +
              fmt(chosen_e.standard_error) + " (weak value " + fmt(wv.value.real()) + ")");
}

void run_n_spin(const json& p, std::uint64_t, Builder& b) {
    const int n = static_cast<int>(int_in(p, "n", 1, 100000));
    const double delta = positive(p, "delta");
    const std::size_t points = static_cast<std::size_t>(int_in(p, "points", 256, 1 << 22));
    const NSpinCenters centers = p.at("centers").get<std::string>() == "printed" ? NSpinCenters::printed : NSpinCenters::derived;

    const GaussianPointer ptr = GaussianPointer::for_range(delta, -1.0, 2.0, points);
    const PointerResult r = n_spin_pointer_closed_form(n, ptr, centers);
    const std::vector<std::size_t> maxima = local_maxima(r.q_prob, 0.01);
    json peaks = json::array();
    for (auto i : maxima) peaks.push_back({{"q", r.q_grid.at(i)}, {"probability", r.q_prob[i]}});

    double mass = 0.0;
    for (double v : r.q_prob) mass += v;
    mass *= r.q_grid.spacing();
    b.check("pointer_density_normalized", std::abs(mass - 1.0) <= 1e-9, "integral " + fmt(mass));

    if (n <= 8) {
        const PointerResult t = n_spin_pointer_tensor(n, ptr);
        double dev = 0.0;
        for (std::size_t j = 0; j < r.q_prob.size(); ++j) dev = std::max(dev, std::abs(r.q_prob[j] - t.q_prob[j]));
        if (centers == NSpinCenters::derived)
            b.check("closed_form_matches_tensor", dev <= 1e-10, "max density deviation " + fmt(dev));
        b.results()["tensor_max_deviation"] = dev;
    }

    // Width panels on one shared grid.
    const std::vector<double> widths = {0.01, 0.05, 0.1, 0.25, 1.0};
    const Grid1D fig_grid(-8.0, 9.0, 16384);
    Series fig{"fig4", {"q"}, {}};
    std::vector<PointerResult> panels;
    json panel_json = json::array();
    for (double w : widths) {
        panels.push_back(n_spin_pointer_closed_form(n, GaussianPointer(w, fig_grid), centers));
        fig.columns.push_back("delta_" + fmt(w));
        panel_json.push_back({{"delta", w}, {"peak", panels.back().peak}, {"maxima", local_maxima(panels.back().q_prob, 0.01).size()}});
    }
    for (std::size_t j = 0; j < fig_grid.points(); ++j) {
        std::vector<double> row{fig_grid.at(j)};
        for (const auto& pr : panels) row.push_back(pr.q_prob[j]);
        fig.rows.push_back(std::move(row));
    }
    b.series(std::move(fig));
    b.series(pointer_series("pointer", r));

    const TwoStateVector tsv = n <= 10 ? n_spin_description(n) : TwoStateVector();
    json& res = b.results();
    res["n"] = n;
    res["delta"] = delta;
    res["centers"] = p.at("centers");
    res["weak_value"] = kSqrt2;  // each spin contributes (sigma_xi)_w
    if (n <= 10) res["weak_value_tensor"] = complex_json(weak_value(tsv, n_spin_observable(n)).value);
    res["peak"] = r.peak;
    res["mean"] = r.mean;
    res["local_maxima"] = peaks;
    res["single_peaked"] = maxima.size() == 1;
    res["peak_within_0_05_of_sqrt2"] = std::abs(r.peak - kSqrt2) <= 0.05;
    res["fig4"] = panel_json;

    b.scalar("n", n);
    b.scalar("delta", delta);
    b.scalar("peak", r.peak);
    b.scalar("mean", r.mean);
    b.scalar("local_maxima", static_cast<double>(maxima.size()));
    b.summary("n=" + std::to_string(n) + " delta=" + fmt(delta) + ": peak=" + fmt(r.peak) + " mean=" + fmt(r.mean) + ", " +
              std::to_string(maxima.size()) + " local maxima above 1%");
}

void run_negative_kinetic(const json& p, std::uint64_t, Builder& b) {
    const double half = positive(p, "lattice_half_extent");
    const std::size_t sites = static_cast<std::size_t>(int_in(p, "sites", 16, 1 << 20));
    SquareWell well;
    well.depth = finite(p, "well_depth");
    if (well.depth < 0.0) bad("well_depth", "must be >= 0");
    well.half_width = positive(p, "well_half_width");
    const double x_f = finite(p, "postselect_x");
    const double delta = positive(p, "delta");
    const bool inside = p.at("allow_inside").get<bool>();

    const Grid1D grid(-half, half, sites);
    const LatticeGround g = lattice_ground_state(grid, well);
    const KineticWeak kw = kinetic_weak_value(g, x_f, inside);
    const double expected = g.e0 - kw.potential;
    b.check("ground_state_bound", g.e0 < 0.0, "E0 = " + fmt(g.e0));
    b.check("kinetic_weak_value_identity", std::abs(kw.k_w - expected) <= 1e-10,
            "K_w - (E0 - U) = " + fmt(kw.k_w - expected));
    const KineticPointer kp = kinetic_pointer(g, kw.site, delta);
    b.check("pointer_shift_negative", kw.potential != 0.0 || kp.pointer.mean < 0.0, "pointer mean " + fmt(kp.pointer.mean));

    double continuum = kNaN;
    if (well.depth > 0.0) continuum = continuum_ground_energy(well);

    Series psi{"ground_state", {"x", "psi", "potential"}, {}};
    for (std::size_t j = 0; j < sites; ++j) psi.rows.push_back({grid.at(j), static_cast<double>(g.psi[j]), g.potential[j]});
    b.series(std::move(psi));
    b.series(pointer_series("kinetic_pointer", kp.pointer));

    json& res = b.results();
    res["e0"] = g.e0;
    res["continuum_e0"] = continuum;
    res["relative_lattice_error"] = std::abs((g.e0 - continuum) / continuum);
    res["site"] = kw.site;
    res["postselect_coordinate"] = kw.coordinate;
    res["potential_at_site"] = kw.potential;
    res["kinetic_weak_value"] = kw.k_w;
    res["kinetic_minus_e0"] = kw.k_w - g.e0;
    res["eigen_residual"] = kw.eigen_residual;
    res["pointer"] = {{"delta", delta}, {"mean", kp.pointer.mean}, {"peak", kp.pointer.peak}, {"window_weight", kp.window_weight}};

    b.scalar("e0", g.e0);
    b.scalar("kinetic_weak_value", kw.k_w);
    b.scalar("kinetic_minus_e0", kw.k_w - g.e0);
    b.scalar("pointer_mean", kp.pointer.mean);
    b.scalar("pointer_peak", kp.pointer.peak);
    b.summary("E0=" + fmt(g.e0) + " K_w=" + fmt(kw.k_w) + " at x=" + fmt(kw.coordinate) + ", pointer mean " +
              fmt(kp.pointer.mean) + " (delta " + fmt(delta) + ")");
}

void run_spin_cone(const json& p, std::uint64_t, Builder& b) {
    const double chi = finite(p, "chi");
    const int samples = static_cast<int>(int_in(p, "samples", 8, 1 << 20));
    if (chi < 0.0 || chi > std::numbers::pi / 2) bad("chi", "must lie in [0, pi/2]");

    GeneralizedTwoStateVector g({{Complex(std::cos(chi), 0.0), CoStateVector::from_ket(spin_up('z')), StateVector(spin_up('z'))},
                                 {Complex(-std::sin(chi), 0.0), CoStateVector::from_ket(spin_down('z')), StateVector(spin_down('z'))}});
    const ConeResult cone = certainty_cone(g, samples);

    const double t = std::tan(chi);
    const double derived = 2.0 * std::atan(std::sqrt(t));
    const double printed = 4.0 * std::atan(std::sqrt(t));
    const double cos_expected = (1.0 - t) / (1.0 + t);

    double min_prob = 1.0, cos_dev = 0.0;
    Series s{"cone", {"theta", "phi", "probability"}, {}};
    for (const Direction& d : cone.directions) {
        min_prob = std::min(min_prob, d.probability);
        cos_dev = std::max(cos_dev, std::abs(std::cos(d.theta) - cos_expected));
        s.rows.push_back({d.theta, d.phi, d.probability});
    }
    b.series(std::move(s));

    if (cone.kind == ConeKind::cone || cone.kind == ConeKind::single_direction) {
        b.check("directions_certified", !cone.directions.empty() && cone.rejected == 0 && min_prob >= 1.0 - 1e-10,
                std::to_string(cone.directions.size()) + " certified, " + std::to_string(cone.rejected) + " rejected, min prob " + fmt(min_prob));
        b.check("cone_angle_relation", cos_dev <= 1e-10, "max |cos(theta) - (1-tan chi)/(1+tan chi)| = " + fmt(cos_dev));
    }

    json& res = b.results();
    res["chi"] = chi;
    res["kind"] = to_string(cone.kind);
    res["axis"] = cone.axis;
    res["half_angle"] = optional_json(cone.half_angle);
    res["half_angle_derived"] = derived;
    res["full_angle_printed_formula"] = printed;
    res["printed_formula_over_half_angle"] = cone.half_angle && *cone.half_angle > 0 ? printed / *cone.half_angle : kNaN;
    res["certified_directions"] = cone.directions.size();
    res["rejected"] = cone.rejected;
    res["min_probability"] = cone.directions.empty() ? kNaN : min_prob;

    b.scalar("chi", chi);
    b.scalar("half_angle", opt_or_nan(cone.half_angle));
    b.scalar("half_angle_derived", derived);
    b.scalar("printed_formula", printed);
    b.scalar("min_probability", cone.directions.empty() ? kNaN : min_prob);
    b.summary("chi=" + fmt(chi) + ": " + to_string(cone.kind) + ", half-angle " + fmt(opt_or_nan(cone.half_angle)) +
              " (2 atan sqrt tan chi = " + fmt(derived) + ", printed 4 atan form = " + fmt(printed) + ")");
}

void run_time_machine(const json& p, std::uint64_t, Builder& b) {
    TimeMachineConfig cfg;
    cfg.n_terms = static_cast<int>(int_in(p, "n_terms", 1, 64));
    cfg.eta = finite(p, "eta");
    if (std::abs(cfg.eta) > 50.0) bad("eta", "|eta| must not exceed 50");
    cfg.delta_t = finite(p, "delta_t");
    if (cfg.delta_t < 0.0) bad("delta_t", "must be >= 0");
    cfg.external_time = positive(p, "external_time");
    cfg.shell_mass = finite(p, "shell_mass");
    if (cfg.shell_mass < 0.0) bad("shell_mass", "must be >= 0");
    cfg.r0 = positive(p, "r0");
    const double width = positive(p, "width");
    const double t_min = finite(p, "t_min"), t_max = finite(p, "t_max");
    if (!(t_max > t_min)) bad("t_max", "must exceed t_min");
    long long points = p.at("points").get<long long>();
    if (points == 0) {
        const double step = cfg.delta_t > 0.0 ? cfg.delta_t / cfg.n_terms : 1.0 / cfg.n_terms;
        points = std::llround((t_max - t_min) / step) + 1;
    }
    if (points < 16 || points > (1LL << 22)) bad("points", "must be 0 (automatic) or lie in [16, 4194304]");
    cfg.validate();

    const Grid1D grid(t_min, t_max, static_cast<std::size_t>(points));
    const WideSignal f = WideSignal::gaussian(width);

    const MachineRun run = run_machine(f, grid, cfg);
    const AmplifiedShift amp = amplified_shift(f, grid, cfg.n_terms, cfg.eta, cfg.delta_t);

    const double sum_dev = static_cast<double>(abs(run.schedule.sum() - Wide(1)));
    b.check("weights_sum_to_one", sum_dev <= 1e-30, "|sum alpha - 1| = " + fmt(sum_dev));
    const double path_dev = std::abs(run.distortion - amp.distortion);
    b.check("register_contraction_matches_shift_sum", path_dev <= 1e-12 * std::max(1.0, amp.distortion),
            "distortion difference " + fmt(path_dev));
    double radius_dev = 0.0;
    for (int n = 0; n <= cfg.n_terms; ++n) {
        const double want = n * cfg.delta_t / cfg.n_terms;
        radius_dev = std::max(radius_dev, std::abs(run.realized_shifts[static_cast<std::size_t>(n)] - want));
    }
    b.check("radii_realize_shifts", radius_dev <= 1e-9 * std::max(1.0, cfg.delta_t), "max shift error " + fmt(radius_dev));
    b.check("success_not_above_direct_projection", run.success_prob <= run.direct_projection_prob + 1e-15,
            fmt(run.success_prob) + " vs " + fmt(run.direct_projection_prob));

    Series fig{"fig5", {"t", "original", "superposed", "ideal"}, {}};
    for (std::size_t j = 0; j < amp.original.grid.points(); ++j)
        fig.rows.push_back({amp.original.grid.at(j), amp.original.amplitudes(static_cast<Eigen::Index>(j)).real(),
                            amp.shifted.amplitudes(static_cast<Eigen::Index>(j)).real(),
                            amp.ideal.amplitudes(static_cast<Eigen::Index>(j)).real()});
    b.series(std::move(fig));

    Series sched{"schedule", {"n", "alpha", "log_abs_alpha", "shift", "radius", "realized_shift"}, {}};
    const std::vector<double> wd = run.schedule.weights_double();
    for (int n = 0; n <= cfg.n_terms; ++n) {
        const auto k = static_cast<std::size_t>(n);
        sched.rows.push_back({static_cast<double>(n), wd[k], run.schedule.log_abs[k], n * cfg.delta_t / cfg.n_terms,
                              run.radii[k], run.realized_shifts[k]});
    }
    b.series(std::move(sched));

    std::vector<int> probe_n;
    if (cfg.n_terms >= 2) probe_n = {cfg.n_terms - 1, cfg.n_terms};
    json scaling = nullptr;
    double ratio = kNaN, reference = kNaN;
    if (!probe_n.empty() && std::abs(2.0 * cfg.eta - 1.0) > 0.0) {
        const SuccessScaling sc = success_scaling_probe(cfg.eta, probe_n);
        ratio = sc.ratios.front();
        reference = sc.reference;
        scaling = {{"n_values", sc.n_values}, {"log10_probability", sc.log10_prob}, {"ratio", ratio},
                   {"reference_1_over_2eta_minus_1", reference}, {"relative_gap", std::abs(ratio - reference) / std::abs(reference)}};
    }

    if (p.at("distortion_sweep").get<bool>()) {
        Series sweep{"distortion", {"n_terms", "distortion", "high_band_fraction"}, {}};
        json rows = json::array();
        for (int n : {8, 13, 21, 34}) {
            const double step = cfg.delta_t > 0.0 ? cfg.delta_t / n : 1.0 / n;
            const Grid1D gn(t_min, t_max, static_cast<std::size_t>(std::llround((t_max - t_min) / step) + 1));
            const AmplifiedShift a = amplified_shift(f, gn, n, cfg.eta, cfg.delta_t);
            sweep.rows.push_back({static_cast<double>(n), a.distortion, a.high_band_fraction});
            rows.push_back({{"n_terms", n}, {"distortion", a.distortion}});
        }
        bool decreasing = true;
        for (std::size_t k = 1; k < sweep.rows.size(); ++k) decreasing = decreasing && sweep.rows[k][1] < sweep.rows[k - 1][1];
        b.check("distortion_decreases_with_n", decreasing, "N = 8, 13, 21, 34");
        b.results()["distortion_sweep"] = rows;
        b.series(std::move(sweep));
    }

    json& res = b.results();
    res["distortion"] = amp.distortion;
    res["high_band_fraction"] = amp.high_band_fraction;
    res["warning"] = amp.warning ? json(*amp.warning) : json(nullptr);
    res["success_probability"] = run.success_prob;
    res["log10_success_probability"] = run.log10_success_prob;
    res["direct_projection_probability"] = run.direct_projection_prob;
    res["final_fidelity"] = run.final_fidelity;
    res["sum_abs_weights"] = static_cast<double>([&] {
        Wide s = 0;
        for (const auto& w : run.schedule.weights) s += abs(w);
        return s;
    }());
    res["schwarzschild_radius"] = cfg.schwarzschild_radius();
    res["success_scaling"] = scaling;
    res["grid_points"] = points;

    b.scalar("n_terms", cfg.n_terms);
    b.scalar("eta", cfg.eta);
    b.scalar("distortion", amp.distortion);
    b.scalar("log10_success_probability", run.log10_success_prob);
    b.scalar("final_fidelity", run.final_fidelity);
    b.scalar("success_ratio", ratio);
    b.scalar("reference_ratio", reference);
    b.summary("N=" + std::to_string(cfg.n_terms) + " eta=" + fmt(cfg.eta) + ": distortion=" + fmt(amp.distortion) +
              " log10 Prob(success)=" + fmt(run.log10_success_prob) + " fidelity=" + fmt(run.final_fidelity));
}

void run_protective(const json& p, std::uint64_t, Builder& b) {
    const std::vector<double> times = number_list(p, "times");
    for (double t : times)
        if (!(t > 0.0)) bad("times", "every time must be positive");
    const double lambda = finite(p, "lambda");
    if (lambda < 0.0) bad("lambda", "must be >= 0");
    const int spin_n = static_cast<int>(int_in(p, "spin_n", 1, 200));
    const double p0 = positive(p, "p0");
    const double pdelta = positive(p, "pointer_delta");
    const double ramp = finite(p, "ramp_fraction");
    if (!(ramp > 0.0 && ramp < 0.5)) bad("ramp_fraction", "must lie in (0, 0.5)");
    const int steps = static_cast<int>(int_in(p, "steps", 100, 10000000));

    // Single-state protection: H0 = sigma_z protects |up_z>, A = sigma_z + 0.3 sigma_x.
    const DenseOperator h0 = pauli_z();
    const DenseOperator a(pauli_z().matrix() + 0.3 * pauli_x().matrix(), true);
    const StateVector init(spin_up('z'));
    const double target = (spin_up('z').adjoint() * a.matrix() * spin_up('z'))(0).real();
    const GaussianPointer ptr = GaussianPointer::for_range(pdelta, -1.5, 1.5);

    Series tab{"adiabatic", {"total_time", "pointer_shift", "error", "leakage"}, {}};
    json rows = json::array();
    std::vector<double> errors;
    bool flagged = false;
    for (double T : times) {
        AdiabaticSchedule s;
        s.total_time = T;
        s.ramp_fraction = ramp;
        s.steps = steps;
        const AdiabaticResult r = adiabatic_protective_measurement(h0, a, init, s, ptr);
        errors.push_back(r.pointer_shift - target);
        flagged = flagged || r.adiabaticity_flag;
        tab.rows.push_back({T, r.pointer_shift, errors.back(), r.leakage});
        rows.push_back({{"total_time", T}, {"pointer_shift", r.pointer_shift}, {"error", errors.back()}, {"leakage", r.leakage}});
    }
    b.series(std::move(tab));
    std::vector<double> ratios;
    for (std::size_t k = 1; k < errors.size(); ++k) ratios.push_back(std::abs(errors[k]) / std::abs(errors[k - 1]));
    double worst_ratio = ratios.empty() ? kNaN : *std::max_element(ratios.begin(), ratios.end());
    b.check("adiabatic_leakage_below_1pct", !flagged, flagged ? "leakage above 1% for some T" : "leakage below 1%");

    const std::array<double, 3> alpha{1, 0, 0}, beta{0, 1, 0};
    const DenseOperator sxi = sigma_xi();
    const ProtectedMeasurement prot = protected_two_state_measurement(alpha, beta, sxi, spin_n, lambda, p0);
    const ProtectedMeasurement ctrl = protected_two_state_measurement(alpha, beta, sxi, spin_n, 0.0, p0);
    b.check("target_weak_value_sqrt2", std::abs(prot.target_weak - kSqrt2) <= 1e-12, "(sigma_xi)_w = " + fmt(prot.target_weak.real()));
    const bool within = std::abs(prot.error) <= 0.02 * kSqrt2;
    const bool control_within = std::abs(ctrl.error) <= 0.02 * kSqrt2;
    if (prot.lambda_n_over_p0 >= 50.0)
        b.check("protected_shift_within_2pct", within, "shift " + fmt(prot.shift) + " at lambda N / P0 = " + fmt(prot.lambda_n_over_p0));

    // H_eff maps |alpha> to -lambda N |alpha> on the right and <beta| on the left.
    const ModelSpinProtection model = model_spin_protection(StateVector(spin_up('x')), StateVector(spin_up('y')), spin_n, lambda > 0 ? lambda : 1.0);
    const Matrix& heff = model.effective.h_eff.matrix();
    const double lam_eff = lambda > 0 ? lambda : 1.0;
    const double right = (heff * spin_up('x') + lam_eff * spin_n * spin_up('x')).norm();
    b.check("effective_hamiltonian_eigenvector", right <= 1e-9 * lam_eff * spin_n, "residual " + fmt(right));

    Series ps{"protective_pointer", {"q", "protected", "control"}, {}};
    for (std::size_t j = 0; j < prot.pointer.q_prob.size(); ++j)
        ps.rows.push_back({prot.pointer.q_grid.at(j), prot.pointer.q_prob[j], ctrl.pointer.q_prob[j]});
    b.series(std::move(ps));

    json& res = b.results();
    res["single_state"] = {{"expectation", target}, {"runs", rows}, {"error_ratios", ratios},
                           {"converges", !ratios.empty() && worst_ratio <= 0.75}};
    res["two_state"] = {{"shift", prot.shift}, {"target_weak", complex_json(prot.target_weak)}, {"error", prot.error},
                        {"relative_error", prot.error / kSqrt2}, {"lambda_n_over_p0", prot.lambda_n_over_p0},
                        {"postselection_amplitude", prot.postselection_amplitude}, {"within_2pct", within}};
    res["control"] = {{"shift", ctrl.shift}, {"error", ctrl.error}, {"within_2pct", control_within}};
    res["effective_weak_spin"] = {complex_json(model.effective.spin_weak.wx), complex_json(model.effective.spin_weak.wy),
                                  complex_json(model.effective.spin_weak.wz)};

    b.scalar("lambda", lambda);
    b.scalar("worst_error_ratio", worst_ratio);
    b.scalar("last_error", errors.back());
    b.scalar("protected_shift", prot.shift);
    b.scalar("protected_error", prot.error);
    b.scalar("control_shift", ctrl.shift);
    b.summary("adiabatic error ratios <= " + fmt(worst_ratio) + "; protected shift " + fmt(prot.shift) + " (target " +
              fmt(kSqrt2) + "), unprotected " + fmt(ctrl.shift));
}

using Runner = void (*)(const json&, std::uint64_t, Builder&);

struct Entry {
    ScenarioInfo info;
    Runner run;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        {{"three_box", "Three-box particle: certain in box 1 and in box 2, weak values (1, 1, -1), N-particle count in box 3",
          {integer("n_particles", 5, "particles for the box-3 count weak value"),
           num("delta", 10.0, "pointer width for the weak box-3 readings")},
          {"pointer_p3", "pointer_n3"}},
         run_three_box},
        {{"n_box", "N boxes: the particle is found with certainty in any of the first N-1 boxes",
          {integer("n", 5, "number of boxes (>= 3)")}, {}},
         run_n_box},
        {{"epr_product_rule", "Singlet pre-selected, <up_x|<up_y| post-selected: product rule fails", {}, {}}, run_epr},
        {{"spin_xi_weak", "Weak measurement of sigma_xi between up_x and up_y: pointer distributions and ensemble means",
          {num("delta", 10.0, "pointer width"), integer("ensemble", 5000, "readings per ensemble"),
           boolean("postselect", true, "condition on the final up_y outcome"),
           integer("points", 4096, "pointer grid points")},
          {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "pointer"}},
         run_spin_xi_weak},
        {{"n_spin_single_system", "Single measurement of the mean of sigma_xi over n spins",
          {integer("n", 20, "number of spins"), num("delta", 0.25, "pointer width"),
           integer("points", 16384, "pointer grid points"),
           text("centers", "derived", "Gaussian centers of the closed form", {"derived", "printed"})},
          {"fig4", "pointer"}},
         run_n_spin},
        {{"negative_kinetic_energy", "Kinetic-energy weak value of a bound state post-selected where U = 0",
          {num("lattice_half_extent", 15.9921875, "lattice spans [-L, L]"), integer("sites", 2048, "lattice sites"),
           num("well_depth", 5.0, "square-well depth"), num("well_half_width", 1.0, "square-well half width"),
           num("postselect_x", 2.0, "post-selected position"), num("delta", 10.0, "pointer width"),
           boolean("allow_inside", false, "accept a post-selection site inside the well")},
          {"ground_state", "kinetic_pointer"}},
         run_negative_kinetic},
        {{"spin_cone", "Cone of certain spin directions for cos(chi)<up_z||up_z> - sin(chi)<down_z||down_z>",
          {num("chi", std::numbers::pi / 8, "mixing angle in [0, pi/2]"), integer("samples", 64, "directions sampled on the cone")},
          {"cone"}},
         run_spin_cone},
        {{"time_machine", "Time-translation machine: binomial superposition of shell-induced time shifts",
          {integer("n_terms", 13, "register size N"), num("eta", 10.0, "amplification eta"),
           num("delta_t", 1.0, "largest single-branch shift"), num("width", 4.0, "sigma of the amplitude exp(-t^2 / 2 sigma^2)"),
           num("t_min", -40.0, "grid start"), num("t_max", 60.0, "grid end"),
           integer("points", 0, "grid points; 0 chooses a spacing of delta_t / N"),
           num("external_time", 100.0, "external time T in units of delta_t"),
           num("shell_mass", 5.972e24, "shell mass in kg"), num("r0", 6.4e6, "reference shell radius in m"),
           boolean("distortion_sweep", false, "also compute distortion for N = 8, 13, 21, 34")},
          {"fig5", "schedule", "distortion"}},
         run_time_machine},
        {{"protective_measurement", "Adiabatic protective measurement and two-state protection by a large spin",
          {text("times", "10,20,40,80", "comma-separated adiabatic run times"), num("lambda", 5.0, "protection strength"),
           integer("spin_n", 10, "protector spin N"), num("p0", 1.0, "pointer momentum spread"),
           num("pointer_delta", 5.0, "pointer width for adiabatic runs"), num("ramp_fraction", 0.1, "cosine ramp fraction"),
           integer("steps", 1000, "Magnus steps across the ramps")},
          {"adiabatic", "protective_pointer"}},
         run_protective},
    };
    return table;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : entries())
        if (e.info.name == name) return e;
    throw Error(ErrorCode::unknown_scenario, "unknown scenario '" + name + "'");
}

const ParamSpec& find_param(const ScenarioInfo& info, const std::string& key) {
    for (const auto& ps : info.params)
        if (ps.name == key) return ps;
    throw Error(ErrorCode::bad_param, "unknown parameter '" + key + "' for scenario " + info.name);
}

json coerce(const ParamSpec& ps, const json& v, const std::string& scenario) {
    auto fail = [&](const std::string& why) -> json {
        throw Error(ErrorCode::bad_param, "parameter '" + ps.name + "' of " + scenario + ": " + why);
    };
    switch (ps.type) {
        case ParamType::number:
            if (v.is_number()) return v.get<double>();
            return fail("expected a number");
        case ParamType::integer:
            if (v.is_number_integer()) return v.get<long long>();
            if (v.is_number_float()) {
                const double d = v.get<double>();
                if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
            }
            return fail("expected an integer");
        case ParamType::boolean:
            if (v.is_boolean()) return v;
            return fail("expected true or false");
        case ParamType::string:
            if (!v.is_string()) return fail("expected a string");
            if (!ps.choices.empty() && std::find(ps.choices.begin(), ps.choices.end(), v.get<std::string>()) == ps.choices.end())
                return fail("must be one of the listed choices");
            return v;
    }
    return fail("unsupported type");
}

}  // namespace

std::string to_string(ParamType t) {
    switch (t) {
        case ParamType::number: return "number";
        case ParamType::integer: return "integer";
        case ParamType::boolean: return "boolean";
        case ParamType::string: return "string";
    }
    return "unknown";
}

bool ScenarioResult::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

json ScenarioResult::to_json() const {
    json checks_json = json::array();
    for (const auto& c : checks) checks_json.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    json scalars_json = json::object();
    for (const auto& [k, v] : scalars) scalars_json[k] = v;
    json series_json = json::array();
    for (const auto& s : series) series_json.push_back({{"name", s.name}, {"columns", s.columns}, {"rows", s.rows.size()}});
    return {{"schema_version", kResultSchemaVersion}, {"scenario", scenario}, {"params", params}, {"seed", seed},
            {"results", results}, {"scalars", scalars_json}, {"checks", checks_json}, {"all_checks_passed", all_passed()},
            {"series", series_json}, {"summary", summary}};
}

const std::vector<ScenarioInfo>& scenario_registry() {
    static const std::vector<ScenarioInfo> infos = [] {
        std::vector<ScenarioInfo> v;
        for (const auto& e : entries()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

const ScenarioInfo& find_scenario(const std::string& name) { return find_entry(name).info; }

json describe(const ScenarioInfo& info) {
    json params = json::array();
    for (const auto& ps : info.params) {
        json j = {{"name", ps.name}, {"type", to_string(ps.type)}, {"default", ps.default_value}, {"description", ps.description}};
        if (!ps.choices.empty()) j["choices"] = ps.choices;
        params.push_back(j);
    }
    return {{"name", info.name}, {"description", info.description}, {"params", params}, {"series", info.series}};
}

json parse_param_value(const ScenarioInfo& info, const std::string& key, const std::string& text) {
    const ParamSpec& ps = find_param(info, key);
    auto fail = [&](const std::string& why) -> json {
        throw Error(ErrorCode::bad_param, "parameter '" + key + "' of " + info.name + ": " + why + " (got '" + text + "')");
    };
    switch (ps.type) {
        case ParamType::number: {
            try {
                std::size_t used = 0;
                const double v = std::stod(text, &used);
                if (used != text.size()) return fail("expected a number");
                return v;
            } catch (const std::exception&) {
                return fail("expected a number");
            }
        }
        case ParamType::integer: {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(text, &used);
                if (used != text.size()) return fail("expected an integer");
                return v;
            } catch (const std::exception&) {
                return fail("expected an integer");
            }
        }
        case ParamType::boolean: {
            if (text == "true" || text == "1" || text == "yes") return true;
            if (text == "false" || text == "0" || text == "no") return false;
            return fail("expected true or false");
        }
        case ParamType::string:
            return coerce(ps, json(text), info.name);
    }
    return fail("unsupported type");
}

json resolve_params(const ScenarioInfo& info, const json& overrides) {
    if (!overrides.is_null() && !overrides.is_object())
        throw Error(ErrorCode::bad_param, "parameters for " + info.name + " must be a JSON object");
    json out = json::object();
    for (const auto& ps : info.params) out[ps.name] = ps.default_value;
    if (overrides.is_object()) {
        for (auto it = overrides.begin(); it != overrides.end(); ++it) {
            const ParamSpec& ps = find_param(info, it.key());
            // String values from config files go through the command-line parser.
            out[it.key()] = it.value().is_string() && ps.type != ParamType::string ? parse_param_value(info, it.key(), it.value().get<std::string>())
                                                                                   : coerce(ps, it.value(), info.name);
        }
    }
    return out;
}

ScenarioResult run_scenario(const std::string& name, const json& overrides, std::uint64_t seed) {
    const Entry& e = find_entry(name);
    ScenarioResult r;
    r.scenario = name;
    r.seed = seed;
    r.params = resolve_params(e.info, overrides);
    Builder b(r);
    e.run(r.params, seed, b);
    return r;
}

}  // namespace tsvf
