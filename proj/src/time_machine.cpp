#include "tsvf/time_machine.hpp"

#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "tsvf/pointer.hpp"

namespace tsvf {

namespace {

void require_terms(int n_terms) {
    if (n_terms < 1) throw Error(ErrorCode::invalid_argument, "the schedule needs N >= 1");
    if (n_terms > 4096) throw Error(ErrorCode::resource, "N above 4096 is not supported");
}

double l2_distance(const Vector& a, const Vector& b) { return (a - b).norm(); }

double high_band_fraction(const WaveFunction1D& fn) {
    const auto mom = fourier_pair(fn);
    const double cut = 0.25 * std::numbers::pi / fn.grid.spacing();
    double hi = 0.0, all = 0.0;
    for (std::size_t k = 0; k < mom.grid.points(); ++k) {
        const double w = std::norm(mom.amplitudes(static_cast<Eigen::Index>(k)));
        all += w;
        if (std::abs(mom.grid.at(k)) > cut) hi += w;
    }
    return all > 0.0 ? hi / all : 0.0;
}

void attach_spectral_warning(AmplifiedShift& r) {
    r.high_band_fraction = high_band_fraction(r.original);
    if (r.high_band_fraction >= 1e-6)
        r.warning = "input spectrum is not rapidly decaying: " + std::to_string(r.high_band_fraction) +
                    " of the weight lies above a quarter of the Nyquist frequency";
}

void require_inside(const std::vector<Wide>& y, const char* what) {
    Wide peak = 0;
    for (const auto& v : y) peak = std::max(peak, abs(v));
    const Wide edge = std::max(abs(y.front()), abs(y.back()));
    if (edge > peak * Wide(1e-12))
        throw Error(ErrorCode::invalid_argument, std::string("grid overflow: ") + what + " is not negligible at the grid edge");
}

Vector to_vector(const std::vector<Wide>& y) {
    Vector v(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) v(static_cast<Eigen::Index>(i)) = Complex(static_cast<double>(y[i]), 0.0);
    return v;
}

// f sampled on t_j = min + j h for j = -ext .. points-1, with the shifts as index offsets.
struct PreciseSamples {
    Grid1D grid;
    Wide t0;
    Wide h;
    long ext = 0;
    std::vector<long> offsets;
    std::vector<Wide> f_ext;

    const Wide& at(long j) const { return f_ext[static_cast<std::size_t>(j + ext)]; }
    std::vector<Wide> row(long m) const {
        std::vector<Wide> out(grid.points());
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = at(static_cast<long>(j) - m);
        return out;
    }
};

PreciseSamples sample(const WideSignal& f, const Grid1D& grid, int n_terms, double delta_t) {
    if (!f) throw Error(ErrorCode::invalid_argument, "empty test function");
    if (!(delta_t >= 0.0) || !std::isfinite(delta_t)) throw Error(ErrorCode::invalid_argument, "delta_t must be >= 0");
    PreciseSamples s;
    s.t0 = Wide(grid.min());
    long k = 0;
    if (delta_t > 0.0) {
        const double ratio = delta_t / (n_terms * grid.spacing());
        k = std::max(1L, std::lround(ratio));
        s.h = Wide(delta_t) / (Wide(n_terms) * Wide(k));
    } else {
        s.h = Wide(grid.spacing());
    }
    const double hd = static_cast<double>(s.h);
    s.grid = Grid1D(grid.min(), grid.min() + hd * static_cast<double>(grid.points() - 1), grid.points());
    for (int n = 0; n <= n_terms; ++n) s.offsets.push_back(static_cast<long>(n) * k);
    s.ext = s.offsets.back();
    const long total = static_cast<long>(grid.points()) + s.ext;
    s.f_ext = f.lattice(s.t0 - Wide(s.ext) * s.h, s.h, static_cast<std::size_t>(total));
    return s;
}

std::vector<Wide> ideal_samples(const WideSignal& f, const PreciseSamples& s, double eta, double delta_t) {
    return f.lattice(s.t0 - Wide(eta) * Wide(delta_t), s.h, s.grid.points());
}

std::vector<Wide> superpose(const PreciseSamples& s, const BinomialSchedule& b) {
    std::vector<Wide> out(s.grid.points(), Wide(0));
    for (std::size_t n = 0; n < b.weights.size(); ++n) {
        if (b.sign[n] == 0) continue;
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += b.weights[n] * s.at(static_cast<long>(j) - s.offsets[n]);
    }
    return out;
}

Wide sum_squares(const std::vector<Wide>& y) {
    Wide acc = 0;
    for (const auto& v : y) acc += v * v;
    return acc;
}

double fidelity(const Vector& a, const Vector& b) {
    const double na = a.squaredNorm(), nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::norm(a.dot(b)) / (na * nb);
}

}  // namespace

WideSignal::WideSignal(WideFunction f) : f_(std::move(f)) {}

WideSignal::WideSignal(WideFunction f, LatticeFn lattice) : f_(std::move(f)), lattice_(std::move(lattice)) {}

WideSignal WideSignal::gaussian(double sigma, double center) {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(center))
        throw Error(ErrorCode::invalid_argument, "Gaussian width must be positive and finite");
    const Wide inv = Wide(1) / (Wide(2) * Wide(sigma) * Wide(sigma));
    const Wide pref = pow(boost::math::constants::pi<Wide>() * Wide(sigma) * Wide(sigma), Wide(-0.25));
    const Wide c(center);
    auto point = [inv, pref, c](const Wide& t) { return pref * exp(-(t - c) * (t - c) * inv); };
    // g(i+1)/g(i) = q(i), q(i+1)/q(i) = exp(-2 h^2 inv): three exps per lattice.
    // Relative rounding grows like i^2 eps, far below double resolution here.
    auto lattice = [inv, pref, c, point](const Wide& t0, const Wide& h, std::size_t count) {
        std::vector<Wide> out(count);
        if (count == 0) return out;
        const Wide u = t0 - c;
        Wide g = point(t0);
        Wide q = exp(-(Wide(2) * u * h + h * h) * inv);
        const Wide step = exp(-Wide(2) * h * h * inv);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = g;
            g *= q;
            q *= step;
        }
        return out;
    };
    return WideSignal(point, lattice);
}

Wide WideSignal::operator()(const Wide& t) const { return f_(t); }

std::vector<Wide> WideSignal::lattice(const Wide& t0, const Wide& h, std::size_t count) const {
    if (!f_) throw Error(ErrorCode::invalid_argument, "empty test function");
    if (lattice_) return lattice_(t0, h, count);
    std::vector<Wide> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = f_(t0 + Wide(static_cast<long>(i)) * h);
    return out;
}

Wide BinomialSchedule::sum() const {
    Wide acc = 0;
    for (const auto& w : weights) acc += w;
    return acc;
}

Wide BinomialSchedule::sum_abs_squared() const {
    Wide acc = 0;
    for (const auto& w : weights) acc += w * w;
    return acc;
}

std::vector<double> BinomialSchedule::weights_double() const {
    std::vector<double> out;
    out.reserve(weights.size());
    for (const auto& w : weights) out.push_back(static_cast<double>(w));
    return out;
}

BinomialSchedule binomial_schedule(int n_terms, double eta) {
    require_terms(n_terms);
    if (!std::isfinite(eta)) throw Error(ErrorCode::invalid_argument, "eta must be finite");
    // sum |alpha_n| = (|eta| + |1 - eta|)^N; the signed sum must still resolve 1.
    const double cancel_digits = n_terms * std::log10(std::abs(eta) + std::abs(1.0 - eta));
    if (cancel_digits > kWideDigits - 20)
        throw Error(ErrorCode::resource, "binomial weights cancel by " + std::to_string(static_cast<int>(cancel_digits)) +
                                             " digits, beyond the working precision");
    BinomialSchedule s;
    s.n_terms = n_terms;
    s.eta = eta;
    const Wide e(eta);
    const Wide one_minus = Wide(1) - e;
    Wide binom = 1;
    for (int n = 0; n <= n_terms; ++n) {
        if (n > 0) binom = binom * Wide(n_terms - n + 1) / Wide(n);
        const Wide w = binom * pow(e, n) * pow(one_minus, n_terms - n);
        s.shifts.push_back(static_cast<double>(n) / n_terms);
        s.weights.push_back(w);
        s.sign.push_back(w > 0 ? 1 : (w < 0 ? -1 : 0));
        s.log_abs.push_back(w == 0 ? -std::numeric_limits<double>::infinity() : static_cast<double>(log(abs(w))));
    }
    return s;
}

AmplifiedShift amplified_shift(const WaveFunction1D& fn, int n_terms, double eta, double delta_t) {
    const auto b = binomial_schedule(n_terms, eta);
    if (!(delta_t >= 0.0) || !std::isfinite(delta_t)) throw Error(ErrorCode::invalid_argument, "delta_t must be >= 0");
    std::vector<Complex> w;
    std::vector<double> shifts;
    for (std::size_t n = 0; n < b.weights.size(); ++n) {
        w.emplace_back(static_cast<double>(b.weights[n]), 0.0);
        shifts.push_back(b.shifts[n] * delta_t);
    }
    AmplifiedShift r;
    r.original = fn;
    r.shifted = shift_superposition(fn, w, shifts);
    r.ideal = shift_superposition(fn, {Complex(1.0, 0.0)}, {eta * delta_t});
    r.distortion = l2_distance(r.shifted.amplitudes, r.ideal.amplitudes) / fn.amplitudes.norm();
    attach_spectral_warning(r);
    return r;
}

AmplifiedShift amplified_shift(const WideSignal& f, const Grid1D& grid, int n_terms, double eta, double delta_t) {
    const auto b = binomial_schedule(n_terms, eta);
    const auto s = sample(f, grid, n_terms, delta_t);
    const auto orig = s.row(0);
    const auto ideal = ideal_samples(f, s, eta, delta_t);
    require_inside(orig, "the input function");
    require_inside(ideal, "the shifted function");
    const auto sup = superpose(s, b);

    AmplifiedShift r;
    r.original = WaveFunction1D(s.grid, to_vector(orig));
    r.shifted = WaveFunction1D(s.grid, to_vector(sup));
    r.ideal = WaveFunction1D(s.grid, to_vector(ideal));
    Wide diff = 0;
    for (std::size_t j = 0; j < sup.size(); ++j) diff += (sup[j] - ideal[j]) * (sup[j] - ideal[j]);
    r.distortion = static_cast<double>(sqrt(diff / sum_squares(orig)));
    attach_spectral_warning(r);
    return r;
}

double sr_dilation(double velocity, double external_time, double light_speed) {
    if (!(light_speed > 0.0)) throw Error(ErrorCode::invalid_argument, "light speed must be positive");
    if (!(velocity >= 0.0)) throw Error(ErrorCode::invalid_argument, "velocity must be non-negative");
    if (velocity >= light_speed) throw Error(ErrorCode::invalid_argument, "velocity must be below the speed of light");
    const double b2 = (velocity / light_speed) * (velocity / light_speed);
    return external_time * b2 / (1.0 + std::sqrt(1.0 - b2));
}

double gr_dilation(double mass, double radius, double external_time, double grav_const, double light_speed) {
    if (!(mass >= 0.0)) throw Error(ErrorCode::invalid_argument, "shell mass must be non-negative");
    if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
    if (std::isinf(radius)) return 0.0;
    const double x = 2.0 * grav_const * mass / (light_speed * light_speed * radius);
    if (x >= 1.0) throw Error(ErrorCode::invalid_argument, "radius is inside the Schwarzschild radius");
    return external_time * x / (1.0 + std::sqrt(1.0 - x));
}

double gr_dilation_difference(double mass, double r0, double radius, double external_time, double grav_const,
                              double light_speed) {
    const double rs = 2.0 * grav_const * mass / (light_speed * light_speed);
    if (!(r0 > rs) || !(radius > rs)) throw Error(ErrorCode::invalid_argument, "radius is inside the Schwarzschild radius");
    const double x0 = rs / r0, x = rs / radius;
    // x - x0 = rs (r0 - R) / (R r0)
    const double dx = rs * ((r0 - radius) / (radius * r0));
    return external_time * dx / (std::sqrt(1.0 - x0) + std::sqrt(1.0 - x));
}

void TimeMachineConfig::validate() const {
    require_terms(n_terms);
    if (!std::isfinite(eta)) throw Error(ErrorCode::bad_param, "eta must be finite");
    if (!(delta_t >= 0.0) || !std::isfinite(delta_t)) throw Error(ErrorCode::bad_param, "delta_t must be >= 0");
    if (!(external_time > 0.0)) throw Error(ErrorCode::bad_param, "external time T must be positive");
    if (!(shell_mass >= 0.0)) throw Error(ErrorCode::bad_param, "shell mass must be non-negative");
    if (!(grav_const > 0.0) || !(light_speed > 0.0)) throw Error(ErrorCode::bad_param, "G and c must be positive");
    if (!(r0 > schwarzschild_radius())) throw Error(ErrorCode::bad_param, "R0 must exceed the Schwarzschild radius");
}

std::vector<double> radius_schedule(const TimeMachineConfig& cfg, RadiusForm form) {
    cfg.validate();
    const double rs = cfg.schwarzschild_radius();
    const double x0 = rs / cfg.r0;
    const double s0 = std::sqrt(1.0 - x0);
    if (form == RadiusForm::automatic) form = x0 < 1e-12 ? RadiusForm::simplified : RadiusForm::full;
    const double d_max = cfg.delta_t / cfg.external_time;
    if (d_max > 0.0 && rs == 0.0) throw Error(ErrorCode::invalid_argument, "a massless shell produces no time shift");
    const double bound = form == RadiusForm::full ? s0 : 1.0;
    if (d_max >= bound)
        throw Error(ErrorCode::invalid_argument, "infeasible schedule: delta t_N would need a radius inside the Schwarzschild radius");

    std::vector<double> radii{cfg.r0};
    for (int n = 1; n <= cfg.n_terms; ++n) {
        const double d = d_max * n / cfg.n_terms;
        if (d == 0.0) {
            radii.push_back(cfg.r0);
            continue;
        }
        const double x = form == RadiusForm::full ? x0 + d * (2.0 * s0 - d) : d * (2.0 - d);
        radii.push_back(rs / x);
    }
    return radii;
}

Vector qos_initial_state(const BinomialSchedule& s) {
    const Wide norm = sqrt(s.sum_abs_squared());
    Vector v(static_cast<Eigen::Index>(s.weights.size()));
    for (std::size_t n = 0; n < s.weights.size(); ++n) v(static_cast<Eigen::Index>(n)) = static_cast<double>(s.weights[n] / norm);
    return v;
}

Vector qos_final_state(int n_terms) {
    require_terms(n_terms);
    return Vector::Constant(n_terms + 1, 1.0 / std::sqrt(static_cast<double>(n_terms + 1)));
}

namespace {

MachineRun machine_common(const TimeMachineConfig& cfg) {
    cfg.validate();
    MachineRun run;
    run.schedule = binomial_schedule(cfg.n_terms, cfg.eta);
    run.qos_initial = qos_initial_state(run.schedule);
    run.qos_final = qos_final_state(cfg.n_terms);
    if (cfg.delta_t > 0.0) {
        const double x0 = cfg.schwarzschild_radius() / cfg.r0;
        const bool simplified = x0 < 1e-12;
        run.radii = radius_schedule(cfg);
        for (std::size_t n = 0; n < run.radii.size(); ++n) {
            if (n == 0) run.realized_shifts.push_back(0.0);
            else if (simplified) run.realized_shifts.push_back(gr_dilation(cfg.shell_mass, run.radii[n], cfg.external_time, cfg.grav_const, cfg.light_speed));
            else run.realized_shifts.push_back(gr_dilation_difference(cfg.shell_mass, cfg.r0, run.radii[n], cfg.external_time, cfg.grav_const, cfg.light_speed));
        }
    } else {
        run.radii.assign(static_cast<std::size_t>(cfg.n_terms) + 1, cfg.r0);
        run.realized_shifts.assign(run.radii.size(), 0.0);
    }
    return run;
}

double direct_projection(const MachineRun& run, const Matrix& branches, const Vector& ideal) {
    // Mixture before post-selection: weight |Norm alpha_n|^2 on the normalized branch n.
    double p = 0.0;
    for (Eigen::Index n = 0; n < branches.rows(); ++n) {
        const Vector row = branches.row(n).transpose();
        p += std::norm(run.qos_initial(n)) * fidelity(ideal, row);
    }
    return p;
}

}  // namespace

MachineRun run_machine(const WaveFunction1D& system_fn, const TimeMachineConfig& cfg) {
    MachineRun run = machine_common(cfg);
    const std::size_t terms = run.schedule.weights.size();
    run.grid = system_fn.grid;
    const auto pts = static_cast<Eigen::Index>(system_fn.grid.points());
    Matrix branches(static_cast<Eigen::Index>(terms), pts);
    for (std::size_t n = 0; n < terms; ++n) {
        const double shift = run.schedule.shifts[n] * cfg.delta_t;
        branches.row(static_cast<Eigen::Index>(n)) =
            shift_superposition(system_fn, {Complex(1.0, 0.0)}, {shift}).amplitudes.transpose();
    }
    run.product_state = run.qos_initial.asDiagonal() * Matrix(system_fn.amplitudes.transpose().replicate(static_cast<Eigen::Index>(terms), 1));
    run.correlated_state = run.qos_initial.asDiagonal() * branches;

    // Project the register onto the final QOS state.
    const Vector projected = (run.qos_final.adjoint() * run.correlated_state).transpose();
    const double n2 = 1.0 / static_cast<double>(run.schedule.sum_abs_squared());
    const double scale = std::sqrt(static_cast<double>(terms)) / std::sqrt(n2);
    run.final_fn = WaveFunction1D(system_fn.grid, projected * scale);
    const double fnorm2 = system_fn.amplitudes.squaredNorm();
    run.success_prob = projected.squaredNorm() / fnorm2;
    run.log10_success_prob = std::log10(run.success_prob);

    const Vector ideal = shift_superposition(system_fn, {Complex(1.0, 0.0)}, {cfg.eta * cfg.delta_t}).amplitudes;
    run.direct_projection_prob = direct_projection(run, branches, ideal);
    run.final_fidelity = fidelity(ideal, run.final_fn.amplitudes);
    run.distortion = l2_distance(run.final_fn.amplitudes, ideal) / std::sqrt(fnorm2);
    return run;
}

MachineRun run_machine(const WideSignal& system_fn, const Grid1D& grid, const TimeMachineConfig& cfg) {
    MachineRun run = machine_common(cfg);
    const auto s = sample(system_fn, grid, cfg.n_terms, cfg.delta_t);
    const auto orig = s.row(0);
    const auto ideal = ideal_samples(system_fn, s, cfg.eta, cfg.delta_t);
    require_inside(orig, "the input function");
    require_inside(ideal, "the shifted function");
    run.grid = s.grid;

    const std::size_t terms = run.schedule.weights.size();
    const Wide norm = sqrt(run.schedule.sum_abs_squared());
    const Wide final_amp = Wide(1) / sqrt(Wide(static_cast<long>(terms)));
    const auto pts = static_cast<Eigen::Index>(s.grid.points());
    run.product_state.resize(static_cast<Eigen::Index>(terms), pts);
    run.correlated_state.resize(static_cast<Eigen::Index>(terms), pts);
    Matrix branches(static_cast<Eigen::Index>(terms), pts);

    // Register contraction kept in extended precision: the branch weights are
    // huge and alternate in sign.
    std::vector<Wide> projected(s.grid.points(), Wide(0));
    for (std::size_t n = 0; n < terms; ++n) {
        const Wide amp = run.schedule.weights[n] / norm;
        const auto row = s.row(s.offsets[n]);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const auto nn = static_cast<Eigen::Index>(n);
            run.product_state(nn, jj) = static_cast<double>(amp * orig[j]);
            run.correlated_state(nn, jj) = static_cast<double>(amp * row[j]);
            branches(nn, jj) = static_cast<double>(row[j]);
            projected[j] += final_amp * amp * row[j];
        }
    }
    const Wide back = norm / final_amp;  // undo Norm / sqrt(N+1)
    std::vector<Wide> final_fn(projected.size());
    for (std::size_t j = 0; j < projected.size(); ++j) final_fn[j] = projected[j] * back;
    run.final_fn = WaveFunction1D(s.grid, to_vector(final_fn));

    const Wide prob = sum_squares(projected) / sum_squares(orig);
    run.success_prob = static_cast<double>(prob);
    run.log10_success_prob = static_cast<double>(log10(prob));

    const Vector ideal_v = to_vector(ideal);
    run.direct_projection_prob = direct_projection(run, branches, ideal_v);
    run.final_fidelity = fidelity(ideal_v, run.final_fn.amplitudes);
    Wide diff = 0;
    for (std::size_t j = 0; j < final_fn.size(); ++j) diff += (final_fn[j] - ideal[j]) * (final_fn[j] - ideal[j]);
    run.distortion = static_cast<double>(sqrt(diff / sum_squares(orig)));
    return run;
}

SuccessScaling success_scaling_probe(double eta, const std::vector<int>& n_values) {
    if (n_values.empty()) throw Error(ErrorCode::invalid_argument, "empty N range");
    for (std::size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1]) throw Error(ErrorCode::invalid_argument, "N range must be ascending");
    SuccessScaling out;
    out.n_values = n_values;
    out.reference = 1.0 / (2.0 * eta - 1.0);
    // Unit overlaps: Prob = (sum alpha)^2 / ((N+1) sum alpha^2) with sum alpha = 1
    // identically. Only the positive sum of squares is formed, so no cancellation.
    const Wide e(eta), f = Wide(1) - Wide(eta);
    for (int n : n_values) {
        require_terms(n);
        Wide binom = 1, sq = 0;
        for (int k = 0; k <= n; ++k) {
            if (k > 0) binom = binom * Wide(n - k + 1) / Wide(k);
            const Wide w = binom * pow(e, k) * pow(f, n - k);
            sq += w * w;
        }
        out.log10_prob.push_back(static_cast<double>(-log10(sq * Wide(n + 1))));
    }
    for (std::size_t i = 1; i < n_values.size(); ++i) {
        const double step = n_values[i] - n_values[i - 1];
        out.ratios.push_back(std::pow(10.0, (out.log10_prob[i] - out.log10_prob[i - 1]) / step));
    }
    return out;
}

}  // namespace tsvf
