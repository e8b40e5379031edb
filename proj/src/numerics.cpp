#include "tsvf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/KroneckerProduct>

namespace tsvf {

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = max_abs(m);
    return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

DenseOperator::DenseOperator(Matrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
    if (m_.rows() == 0 || m_.rows() != m_.cols())
        throw Error(ErrorCode::invalid_argument, "operator must be square with dim > 0");
    if (!m_.allFinite()) throw Error(ErrorCode::invalid_argument, "operator has non-finite entries");
    if (hermitian_ && !is_hermitian(m_))
        throw Error(ErrorCode::not_hermitian, "operator flagged Hermitian is not Hermitian");
}

DenseOperator DenseOperator::identity(Eigen::Index dim) {
    return DenseOperator(Matrix::Identity(dim, dim), true);
}

DenseOperator DenseOperator::zero(Eigen::Index dim) {
    return DenseOperator(Matrix::Zero(dim, dim), true);
}

DenseOperator DenseOperator::operator*(const DenseOperator& rhs) const {
    if (dim() != rhs.dim()) throw Error(ErrorCode::dimension_mismatch, "operator product dimension mismatch");
    return DenseOperator(m_ * rhs.m_);
}

DenseOperator DenseOperator::operator+(const DenseOperator& rhs) const {
    if (dim() != rhs.dim()) throw Error(ErrorCode::dimension_mismatch, "operator sum dimension mismatch");
    return DenseOperator(m_ + rhs.m_, hermitian_ && rhs.hermitian_);
}

DenseOperator DenseOperator::operator-(const DenseOperator& rhs) const {
    if (dim() != rhs.dim()) throw Error(ErrorCode::dimension_mismatch, "operator difference dimension mismatch");
    return DenseOperator(m_ - rhs.m_, hermitian_ && rhs.hermitian_);
}

DenseOperator DenseOperator::scaled(Complex s) const {
    return DenseOperator(m_ * s, hermitian_ && s.imag() == 0.0);
}

Matrix SpectralDecomposition::reconstruct() const {
    Matrix out = Matrix::Zero(projectors.front().dim(), projectors.front().dim());
    for (std::size_t n = 0; n < size(); ++n) out += eigenvalues[n] * projectors[n].matrix();
    return out;
}

double SpectralDecomposition::spectral_radius() const {
    double r = 0.0;
    for (double c : eigenvalues) r = std::max(r, std::abs(c));
    return r;
}

namespace {

const Eigen::SelfAdjointEigenSolver<Matrix>& solve(Eigen::SelfAdjointEigenSolver<Matrix>& es,
                                                   const DenseOperator& op) {
    if (op.dim() == 0) throw Error(ErrorCode::invalid_argument, "dimension 0");
    if (!op.hermitian() && !is_hermitian(op.matrix()))
        throw Error(ErrorCode::not_hermitian, "eigendecomposition requires a Hermitian operator");
    es.compute(op.matrix());
    if (es.info() != Eigen::Success) throw Error(ErrorCode::numerical, "eigensolver failed");
    return es;
}

}  // namespace

SpectralDecomposition hermitian_eigendecomposition(const DenseOperator& op, double tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    solve(es, op);
    const auto& w = es.eigenvalues();
    const Matrix& v = es.eigenvectors();
    const Eigen::Index n = w.size();

    double radius = w.cwiseAbs().maxCoeff();
    const double gap = tol * (radius > 0.0 ? radius : 1.0);

    SpectralDecomposition out;
    out.grouping_tolerance = tol;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && w(end) - w(start) <= gap) ++end;
        const Eigen::Index k = end - start;
        Matrix block = v.middleCols(start, k);
        out.eigenvalues.push_back(w.segment(start, k).mean());
        out.projectors.emplace_back(block * block.adjoint(), true);
        out.multiplicities.push_back(k);
        start = end;
    }
    return out;
}

Matrix unitary(const DenseOperator& H, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    solve(es, H);
    Vector phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Vector evolve_unitary(const Vector& state, const DenseOperator& H, double t) {
    if (state.size() != H.dim()) throw Error(ErrorCode::dimension_mismatch, "state and Hamiltonian dimensions differ");
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    solve(es, H);
    Vector c = es.eigenvectors().adjoint() * state;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
    return es.eigenvectors() * c;
}

namespace {

void check_cap(std::size_t a, std::size_t b, std::size_t cap) {
    if (a != 0 && b > cap / a)
        throw Error(ErrorCode::resource, "tensor product dimension exceeds cap of " + std::to_string(cap));
}

}  // namespace

Matrix tensor_product(const Matrix& a, const Matrix& b, std::size_t cap) {
    check_cap(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.rows()), cap);
    check_cap(static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(b.cols()), cap);
    return Eigen::kroneckerProduct(a, b).eval();
}

Vector tensor_product(const Vector& a, const Vector& b, std::size_t cap) {
    check_cap(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()), cap);
    return Eigen::kroneckerProduct(a, b).eval();
}

DenseOperator tensor_product(const DenseOperator& a, const DenseOperator& b, std::size_t cap) {
    return DenseOperator(tensor_product(a.matrix(), b.matrix(), cap), a.hermitian() && b.hermitian());
}

DenseOperator embed(const DenseOperator& op, int site, int n_sites, std::size_t cap) {
    if (site < 0 || site >= n_sites) throw Error(ErrorCode::invalid_argument, "site out of range");
    const Eigen::Index d = op.dim();
    Matrix out = Matrix::Identity(1, 1);
    for (int s = 0; s < n_sites; ++s) {
        const Matrix f = (s == site) ? op.matrix() : Matrix::Identity(d, d);
        out = tensor_product(out, f, cap);
    }
    return DenseOperator(std::move(out), op.hermitian());
}

DenseOperator pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return DenseOperator(m, true);
}

DenseOperator pauli_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return DenseOperator(m, true);
}

DenseOperator pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return DenseOperator(m, true);
}

DenseOperator pauli_along(double nx, double ny, double nz) {
    return DenseOperator(nx * pauli_x().matrix() + ny * pauli_y().matrix() + nz * pauli_z().matrix(), true);
}

Grid1D::Grid1D(double min, double max, std::size_t points) : min_(min), max_(max), points_(points) {
    if (!(std::isfinite(min) && std::isfinite(max)) || !(max > min))
        throw Error(ErrorCode::invalid_argument, "grid requires finite max > min");
    if (points < 16) throw Error(ErrorCode::invalid_argument, "grid requires at least 16 points");
}

Grid1D Grid1D::from_coordinates(const std::vector<double>& xs) {
    if (xs.size() < 16) throw Error(ErrorCode::invalid_argument, "grid requires at least 16 points");
    Grid1D g(xs.front(), xs.back(), xs.size());
    const double dx = g.spacing();
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - g.at(i)) > 1e-9 * dx)
            throw Error(ErrorCode::invalid_argument, "non-uniform grid");
    return g;
}

std::vector<double> Grid1D::coordinates() const {
    std::vector<double> xs(points_);
    for (std::size_t i = 0; i < points_; ++i) xs[i] = at(i);
    return xs;
}

WaveFunction1D::WaveFunction1D(Grid1D g, Vector a, Representation r)
    : grid(g), amplitudes(std::move(a)), representation(r) {
    if (static_cast<std::size_t>(amplitudes.size()) != grid.points())
        throw Error(ErrorCode::dimension_mismatch, "amplitude count differs from grid size");
}

double WaveFunction1D::norm() const {
    return std::sqrt(amplitudes.squaredNorm() * grid.spacing());
}

std::vector<double> WaveFunction1D::density() const {
    std::vector<double> d(static_cast<std::size_t>(amplitudes.size()));
    for (Eigen::Index i = 0; i < amplitudes.size(); ++i) d[static_cast<std::size_t>(i)] = std::norm(amplitudes(i));
    return d;
}

WaveFunction1D fourier_pair(const WaveFunction1D& wf) {
    const std::size_t n = wf.grid.points();
    const double nd = static_cast<double>(n);
    const double h = std::floor(nd / 2.0);
    const double step = wf.grid.spacing();
    const double conj_step = 2.0 * std::numbers::pi / (nd * step);
    const double x0 = wf.grid.min();
    const double scale = step / std::sqrt(2.0 * std::numbers::pi);

    std::vector<Complex> in(n), out(n);
    Eigen::FFT<double> fft;

    if (wf.representation == Representation::position) {
        // p_k = (k - h) dp is centred on zero.
        const double p0 = -h * conj_step;
        Grid1D pg(p0, p0 + conj_step * (nd - 1.0), n);
        for (std::size_t j = 0; j < n; ++j)
            in[j] = wf.amplitudes(static_cast<Eigen::Index>(j)) *
                    std::exp(Complex(0.0, 2.0 * std::numbers::pi * h * static_cast<double>(j) / nd));
        fft.fwd(out, in);
        WaveFunction1D res(pg, Vector(n), Representation::momentum);
        for (std::size_t k = 0; k < n; ++k)
            res.amplitudes(static_cast<Eigen::Index>(k)) = scale * out[k] * std::exp(Complex(0.0, -pg.at(k) * x0));
        res.conjugate_min = x0;
        return res;
    }

    // momentum input: sum_k a_k e^{i p_k q_j}, q_j = q0 + j dq, dp dq = 2 pi / n
    const double q0 = wf.conjugate_min;
    Grid1D qg(q0, q0 + conj_step * (nd - 1.0), n);
    for (std::size_t k = 0; k < n; ++k)
        in[k] = wf.amplitudes(static_cast<Eigen::Index>(k)) * std::exp(Complex(0.0, wf.grid.at(k) * q0));
    fft.inv(out, in);
    WaveFunction1D res(qg, Vector(n), Representation::position);
    for (std::size_t j = 0; j < n; ++j)
        res.amplitudes(static_cast<Eigen::Index>(j)) =
            scale * nd * out[j] * std::exp(Complex(0.0, x0 * static_cast<double>(j) * conj_step));
    res.conjugate_min = x0;
    return res;
}

}  // namespace tsvf
