#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tsvf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class ErrorCode {
    invalid_argument = 1,
    dimension_mismatch,
    not_hermitian,
    resource,
    numerical,
    unknown_scenario,
    bad_param,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Kronecker products larger than this many rows are refused.
inline constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 20;

class DenseOperator {
public:
    DenseOperator() = default;
    // With hermitian = true the matrix is checked: max|M - M^dag| <= 1e-12 max|M|.
    explicit DenseOperator(Matrix m, bool hermitian = false);

    static DenseOperator identity(Eigen::Index dim);
    static DenseOperator zero(Eigen::Index dim);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    bool hermitian() const { return hermitian_; }

    // Re-verifies the Hermitian property; throws not_hermitian otherwise.
    DenseOperator as_hermitian() const { return DenseOperator(m_, true); }

    DenseOperator operator*(const DenseOperator& rhs) const;
    DenseOperator operator+(const DenseOperator& rhs) const;
    DenseOperator operator-(const DenseOperator& rhs) const;
    DenseOperator scaled(Complex s) const;

private:
    Matrix m_;
    bool hermitian_ = false;
};

bool is_hermitian(const Matrix& m, double rel_tol = 1e-12);

struct SpectralDecomposition {
    std::vector<double> eigenvalues;          // ascending, distinct after grouping
    std::vector<DenseOperator> projectors;    // one per eigenvalue
    std::vector<Eigen::Index> multiplicities;
    double grouping_tolerance = 1e-9;

    std::size_t size() const { return eigenvalues.size(); }
    Matrix reconstruct() const;
    double spectral_radius() const;
};

// Eigenvalues closer than tol * spectral radius to the first member of a
// cluster are merged into one projector.
SpectralDecomposition hermitian_eigendecomposition(const DenseOperator& op, double tol = 1e-9);

// exp(-i H t) state.
Vector evolve_unitary(const Vector& state, const DenseOperator& H, double t);
Matrix unitary(const DenseOperator& H, double t);

Matrix tensor_product(const Matrix& a, const Matrix& b, std::size_t cap = kDefaultDimensionCap);
Vector tensor_product(const Vector& a, const Vector& b, std::size_t cap = kDefaultDimensionCap);
DenseOperator tensor_product(const DenseOperator& a, const DenseOperator& b,
                             std::size_t cap = kDefaultDimensionCap);

// Operator acting on factor `site` of an n-fold product of identical d-dim factors.
DenseOperator embed(const DenseOperator& op, int site, int n_sites,
                    std::size_t cap = kDefaultDimensionCap);

double max_abs(const Matrix& m);

DenseOperator pauli_x();
DenseOperator pauli_y();
DenseOperator pauli_z();
// n . sigma for a (not necessarily unit) real vector n.
DenseOperator pauli_along(double nx, double ny, double nz);

class Grid1D {
public:
    Grid1D() = default;
    Grid1D(double min, double max, std::size_t points);
    // Rejects non-uniform coordinate lists (relative deviation above 1e-9).
    static Grid1D from_coordinates(const std::vector<double>& xs);

    double min() const { return min_; }
    double max() const { return max_; }
    std::size_t points() const { return points_; }
    double spacing() const { return (max_ - min_) / static_cast<double>(points_ - 1); }
    double at(std::size_t i) const { return min_ + spacing() * static_cast<double>(i); }
    std::vector<double> coordinates() const;

private:
    double min_ = 0.0;
    double max_ = 1.0;
    std::size_t points_ = 16;
};

enum class Representation { position, momentum };

struct WaveFunction1D {
    Grid1D grid;
    Vector amplitudes;
    Representation representation = Representation::position;
    // Minimum coordinate of the grid in the other representation; needed to
    // undo the transform exactly.
    double conjugate_min = 0.0;

    WaveFunction1D() = default;
    WaveFunction1D(Grid1D g, Vector a, Representation r = Representation::position);

    double norm() const;  // sqrt(sum |a|^2 dx)
    std::vector<double> density() const;
};

// psi~(p) = dx/sqrt(2 pi) sum_j psi(q_j) exp(-i p q_j), p_k = (k - N/2) dp,
// dp = 2 pi / (N dx). The inverse direction is used for momentum input.
WaveFunction1D fourier_pair(const WaveFunction1D& wf);

}  // namespace tsvf
