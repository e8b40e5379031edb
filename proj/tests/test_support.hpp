#pragma once

#include <random>

#include "tsvf/states.hpp"

namespace test {

inline tsvf::Vector random_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    tsvf::Vector v(d);
    for (int k = 0; k < d; ++k) v(k) = tsvf::Complex(n(rng), n(rng));
    return v.normalized();
}

inline tsvf::DenseOperator random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    tsvf::Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = tsvf::Complex(n(rng), n(rng));
    return tsvf::DenseOperator((m + m.adjoint()) / 2.0, true);
}

// Hermitian with a repeated eigenvalue when d >= 3.
inline tsvf::DenseOperator random_degenerate(int d, std::mt19937_64& rng) {
    const tsvf::Matrix u = tsvf::unitary(random_hermitian(d, rng), 1.0);
    tsvf::Matrix diag = tsvf::Matrix::Zero(d, d);
    std::uniform_int_distribution<int> pick(-2, 2);
    for (int k = 0; k < d; ++k) diag(k, k) = static_cast<double>(pick(rng));
    tsvf::Matrix h = u * diag * u.adjoint();
    h = (h + h.adjoint()) / 2.0;
    return tsvf::DenseOperator(h, true);
}

}  // namespace test
