#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "tsvf/numerics.hpp"
#include "tsvf/wide.hpp"

namespace tsvf::detail {

// Index offsets when every shift is a whole multiple of dx.
inline std::optional<std::vector<long>> commensurate_offsets(const std::vector<double>& shifts, double dx) {
    std::vector<long> m;
    m.reserve(shifts.size());
    for (double s : shifts) {
        const double k = s / dx;
        const double r = std::round(k);
        if (std::abs(k - r) > 1e-9 * std::max(1.0, std::abs(k))) return std::nullopt;
        m.push_back(static_cast<long>(r));
    }
    return m;
}

// Shifting by m samples discards the m samples at one edge; they must be negligible.
inline void check_overflow(const Vector& f, long m) {
    const long n = static_cast<long>(f.size());
    if (m == 0) return;
    const double peak = f.cwiseAbs().maxCoeff();
    if (std::labs(m) >= n) throw Error(ErrorCode::invalid_argument, "grid overflow: shift exceeds grid length");
    const long lo = m > 0 ? n - m : 0;
    const long hi = m > 0 ? n : -m;
    double lost = 0.0;
    for (long i = lo; i < hi; ++i) lost = std::max(lost, std::abs(f(i)));
    if (lost > 1e-12 * peak)
        throw Error(ErrorCode::invalid_argument, "grid overflow: shifted function leaves the grid");
}

struct WideComplex {
    Wide re = 0;
    Wide im = 0;
};

// out_j = sum_n w_n f_{j - m_n}, accumulated in extended precision.
inline std::vector<WideComplex> index_shift_sum(const std::vector<WideComplex>& f, const std::vector<WideComplex>& w,
                                                const std::vector<long>& m) {
    const long n = static_cast<long>(f.size());
    std::vector<WideComplex> out(f.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const bool real_w = w[k].im == 0;
        for (long j = 0; j < n; ++j) {
            const long src = j - m[k];
            if (src < 0 || src >= n) continue;
            const auto& s = f[static_cast<std::size_t>(src)];
            auto& o = out[static_cast<std::size_t>(j)];
            if (real_w) {
                if (s.re != 0) o.re += w[k].re * s.re;
                if (s.im != 0) o.im += w[k].re * s.im;
            } else {
                o.re += w[k].re * s.re - w[k].im * s.im;
                o.im += w[k].re * s.im + w[k].im * s.re;
            }
        }
    }
    return out;
}

}  // namespace tsvf::detail
