#include "oc/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace oc {

LogDet lu_log_abs_det(Matrix m) {
    assert(m.rows == m.cols);
    const std::size_t n = m.rows;
    if (n == 0) return {0.0, false};

    double log_abs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(m(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) {
            return {-std::numeric_limits<double>::infinity(), true};
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
        }
        log_abs += std::log(std::abs(m(k, k)));
        const double inv = 1.0 / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) * inv;
            if (f == 0.0) continue;
            m(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return {log_abs, false};
}

Matrix scaled_gram(const std::vector<std::vector<double>>& a_cols, std::size_t na,
                   const std::vector<std::vector<double>>& b_cols, std::size_t nb,
                   double scale) {
    const std::size_t p = na;
    const std::size_t q = nb;
    Matrix c(p, q);
    if (p == 0 || q == 0) return c;
    const std::size_t n = a_cols[0].size();

    // Tile over rows of A^T / columns of B; stream the long index in chunks
    // so the working set stays cache-resident.
    constexpr std::size_t jt = 32, kt = 32, it = 4096;
    for (std::size_t j0 = 0; j0 < p; j0 += jt) {
        const std::size_t j1 = std::min(j0 + jt, p);
        for (std::size_t k0 = 0; k0 < q; k0 += kt) {
            const std::size_t k1 = std::min(k0 + kt, q);
            for (std::size_t i0 = 0; i0 < n; i0 += it) {
                const std::size_t i1 = std::min(i0 + it, n);
                for (std::size_t j = j0; j < j1; ++j) {
                    const double* aj = a_cols[j].data();
                    for (std::size_t k = k0; k < k1; ++k) {
                        const double* bk = b_cols[k].data();
                        double s = 0.0;
                        for (std::size_t i = i0; i < i1; ++i) s += aj[i] * bk[i];
                        c(j, k) += s;
                    }
                }
            }
        }
    }
    for (double& v : c.a) v *= scale;
    return c;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    assert(x.size() == y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

} // namespace oc
