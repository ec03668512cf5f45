#include "oc/tridiag.hpp"

#include "oc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

namespace oc {

std::pair<double, double> gershgorin_bounds(const SymTridiag& t) {
    const int n = t.n();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.offdiag[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(t.offdiag[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    return {lo, hi};
}

double norm_bound(const SymTridiag& t) {
    const auto [lo, hi] = gershgorin_bounds(t);
    return std::max(std::abs(lo), std::abs(hi));
}

static double pivot_floor(const SymTridiag& t) {
    double e2max = 1.0;
    for (double e : t.offdiag) e2max = std::max(e2max, e * e);
    return e2max * std::numeric_limits<double>::min() /
           std::numeric_limits<double>::epsilon();
}

static int sturm_count_impl(const double* d, const double* e, int n, double x,
                            double pivmin) {
    int count = 0;
    double q = d[0] - x;
    if (q <= 0.0) ++count;
    if (q == 0.0) q = -pivmin;
    for (int i = 1; i < n; ++i) {
        q = (d[i] - x) - e[i - 1] * e[i - 1] / q;
        if (q <= 0.0) ++count;
        if (q == 0.0) q = -pivmin;
    }
    return count;
}

int sturm_count(const SymTridiag& t, double threshold) {
    return sturm_count_impl(t.diag.data(), t.offdiag.data(), t.n(), threshold,
                            pivot_floor(t));
}

bool eigenvalue_near(const SymTridiag& t, double threshold, double tol_abs) {
    const double piv = pivot_floor(t);
    return sturm_count_impl(t.diag.data(), t.offdiag.data(), t.n(), threshold + tol_abs, piv) >
           sturm_count_impl(t.diag.data(), t.offdiag.data(), t.n(), threshold - tol_abs, piv);
}

// ---------------------------------------------------------------------------
// Eigenvalues by count-based bisection

namespace {

struct Interval {
    double lo, hi;
    int clo, chi; // Sturm counts at lo and hi
};

std::vector<double> bisect_values(const SymTridiag& t, double threshold, int m,
                                  double tol_abs) {
    const double* d = t.diag.data();
    const double* e = t.offdiag.data();
    const int n = t.n();
    const double pivmin = pivot_floor(t);

    auto [glo, ghi] = gershgorin_bounds(t);
    double lo0 = glo - 4.0 * tol_abs - 1e-3 * std::abs(glo);
    (void)ghi;

    std::vector<double> values(static_cast<std::size_t>(m), 0.0);
    std::vector<Interval> stack;
    stack.push_back({lo0, threshold, 0, m});
    while (!stack.empty()) {
        Interval iv = stack.back();
        stack.pop_back();
        if (iv.chi == iv.clo) continue;
        if (iv.hi - iv.lo <= tol_abs) {
            const double mid = 0.5 * (iv.lo + iv.hi);
            for (int k = iv.clo; k < iv.chi; ++k) values[static_cast<std::size_t>(k)] = mid;
            continue;
        }
        const double mid = 0.5 * (iv.lo + iv.hi);
        int cmid = sturm_count_impl(d, e, n, mid, pivmin);
        cmid = std::clamp(cmid, iv.clo, iv.chi);
        if (cmid > iv.clo) stack.push_back({iv.lo, mid, iv.clo, cmid});
        if (iv.chi > cmid) stack.push_back({mid, iv.hi, cmid, iv.chi});
    }
    return values;
}

// Partial-pivoting LU of (T - shift I); two superdiagonals appear as fill-in.
struct TridiagLU {
    std::vector<double> dl, dd, du, du2;
    std::vector<int> piv;

    void factor(const SymTridiag& t, double shift) {
        const int n = t.n();
        dl.assign(static_cast<std::size_t>(std::max(n - 1, 0)), 0.0);
        dd.resize(static_cast<std::size_t>(n));
        du.assign(static_cast<std::size_t>(std::max(n - 1, 0)), 0.0);
        du2.assign(static_cast<std::size_t>(std::max(n - 2, 0)), 0.0);
        piv.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) dd[static_cast<std::size_t>(i)] = t.diag[static_cast<std::size_t>(i)] - shift;
        for (int i = 0; i + 1 < n; ++i) {
            dl[static_cast<std::size_t>(i)] = t.offdiag[static_cast<std::size_t>(i)];
            du[static_cast<std::size_t>(i)] = t.offdiag[static_cast<std::size_t>(i)];
        }
        const double tiny = std::numeric_limits<double>::min() * 4.0;
        for (int i = 0; i < n; ++i) piv[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i + 1 < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (std::abs(dd[ui]) >= std::abs(dl[ui])) {
                if (std::abs(dd[ui]) < tiny) dd[ui] = std::copysign(tiny, dd[ui] == 0.0 ? 1.0 : dd[ui]);
                const double f = dl[ui] / dd[ui];
                dl[ui] = f;
                dd[ui + 1] -= f * du[ui];
                if (i + 2 < n) du2[ui] = 0.0;
            } else {
                piv[ui] = i + 1;
                const double f = dd[ui] / dl[ui];
                dd[ui] = dl[ui];
                dl[ui] = f;
                const double tmp = dd[ui + 1];
                dd[ui + 1] = du[ui] - f * tmp;
                du[ui] = tmp;
                if (i + 2 < n) {
                    du2[ui] = du[ui + 1];
                    du[ui + 1] = -f * du[ui + 1];
                }
            }
        }
        const auto last = static_cast<std::size_t>(n - 1);
        if (std::abs(dd[last]) < tiny) dd[last] = std::copysign(tiny, dd[last] == 0.0 ? 1.0 : dd[last]);
    }

    void solve(std::vector<double>& b) const {
        const int n = static_cast<int>(dd.size());
        for (int i = 0; i + 1 < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            if (piv[ui] == i) {
                b[ui + 1] -= dl[ui] * b[ui];
            } else {
                const double tmp = b[ui];
                b[ui] = b[ui + 1];
                b[ui + 1] = tmp - dl[ui] * b[ui];
            }
        }
        for (int i = n - 1; i >= 0; --i) {
            const auto ui = static_cast<std::size_t>(i);
            double s = b[ui];
            if (i + 1 < n) s -= du[ui] * b[ui + 1];
            if (i + 2 < n) s -= du2[ui] * b[ui + 2];
            b[ui] = s / dd[ui];
        }
    }
};

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void fill_start_vector(std::vector<double>& v, int index) {
    uint64_t state = 0x0c1ab0c1ab5eedULL + static_cast<uint64_t>(index) * 0x9e3779b97f4a7c15ULL;
    for (double& x : v) {
        const uint64_t r = splitmix64(state);
        x = static_cast<double>(r >> 11) * 0x1.0p-53 - 0.5;
    }
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double residual_norm(const SymTridiag& t, const std::vector<double>& v, double lambda) {
    const int n = t.n();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        double r = (t.diag[ui] - lambda) * v[ui];
        if (i > 0) r += t.offdiag[ui - 1] * v[ui - 1];
        if (i + 1 < n) r += t.offdiag[ui] * v[ui + 1];
        s += r * r;
    }
    return std::sqrt(s);
}

void orthogonalize_against(std::vector<double>& v,
                           const std::vector<std::vector<double>>& basis,
                           std::size_t first, std::size_t last) {
    for (std::size_t j = first; j < last; ++j) {
        const auto& u = basis[j];
        double proj = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) proj += u[i] * v[i];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
    }
}

void canonical_sign(std::vector<double>& v) {
    double best = 0.0;
    for (double x : v)
        if (std::abs(x) > std::abs(best)) best = x;
    if (best < 0.0)
        for (double& x : v) x = -x;
}

} // namespace

EigenPairs eigs_below(const SymTridiag& t, double threshold, const Tolerances& tol) {
    const int n = t.n();
    if (n < 1) throw ValidationError("eigs_below: empty matrix");
    const auto [glo, ghi] = gershgorin_bounds(t);
    if (threshold <= glo || threshold >= ghi)
        throw ValidationError("eigs_below: threshold outside the Gershgorin interval");

    const double scale = std::max(norm_bound(t), 1.0);
    const double tol_eig = tol.eigenvalue * scale;
    const double tol_cluster = tol.cluster * scale;
    const double tol_res = tol.residual * scale;

    EigenPairs out;
    out.threshold = threshold;
    const int m = sturm_count(t, threshold);
    if (m == 0) return out;

    out.values = bisect_values(t, threshold, m, tol_eig);
    out.vectors.assign(static_cast<std::size_t>(m), {});

    TridiagLU lu;
    std::vector<double> work(static_cast<std::size_t>(n));
    std::size_t cluster_begin = 0;
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
        if (idx > 0 && out.values[idx] - out.values[idx - 1] > tol_cluster)
            cluster_begin = idx;

        lu.factor(t, out.values[idx]);
        fill_start_vector(work, static_cast<int>(idx));
        double nrm = norm2(work);
        for (double& x : work) x /= nrm;

        bool converged = false;
        for (int it = 0; it < tol.max_inverse_iterations; ++it) {
            lu.solve(work);
            orthogonalize_against(work, out.vectors, cluster_begin, idx);
            nrm = norm2(work);
            if (nrm == 0.0) {
                fill_start_vector(work, static_cast<int>(idx) + 7919 * (it + 1));
                nrm = norm2(work);
            }
            for (double& x : work) x /= nrm;
            if (residual_norm(t, work, out.values[idx]) <= tol_res) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream os;
            os << "inverse iteration did not converge for eigenvalue " << out.values[idx]
               << " (index " << idx << ", cluster starting at " << cluster_begin << ")";
            throw NumericalError(os.str());
        }
        canonical_sign(work);
        out.vectors[idx] = work;
    }
    return out;
}

} // namespace oc
