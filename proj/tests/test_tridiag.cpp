#include "oc/tridiag.hpp"

#include "oc/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>

using namespace oc;

namespace {

// Deterministic LCG so property loops are reproducible.
struct Lcg {
    uint64_t s;
    explicit Lcg(uint64_t seed) : s(seed) {}
    double uniform() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) * 0x1.0p-53;
    }
};

SymTridiag random_tridiag(int n, Lcg& rng, double dscale = 4.0, double escale = 2.0) {
    SymTridiag t;
    t.diag.resize(static_cast<std::size_t>(n));
    t.offdiag.resize(static_cast<std::size_t>(n - 1));
    for (auto& d : t.diag) d = dscale * (rng.uniform() - 0.5);
    for (auto& e : t.offdiag) e = escale * (rng.uniform() - 0.5);
    return t;
}

SymTridiag free_laplacian(int n, double h) {
    SymTridiag t;
    t.diag.assign(static_cast<std::size_t>(n), 2.0 / (h * h));
    t.offdiag.assign(static_cast<std::size_t>(n - 1), -1.0 / (h * h));
    return t;
}

} // namespace

TEST_CASE("sturm_count on the free box matches the closed-form spectrum") {
    const int n = 99;
    const double h = 0.05;
    const SymTridiag t = free_laplacian(n, h);

    const double lambda1 = oracles::free_box_eigenvalue(1, n, h);
    CHECK(sturm_count(t, 0.5 * lambda1) == 0);
    CHECK(sturm_count(t, 4.0 / (h * h)) == n);

    // threshold 2.0: count m with lambda_m <= 2 from the closed form
    int expect = 0;
    while (expect < n && oracles::free_box_eigenvalue(expect + 1, n, h) <= 2.0) ++expect;
    CHECK(sturm_count(t, 2.0) == expect);
}

TEST_CASE("sturm_count agrees with dense counts on random matrices") {
    Lcg rng(12345);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform() * 60);
        const SymTridiag t = random_tridiag(n, rng);
        const auto dense = oracles::dense_eigensystem(t);
        const double threshold = -2.0 + 4.0 * rng.uniform();
        int expect = 0;
        for (double v : dense.values)
            if (v <= threshold) ++expect;
        CHECK(sturm_count(t, threshold) == expect);
    }
}

TEST_CASE("sturm_count is monotone and shift-invariant") {
    Lcg rng(777);
    const SymTridiag t = random_tridiag(40, rng);
    const auto dense = oracles::dense_eigensystem(t);
    for (int i = 0; i < 10; ++i) {
        const double a = -2.5 + 0.5 * i;
        const double b = a + 0.5;
        CHECK(sturm_count(t, a) <= sturm_count(t, b));
    }
    // Shift both matrix and threshold; thresholds kept away from eigenvalues.
    for (double c : {-1.0, -0.5, 0.25, 1.0}) {
        SymTridiag shifted = t;
        for (auto& d : shifted.diag) d += c;
        for (std::size_t i = 0; i + 1 < dense.values.size(); ++i) {
            const double mid = 0.5 * (dense.values[i] + dense.values[i + 1]);
            if (dense.values[i + 1] - dense.values[i] < 1e-6) continue;
            CHECK(sturm_count(shifted, mid + c) == sturm_count(t, mid));
        }
    }
}

TEST_CASE("eigs_below reproduces the analytic free-box eigensystem") {
    const int n = 60;
    const double h = 0.1;
    const SymTridiag t = free_laplacian(n, h);
    const double threshold = oracles::free_box_eigenvalue(12, n, h) + 1e-9;
    const EigenPairs pairs = eigs_below(t, threshold);
    REQUIRE(pairs.values.size() == 12);

    const double width = (n + 1) * h;
    for (int m = 1; m <= 12; ++m) {
        CHECK(pairs.values[static_cast<std::size_t>(m - 1)] ==
              doctest::Approx(oracles::free_box_eigenvalue(m, n, h)).epsilon(1e-10));
        // components proportional to sin(m pi x_i / width), fixed up to sign
        const auto& v = pairs.vectors[static_cast<std::size_t>(m - 1)];
        double norm = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double s = std::sin(m * std::numbers::pi * i * h / width);
            norm += s * s;
        }
        norm = std::sqrt(norm);
        double max_err = 0.0;
        const double sign =
            v[0] * std::sin(m * std::numbers::pi * h / width) >= 0 ? 1.0 : -1.0;
        for (int i = 1; i <= n; ++i) {
            const double s = sign * std::sin(m * std::numbers::pi * i * h / width) / norm;
            max_err = std::max(max_err, std::abs(v[static_cast<std::size_t>(i - 1)] - s));
        }
        CHECK(max_err < 1e-9);
    }
}

TEST_CASE("eigs_below matches the dense reference on random matrices") {
    Lcg rng(424242);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 50;
        const SymTridiag t = random_tridiag(n, rng);
        const auto dense = oracles::dense_eigensystem(t);
        const double threshold = dense.values[30] + 1e-8;
        if (dense.values[31] - dense.values[30] < 1e-7) continue; // keep the cut clean
        const EigenPairs pairs = eigs_below(t, threshold);
        REQUIRE(pairs.values.size() == 31);
        const double scale = norm_bound(t);
        for (std::size_t j = 0; j < pairs.values.size(); ++j)
            CHECK(std::abs(pairs.values[j] - dense.values[j]) <= 1e-10 * scale);
    }
}

TEST_CASE("eigs_below satisfies residual and orthogonality bounds") {
    Lcg rng(99);
    const int n = 80;
    SymTridiag t = random_tridiag(n, rng);
    const double threshold = 0.8;
    const Tolerances tol;
    const EigenPairs pairs = eigs_below(t, threshold, tol);
    REQUIRE(pairs.values.size() > 5);
    const double scale = norm_bound(t);
    for (std::size_t j = 0; j < pairs.values.size(); ++j) {
        // residual |T v - lambda v|
        const auto& v = pairs.vectors[j];
        double rss = 0.0, nss = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            double r = (t.diag[ui] - pairs.values[j]) * v[ui];
            if (i > 0) r += t.offdiag[ui - 1] * v[ui - 1];
            if (i + 1 < n) r += t.offdiag[ui] * v[ui + 1];
            rss += r * r;
            nss += v[ui] * v[ui];
        }
        CHECK(std::sqrt(rss) <= tol.residual * scale);
        CHECK(std::sqrt(nss) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i)
                dot += v[static_cast<std::size_t>(i)] *
                       pairs.vectors[k][static_cast<std::size_t>(i)];
            CHECK(std::abs(dot) <= tol.orthogonality);
        }
    }
}

TEST_CASE("count consistency: threshold between gaps returns exactly k pairs") {
    Lcg rng(31337);
    const SymTridiag t = random_tridiag(45, rng);
    const auto dense = oracles::dense_eigensystem(t);
    const int k = 17;
    const double gap = dense.values[k] - dense.values[k - 1];
    REQUIRE(gap > 1e-8);
    const double threshold = 0.5 * (dense.values[k] + dense.values[k - 1]);
    const EigenPairs pairs = eigs_below(t, threshold);
    CHECK(pairs.values.size() == static_cast<std::size_t>(k));
    CHECK(static_cast<int>(pairs.values.size()) == sturm_count(t, threshold));
}

TEST_CASE("interlacing: nonnegative diagonal perturbation raises every eigenvalue") {
    Lcg rng(2024);
    const int n = 35;
    const SymTridiag t = random_tridiag(n, rng);
    SymTridiag tp = t;
    for (int i = 10; i < 20; ++i) tp.diag[static_cast<std::size_t>(i)] += 0.7;
    const auto a = oracles::dense_eigensystem(t);
    const auto b = oracles::dense_eigensystem(tp);
    const double threshold = a.values[25];
    const EigenPairs ea = eigs_below(t, threshold + 1e-9);
    const EigenPairs eb = eigs_below(tp, threshold + 1e-9);
    for (std::size_t j = 0; j < eb.values.size() && j < ea.values.size(); ++j)
        CHECK(eb.values[j] >= ea.values[j] - 1e-10);
    // dense oracle agrees with the min-max direction on the full spectrum
    for (std::size_t j = 0; j < a.values.size(); ++j)
        CHECK(b.values[j] >= a.values[j] - 1e-10);
}

TEST_CASE("eigenvalue_near flags only thresholds close to the spectrum") {
    const int n = 40;
    const double h = 0.1;
    const SymTridiag t = free_laplacian(n, h);
    const double lam3 = oracles::free_box_eigenvalue(3, n, h);
    const double lam4 = oracles::free_box_eigenvalue(4, n, h);
    CHECK(eigenvalue_near(t, lam3, 1e-8 * norm_bound(t)));
    CHECK(!eigenvalue_near(t, 0.5 * (lam3 + lam4), 1e-10 * norm_bound(t)));
}

TEST_CASE("eigs_below rejects thresholds outside the Gershgorin interval") {
    const SymTridiag t = free_laplacian(10, 1.0);
    CHECK_THROWS_AS(eigs_below(t, -10.0), ValidationError);
    CHECK_THROWS_AS(eigs_below(t, 100.0), ValidationError);
}

TEST_CASE("clustered eigenvalues come out orthogonal") {
    // Two decoupled copies of the same block give exactly degenerate pairs.
    const int half = 20;
    SymTridiag t;
    t.diag.assign(2 * half, 0.0);
    t.offdiag.assign(2 * half - 1, 0.0);
    Lcg rng(5150);
    for (int i = 0; i < half; ++i) {
        const double d = 2.0 * (rng.uniform() - 0.5);
        t.diag[static_cast<std::size_t>(i)] = d;
        t.diag[static_cast<std::size_t>(half + i)] = d;
    }
    for (int i = 0; i + 1 < half; ++i) {
        const double e = rng.uniform() - 0.5;
        t.offdiag[static_cast<std::size_t>(i)] = e;
        t.offdiag[static_cast<std::size_t>(half + i)] = e;
    }
    // offdiag[half-1] stays 0: block decoupling
    const EigenPairs pairs = eigs_below(t, 0.5);
    REQUIRE(pairs.values.size() >= 4);
    for (std::size_t j = 0; j < pairs.values.size(); ++j)
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < pairs.vectors[j].size(); ++i)
                dot += pairs.vectors[j][i] * pairs.vectors[k][i];
            CHECK(std::abs(dot) <= 1e-8);
        }
}
