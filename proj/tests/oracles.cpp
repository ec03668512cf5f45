#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracles {

DenseEigen dense_eigensystem(const oc::SymTridiag& t) {
    const int n = t.n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = t.diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) {
            m(i, i + 1) = t.offdiag[static_cast<std::size_t>(i)];
            m(i + 1, i) = t.offdiag[static_cast<std::size_t>(i)];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    DenseEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        out.values[static_cast<std::size_t>(j)] = solver.eigenvalues()(j);
        auto& v = out.vectors[static_cast<std::size_t>(j)];
        v.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = solver.eigenvectors()(i, j);
    }
    return out;
}

namespace {

// sin(z)/z continued through z = 0.
std::complex<double> sinc_c(std::complex<double> z) {
    if (std::abs(z) < 1e-6) {
        const std::complex<double> z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

// tan(q r)/q as an even function of q, continued through q^2 = 0:
// q^2 > 0 -> tan(qr)/q, q^2 < 0 -> tanh(|q|r)/|q|.
double tan_over_q(double q2, double r) {
    if (std::abs(q2) * r * r < 1e-12) return r * (1.0 + q2 * r * r / 3.0);
    if (q2 > 0.0) {
        const double q = std::sqrt(q2);
        return std::tan(q * r) / q;
    }
    const double q = std::sqrt(-q2);
    return std::tanh(q * r) / q;
}

double fold_mod_pi(double d) {
    d -= std::numbers::pi * std::round(d / std::numbers::pi);
    return d;
}

// Riccati-Bessel s_l = x j_l(x) from explicit trigonometric closed forms,
// independent of the library recurrences (l <= 2 is all Born tests need).
double riccati_s_closed(int ell, double x) {
    switch (ell) {
    case 0: return std::sin(x);
    case 1: return std::sin(x) / x - std::cos(x);
    case 2: return (3.0 / (x * x) - 1.0) * std::sin(x) - 3.0 * std::cos(x) / x;
    default: return 0.0;
    }
}

} // namespace

BarrierTR square_barrier_1d(double v, double r, double e) {
    const double k = std::sqrt(e);
    const double a = 2.0 * r; // barrier width
    const std::complex<double> kappa = std::sqrt(std::complex<double>(e - v, 0.0));
    const std::complex<double> i(0.0, 1.0);

    const std::complex<double> cos_ka = std::cos(kappa * a);
    const std::complex<double> sin_ka_over = sinc_c(kappa * a) * a; // sin(kappa a)/kappa
    // Barrier on [0, a]:
    //   t0 = e^{-ika} / D,  r0 = -i ((k^2 - kappa^2)/(2k)) sin(kappa a)/kappa / D,
    //   D  = cos(kappa a) - i ((k^2 + kappa^2)/(2k)) sin(kappa a)/kappa.
    const std::complex<double> den =
        cos_ka - i * ((k * k + kappa * kappa) / (2.0 * k)) * sin_ka_over;
    const std::complex<double> t0 = std::exp(-i * k * a) / den;
    const std::complex<double> r0 =
        -i * ((k * k - kappa * kappa) / (2.0 * k)) * sin_ka_over / den;
    // Shift [0, a] -> [-a/2, a/2]: r picks up e^{-ika}, t is unchanged.
    return {t0, r0 * std::exp(-i * k * a)};
}

double square_barrier_swave(double v, double r, double e) {
    const double k = std::sqrt(e);
    // tan(delta) = [k tan(qr) - q tan(kr)] / [q + k tan(qr) tan(kr)] with
    // q^2 = e - v; dividing through by q gives a form regular at q = 0:
    const double t_over = tan_over_q(e - v, r); // tan(q r)/q
    const double tan_kr = std::tan(k * r);
    const double num = k * t_over - tan_kr;
    const double den = 1.0 + k * t_over * tan_kr;
    return fold_mod_pi(std::atan2(num, den));
}

double born_phase_shift(const std::function<double(double)>& potential, double r_support,
                        double e, int ell, int panels) {
    const double k = std::sqrt(e);
    // delta_ell ~ -(1/k) int_0^R V(r) [x j_ell(k r)]^2 dr.
    auto integrand = [&](double r) {
        if (r <= 0.0) return 0.0;
        const double s = riccati_s_closed(ell, k * r);
        return potential(r) * s * s;
    };
    const double h = r_support / (2 * panels);
    double sum = integrand(0.0) + integrand(r_support);
    for (int i = 1; i < 2 * panels; ++i) sum += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
    const double integral = sum * h / 3.0;
    return -integral / k;
}

double free_box_eigenvalue(int m, int n, double h) {
    const double theta = m * std::numbers::pi / (n + 1);
    return 2.0 / (h * h) * (1.0 - std::cos(theta));
}

} // namespace oracles
