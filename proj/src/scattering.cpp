#include "oc/scattering.hpp"

#include "oc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace oc {

namespace {

constexpr double kPi = std::numbers::pi;

struct Transfer2 {
    // [[a, b], [c, d]] acting on (u, u')
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
};

// Propagator over a cell of width w with constant k^2 = E - V:
// [[cos(q w), sin(q w)/q], [-q sin(q w), cos(q w)]] continued analytically
// through q^2 <= 0.
Transfer2 cell_transfer(double ksq, double w) {
    Transfer2 m;
    const double z = ksq * w * w;
    if (std::abs(z) < 1e-10) {
        m.a = 1.0 - z / 2.0 + z * z / 24.0;
        m.b = w * (1.0 - z / 6.0 + z * z / 120.0);
    } else if (ksq > 0.0) {
        const double q = std::sqrt(ksq);
        m.a = std::cos(q * w);
        m.b = std::sin(q * w) / q;
    } else {
        const double q = std::sqrt(-ksq);
        m.a = std::cosh(q * w);
        m.b = std::sinh(q * w) / q;
    }
    m.c = -ksq * m.b;
    m.d = m.a;
    return m;
}

Transfer2 multiply(const Transfer2& y, const Transfer2& x) {
    // y * x
    return {y.a * x.a + y.b * x.c, y.a * x.b + y.b * x.d,
            y.c * x.a + y.d * x.c, y.c * x.b + y.d * x.d};
}

struct TR {
    std::complex<double> t, r;
};

// Plane-wave match for the total transfer matrix across [x_l, x_r].
TR match_plane_waves(const Transfer2& m, double k, double x_l, double x_r) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> A = std::exp(i * k * x_l);
    const std::complex<double> B = std::exp(-i * k * x_l);
    const std::complex<double> C = std::exp(i * k * x_r);

    const std::complex<double> num = m.c + i * k * (m.d - m.a) + k * k * m.b;
    const std::complex<double> den = m.c - i * k * (m.d + m.a) - k * k * m.b;
    TR out;
    out.r = -(A / B) * num / den;
    out.t = (m.a * (A + out.r * B) + i * k * m.b * (A - out.r * B)) / C;
    return out;
}

std::vector<double> cell_potentials(const PhysicsConfig& cfg, bool reversed, double& width,
                                    int& cells) {
    const double rv = cfg.potentials.perturbation.support_radius;
    const double want = cfg.scattering_grid_step();
    cells = std::max(8, static_cast<int>(std::ceil(2.0 * rv / want)));
    width = 2.0 * rv / cells;
    std::vector<double> v(static_cast<std::size_t>(cells));
    for (int c = 0; c < cells; ++c) {
        const double mid = -rv + (c + 0.5) * width;
        const double x = reversed ? -mid : mid;
        v[static_cast<std::size_t>(c)] = perturbation_value(cfg.potentials.perturbation, x);
    }
    return v;
}

TR propagate(const PhysicsConfig& cfg, double E, bool reversed) {
    double width = 0.0;
    int cells = 0;
    const auto v = cell_potentials(cfg, reversed, width, cells);
    Transfer2 total;
    for (int c = 0; c < cells; ++c)
        total = multiply(cell_transfer(E - v[static_cast<std::size_t>(c)], width), total);
    const double rv = cfg.potentials.perturbation.support_radius;
    return match_plane_waves(total, std::sqrt(E), -rv, rv);
}

} // namespace

double SMatrix1D::unitarity_defect() const {
    const double dl = std::abs(std::norm(t) + std::norm(r_left) - 1.0);
    const double dr = std::abs(std::norm(t) + std::norm(r_right) - 1.0);
    return std::max(dl, dr);
}

SMatrix1D s_matrix_1d(const PhysicsConfig& cfg, double E) {
    if (E <= 0.0) throw ValidationError("s_matrix_1d: energy must be positive");
    if (cfg.potentials.background.shape != BackgroundShape::Zero)
        throw ValidationError("s_matrix_1d: scattering predictions require V0 = 0; "
                              "this config only supports finite-volume statistics");

    const TR fwd = propagate(cfg, E, false);
    const TR bwd = propagate(cfg, E, true);
    SMatrix1D s;
    s.E = E;
    s.t = fwd.t;
    s.r_left = fwd.r;
    s.r_right = bwd.r;
    return s;
}

GammaPrediction gamma_1d(const SMatrix1D& s, double tol_unit) {
    const double defect = s.unitarity_defect();
    if (defect > tol_unit) {
        std::ostringstream os;
        os << "gamma_1d: S-matrix unitarity defect " << defect << " exceeds " << tol_unit;
        throw NumericalError(os.str());
    }
    GammaPrediction out;
    out.E = s.E;
    out.method = GammaMethod::HS1D;
    const std::complex<double> one(1.0, 0.0);
    out.gamma = (2.0 * std::norm(s.t - one) + std::norm(s.r_left) + std::norm(s.r_right)) /
                (4.0 * kPi * kPi);
    out.sigma_total = std::norm(s.r_left) + std::norm(s.r_right);
    return out;
}

namespace detail {

void riccati_bessel(int ell, double x, double& s, double& c, double& sp, double& cp) {
    const double sx = std::sin(x), cx = std::cos(x);
    // c family (irregular): upward, stable.
    double cm1 = -sx, c0 = cx;
    for (int l = 0; l < ell; ++l) {
        const double c1 = (2.0 * l + 1.0) / x * c0 - cm1;
        cm1 = c0;
        c0 = c1;
    }
    c = c0;
    cp = (ell == 0 ? -sx : cm1) - ell / x * c0;

    // s family (regular): downward Miller recurrence, renormalized at the end.
    const int start = ell + 24 + static_cast<int>(1.2 * std::abs(x));
    std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
    f[static_cast<std::size_t>(start) + 1] = 0.0;
    f[static_cast<std::size_t>(start)] = 1e-280;
    for (int l = start; l >= 1; --l) {
        const auto ul = static_cast<std::size_t>(l);
        double val = (2.0 * l + 1.0) / x * f[ul] - f[ul + 1];
        if (std::abs(val) > 1e250) {
            const double scale = 1e-250;
            for (std::size_t j = ul; j < f.size(); ++j) f[j] *= scale;
            val *= scale;
        }
        f[ul - 1] = val;
    }
    // Anchor against the closed forms for l = 0 or l = 1, whichever is larger.
    const double s0 = sx;
    const double s1 = sx / x - cx;
    double ratio;
    if (std::abs(s0) >= std::abs(s1))
        ratio = s0 / f[0];
    else
        ratio = s1 / f[1];
    const auto ue = static_cast<std::size_t>(ell);
    s = f[ue] * ratio;
    const double sm1 = ell == 0 ? cx : f[ue - 1] * ratio;
    sp = sm1 - ell / x * s;
}

double phase_shift_numerov(const std::function<double(double)>& potential, double r_support,
                           double E, int ell, double step, double match_r1, double match_r2) {
    if (E <= 0.0) throw ValidationError("phase_shift_numerov: energy must be positive");
    const double k = std::sqrt(E);
    if (match_r1 <= r_support) {
        match_r1 = r_support + std::max(0.5, 0.25 * kPi / k);
        match_r2 = match_r1 + 0.5 * kPi / k;
    }
    if (match_r2 <= match_r1) match_r2 = match_r1 + 0.5 * kPi / k;

    for (int attempt = 0; attempt < 4; ++attempt) {
        const double r1 = match_r1 + attempt * 0.37 * (match_r2 - match_r1);
        const double r2 = match_r2 + attempt * 0.37 * (match_r2 - match_r1);

        // Snap the grid so the support edge and both radii are nodes.
        const long n1 = std::lround(r1 / step);
        const long n2 = std::lround(r2 / step);
        const long n = std::max(n2, n1 + 1);

        auto g = [&](double r) {
            const double v = r <= r_support ? potential(r) : 0.0;
            const double cent = ell > 0 ? ell * (ell + 1.0) / (r * r) : 0.0;
            return cent + v - E;
        };

        // u ~ r^{l+1} near the origin.
        double um = 0.0;                                   // u(0)
        double u0 = std::pow(step, ell + 1);               // u(step)
        if (u0 == 0.0) u0 = std::numeric_limits<double>::min() * 1e20;
        double gm = 0.0, g0 = g(step);
        double u_r1 = 0.0, u_r2 = 0.0;
        const double h2 = step * step;
        if (n1 == 1) u_r1 = u0;
        for (long i = 1; i < n; ++i) {
            const double r_next = (i + 1) * step;
            const double g1 = g(r_next);
            double u1;
            if (i == 1) {
                // First step leaves r=0 where the centrifugal term is singular;
                // seed with the power law instead of the three-point formula.
                u1 = ell > 0 ? std::pow(r_next, ell + 1)
                             : (2.0 * u0 * (1.0 + 5.0 * h2 * g0 / 12.0) - um) /
                                   (1.0 - h2 * g1 / 12.0);
            } else {
                u1 = (2.0 * u0 * (1.0 + 5.0 * h2 * g0 / 12.0) -
                      um * (1.0 - h2 * gm / 12.0)) /
                     (1.0 - h2 * g1 / 12.0);
            }
            if (std::abs(u1) > 1e250) {
                const double scale = 1e-250;
                u1 *= scale;
                u0 *= scale;
                u_r1 *= scale;
                u_r2 *= scale;
            }
            um = u0;
            u0 = u1;
            gm = g0;
            g0 = g1;
            if (i + 1 == n1) u_r1 = u1;
            if (i + 1 == n2) u_r2 = u1;
        }

        const double x1 = k * n1 * step;
        const double x2 = k * n2 * step;
        double s1, c1, s1p, c1p, s2, c2, s2p, c2p;
        riccati_bessel(ell, x1, s1, c1, s1p, c1p);
        riccati_bessel(ell, x2, s2, c2, s2p, c2p);

        const double num = s1 * u_r2 - s2 * u_r1;
        const double den = c2 * u_r1 - c1 * u_r2;
        const double scale = std::abs(s1 * u_r2) + std::abs(s2 * u_r1) +
                             std::abs(c2 * u_r1) + std::abs(c1 * u_r2);
        if (scale > 0.0 && std::isfinite(scale) &&
            std::abs(num) + std::abs(den) > 1e-14 * scale) {
            double delta = std::atan2(num, den);
            delta -= kPi * std::round(delta / kPi); // store mod pi in (-pi/2, pi/2]
            return delta;
        }
    }
    std::ostringstream os;
    os << "phase_shift_numerov: matching degenerate for ell=" << ell << " at E=" << E;
    throw NumericalError(os.str());
}

} // namespace detail

PhaseShiftTable phase_shifts_3d(const PhysicsConfig& cfg, double E) {
    if (E <= 0.0) throw ValidationError("phase_shifts_3d: energy must be positive");
    if (cfg.potentials.background.shape != BackgroundShape::Zero)
        throw ValidationError("phase_shifts_3d: scattering predictions require V0 = 0; "
                              "this config only supports finite-volume statistics");

    const auto& pert = cfg.potentials.perturbation;
    auto v = [&pert](double r) { return perturbation_value(pert, r); };
    const double step = cfg.scattering_grid_step();

    PhaseShiftTable table;
    table.E = E;
    const int floor_ell = cfg.lmax_policy == LmaxPolicy::Fixed ? cfg.lmax_fixed : 0;
    constexpr int hard_cap = 256;
    int quiet = 0;
    for (int ell = 0; ell <= hard_cap; ++ell) {
        const double d = detail::phase_shift_numerov(v, pert.support_radius, E, ell, step);
        table.shifts.push_back(d);
        const double s2 = std::sin(d) * std::sin(d);
        if (ell >= floor_ell && s2 < cfg.tol.tail)
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 2 && ell >= floor_ell) break;
    }
    if (quiet < 2)
        throw NumericalError("phase_shifts_3d: partial-wave tail did not fall below the "
                             "tail tolerance before the hard cap");
    const std::size_t m = table.shifts.size();
    const double last = std::sin(table.shifts[m - 1]) * std::sin(table.shifts[m - 1]);
    const double prev = std::sin(table.shifts[m - 2]) * std::sin(table.shifts[m - 2]);
    table.tail_bound = std::max(last, prev);
    return table;
}

GammaPrediction gamma_3d(const PhaseShiftTable& table) {
    GammaPrediction out;
    out.E = table.E;
    out.method = GammaMethod::PartialWave3D;
    double sum = 0.0;
    for (std::size_t l = 0; l < table.shifts.size(); ++l) {
        const double s = std::sin(table.shifts[l]);
        sum += (2.0 * static_cast<double>(l) + 1.0) * s * s;
    }
    out.gamma = sum / (kPi * kPi);
    out.sigma_total = 4.0 * kPi / table.E * sum;

    // Cross-check the cross-section route gamma = E sigma / (4 pi^3); the two
    // are the same sum rearranged, so they must agree to rounding.
    const double via_sigma = table.E * out.sigma_total / (4.0 * kPi * kPi * kPi);
    if (std::abs(via_sigma - out.gamma) >
        1e-12 * std::max(1.0, std::abs(out.gamma)))
        throw NumericalError("gamma_3d: cross-section route disagrees with the partial-wave sum");
    return out;
}

GammaPrediction predict_gamma(const PhysicsConfig& cfg, double E) {
    if (cfg.geometry.kind == GeometryKind::Interval1D)
        return gamma_1d(s_matrix_1d(cfg, E), cfg.tol.unitarity);
    return gamma_3d(phase_shifts_3d(cfg, E));
}

} // namespace oc
