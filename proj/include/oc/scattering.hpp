#pragma once

#include "oc/model.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace oc {

struct SMatrix1D {
    double E = 0.0;
    std::complex<double> t;       // transmission amplitude (same from both sides)
    std::complex<double> r_left;  // reflection for incidence from the left
    std::complex<double> r_right; // reflection for incidence from the right

    double unitarity_defect() const; // max deviation of |t|^2+|r|^2 from 1
};

struct PhaseShiftTable {
    double E = 0.0;
    std::vector<double> shifts; // delta_ell mod pi, ell = 0..lmax
    double tail_bound = 0.0;    // estimate of sup_{ell > lmax} sin^2(delta_ell)
};

enum class GammaMethod { HS1D, PartialWave3D };

struct GammaPrediction {
    double E = 0.0;
    double gamma = 0.0;
    double sigma_total = 0.0; // 3D total cross section; 1D total reflection budget
    GammaMethod method = GammaMethod::HS1D;
};

// 2x2 S-matrix of the perturbation at energy E > 0, by propagating the real
// transfer matrix of (u, u') across a piecewise-constant approximation of V
// and matching plane waves. Requires V0 = 0.
SMatrix1D s_matrix_1d(const PhysicsConfig& cfg, double E);

// gamma(E) = (2 pi)^-2 * (2|t-1|^2 + |r_l|^2 + |r_r|^2).
// Throws NumericalError when the S-matrix fails its unitarity check.
GammaPrediction gamma_1d(const SMatrix1D& s, double tol_unit = 1e-8);

// Partial-wave phase shifts by outward Numerov integration and a two-point
// Riccati-Bessel match beyond the support. Requires E > 0 and V0 = 0.
PhaseShiftTable phase_shifts_3d(const PhysicsConfig& cfg, double E);

// gamma(E) = pi^-2 sum (2l+1) sin^2(delta_l); sigma = (4 pi / E) * same sum.
GammaPrediction gamma_3d(const PhaseShiftTable& table);

// Prediction for the config's geometry (1D: HS norm route, 3D: partial waves).
GammaPrediction predict_gamma(const PhysicsConfig& cfg, double E);

namespace detail {

// Riccati-Bessel pair s_l(x) = x j_l(x), c_l(x) = -x y_l(x) and derivatives.
// Downward recurrence with renormalization for s, upward for c.
void riccati_bessel(int ell, double x, double& s, double& c, double& sp, double& cp);

// One partial wave for an arbitrary radial potential supported in [0, r_support].
// match_r1 <= 0 selects the default matching radii.
double phase_shift_numerov(const std::function<double(double)>& potential, double r_support,
                           double E, int ell, double step, double match_r1 = -1.0,
                           double match_r2 = -1.0);

} // namespace detail

} // namespace oc
