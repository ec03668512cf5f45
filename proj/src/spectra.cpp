#include "oc/spectra.hpp"

#include "oc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace oc {

std::vector<double> grid_points(const PhysicsConfig& cfg, double L) {
    const double h = cfg.grid.spacing;
    std::vector<double> pts;
    if (cfg.geometry.kind == GeometryKind::Interval1D) {
        const int n = cfg.grid.interior_points_1d(L);
        pts.reserve(static_cast<std::size_t>(n));
        const double width = (n + 1) * h;
        for (int i = 1; i <= n; ++i) pts.push_back(-0.5 * width + i * h);
    } else {
        const int n = cfg.grid.interior_points_radial(L);
        pts.reserve(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) pts.push_back(i * h);
    }
    return pts;
}

SymTridiag assemble_operator(const PhysicsConfig& cfg, WhichOperator which, ChannelKey key,
                             double L) {
    const double h = cfg.grid.spacing;
    const double inv_h2 = 1.0 / (h * h);
    const auto pts = grid_points(cfg, L);
    const int n = static_cast<int>(pts.size());
    if (n < 1) throw ValidationError("assemble_operator: box too small for the grid");

    const auto part = which == WhichOperator::Unperturbed ? PotentialPart::Background
                                                          : PotentialPart::Total;
    const auto v = sample_potential(cfg.potentials, part, pts, 0.5 * L + 0.5 * h);

    SymTridiag t;
    t.diag.resize(static_cast<std::size_t>(n));
    t.offdiag.assign(static_cast<std::size_t>(n - 1), -inv_h2);
    const double cent = static_cast<double>(key.ell) * (key.ell + 1);
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        double d = 2.0 * inv_h2 + v[ui];
        if (cfg.geometry.kind == GeometryKind::RadialChannels3D && key.ell > 0)
            d += cent / (pts[ui] * pts[ui]);
        t.diag[ui] = d;
    }
    return t;
}

ChannelSpectrum spectrum_below(const PhysicsConfig& cfg, WhichOperator which, ChannelKey key,
                               double L, double threshold) {
    const SymTridiag t = assemble_operator(cfg, which, key, L);
    EigenPairs pairs = eigs_below(t, threshold, cfg.tol);

    ChannelSpectrum out;
    out.key = key;
    out.which = which;
    out.L = L;
    out.grid_h = cfg.grid.spacing;
    out.threshold = threshold;
    out.values = std::move(pairs.values);
    out.vectors = std::move(pairs.vectors);
    const double scale = 1.0 / std::sqrt(cfg.grid.spacing);
    for (auto& v : out.vectors)
        for (double& x : v) x *= scale;
    return out;
}

int channel_limit(const PhysicsConfig& cfg, double L, double threshold) {
    if (cfg.geometry.kind == GeometryKind::Interval1D) return 1;
    int ell = 0;
    for (;;) {
        const SymTridiag t = assemble_operator(cfg, WhichOperator::Unperturbed, {ell}, L);
        if (sturm_count(t, threshold) == 0) return ell;
        ++ell;
    }
}

ParticleNumber counting_function(const PhysicsConfig& cfg, WhichOperator which, double L,
                                 double E) {
    ParticleNumber out;
    const int lim = channel_limit(cfg, L, E);
    for (int ell = 0; ell < lim; ++ell) {
        const SymTridiag t = assemble_operator(cfg, which, {ell}, L);
        const long c = sturm_count(t, E);
        const double tol_abs = cfg.tol.degeneracy * std::max(norm_bound(t), 1.0);
        if (eigenvalue_near(t, E, tol_abs)) out.degenerate_at_E = true;
        if (c > 0) {
            out.per_channel.emplace_back(ell, c);
            out.total += c * (2 * ell + 1);
        }
    }
    return out;
}

ParticleNumber particle_number(const PhysicsConfig& cfg, double L, double E) {
    return counting_function(cfg, WhichOperator::Unperturbed, L, E);
}

double mean_level_spacing(const PhysicsConfig& cfg, double L, double E) {
    if (E <= 0.0) E = 1.0;
    if (cfg.geometry.kind == GeometryKind::Interval1D)
        return 2.0 * std::numbers::pi * std::sqrt(E) / L;
    const double r = 0.5 * L;
    return 6.0 * std::numbers::pi * std::numbers::pi / (r * r * r * std::sqrt(E));
}

double working_threshold(const PhysicsConfig& cfg, double L) {
    const double e_max = cfg.max_fermi_energy();
    double margin = 10.0 * mean_level_spacing(cfg, L, e_max);
    if (cfg.smear_width > 0.0) margin = std::max(margin, 0.55 * cfg.smear_width +
                                                             2.0 * mean_level_spacing(cfg, L, e_max));
    return e_max + margin;
}

SpectraSet spectra_below(const PhysicsConfig& cfg, WhichOperator which, double L,
                         double threshold) {
    SpectraSet set;
    set.which = which;
    set.L = L;
    set.grid_h = cfg.grid.spacing;
    set.threshold = threshold;
    const int lim = channel_limit(cfg, L, threshold);
    for (int ell = 0; ell < lim; ++ell)
        set.channels.push_back(spectrum_below(cfg, which, {ell}, L, threshold));
    return set;
}

std::pair<SpectraSet, SpectraSet> spectra_pair(const PhysicsConfig& cfg, double L) {
    const double e_max = cfg.max_fermi_energy();
    double threshold = working_threshold(cfg, L);
    const long n_fermi = particle_number(cfg, L, e_max).total;

    // The perturbed sea can poke above E_max by a few level spacings; escalate
    // until the lowest N_L(E_max) perturbed states sit strictly below threshold.
    for (int attempt = 0; attempt < 24; ++attempt) {
        const long have = counting_function(cfg, WhichOperator::Perturbed, L, threshold).total;
        if (have >= n_fermi + 1) break;
        threshold = e_max + 2.0 * (threshold - e_max);
    }

    return {spectra_below(cfg, WhichOperator::Unperturbed, L, threshold),
            spectra_below(cfg, WhichOperator::Perturbed, L, threshold)};
}

} // namespace oc
