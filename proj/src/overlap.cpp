#include "oc/overlap.hpp"

#include "oc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace oc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long count_at_most(const std::vector<double>& sorted, double x) {
    return static_cast<long>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                             sorted.begin());
}

void require_compatible(const SpectraSet& a, const SpectraSet& b) {
    if (a.L != b.L || a.grid_h != b.grid_h)
        throw ValidationError("overlap: spectra come from different grids or box sizes");
    if (a.which == b.which)
        throw ValidationError("overlap: need one unperturbed and one perturbed spectra set");
}

const ChannelSpectrum* find_channel(const SpectraSet& s, int ell) {
    for (const auto& c : s.channels)
        if (c.key.ell == ell) return &c;
    return nullptr;
}

struct GlobalFill {
    // per channel ell -> (full levels filled, sectors with one extra level)
    std::vector<long> full;
    std::vector<int> extra;
    bool tie = false;
};

// Fill the lowest `capacity` perturbed one-particle states across channels,
// multiplicity 2l+1 per level, lexicographic (value, ell, index) order.
GlobalFill fill_lowest(const SpectraSet& pe, long capacity, double degeneracy_tol) {
    struct Level {
        double value;
        int ell;
        long idx;
    };
    std::vector<Level> levels;
    int max_ell = 0;
    for (const auto& c : pe.channels) max_ell = std::max(max_ell, c.key.ell);
    for (const auto& c : pe.channels)
        for (std::size_t i = 0; i < c.values.size(); ++i)
            levels.push_back({c.values[i], c.key.ell, static_cast<long>(i)});
    std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.ell != b.ell) return a.ell < b.ell;
        return a.idx < b.idx;
    });

    GlobalFill out;
    out.full.assign(static_cast<std::size_t>(max_ell) + 1, 0);
    out.extra.assign(static_cast<std::size_t>(max_ell) + 1, 0);
    long remaining = capacity;
    for (std::size_t i = 0; i < levels.size() && remaining > 0; ++i) {
        const auto& lv = levels[i];
        const long mult = 2L * lv.ell + 1L;
        const auto ue = static_cast<std::size_t>(lv.ell);
        if (remaining >= mult) {
            out.full[ue] += 1;
            remaining -= mult;
            if (remaining == 0 && i + 1 < levels.size() &&
                levels[i + 1].value - lv.value < degeneracy_tol)
                out.tie = true;
        } else {
            out.extra[ue] = static_cast<int>(remaining);
            remaining = 0;
            out.tie = true;
        }
    }
    if (remaining > 0)
        throw ValidationError("overlap: spectra do not contain enough perturbed states; "
                              "raise the working threshold");
    return out;
}

} // namespace

OverlapMatrix overlap_matrix(const SpectraSet& unperturbed, const SpectraSet& perturbed,
                             double E, FillingRule rule, const Tolerances& tol) {
    require_compatible(unperturbed, perturbed);
    const SpectraSet& un = unperturbed.which == WhichOperator::Unperturbed ? unperturbed
                                                                           : perturbed;
    const SpectraSet& pe = unperturbed.which == WhichOperator::Unperturbed ? perturbed
                                                                           : unperturbed;
    if (E > un.threshold || E > pe.threshold)
        throw ValidationError("overlap: E above the computed spectral window");

    const double h = un.grid_h;
    OverlapMatrix out;
    out.rule = rule;
    out.E = E;
    out.L = un.L;
    out.h = h;

    // Degeneracy scale: relative tolerance against the working threshold.
    const double deg_tol = tol.degeneracy * std::max(std::abs(un.threshold), 1.0);

    long n_total = 0;
    for (const auto& c : un.channels) {
        const long r = count_at_most(c.values, E);
        n_total += r * c.key.multiplicity();
        const auto lo = std::lower_bound(c.values.begin(), c.values.end(), E - deg_tol);
        const auto hi = std::upper_bound(c.values.begin(), c.values.end(), E + deg_tol);
        if (lo != hi) out.degenerate_at_E = true;
    }
    for (const auto& c : pe.channels) {
        const auto lo = std::lower_bound(c.values.begin(), c.values.end(), E - deg_tol);
        const auto hi = std::upper_bound(c.values.begin(), c.values.end(), E + deg_tol);
        if (lo != hi) out.degenerate_at_E = true;
    }
    out.N = n_total;

    GlobalFill fill;
    if (rule == FillingRule::GlobalN) {
        fill = fill_lowest(pe, n_total, deg_tol);
        out.tie_at_N = fill.tie;
    }

    for (const auto& uc : un.channels) {
        const long rows = count_at_most(uc.values, E);
        const ChannelSpectrum* pc = find_channel(pe, uc.key.ell);

        OverlapBlock blk;
        blk.ell = uc.key.ell;
        blk.rows = rows;
        const auto ue = static_cast<std::size_t>(uc.key.ell);
        if (rule == FillingRule::GlobalN) {
            blk.cols_full = ue < fill.full.size() ? fill.full[ue] : 0;
            blk.extra_sectors = ue < fill.extra.size() ? fill.extra[ue] : 0;
            blk.cols = blk.cols_full + (blk.extra_sectors > 0 ? 1 : 0);
        } else {
            blk.cols_full = pc ? count_at_most(pc->values, E) : 0;
            blk.extra_sectors = 0;
            blk.cols = blk.cols_full;
        }
        blk.cols_at_E = pc ? count_at_most(pc->values, E) : 0;
        if (rows == 0 && blk.cols == 0) continue;
        if (blk.cols > 0 && pc == nullptr)
            throw ValidationError("overlap: perturbed spectra missing a filled channel");

        blk.row_values.assign(uc.values.begin(), uc.values.begin() + rows);
        if (pc)
            blk.col_values.assign(pc->values.begin(), pc->values.begin() + blk.cols);
        blk.overlaps = scaled_gram(uc.vectors, static_cast<std::size_t>(rows),
                                   pc ? pc->vectors : uc.vectors,
                                   pc ? static_cast<std::size_t>(blk.cols) : 0, h);
        out.blocks.push_back(std::move(blk));
    }
    return out;
}

namespace {

struct BlockDets {
    LogOverlap summary;
    std::vector<ChannelContribution> channels;
};

BlockDets block_log_dets(const OverlapMatrix& m) {
    BlockDets out;
    if (m.N == 0) return out; // S_L := 1 by convention

    bool mismatch = false;
    for (const auto& blk : m.blocks)
        if (blk.extra_sectors > 0 || blk.cols_full != blk.rows) mismatch = true;
    if (mismatch) {
        out.summary.occupancy_mismatch = true;
        out.summary.value = -kInf;
        for (const auto& blk : m.blocks)
            out.channels.push_back({blk.ell, blk.rows,
                                    blk.cols_full + (blk.extra_sectors > 0 ? 1 : 0), -kInf});
        return out;
    }
    double total = 0.0;
    for (const auto& blk : m.blocks) {
        if (blk.rows == 0) continue;
        Matrix square(static_cast<std::size_t>(blk.rows), static_cast<std::size_t>(blk.rows));
        for (long i = 0; i < blk.rows; ++i)
            for (long j = 0; j < blk.rows; ++j)
                square(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    blk.overlaps(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        const LogDet ld = lu_log_abs_det(std::move(square));
        out.channels.push_back({blk.ell, blk.rows, blk.cols_full, ld.log_abs});
        if (ld.singular) out.summary.singular_pivot = true;
        total += (2.0 * blk.ell + 1.0) * ld.log_abs;
    }
    out.summary.value = out.summary.singular_pivot ? -kInf : total;
    return out;
}

} // namespace

LogOverlap log_abs_overlap(const OverlapMatrix& m) {
    if (m.rule != FillingRule::GlobalN)
        throw ValidationError("log_abs_overlap: GlobalN filling required");
    return block_log_dets(m).summary;
}

OverlapReport anderson_report(const PhysicsConfig& cfg, const SpectraSet& unperturbed,
                              const SpectraSet& perturbed, double E) {
    const OverlapMatrix m = overlap_matrix(unperturbed, perturbed, E,
                                           FillingRule::GlobalN, cfg.tol);

    OverlapReport rep;
    rep.L = m.L;
    rep.E = E;
    rep.N = m.N;
    rep.degenerate_at_E = m.degenerate_at_E;
    rep.tie_at_N = m.tie_at_N;

    // Parseval shortcut: over filled rows, I = sum_j (1 - sum_{k filled} M_jk^2);
    // F uses the fixed-energy column cut instead. Exact in the discrete model.
    double i_sum = 0.0;
    double f_sum = 0.0;
    long cols_at_e_total = 0;
    for (const auto& blk : m.blocks) {
        const long mult = 2L * blk.ell + 1L;
        cols_at_e_total += mult * blk.cols_at_E;
        for (long j = 0; j < blk.rows; ++j) {
            double filled_full = 0.0;
            double filled_at_e = 0.0;
            for (long k = 0; k < blk.cols; ++k) {
                const double w = blk.overlaps(static_cast<std::size_t>(j),
                                              static_cast<std::size_t>(k));
                const double w2 = w * w;
                if (k < blk.cols_full) filled_full += w2;
                if (k < blk.cols_at_E) filled_at_e += w2;
            }
            // Sectors with the extra filled column subtract its weight too.
            double sector_sum = static_cast<double>(mult) * (1.0 - filled_full);
            if (blk.extra_sectors > 0 && blk.cols > blk.cols_full) {
                const double w = blk.overlaps(static_cast<std::size_t>(j),
                                              static_cast<std::size_t>(blk.cols_full));
                sector_sum -= blk.extra_sectors * w * w;
            }
            i_sum += sector_sum;
            f_sum += static_cast<double>(mult) * (1.0 - filled_at_e);
        }
    }
    rep.I = i_sum;
    rep.F = f_sum;
    rep.xi = rep.N - cols_at_e_total;

    BlockDets dets = block_log_dets(m);
    rep.log_abs_overlap = dets.summary.value;
    rep.occupancy_mismatch = dets.summary.occupancy_mismatch;
    rep.singular_pivot = dets.summary.singular_pivot;
    rep.channels = std::move(dets.channels);
    rep.hadamard_ok =
        rep.log_abs_overlap <= -0.5 * rep.I + cfg.tol.det * static_cast<double>(rep.N);
    return rep;
}

double coupling_identity_residual(const PhysicsConfig& cfg, const SpectraSet& unperturbed,
                                  const SpectraSet& perturbed,
                                  const std::vector<std::pair<int, int>>& pairs,
                                  double min_gap) {
    require_compatible(unperturbed, perturbed);
    const SpectraSet& un = unperturbed.which == WhichOperator::Unperturbed ? unperturbed
                                                                           : perturbed;
    const SpectraSet& pe = unperturbed.which == WhichOperator::Unperturbed ? perturbed
                                                                           : unperturbed;

    const auto pts = grid_points(cfg, un.L);
    const auto v = sample_potential(cfg.potentials, PotentialPart::Perturbation, pts,
                                    0.5 * un.L + cfg.grid.spacing);
    const double h = cfg.grid.spacing;

    double worst = -1.0;
    long used = 0;
    std::vector<double> vpsi(pts.size());
    for (const auto& uc : un.channels) {
        const ChannelSpectrum* pc = find_channel(pe, uc.key.ell);
        if (!pc) continue;
        for (std::size_t k = 0; k < pc->vectors.size(); ++k) {
            for (std::size_t i = 0; i < vpsi.size(); ++i)
                vpsi[i] = v[i] * pc->vectors[k][i];
            for (std::size_t j = 0; j < uc.vectors.size(); ++j) {
                if (!pairs.empty()) {
                    bool hit = false;
                    for (const auto& p : pairs)
                        if (p.first == static_cast<int>(j) && p.second == static_cast<int>(k)) {
                            hit = true;
                            break;
                        }
                    if (!hit) continue;
                }
                const double gap = std::abs(pc->values[k] - uc.values[j]);
                if (gap <= min_gap) continue;
                double ov = 0.0;
                double cross = 0.0;
                const auto& phi = uc.vectors[j];
                const auto& psi = pc->vectors[k];
                for (std::size_t i = 0; i < phi.size(); ++i) {
                    ov += phi[i] * psi[i];
                    cross += phi[i] * vpsi[i];
                }
                ov *= h;
                cross *= h;
                const double resid = std::abs(std::abs(ov) * gap - std::abs(cross)) /
                                     std::max(std::abs(cross), cfg.tol.coupling_floor);
                worst = std::max(worst, resid);
                ++used;
            }
        }
    }
    if (used == 0)
        throw InsufficientDataError("coupling identity: no pair with a usable spectral gap");
    return worst;
}

BirmanEstimate birman_estimate(const PhysicsConfig& cfg, const SpectraSet& unperturbed,
                               const SpectraSet& perturbed, double E, double E_prime,
                               double eps) {
    require_compatible(unperturbed, perturbed);
    const SpectraSet& un = unperturbed.which == WhichOperator::Unperturbed ? unperturbed
                                                                           : perturbed;
    const SpectraSet& pe = unperturbed.which == WhichOperator::Unperturbed ? perturbed
                                                                           : unperturbed;
    if (eps <= 0.0) throw ValidationError("birman_estimate: eps must be positive");
    const double lo1 = E - 0.5 * eps, hi1 = E + 0.5 * eps;
    const double lo2 = E_prime - 0.5 * eps, hi2 = E_prime + 0.5 * eps;
    if (lo1 <= 0.0 || lo2 <= 0.0 || hi1 >= un.threshold || hi2 >= pe.threshold)
        throw ValidationError("birman_estimate: window must lie inside (0, E_work)");

    const auto pts = grid_points(cfg, un.L);
    const auto v = sample_potential(cfg.potentials, PotentialPart::Perturbation, pts,
                                    0.5 * un.L + cfg.grid.spacing);
    const double h = cfg.grid.spacing;

    BirmanEstimate out;
    out.E = E;
    out.E_prime = E_prime;
    out.eps = eps;

    for (const auto& uc : un.channels) {
        const double mult = 2.0 * uc.key.ell + 1.0;
        const ChannelSpectrum* pc = find_channel(pe, uc.key.ell);

        std::vector<std::size_t> ji, ki;
        for (std::size_t j = 0; j < uc.values.size(); ++j)
            if (uc.values[j] >= lo1 && uc.values[j] <= hi1) ji.push_back(j);
        if (pc)
            for (std::size_t k = 0; k < pc->values.size(); ++k)
                if (pc->values[k] >= lo2 && pc->values[k] <= hi2) ki.push_back(k);

        out.count1 += static_cast<long>(ji.size()) * static_cast<long>(mult);
        out.count2 += static_cast<long>(ki.size()) * static_cast<long>(mult);

        for (std::size_t j : ji) {
            const auto& phi = uc.vectors[j];
            double diag = 0.0;
            for (std::size_t i = 0; i < phi.size(); ++i) diag += phi[i] * v[i] * phi[i];
            out.gamma1 += mult * h * diag;
        }
        if (pc) {
            for (std::size_t k : ki) {
                const auto& psi = pc->vectors[k];
                double diag = 0.0;
                for (std::size_t i = 0; i < psi.size(); ++i) diag += psi[i] * v[i] * psi[i];
                out.gamma2 += mult * h * diag;
            }
            std::vector<double> vpsi(pts.size());
            for (std::size_t k : ki) {
                for (std::size_t i = 0; i < vpsi.size(); ++i)
                    vpsi[i] = v[i] * pc->vectors[k][i];
                for (std::size_t j : ji) {
                    const auto& phi = uc.vectors[j];
                    double cross = 0.0;
                    for (std::size_t i = 0; i < phi.size(); ++i) cross += phi[i] * vpsi[i];
                    cross *= h;
                    out.gamma2d += mult * cross * cross;
                }
            }
        }
    }
    out.gamma1 /= eps;
    out.gamma2 /= eps;
    out.gamma2d /= eps * eps;
    if (out.count1 < 5 || out.count2 < 5) out.low_statistics = true;
    return out;
}

} // namespace oc
