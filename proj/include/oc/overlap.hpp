#pragma once

#include "oc/linalg.hpp"
#include "oc/model.hpp"
#include "oc/spectra.hpp"

#include <utility>
#include <vector>

namespace oc {

enum class FillingRule { GlobalN, FixedEnergy };

// One angular-momentum channel of the overlap matrix. The 2l+1 magnetic
// sectors share the same radial entries; under GlobalN filling a partially
// filled perturbed multiplet gives `extra_sectors` sectors one extra column.
struct OverlapBlock {
    int ell = 0;
    long rows = 0;          // filled unperturbed levels (per sector)
    long cols = 0;          // stored columns = largest sector occupancy
    long cols_full = 0;     // columns filled in every sector
    int extra_sectors = 0;  // sectors with cols_full + 1 columns
    long cols_at_E = 0;     // perturbed levels at or below E (fixed-energy cut)
    Matrix overlaps;        // rows x cols, entries h * sum_i phi_i psi_i
    std::vector<double> row_values;
    std::vector<double> col_values;
};

struct OverlapMatrix {
    FillingRule rule = FillingRule::GlobalN;
    double E = 0.0;
    double L = 0.0;
    double h = 0.0;
    long N = 0; // total filled states, with multiplicity
    bool tie_at_N = false;
    bool degenerate_at_E = false;
    std::vector<OverlapBlock> blocks;
};

struct LogOverlap {
    double value = 0.0; // ln|det|, -inf when the determinant vanishes
    bool occupancy_mismatch = false; // channel block structure forces det = 0
    bool singular_pivot = false;     // numerically singular factorization
};

struct ChannelContribution {
    int ell = 0;
    long rows = 0;
    long cols = 0;
    double log_abs_det = 0.0;
};

struct OverlapReport {
    double L = 0.0;
    double E = 0.0;
    long N = 0;
    double log_abs_overlap = 0.0; // -inf allowed
    double I = 0.0;               // Anderson integral
    double F = 0.0;               // fixed-energy Anderson integral
    long xi = 0;                  // finite-volume spectral shift at E
    bool hadamard_ok = false;
    bool degenerate_at_E = false;
    bool occupancy_mismatch = false;
    bool singular_pivot = false;
    bool tie_at_N = false;
    std::vector<ChannelContribution> channels;
};

struct BirmanEstimate {
    double E = 0.0;
    double E_prime = 0.0;
    double eps = 0.0;
    double gamma2d = 0.0; // estimate of the correlation density at (E, E')
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    long count1 = 0; // levels in the unperturbed window
    long count2 = 0; // levels in the perturbed window
    bool low_statistics = false;
};

// Channel-blocked overlap matrix between the two Fermi seas. Spectra must
// come from the same grid and box; mismatches throw ValidationError.
OverlapMatrix overlap_matrix(const SpectraSet& unperturbed, const SpectraSet& perturbed,
                             double E, FillingRule rule, const Tolerances& tol);

// ln|S_L| from the channel factorization (pivoted LU per block; never forms
// the determinant itself). Requires GlobalN filling.
LogOverlap log_abs_overlap(const OverlapMatrix& m);

// All finite-volume statistics for one (L, E).
OverlapReport anderson_report(const PhysicsConfig& cfg, const SpectraSet& unperturbed,
                              const SpectraSet& perturbed, double E);

// Max relative residual of | |<phi,psi>|*|mu-lambda| - |<phi,V psi>| | over
// same-channel pairs with |mu - lambda| > min_gap. The identity is exact for
// the discrete operators. Throws InsufficientDataError when no pair survives.
// `pairs` restricts the sample; empty means all computed pairs.
double coupling_identity_residual(const PhysicsConfig& cfg, const SpectraSet& unperturbed,
                                  const SpectraSet& perturbed,
                                  const std::vector<std::pair<int, int>>& pairs = {},
                                  double min_gap = 1e-6);

// Finite-volume window surrogates for the spectral correlation density and
// its two marginals.
BirmanEstimate birman_estimate(const PhysicsConfig& cfg, const SpectraSet& unperturbed,
                               const SpectraSet& perturbed, double E, double E_prime,
                               double eps);

} // namespace oc
