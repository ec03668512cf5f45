#pragma once

#include "oc/model.hpp"
#include "oc/tridiag.hpp"

#include <vector>

namespace oc {

struct ChannelKey {
    int ell = 0; // always 0 in 1D
    int multiplicity() const { return 2 * ell + 1; }
};

enum class WhichOperator { Unperturbed, Perturbed };

struct ChannelSpectrum {
    ChannelKey key;
    WhichOperator which = WhichOperator::Unperturbed;
    double L = 0.0;
    double grid_h = 0.0;
    double threshold = 0.0;
    std::vector<double> values;               // ascending, all <= threshold
    std::vector<std::vector<double>> vectors; // discrete-L2 normalized: h * sum v_i^2 = 1
};

// All channels of one operator at one L, plus bookkeeping shared by the
// overlap statistics.
struct SpectraSet {
    WhichOperator which = WhichOperator::Unperturbed;
    double L = 0.0;
    double grid_h = 0.0;
    double threshold = 0.0;
    std::vector<ChannelSpectrum> channels; // ordered by ell (single entry in 1D)
};

// Interior grid coordinates: x_i in (-L/2, L/2) for 1D, r_i in (0, L/2) per
// radial channel in 3D.
std::vector<double> grid_points(const PhysicsConfig& cfg, double L);

// Finite-difference stencil for H (V0) or H' (V0 + V) on one channel.
// 3D channels add the centrifugal term ell(ell+1)/r^2 on the diagonal.
SymTridiag assemble_operator(const PhysicsConfig& cfg, WhichOperator which, ChannelKey key,
                             double L);

ChannelSpectrum spectrum_below(const PhysicsConfig& cfg, WhichOperator which, ChannelKey key,
                               double L, double threshold);

struct ParticleNumber {
    long total = 0;                              // counted with multiplicity
    std::vector<std::pair<int, long>> per_channel; // (ell, count before multiplicity)
    bool degenerate_at_E = false;
};

// N_L(E): eigenvalues of H at or below E, counted with channel multiplicity.
// Exact Sturm counts, no eigenvectors.
ParticleNumber particle_number(const PhysicsConfig& cfg, double L, double E);

// Same counting for an arbitrary operator choice (used for spectral shift).
ParticleNumber counting_function(const PhysicsConfig& cfg, WhichOperator which, double L,
                                 double E);

// First ell whose channel has no spectrum at or below the threshold; channels
// ell >= this limit contribute nothing (centrifugal monotonicity).
int channel_limit(const PhysicsConfig& cfg, double L, double threshold);

// Continuum estimate of the mean level spacing near E.
double mean_level_spacing(const PhysicsConfig& cfg, double L, double E);

// Working threshold E_work = E_max + margin covering the smeared windows and
// the perturbed Fermi sea.
double working_threshold(const PhysicsConfig& cfg, double L);

// Spectra of one operator for every contributing channel below the threshold.
SpectraSet spectra_below(const PhysicsConfig& cfg, WhichOperator which, double L,
                         double threshold);

// Both operators with a threshold escalated until the perturbed sea of
// N_L(E_max) states is fully resolved.
std::pair<SpectraSet, SpectraSet> spectra_pair(const PhysicsConfig& cfg, double L);

} // namespace oc
