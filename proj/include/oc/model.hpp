#pragma once

#include <span>
#include <string>
#include <vector>

namespace oc {

// Units: hbar = 1, 2m = 1, so H = -Laplacian + V and energies carry 1/length^2.

enum class GeometryKind { Interval1D, RadialChannels3D };

// Interval1D: symmetric box [-L/2, L/2]. RadialChannels3D: ball of radius L/2
// decomposed into radial channels indexed by angular momentum.
struct Geometry {
    GeometryKind kind = GeometryKind::Interval1D;
};

struct PotentialTable {
    std::vector<double> x; // strictly increasing sample coordinates
    std::vector<double> v;
};

enum class PerturbationShape { Square, Gaussian, Table };

// Compactly supported perturbation V >= 0 with supp(V) inside |x| <= support_radius.
struct PerturbationSpec {
    PerturbationShape shape = PerturbationShape::Square;
    double amplitude = 1.0;      // square height / gaussian peak
    double width = 0.1;          // gaussian standard deviation
    double support_radius = 0.5; // R_V
    PotentialTable table;        // Table shape: linear interpolation, 0 beyond R_V

    double sup_norm() const;
};

enum class BackgroundShape { Zero, Constant, Cosine };

// Bounded background V0; Cosine gives the periodic case V0*cos(2*pi*x/period).
struct BackgroundSpec {
    BackgroundShape shape = BackgroundShape::Zero;
    double amplitude = 0.0;
    double period = 1.0;

    double sup_norm() const;
};

struct PotentialSpec {
    BackgroundSpec background;
    PerturbationSpec perturbation;
};

struct GridSpec {
    double spacing = 0.05; // h

    // Interior point count for a 1D box of width L: round(L/h) - 1.
    int interior_points_1d(double box_width) const;
    // Interior point count for one radial channel: round((L/2)/h) - 1.
    int interior_points_radial(double box_width) const;
};

enum class LmaxPolicy { Fixed, Automatic };

struct Tolerances {
    double eigenvalue = 1e-12;    // bisection width, relative to ||T||
    double cluster = 1e-8;        // cluster grouping, relative to ||T||
    double degeneracy = 1e-10;    // eigenvalue-at-threshold flag, relative to ||T||
    double residual = 1e-10;      // inverse-iteration residual, relative to ||T||
    double orthogonality = 1e-8;  // pairwise eigenvector dot bound
    double unitarity = 1e-8;      // 1D S-matrix check
    double det = 1e-8;            // per-particle slack in determinant inequalities
    double tail = 1e-9;           // partial-wave tail tolerance on sin^2(delta)
    double scaling = 0.2;         // relative band for slope-vs-gamma verdicts
    double coupling_floor = 1e-12;
    int max_inverse_iterations = 20;
};

struct PhysicsConfig {
    Geometry geometry;
    PotentialSpec potentials;
    GridSpec grid;
    std::vector<double> fermi_energies;
    std::vector<double> L_schedule;
    double smear_width = 0.0; // epsilon for Birman estimators; 0 disables them
    LmaxPolicy lmax_policy = LmaxPolicy::Automatic;
    int lmax_fixed = 8;
    double scattering_step = 0.0; // fine grid for scattering; 0 means h/4
    int workers = 1;
    Tolerances tol;

    double max_fermi_energy() const;
    double scattering_grid_step() const {
        return scattering_step > 0.0 ? scattering_step : grid.spacing / 4.0;
    }
};

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

// Checks every config invariant; violations are data, not failures.
ValidationReport validate_config(const PhysicsConfig& cfg);

enum class PotentialPart { Background, Perturbation, Total };

double background_value(const BackgroundSpec& spec, double x);
double perturbation_value(const PerturbationSpec& spec, double x);

// Pointwise evaluation at the given coordinates (x in 1D, r in 3D).
// Throws ValidationError if a coordinate lies outside the box of half-extent
// box_half_extent (pass L/2).
std::vector<double> sample_potential(const PotentialSpec& spec, PotentialPart which,
                                     std::span<const double> points,
                                     double box_half_extent);

} // namespace oc
