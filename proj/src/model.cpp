#include "oc/model.hpp"

#include "oc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace oc {

double PerturbationSpec::sup_norm() const {
    switch (shape) {
    case PerturbationShape::Square:
    case PerturbationShape::Gaussian:
        return amplitude;
    case PerturbationShape::Table: {
        double m = 0.0;
        for (double v : table.v) m = std::max(m, std::abs(v));
        return m;
    }
    }
    return 0.0;
}

double BackgroundSpec::sup_norm() const {
    return shape == BackgroundShape::Zero ? 0.0 : std::abs(amplitude);
}

int GridSpec::interior_points_1d(double box_width) const {
    return static_cast<int>(std::lround(box_width / spacing)) - 1;
}

int GridSpec::interior_points_radial(double box_width) const {
    return static_cast<int>(std::lround(0.5 * box_width / spacing)) - 1;
}

double PhysicsConfig::max_fermi_energy() const {
    double m = 0.0;
    for (double e : fermi_energies) m = std::max(m, e);
    return m;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& i : issues) os << i.field << ": " << i.message << "\n";
    return os.str();
}

double background_value(const BackgroundSpec& spec, double x) {
    switch (spec.shape) {
    case BackgroundShape::Zero:
        return 0.0;
    case BackgroundShape::Constant:
        return spec.amplitude;
    case BackgroundShape::Cosine:
        return spec.amplitude * std::cos(2.0 * std::numbers::pi * x / spec.period);
    }
    return 0.0;
}

static double table_value(const PotentialTable& t, double x) {
    if (t.x.empty()) return 0.0;
    if (x <= t.x.front()) return t.v.front();
    if (x >= t.x.back()) return t.v.back();
    auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - t.x.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - t.x[lo]) / (t.x[hi] - t.x[lo]);
    return (1.0 - w) * t.v[lo] + w * t.v[hi];
}

double perturbation_value(const PerturbationSpec& spec, double x) {
    const double r = std::abs(x);
    if (r > spec.support_radius) return 0.0;
    switch (spec.shape) {
    case PerturbationShape::Square:
        return spec.amplitude;
    case PerturbationShape::Gaussian:
        return spec.amplitude * std::exp(-0.5 * (x / spec.width) * (x / spec.width));
    case PerturbationShape::Table:
        return table_value(spec.table, x);
    }
    return 0.0;
}

std::vector<double> sample_potential(const PotentialSpec& spec, PotentialPart which,
                                     std::span<const double> points,
                                     double box_half_extent) {
    std::vector<double> out;
    out.reserve(points.size());
    for (double x : points) {
        if (std::abs(x) > box_half_extent) {
            std::ostringstream os;
            os << "sample_potential: coordinate " << x << " outside box of half-extent "
               << box_half_extent;
            throw ValidationError(os.str());
        }
        double v = 0.0;
        if (which != PotentialPart::Perturbation) v += background_value(spec.background, x);
        if (which != PotentialPart::Background) v += perturbation_value(spec.perturbation, x);
        out.push_back(v);
    }
    return out;
}

ValidationReport validate_config(const PhysicsConfig& cfg) {
    ValidationReport rep;
    auto flag = [&rep](std::string field, std::string msg) {
        rep.issues.push_back({std::move(field), std::move(msg)});
    };

    const auto& pert = cfg.potentials.perturbation;

    if (pert.support_radius > 0.5)
        flag("potential.support_radius", "supp(V) must lie in the unit box: R_V <= 1/2");
    if (pert.support_radius <= 0.0)
        flag("potential.support_radius", "support radius must be positive");
    if (pert.amplitude < 0.0 && pert.shape != PerturbationShape::Table)
        flag("potential.amplitude", "V >= 0 requires a nonnegative amplitude");
    if (pert.shape == PerturbationShape::Gaussian && pert.width <= 0.0)
        flag("potential.width", "gaussian width must be positive");
    if (pert.shape == PerturbationShape::Table) {
        if (pert.table.x.size() != pert.table.v.size() || pert.table.x.empty())
            flag("potential.table", "table needs matching nonempty coordinate/value lists");
        for (std::size_t i = 0; i + 1 < pert.table.x.size(); ++i)
            if (pert.table.x[i] >= pert.table.x[i + 1]) {
                flag("potential.table", "table coordinates must be strictly increasing");
                break;
            }
        for (double v : pert.table.v)
            if (v < 0.0) {
                flag("potential.table", "V >= 0 violated by a negative sample");
                break;
            }
    }
    if (!std::isfinite(pert.sup_norm()))
        flag("potential", "V must be bounded (finite sup norm)");

    if (cfg.geometry.kind == GeometryKind::RadialChannels3D &&
        pert.shape == PerturbationShape::Table && !pert.table.x.empty() &&
        pert.table.x.front() < 0.0)
        flag("potential.table", "3D radial table must use r >= 0 coordinates");

    if (cfg.grid.spacing <= 0.0) flag("grid.h", "grid spacing must be positive");

    if (cfg.L_schedule.empty()) flag("sweep.L", "L schedule is empty");
    for (std::size_t i = 0; i + 1 < cfg.L_schedule.size(); ++i)
        if (cfg.L_schedule[i] >= cfg.L_schedule[i + 1]) {
            flag("sweep.L", "L schedule must be strictly increasing");
            break;
        }
    for (double L : cfg.L_schedule) {
        if (L <= 1.0) {
            flag("sweep.L", "every box must have L > 1");
            break;
        }
    }
    if (cfg.grid.spacing > 0.0 && !cfg.L_schedule.empty()) {
        const double l_min = cfg.L_schedule.front();
        const int n_min = cfg.geometry.kind == GeometryKind::Interval1D
                              ? cfg.grid.interior_points_1d(l_min)
                              : cfg.grid.interior_points_radial(l_min);
        if (n_min < 8) flag("grid.h", "smallest box must keep at least 8 interior points");
    }

    if (cfg.fermi_energies.empty()) flag("sweep.fermi_energies", "no Fermi energies given");
    const double bandwidth = 4.0 / (cfg.grid.spacing * cfg.grid.spacing);
    for (double e : cfg.fermi_energies) {
        if (e <= 0.0) {
            flag("sweep.fermi_energies", "Fermi energies must be strictly positive");
            break;
        }
        if (e >= bandwidth) {
            flag("sweep.fermi_energies", "Fermi energy reaches the discrete bandwidth 4/h^2");
            break;
        }
    }
    const double e_max = cfg.max_fermi_energy();
    if (e_max > 0.0 && std::sqrt(e_max) * cfg.grid.spacing >= 0.5)
        flag("grid.h", "dispersion guard violated: sqrt(E_max)*h must stay below 0.5");

    if (cfg.smear_width < 0.0) flag("sweep.smear_width", "smear width must be nonnegative");
    if (cfg.smear_width > 0.0 && !cfg.L_schedule.empty() && e_max > 0.0) {
        // Mean level spacing at the smallest box, continuum estimate.
        const double l_min = cfg.L_schedule.front();
        double spacing;
        if (cfg.geometry.kind == GeometryKind::Interval1D) {
            spacing = 2.0 * std::numbers::pi * std::sqrt(e_max) / l_min;
        } else {
            const double r = 0.5 * l_min;
            spacing = 6.0 * std::numbers::pi * std::numbers::pi /
                      (r * r * r * std::sqrt(e_max)); // dN/dE = R^3 sqrt(E) / (6 pi^2) inverted
        }
        if (cfg.smear_width < 5.0 * spacing)
            flag("sweep.smear_width",
                 "smear width must exceed 5 mean level spacings at the smallest L");
    }

    if (cfg.lmax_policy == LmaxPolicy::Fixed && cfg.lmax_fixed < 0)
        flag("sweep.lmax", "fixed lmax must be nonnegative");
    if (cfg.workers < 1) flag("run.workers", "worker count must be at least 1");

    if (cfg.tol.eigenvalue <= 0.0 || cfg.tol.cluster <= 0.0 || cfg.tol.degeneracy <= 0.0 ||
        cfg.tol.residual <= 0.0 || cfg.tol.tail <= 0.0)
        flag("tolerances", "tolerances must be strictly positive");

    return rep;
}

} // namespace oc
