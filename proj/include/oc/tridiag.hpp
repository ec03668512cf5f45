#pragma once

#include "oc/model.hpp"

#include <utility>
#include <vector>

namespace oc {

struct SymTridiag {
    std::vector<double> diag;    // n entries
    std::vector<double> offdiag; // n-1 entries

    int n() const { return static_cast<int>(diag.size()); }
};

// [lower, upper] containing the whole spectrum (Gershgorin discs).
std::pair<double, double> gershgorin_bounds(const SymTridiag& t);

// Gershgorin-based bound on ||T||, used to scale relative tolerances.
double norm_bound(const SymTridiag& t);

// Number of eigenvalues <= threshold, by the Sturm / LDL^T pivot count with
// the usual zero-pivot safeguard. Exact up to floating-point arithmetic.
int sturm_count(const SymTridiag& t, double threshold);

// True when some eigenvalue lies within tol_abs of the threshold.
bool eigenvalue_near(const SymTridiag& t, double threshold, double tol_abs);

struct EigenPairs {
    std::vector<double> values;               // ascending
    std::vector<std::vector<double>> vectors; // unit Euclidean norm, values.size() of them
    double threshold = 0.0;
};

// All eigenpairs with eigenvalue <= threshold. Eigenvalues by Sturm bisection,
// eigenvectors by inverse iteration with modified Gram-Schmidt inside any
// cluster tighter than tol.cluster * ||T||.
// Throws NumericalError if inverse iteration fails to converge,
// ValidationError if threshold lies outside the Gershgorin interval.
EigenPairs eigs_below(const SymTridiag& t, double threshold, const Tolerances& tol = {});

} // namespace oc
