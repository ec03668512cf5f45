#pragma once

#include "oc/model.hpp"
#include "oc/overlap.hpp"
#include "oc/scattering.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace oc {

struct SweepRecord {
    std::string run_id;
    double E = 0.0;
    double L = 0.0;
    long N = 0;
    double log_abs_overlap = 0.0;
    double I = 0.0;
    double F = 0.0;
    long xi = 0;
    bool hadamard_ok = false;
    bool degenerate_at_E = false;
    double wall_ms = 0.0;
    std::string error; // nonempty when the (E, L) task failed
};

// Deterministic id derived from the resolved configuration text.
std::string run_id_for(const PhysicsConfig& cfg);

// One record per (E, L), ordered by (E, L). Existing records are kept as-is;
// only missing pairs are computed. `persist` (optional) is called with the
// full ordered record list after every newly computed record.
std::vector<SweepRecord>
run_sweep(const PhysicsConfig& cfg, std::vector<SweepRecord> existing = {},
          const std::function<void(const std::vector<SweepRecord>&)>& persist = {});

enum class FitQuantity { FvsLnL, IvsLnL, LogSvsLnL };

struct FitResult {
    FitQuantity quantity = FitQuantity::FvsLnL;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double window_lo = 0.0; // L range actually used
    double window_hi = 0.0;
    int points_used = 0;
    int points_excluded = 0; // -inf overlaps and failed records
};

// Ordinary least squares of the chosen quantity against ln L over the window
// (pass nullopt for the whole schedule). Throws InsufficientDataError with
// fewer than 3 finite points.
FitResult fit_loglinear(std::span<const SweepRecord> records, FitQuantity quantity,
                        std::optional<std::pair<double, double>> window = std::nullopt);

struct EnergyFits {
    double E = 0.0;
    FitResult f_fit, i_fit, logs_fit;
    bool hadamard_all_ok = true;
    long degenerate_count = 0;
    long max_xi = 0;
};

// All three fits plus per-record flag summaries for one Fermi energy.
EnergyFits fit_energy(std::span<const SweepRecord> records, double E,
                      std::optional<std::pair<double, double>> window = std::nullopt);

struct ComparisonRow {
    double E = 0.0;
    double gamma = 0.0;
    double slope_F = 0.0;
    double slope_F_stderr = 0.0;
    double intercept_F = 0.0;
    double slope_I = 0.0;
    double slope_logS = 0.0;
    double intercept_logS = 0.0;
    double ratio_F_gamma = 0.0; // NaN when the zero-gamma branch applies
    bool zero_gamma_branch = false;
    bool slope_matches_gamma = false;
    bool bound_direction_ok = false;
    bool hadamard_all_ok = false;
    long degenerate_count = 0;
    int points_used = 0;
    int points_excluded = 0;
    std::string note;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    bool all_pass() const;
};

// Verdicts per energy. Fits and predictions must cover the same E set.
ComparisonReport compare_report(const std::vector<EnergyFits>& fits,
                                const std::vector<GammaPrediction>& predictions,
                                const Tolerances& tol);

} // namespace oc
