#include "oc/scaling.hpp"

#include "oc/config_io.hpp"
#include "oc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <thread>

namespace oc {

namespace {

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string run_id_for(const PhysicsConfig& cfg) {
    const uint64_t h = fnv1a(config_echo(cfg));
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::vector<SweepRecord>
run_sweep(const PhysicsConfig& cfg, std::vector<SweepRecord> existing,
          const std::function<void(const std::vector<SweepRecord>&)>& persist) {
    const ValidationReport vr = validate_config(cfg);
    if (!vr.ok()) throw ValidationError("run_sweep: invalid config:\n" + vr.to_string());

    const std::string id = run_id_for(cfg);

    auto order = [](const SweepRecord& a, const SweepRecord& b) {
        if (a.E != b.E) return a.E < b.E;
        return a.L < b.L;
    };

    std::vector<SweepRecord> records = std::move(existing);
    std::vector<std::pair<double, double>> tasks;
    for (double E : cfg.fermi_energies)
        for (double L : cfg.L_schedule) {
            const bool have = std::any_of(records.begin(), records.end(),
                                          [&](const SweepRecord& r) {
                                              return r.E == E && r.L == L && r.error.empty();
                                          });
            if (!have) tasks.emplace_back(E, L);
        }

    auto run_task = [&cfg, &id](double E, double L) {
        SweepRecord rec;
        rec.run_id = id;
        rec.E = E;
        rec.L = L;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto [un, pe] = spectra_pair(cfg, L);
            const OverlapReport rep = anderson_report(cfg, un, pe, E);
            rec.N = rep.N;
            rec.log_abs_overlap = rep.log_abs_overlap;
            rec.I = rep.I;
            rec.F = rep.F;
            rec.xi = rep.xi;
            rec.hadamard_ok = rep.hadamard_ok;
            rec.degenerate_at_E = rep.degenerate_at_E;
        } catch (const std::exception& ex) {
            rec.error = ex.what();
        }
        const auto t1 = std::chrono::steady_clock::now();
        rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        return rec;
    };

    long failures = 0;
    if (cfg.workers <= 1 || tasks.size() <= 1) {
        for (const auto& [E, L] : tasks) {
            SweepRecord rec = run_task(E, L);
            if (!rec.error.empty()) ++failures;
            records.push_back(std::move(rec));
            std::sort(records.begin(), records.end(), order);
            if (persist) persist(records);
        }
    } else {
        std::vector<SweepRecord> slots(tasks.size());
        std::atomic<std::size_t> next{0};
        const int nw = std::min<int>(cfg.workers, static_cast<int>(tasks.size()));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) return;
                    slots[i] = run_task(tasks[i].first, tasks[i].second);
                }
            });
        for (auto& th : pool) th.join();
        for (auto& rec : slots) {
            if (!rec.error.empty()) ++failures;
            records.push_back(std::move(rec));
        }
        std::sort(records.begin(), records.end(), order);
        if (persist) persist(records);
    }
    if (!tasks.empty() && failures == static_cast<long>(tasks.size()))
        throw NumericalError("run_sweep: every (E, L) task failed");
    return records;
}

FitResult fit_loglinear(std::span<const SweepRecord> records, FitQuantity quantity,
                        std::optional<std::pair<double, double>> window) {
    FitResult fit;
    fit.quantity = quantity;

    std::vector<double> xs, ys;
    for (const auto& r : records) {
        if (window && (r.L < window->first || r.L > window->second)) continue;
        double y = 0.0;
        bool finite = r.error.empty();
        if (finite) {
            switch (quantity) {
            case FitQuantity::FvsLnL: y = r.F; break;
            case FitQuantity::IvsLnL: y = r.I; break;
            case FitQuantity::LogSvsLnL: y = r.log_abs_overlap; break;
            }
            finite = std::isfinite(y);
        }
        if (!finite) {
            ++fit.points_excluded;
            continue;
        }
        xs.push_back(std::log(r.L));
        ys.push_back(y);
        if (fit.points_used == 0) {
            fit.window_lo = fit.window_hi = r.L;
        } else {
            fit.window_lo = std::min(fit.window_lo, r.L);
            fit.window_hi = std::max(fit.window_hi, r.L);
        }
        ++fit.points_used;
    }
    const int n = fit.points_used;
    if (n < 3)
        throw InsufficientDataError("fit_loglinear: fewer than 3 finite points in window");

    double xbar = 0.0, ybar = 0.0;
    for (int i = 0; i < n; ++i) {
        xbar += xs[static_cast<std::size_t>(i)];
        ybar += ys[static_cast<std::size_t>(i)];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = xs[static_cast<std::size_t>(i)] - xbar;
        sxx += dx * dx;
        sxy += dx * (ys[static_cast<std::size_t>(i)] - ybar);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[static_cast<std::size_t>(i)] - fit.intercept -
                         fit.slope * xs[static_cast<std::size_t>(i)];
        ss_res += r * r;
    }
    fit.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return fit;
}

EnergyFits fit_energy(std::span<const SweepRecord> records, double E,
                      std::optional<std::pair<double, double>> window) {
    std::vector<SweepRecord> at_e;
    for (const auto& r : records)
        if (r.E == E) at_e.push_back(r);
    if (at_e.empty())
        throw InsufficientDataError("fit_energy: no records at the requested energy");

    EnergyFits out;
    out.E = E;
    out.f_fit = fit_loglinear(at_e, FitQuantity::FvsLnL, window);
    out.i_fit = fit_loglinear(at_e, FitQuantity::IvsLnL, window);
    out.logs_fit = fit_loglinear(at_e, FitQuantity::LogSvsLnL, window);
    for (const auto& r : at_e) {
        if (!r.error.empty()) continue;
        if (!r.hadamard_ok) out.hadamard_all_ok = false;
        if (r.degenerate_at_E) ++out.degenerate_count;
        out.max_xi = std::max(out.max_xi, r.xi);
    }
    return out;
}

bool ComparisonReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.slope_matches_gamma || !r.bound_direction_ok || !r.hadamard_all_ok)
            return false;
    return true;
}

ComparisonReport compare_report(const std::vector<EnergyFits>& fits,
                                const std::vector<GammaPrediction>& predictions,
                                const Tolerances& tol) {
    if (fits.size() != predictions.size())
        throw ValidationError("compare_report: fits and predictions differ in size");

    // Near-zero gamma switches to an absolute slope check (the 0/0 ratio has
    // no meaning for a transparent potential).
    constexpr double gamma_floor = 1e-9;
    constexpr double abs_slope_tol = 0.02;

    ComparisonReport rep;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const EnergyFits& f = fits[i];
        const GammaPrediction* pred = nullptr;
        for (const auto& p : predictions)
            if (p.E == f.E) pred = &p;
        if (!pred)
            throw ValidationError("compare_report: no prediction for E in the fit set");

        ComparisonRow row;
        row.E = f.E;
        row.gamma = pred->gamma;
        row.slope_F = f.f_fit.slope;
        row.slope_F_stderr = f.f_fit.slope_stderr;
        row.intercept_F = f.f_fit.intercept;
        row.slope_I = f.i_fit.slope;
        row.slope_logS = f.logs_fit.slope;
        row.intercept_logS = f.logs_fit.intercept;
        row.hadamard_all_ok = f.hadamard_all_ok;
        row.degenerate_count = f.degenerate_count;
        row.points_used = f.f_fit.points_used;
        row.points_excluded = f.f_fit.points_excluded;

        if (pred->gamma < gamma_floor) {
            row.zero_gamma_branch = true;
            row.ratio_F_gamma = std::numeric_limits<double>::quiet_NaN();
            row.slope_matches_gamma = std::abs(row.slope_F) < abs_slope_tol;
            row.bound_direction_ok = std::abs(row.slope_logS) < abs_slope_tol;
        } else {
            row.ratio_F_gamma = row.slope_F / pred->gamma;
            row.slope_matches_gamma = std::abs(row.ratio_F_gamma - 1.0) <= tol.scaling;
            row.bound_direction_ok =
                row.slope_logS <= -0.5 * pred->gamma * (1.0 - tol.scaling);
        }
        if (!row.slope_matches_gamma)
            row.note = "fitted slope outside the expected band; this Fermi energy may "
                       "sit in the exceptional set where the log law is not guaranteed";
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace oc
