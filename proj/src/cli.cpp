#include "oc/cli.hpp"

#include "oc/config_io.hpp"
#include "oc/errors.hpp"
#include "oc/overlap.hpp"
#include "oc/scaling.hpp"
#include "oc/scattering.hpp"
#include "oc/spectra.hpp"
#include "oc/store.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace oc::cli {

namespace {

using nlohmann::json;

PhysicsConfig load_config(const std::string& path, int workers_override) {
    PhysicsConfig cfg = parse_config_file(path);
    if (const char* env = std::getenv("OCLAB_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) cfg.workers = w;
    }
    if (workers_override >= 1) cfg.workers = workers_override;
    const ValidationReport rep = validate_config(cfg);
    if (!rep.ok())
        throw ValidationError("config validation failed:\n" + rep.to_string());
    return cfg;
}

double pick_energy(const PhysicsConfig& cfg, std::optional<double> flag) {
    if (flag) return *flag;
    return cfg.fermi_energies.front();
}

json comparison_to_json(const ComparisonReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row{{"E", r.E},
                 {"gamma", r.gamma},
                 {"slope_F", r.slope_F},
                 {"slope_F_stderr", r.slope_F_stderr},
                 {"intercept_F", r.intercept_F},
                 {"slope_I", r.slope_I},
                 {"slope_logS", r.slope_logS},
                 {"intercept_logS", r.intercept_logS},
                 {"zero_gamma_branch", r.zero_gamma_branch},
                 {"slope_matches_gamma", r.slope_matches_gamma},
                 {"bound_direction_ok", r.bound_direction_ok},
                 {"hadamard_all_ok", r.hadamard_all_ok},
                 {"degenerate_count", r.degenerate_count},
                 {"points_used", r.points_used},
                 {"points_excluded", r.points_excluded}};
        if (std::isnan(r.ratio_F_gamma))
            row["ratio_F_gamma"] = nullptr;
        else
            row["ratio_F_gamma"] = r.ratio_F_gamma;
        if (!r.note.empty()) row["note"] = r.note;
        rows.push_back(std::move(row));
    }
    return json{{"rows", rows}, {"all_pass", rep.all_pass()}};
}

void print_report(const OverlapReport& rep) {
    std::cout << std::setprecision(12);
    std::cout << "L = " << rep.L << "  E = " << rep.E << "  N = " << rep.N << "\n";
    std::cout << "ln|S_L|        = " << rep.log_abs_overlap << "\n";
    std::cout << "I_L (Anderson) = " << rep.I << "\n";
    std::cout << "F_L (fixed E)  = " << rep.F << "\n";
    std::cout << "xi_L           = " << rep.xi << "\n";
    std::cout << "hadamard_ok = " << (rep.hadamard_ok ? "yes" : "no")
              << "  degenerate_at_E = " << (rep.degenerate_at_E ? "yes" : "no")
              << "  occupancy_mismatch = " << (rep.occupancy_mismatch ? "yes" : "no")
              << "\n";
    if (rep.channels.size() > 1) {
        std::cout << "channels (ell rows cols log|det|):\n";
        for (const auto& c : rep.channels)
            std::cout << "  " << c.ell << " " << c.rows << " " << c.cols << " "
                      << c.log_abs_det << "\n";
    }
}

int cmd_spectrum(const PhysicsConfig& cfg, double L, std::optional<double> e_flag,
                 bool perturbed, int ell) {
    const double e_work = e_flag ? *e_flag : working_threshold(cfg, L);
    const auto which = perturbed ? WhichOperator::Perturbed : WhichOperator::Unperturbed;
    const ChannelSpectrum sp = spectrum_below(cfg, which, {ell}, L, e_work);
    std::cout << std::setprecision(12);
    std::cout << "# " << (perturbed ? "perturbed" : "unperturbed") << " channel ell=" << ell
              << " L=" << L << " threshold=" << e_work << "\n";
    for (std::size_t i = 0; i < sp.values.size(); ++i)
        std::cout << i + 1 << " " << sp.values[i] << "\n";
    return 0;
}

int cmd_overlap(const PhysicsConfig& cfg, double L, std::optional<double> e_flag) {
    const double E = pick_energy(cfg, e_flag);
    const auto [un, pe] = spectra_pair(cfg, L);
    print_report(anderson_report(cfg, un, pe, E));
    return 0;
}

int cmd_sweep(const PhysicsConfig& cfg, const std::string& out_dir) {
    RunStore store(out_dir);
    store.write_config(config_echo(cfg));
    std::vector<SweepRecord> existing = store.read_records();
    const std::size_t before = existing.size();
    const auto records =
        run_sweep(cfg, std::move(existing),
                  [&store](const std::vector<SweepRecord>& rs) { store.write_records(rs); });
    store.write_records(records);
    std::size_t failed = 0;
    for (const auto& r : records)
        if (!r.error.empty()) ++failed;
    std::cout << "sweep: " << records.size() << " records (" << before << " reused, "
              << failed << " failed) -> " << store.records_path().string() << "\n";
    return 0;
}

int cmd_phases(const PhysicsConfig& cfg, std::optional<double> e_flag) {
    const double E = pick_energy(cfg, e_flag);
    std::cout << std::setprecision(12);
    if (cfg.geometry.kind == GeometryKind::Interval1D) {
        const SMatrix1D s = s_matrix_1d(cfg, E);
        std::cout << "E = " << E << "\n";
        std::cout << "t       = " << s.t.real() << " + " << s.t.imag() << "i  (|t|^2 = "
                  << std::norm(s.t) << ")\n";
        std::cout << "r_left  = " << s.r_left.real() << " + " << s.r_left.imag() << "i\n";
        std::cout << "r_right = " << s.r_right.real() << " + " << s.r_right.imag() << "i\n";
        std::cout << "unitarity defect = " << s.unitarity_defect() << "\n";
    } else {
        const PhaseShiftTable t = phase_shifts_3d(cfg, E);
        std::cout << "E = " << E << "  (delta_ell mod pi)\n";
        for (std::size_t l = 0; l < t.shifts.size(); ++l)
            std::cout << l << " " << t.shifts[l] << "\n";
        std::cout << "# tail bound " << t.tail_bound << "\n";
    }
    return 0;
}

int cmd_gamma(const PhysicsConfig& cfg, std::optional<double> e_flag) {
    std::cout << std::setprecision(12);
    std::vector<double> energies;
    if (e_flag)
        energies.push_back(*e_flag);
    else
        energies = cfg.fermi_energies;
    for (double E : energies) {
        const GammaPrediction g = predict_gamma(cfg, E);
        std::cout << "E = " << E << "  gamma = " << g.gamma << "  "
                  << (g.method == GammaMethod::HS1D ? "reflection budget" : "sigma_total")
                  << " = " << g.sigma_total << "\n";
    }
    return 0;
}

int cmd_compare(const PhysicsConfig& cfg, const std::string& out_dir, bool plots) {
    RunStore store(out_dir);
    const auto records = store.read_records();
    if (records.empty())
        throw InsufficientDataError("compare: no records in " + store.dir().string() +
                                    "; run `sweep` first");

    std::vector<EnergyFits> fits;
    std::vector<GammaPrediction> preds;
    for (double E : cfg.fermi_energies) {
        fits.push_back(fit_energy(records, E));
        preds.push_back(predict_gamma(cfg, E));
    }
    const ComparisonReport rep = compare_report(fits, preds, cfg.tol);
    store.write_comparison(comparison_to_json(rep).dump(2) + "\n");
    if (plots) store.write_plot_scripts(rep);

    std::cout << std::setprecision(8);
    for (const auto& row : rep.rows) {
        std::cout << "E = " << row.E << "  gamma = " << row.gamma
                  << "  slope(F) = " << row.slope_F << " +- " << row.slope_F_stderr
                  << "  slope(ln|S|) = " << row.slope_logS << "\n";
        if (row.zero_gamma_branch)
            std::cout << "  zero-gamma branch: |slope| checks "
                      << (row.slope_matches_gamma && row.bound_direction_ok ? "pass" : "FAIL")
                      << "\n";
        else
            std::cout << "  slope(F)/gamma = " << row.ratio_F_gamma << " -> "
                      << (row.slope_matches_gamma ? "pass" : "FAIL")
                      << "; bound-direction check "
                      << (row.bound_direction_ok ? "pass" : "FAIL") << "\n";
        if (!row.hadamard_all_ok) std::cout << "  hadamard violated on some record\n";
        if (!row.note.empty()) std::cout << "  note: " << row.note << "\n";
    }
    std::cout << "verdict: " << (rep.all_pass() ? "pass" : "FAIL") << " -> "
              << store.comparison_path().string() << "\n";
    return 0;
}

bool check_line(const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    return ok;
}

int cmd_check() {
    const PhysicsConfig cfg = builtin_check_config();
    const double L = cfg.L_schedule.front();
    const double E = cfg.fermi_energies.front();
    std::cout << std::setprecision(12);

    // Full discrete spectra of the small instance (threshold just under the
    // Gershgorin top) so Parseval can run over the complete basis.
    const SymTridiag t_un = assemble_operator(cfg, WhichOperator::Unperturbed, {0}, L);
    const auto [glo, ghi] = gershgorin_bounds(t_un);
    const double top = ghi - 1e-9 * (ghi - glo);
    const SpectraSet un = spectra_below(cfg, WhichOperator::Unperturbed, L, top);
    const SpectraSet pe = spectra_below(cfg, WhichOperator::Perturbed, L, top);

    bool all = true;

    const double resid = coupling_identity_residual(cfg, un, pe, {}, 1e-6);
    {
        std::ostringstream os;
        os << "coupling identity residual <= 1e-8 (got " << resid << ")";
        all &= check_line(os.str(), resid <= 1e-8);
    }

    const OverlapReport rep = anderson_report(cfg, un, pe, E);

    // Anderson integral by the defining filled x unfilled double sum over the
    // complete discrete basis.
    const auto& uc = un.channels.front();
    const auto& pc = pe.channels.front();
    const long n_filled = rep.N;
    double brute = 0.0;
    for (long j = 0; j < n_filled; ++j)
        for (std::size_t k = static_cast<std::size_t>(n_filled); k < pc.vectors.size(); ++k) {
            double ov = 0.0;
            for (std::size_t i = 0; i < uc.vectors[static_cast<std::size_t>(j)].size(); ++i)
                ov += uc.vectors[static_cast<std::size_t>(j)][i] * pc.vectors[k][i];
            ov *= cfg.grid.spacing;
            brute += ov * ov;
        }
    all &= check_line("Parseval shortcut matches the full double sum within 1e-9",
                      std::abs(brute - rep.I) <= 1e-9);

    all &= check_line("Hadamard bound ln|S| <= -I/2 + tol", rep.hadamard_ok);
    all &= check_line("sandwich 0 <= F - I <= xi",
                      rep.F - rep.I >= -1e-12 &&
                          rep.F - rep.I <= static_cast<double>(rep.xi) + 1e-12);
    all &= check_line("xi >= 0", rep.xi >= 0);

    // Frozen outputs of this instance (golden values recorded from the
    // verified pipeline).
    struct Golden {
        const char* name;
        double got, want, tol;
    } goldens[] = {
        {"N", static_cast<double>(rep.N), 6.0, 0.0},
        {"log|S|", rep.log_abs_overlap, -0.00550859311595, 1e-9},
        {"I", rep.I, 0.0109552672254, 1e-9},
        {"F", rep.F, 0.0109552672254, 1e-9},
        {"xi", static_cast<double>(rep.xi), 0.0, 0.0},
    };
    for (const auto& g : goldens) {
        std::ostringstream os;
        os << "golden " << g.name << " = " << g.want << " (got " << g.got << ")";
        all &= check_line(os.str(), std::abs(g.got - g.want) <= g.tol);
    }

    if (!all) throw NumericalError("check: at least one identity failed");
    std::cout << "all checks passed\n";
    return 0;
}

} // namespace

PhysicsConfig builtin_check_config() {
    PhysicsConfig cfg;
    cfg.geometry.kind = GeometryKind::Interval1D;
    cfg.potentials.perturbation.shape = PerturbationShape::Square;
    cfg.potentials.perturbation.amplitude = 1.0;
    cfg.potentials.perturbation.support_radius = 0.5;
    cfg.grid.spacing = 0.05;
    cfg.fermi_energies = {45.0}; // six filled states on the n = 60 grid
    cfg.L_schedule = {3.05};
    return cfg;
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"finite-volume overlap statistics and scattering predictions for "
                 "Schrodinger operator pairs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "run";
    int workers_override = 0;
    std::optional<double> e_flag;
    double l_flag = 0.0;
    bool perturbed = false;
    int ell = 0;
    bool plots = false;

    auto add_config = [&config_path](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "configuration file")->required();
    };

    CLI::App* sp = app.add_subcommand("spectrum", "eigenvalues below a threshold for one L");
    add_config(sp);
    sp->add_option("-L", l_flag, "box size")->required();
    sp->add_option("-E", e_flag, "threshold (default: working threshold)");
    sp->add_flag("--perturbed", perturbed, "use H' = H + V");
    sp->add_option("--ell", ell, "angular momentum channel (3D)");

    CLI::App* ov = app.add_subcommand("overlap", "overlap statistics for one (L, E)");
    add_config(ov);
    ov->add_option("-L", l_flag, "box size")->required();
    ov->add_option("-E", e_flag, "Fermi energy (default: first configured)");

    CLI::App* sw = app.add_subcommand("sweep", "run the full L schedule");
    add_config(sw);
    sw->add_option("-o,--out", out_dir, "run directory");
    sw->add_option("-j,--workers", workers_override, "worker threads");

    CLI::App* ph = app.add_subcommand("phases", "S-matrix (1D) or phase shifts (3D)");
    add_config(ph);
    ph->add_option("-E", e_flag, "energy (default: first configured)");

    CLI::App* gm = app.add_subcommand("gamma", "scattering prediction of the decay exponent");
    add_config(gm);
    gm->add_option("-E", e_flag, "energy (default: all configured)");

    CLI::App* cp = app.add_subcommand("compare", "fit the sweep records and compare to gamma");
    add_config(cp);
    cp->add_option("-o,--out", out_dir, "run directory holding records.csv");
    cp->add_flag("--plots", plots, "emit gnuplot scripts next to the records");

    CLI::App* ck = app.add_subcommand("check", "exact-identity suite on a built-in instance");
    (void)ck;

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (ck->parsed()) return cmd_check();
        const PhysicsConfig cfg = load_config(config_path, workers_override);
        if (sp->parsed()) return cmd_spectrum(cfg, l_flag, e_flag, perturbed, ell);
        if (ov->parsed()) return cmd_overlap(cfg, l_flag, e_flag);
        if (sw->parsed()) return cmd_sweep(cfg, out_dir);
        if (ph->parsed()) return cmd_phases(cfg, e_flag);
        if (gm->parsed()) return cmd_gamma(cfg, e_flag);
        if (cp->parsed()) return cmd_compare(cfg, out_dir, plots);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const InsufficientDataError& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args);
}

} // namespace oc::cli
