#include "oc/overlap.hpp"

#include "oc/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <Eigen/Dense>

#include <cmath>
#include <limits>

using namespace oc;

namespace {

PhysicsConfig barrier_1d(double h = 0.05, double v = 1.0) {
    PhysicsConfig cfg;
    cfg.potentials.perturbation.shape = PerturbationShape::Square;
    cfg.potentials.perturbation.amplitude = v;
    cfg.potentials.perturbation.support_radius = 0.5;
    cfg.grid.spacing = h;
    cfg.fermi_energies = {2.0};
    cfg.L_schedule = {50};
    return cfg;
}

SpectraSet full_spectra(const PhysicsConfig& cfg, WhichOperator which, double L) {
    const SymTridiag t = assemble_operator(cfg, which, {0}, L);
    const auto [glo, ghi] = gershgorin_bounds(t);
    return spectra_below(cfg, which, L, ghi - 1e-9 * (ghi - glo));
}

// n = 60 interior points instance shared by several suites.
PhysicsConfig instance60() {
    PhysicsConfig cfg = barrier_1d();
    cfg.fermi_energies = {45.0};
    cfg.L_schedule = {3.05};
    return cfg;
}

} // namespace

TEST_CASE("V = 0 gives the identity overlap and vanishing statistics") {
    PhysicsConfig cfg = barrier_1d(0.05, 0.0);
    const double L = 8.0;
    const auto [un, pe] = spectra_pair(cfg, L);
    const OverlapMatrix m = overlap_matrix(un, pe, 2.0, FillingRule::GlobalN, cfg.tol);
    REQUIRE(m.blocks.size() == 1);
    const auto& blk = m.blocks.front();
    REQUIRE(blk.rows == blk.cols);
    for (long j = 0; j < blk.rows; ++j)
        for (long k = 0; k < blk.cols; ++k) {
            const double want = j == k ? 1.0 : 0.0;
            CHECK(std::abs(std::abs(blk.overlaps(static_cast<std::size_t>(j),
                                                 static_cast<std::size_t>(k))) -
                           want) < 1e-9);
        }
    const OverlapReport rep = anderson_report(cfg, un, pe, 2.0);
    CHECK(rep.I == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.F == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.xi == 0);
    CHECK(std::abs(rep.log_abs_overlap) < 1e-9);
    CHECK(rep.hadamard_ok);
}

TEST_CASE("Cauchy-Schwarz: every overlap entry lies in [-1, 1] up to rounding") {
    const PhysicsConfig cfg = barrier_1d();
    const double L = 20.0;
    const auto [un, pe] = spectra_pair(cfg, L);
    const OverlapMatrix m = overlap_matrix(un, pe, 2.0, FillingRule::GlobalN, cfg.tol);
    for (const auto& blk : m.blocks)
        for (double x : blk.overlaps.a) CHECK(std::abs(x) <= 1.0 + 1e-10);
}

TEST_CASE("overlap entries match the dense reference on a small instance") {
    PhysicsConfig cfg = barrier_1d(0.1, 1.0);
    const double L = 4.1; // n = 40 interior points
    const double E = 5.0; // a handful of filled states
    const auto [un, pe] = spectra_pair(cfg, L);
    const OverlapMatrix m = overlap_matrix(un, pe, E, FillingRule::GlobalN, cfg.tol);
    REQUIRE(m.blocks.size() == 1);
    const auto& blk = m.blocks.front();
    REQUIRE(blk.rows >= 4);

    const auto dense_un =
        oracles::dense_eigensystem(assemble_operator(cfg, WhichOperator::Unperturbed, {0}, L));
    const auto dense_pe =
        oracles::dense_eigensystem(assemble_operator(cfg, WhichOperator::Perturbed, {0}, L));
    // dense vectors are Euclidean-unit; the discrete inner product with weight
    // h of h-normalized vectors equals the Euclidean product of unit vectors
    for (long j = 0; j < blk.rows; ++j)
        for (long k = 0; k < blk.cols; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < dense_un.vectors[static_cast<std::size_t>(j)].size();
                 ++i)
                dot += dense_un.vectors[static_cast<std::size_t>(j)][i] *
                       dense_pe.vectors[static_cast<std::size_t>(k)][i];
            CHECK(std::abs(std::abs(blk.overlaps(static_cast<std::size_t>(j),
                                                 static_cast<std::size_t>(k))) -
                           std::abs(dot)) < 1e-9);
        }
}

TEST_CASE("log_abs_overlap matches the dense determinant") {
    PhysicsConfig cfg = barrier_1d(0.1, 1.0);
    const double L = 4.1;
    const double E = 5.0;
    const auto [un, pe] = spectra_pair(cfg, L);
    const OverlapMatrix m = overlap_matrix(un, pe, E, FillingRule::GlobalN, cfg.tol);
    const LogOverlap lo = log_abs_overlap(m);
    REQUIRE(!lo.occupancy_mismatch);

    const auto& blk = m.blocks.front();
    Eigen::MatrixXd dense(blk.rows, blk.rows);
    for (long i = 0; i < blk.rows; ++i)
        for (long j = 0; j < blk.rows; ++j)
            dense(i, j) = blk.overlaps(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    const double want = std::log(std::abs(dense.partialPivLu().determinant()));
    CHECK(lo.value == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("Parseval exactness over the complete discrete basis") {
    const PhysicsConfig cfg = instance60();
    const double L = cfg.L_schedule.front();
    const SpectraSet un = full_spectra(cfg, WhichOperator::Unperturbed, L);
    const SpectraSet pe = full_spectra(cfg, WhichOperator::Perturbed, L);
    const auto& uc = un.channels.front();
    const auto& pc = pe.channels.front();
    REQUIRE(uc.vectors.size() == 60);
    REQUIRE(pc.vectors.size() == 60);
    for (std::size_t j = 0; j < 8; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < pc.vectors.size(); ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < uc.vectors[j].size(); ++i)
                dot += uc.vectors[j][i] * pc.vectors[k][i];
            dot *= cfg.grid.spacing;
            sum += dot * dot;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("Parseval shortcut equals the filled x unfilled double sum") {
    const PhysicsConfig cfg = instance60();
    const double L = cfg.L_schedule.front();
    const double E = cfg.fermi_energies.front();
    const SpectraSet un = full_spectra(cfg, WhichOperator::Unperturbed, L);
    const SpectraSet pe = full_spectra(cfg, WhichOperator::Perturbed, L);
    const OverlapReport rep = anderson_report(cfg, un, pe, E);
    REQUIRE(rep.N == 6);

    const auto& uc = un.channels.front();
    const auto& pc = pe.channels.front();
    double brute = 0.0;
    for (long j = 0; j < rep.N; ++j)
        for (std::size_t k = static_cast<std::size_t>(rep.N); k < pc.vectors.size(); ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < uc.vectors[static_cast<std::size_t>(j)].size(); ++i)
                dot += uc.vectors[static_cast<std::size_t>(j)][i] * pc.vectors[k][i];
            dot *= cfg.grid.spacing;
            brute += dot * dot;
        }
    CHECK(rep.I == doctest::Approx(brute).epsilon(1e-11));
}

TEST_CASE("sandwich and Hadamard hold on barrier sweeps") {
    const PhysicsConfig cfg = barrier_1d();
    for (double L : {20.0, 35.0, 50.0}) {
        const auto [un, pe] = spectra_pair(cfg, L);
        const OverlapReport rep = anderson_report(cfg, un, pe, 2.0);
        CHECK(rep.I >= 0.0);
        CHECK(rep.F >= 0.0);
        CHECK(rep.xi >= 0);
        if (!rep.degenerate_at_E) {
            CHECK(rep.F - rep.I >= -1e-10);
            CHECK(rep.F - rep.I <= static_cast<double>(rep.xi) + 1e-10);
        }
        CHECK(rep.hadamard_ok);
        CHECK(rep.log_abs_overlap <=
              -0.5 * rep.I + cfg.tol.det * static_cast<double>(rep.N));
    }
}

TEST_CASE("coupling identity: V = 0 makes both sides vanish") {
    PhysicsConfig cfg = barrier_1d(0.05, 0.0);
    const double L = 5.0;
    const SpectraSet un = full_spectra(cfg, WhichOperator::Unperturbed, L);
    const SpectraSet pe = full_spectra(cfg, WhichOperator::Perturbed, L);
    const double resid = coupling_identity_residual(cfg, un, pe, {}, 1e-6);
    CHECK(resid <= 1e-12);
}

TEST_CASE("coupling identity residual is floating-point noise on the n=60 instance") {
    const PhysicsConfig cfg = instance60();
    const double L = cfg.L_schedule.front();
    const SpectraSet un = full_spectra(cfg, WhichOperator::Unperturbed, L);
    const SpectraSet pe = full_spectra(cfg, WhichOperator::Perturbed, L);
    const double resid = coupling_identity_residual(cfg, un, pe, {}, 1e-6);
    CHECK(resid <= 1e-8);
}

TEST_CASE("coupling identity stays at noise level when h is halved") {
    for (double h : {0.1, 0.05}) {
        PhysicsConfig cfg = barrier_1d(h, 1.0);
        const double L = 6.0;
        const SpectraSet un = full_spectra(cfg, WhichOperator::Unperturbed, L);
        const SpectraSet pe = full_spectra(cfg, WhichOperator::Perturbed, L);
        CHECK(coupling_identity_residual(cfg, un, pe, {}, 1e-6) <= 1e-8);
    }
}

TEST_CASE("coupling identity with no usable pair is an empty-sample error") {
    PhysicsConfig cfg = barrier_1d(0.05, 0.0); // V = 0: lambda_j = mu_j exactly
    const double L = 5.0;
    const SpectraSet un = full_spectra(cfg, WhichOperator::Unperturbed, L);
    const SpectraSet pe = full_spectra(cfg, WhichOperator::Perturbed, L);
    // demand a gap larger than the whole spectral width
    CHECK_THROWS_AS(coupling_identity_residual(cfg, un, pe, {}, 1e9),
                    InsufficientDataError);
}

TEST_CASE("birman estimates: V = 0 collapses to zero, inequality holds otherwise") {
    {
        PhysicsConfig cfg = barrier_1d(0.05, 0.0);
        cfg.smear_width = 0.5;
        const double L = 60.0;
        const auto [un, pe] = spectra_pair(cfg, L);
        const BirmanEstimate b = birman_estimate(cfg, un, pe, 2.0, 2.0, 0.5);
        CHECK(b.gamma1 == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(b.gamma2 == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(b.gamma2d == doctest::Approx(0.0).epsilon(1e-14));
    }
    {
        PhysicsConfig cfg = barrier_1d();
        cfg.smear_width = 0.5;
        const double L = 60.0;
        const auto [un, pe] = spectra_pair(cfg, L);
        const BirmanEstimate b = birman_estimate(cfg, un, pe, 2.0, 2.0, 0.5);
        CHECK(b.gamma1 >= 0.0);
        CHECK(b.gamma2 >= 0.0);
        CHECK(b.gamma2d >= 0.0);
        CHECK(b.gamma2d <= b.gamma1 * b.gamma2 * (1.0 + 1e-8) + 1e-14);
        CHECK(b.count1 >= 5);
        CHECK(!b.low_statistics);
    }
}

TEST_CASE("birman estimate flags empty and thin windows") {
    PhysicsConfig cfg = barrier_1d();
    cfg.smear_width = 0.3;
    const double L = 12.0;
    const auto [un, pe] = spectra_pair(cfg, L);
    const BirmanEstimate b = birman_estimate(cfg, un, pe, 2.0, 2.0, 0.05);
    CHECK(b.low_statistics);
    CHECK_THROWS_AS(birman_estimate(cfg, un, pe, 0.01, 2.0, 0.3), ValidationError);
}

TEST_CASE("mismatched spectra are rejected") {
    const PhysicsConfig cfg = barrier_1d();
    const auto [un50, pe50] = spectra_pair(cfg, 50.0);
    const auto [un20, pe20] = spectra_pair(cfg, 20.0);
    CHECK_THROWS_AS(overlap_matrix(un50, pe20, 2.0, FillingRule::GlobalN, cfg.tol),
                    ValidationError);
    CHECK_THROWS_AS(overlap_matrix(un50, un50, 2.0, FillingRule::GlobalN, cfg.tol),
                    ValidationError);
}

TEST_CASE("3D factorization equals the explicit block determinant") {
    PhysicsConfig cfg;
    cfg.geometry.kind = GeometryKind::RadialChannels3D;
    cfg.potentials.perturbation.shape = PerturbationShape::Square;
    cfg.potentials.perturbation.amplitude = 1.0;
    cfg.potentials.perturbation.support_radius = 0.5;
    cfg.grid.spacing = 0.05;
    cfg.fermi_energies = {1.0};
    cfg.L_schedule = {16.0};
    const double L = 16.0;
    const double E = 1.0;
    const auto [un, pe] = spectra_pair(cfg, L);
    const OverlapMatrix m = overlap_matrix(un, pe, E, FillingRule::GlobalN, cfg.tol);
    const LogOverlap lo = log_abs_overlap(m);

    if (!lo.occupancy_mismatch) {
        // Expand (ell, m)-sectors into one big block-diagonal matrix.
        long n_tot = 0;
        for (const auto& blk : m.blocks) n_tot += blk.rows * (2 * blk.ell + 1);
        REQUIRE(n_tot == m.N);
        Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n_tot, n_tot);
        long off = 0;
        for (const auto& blk : m.blocks) {
            for (int sector = 0; sector < 2 * blk.ell + 1; ++sector) {
                for (long i = 0; i < blk.rows; ++i)
                    for (long j = 0; j < blk.rows; ++j)
                        big(off + i, off + j) = blk.overlaps(static_cast<std::size_t>(i),
                                                             static_cast<std::size_t>(j));
                off += blk.rows;
            }
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(big);
        double logdet = 0.0;
        for (long i = 0; i < n_tot; ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
        CHECK(lo.value == doctest::Approx(logdet).epsilon(1e-8));
    } else {
        CHECK(lo.value == -std::numeric_limits<double>::infinity());
    }

    // The report is internally consistent in 3D too.
    const OverlapReport rep = anderson_report(cfg, un, pe, E);
    CHECK(rep.I >= 0.0);
    CHECK(rep.F >= 0.0);
    CHECK(rep.xi >= 0);
    if (!rep.degenerate_at_E) {
        CHECK(rep.F - rep.I >= -1e-10);
        CHECK(rep.F - rep.I <= static_cast<double>(rep.xi) + 1e-10);
    }
    CHECK(rep.hadamard_ok);
}
