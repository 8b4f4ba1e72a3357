// Acceptance harness: one pass/fail line per acceptance criterion, with the
// pinned tolerances inline. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <graftlab/runner.hpp>

using namespace graftlab;

namespace {

const double kPi = 4 * std::atan(1.0);

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::vector<double> schedule17() {
    std::vector<double> a;
    for (int i = 0; i < 17; ++i) a.push_back(1e2 * std::pow(10.0, 0.25 * i));
    return a;
}

const surface::FNPoint kBase(2.0, 4.2, 3.1, 0.3, -0.4, 1.3);

// --------------------------------------------------------------------------
// 1. Random holonomies: relator residual < 1e-9 and pants lengths within
//    1e-6 relative, 100 draws in l in [0.5, 4], tau in [-2, 2], < 10 s.

bool criterion1(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20260824);
    std::uniform_real_distribution<double> ul(0.5, 4.0), ut(-2.0, 2.0);
    double worst_res = 0, worst_len = 0;
    for (int t = 0; t < 100; ++t) {
        const surface::FNPoint h(ul(rng), ul(rng), ul(rng), ut(rng), ut(rng),
                                 ut(rng));
        const surface::Holonomy rep = surface::build_holonomy(h);
        worst_res = std::max(worst_res, rep.relator_residual());
        for (int i = 0; i < 3; ++i) {
            const double l =
                hyp2::translation_length(rep.evaluate(surface::pants_words()[i]));
            worst_len = std::max(worst_len,
                                 std::abs(l - h.length[i]) / h.length[i]);
        }
    }
    const double dt = seconds_since(t0);
    std::ostringstream os;
    os << "max residual " << worst_res << " (tol 1e-9), max length rel err "
       << worst_len << " (tol 1e-6), " << dt << " s (limit 10)";
    detail = os.str();
    return worst_res < 1e-9 && worst_len < 1e-6 && dt < 10.0;
}

// --------------------------------------------------------------------------
// 2. Normalized single-crossing configuration: the twisting number recovers
//    |ln(-a_l)| to 1e-10 and a full Dehn twist (deck translation of the
//    right endpoint) shifts the displacement by exactly l(beta) to 1e-8.

bool criterion2(std::string& detail) {
    const double lbeta = 2.0;
    const double al = -std::exp(3.0);
    const hyp2::OrientedGeodesic g(hyp2::BoundaryPoint(al),
                                   hyp2::BoundaryPoint(1.0));
    const double d0 = twist::normalized_displacement(g);
    const double err_tw = std::abs(std::abs(d0) - std::abs(std::log(-al)));
    // Dehn twist along beta: the deck map z -> e^{l} z moves the right
    // endpoint to e^{l}; the displacement gains exactly l.
    const hyp2::OrientedGeodesic gt(hyp2::BoundaryPoint(al),
                                    hyp2::BoundaryPoint(std::exp(lbeta)));
    const double d1 = twist::normalized_displacement(gt);
    const double err_dehn = std::abs(d1 - d0 - lbeta);
    std::ostringstream os;
    os << "|Tw l - ln(-a_l)| = " << err_tw << " (tol 1e-10), |Dehn shift - l| = "
       << err_dehn << " (tol 1e-8)";
    detail = os.str();
    return err_tw < 1e-10 && err_dehn < 1e-8;
}

// --------------------------------------------------------------------------
// 3. Convergence to [gamma1 + 2 gamma2] on the 17-point schedule
//    a = 1e2..1e6: scaled lengths within 10% of the intersection numbers at
//    a = 1e6, projective error < 0.05 and strictly decreasing over the last
//    three decades, limit invariant under weight doubling, < 60 s.

bool criterion3(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto panel = surface::curve_table();
    const graft::SimplicialLamination lam({1, 2, 0}), lam2({2, 4, 0});
    const graft::RaySchedule s(schedule17(), kBase, lam);
    const graft::RaySchedule s2(schedule17(), kBase, lam2);
    const thurston::ConvergenceReport r = thurston::run_convergence(s, panel, 0.05);
    const thurston::ConvergenceReport r2 =
        thurston::run_convergence(s2, panel, 0.05);
    double scaled_dev = 0;
    for (std::size_t i = 0; i < panel.size(); ++i)
        if (r.target.values[i] > 0)
            scaled_dev = std::max(
                scaled_dev, std::abs(r.scaled.back().values[i] /
                                         r.target.values[i] - 1.0));
    const bool tail = r.errors[16] < r.errors[12] && r.errors[12] < r.errors[8] &&
                      r.errors[8] < r.errors[4];
    const double doubled =
        thurston::projective_error(r.normalized.back(), r2.normalized.back());
    const double dt = seconds_since(t0);
    std::ostringstream os;
    os << "final error " << r.errors.back() << " (tol 0.05), tail "
       << (tail ? "decreasing" : "NOT decreasing") << ", max scaled dev "
       << scaled_dev << " (tol 0.10), weight-doubling gap " << doubled
       << " (tol 0.05), " << dt << " s (limit 60)";
    detail = os.str();
    return r.verdict && r2.verdict && scaled_dev < 0.10 && tail &&
           doubled < 0.05 && dt < 60.0;
}

// --------------------------------------------------------------------------
// 4. prop5 containment with K = 0, theta = 1.0 at every schedule point, and
//    twist products along the ray show no monotone growth across the final
//    three decades.

bool criterion4(std::string& detail) {
    const auto panel = surface::curve_table();
    const graft::SimplicialLamination lam({1, 2, 0});
    const graft::RaySchedule s(schedule17(), kBase, lam, 0, 1.0);
    bool contained = true;
    std::vector<double> decade_max(4, 0);  // [1e2,1e3), ... , [1e5,1e6]
    for (double a : s.a_values) {
        const surface::FNPoint h = graft::synthetic_curve(s, a);
        double tp_max = 0;
        for (int j : lam.support()) {
            const auto [lo, hi] = graft::prop5_bounds(kBase, lam, 0, 1.0, a, j);
            if (!(h.length[j] >= lo - 1e-12 && h.length[j] <= hi * (1 + 1e-12)))
                contained = false;
            const surface::Holonomy rj = surface::build_holonomy(h, j);
            tp_max = std::max(tp_max,
                              twist::twist_product(rj, panel[3 + j], panel[j],
                                                   graft::pinched_scan_options()));
        }
        const int dec = std::min(3, std::max(0, int(std::log10(a)) - 2));
        decade_max[dec] = std::max(decade_max[dec], tp_max);
    }
    // Monotone growth must clear a 1% margin: the maxima hover at the same
    // bounded value and differ only by scan round-off.
    const bool growth = decade_max[2] > decade_max[1] * 1.01 &&
                        decade_max[3] > decade_max[2] * 1.01;
    std::ostringstream os;
    os << "containment " << (contained ? "holds" : "VIOLATED")
       << ", twist-product decade maxima " << decade_max[1] << ", "
       << decade_max[2] << ", " << decade_max[3]
       << (growth ? " (monotone growth)" : " (no monotone growth)");
    detail = os.str();
    return contained && !growth;
}

// --------------------------------------------------------------------------
// 5. The remainder |l(delta_i) - asymptotic_length(delta_i)| stays bounded
//    along the ray: finite everywhere, and its maximum over the final decade
//    does not exceed its maximum over the whole schedule.

bool criterion5(std::string& detail) {
    const auto panel = surface::curve_table();
    const graft::SimplicialLamination lam({1, 2, 0});
    const graft::RaySchedule s(schedule17(), kBase, lam);
    double overall = 0, last_decade = 0;
    bool finite = true;
    for (double a : s.a_values) {
        const surface::FNPoint h = graft::synthetic_curve(s, a);
        const surface::Holonomy rep = surface::build_holonomy(h);
        for (int j : lam.support()) {
            const double len = surface::geodesic_length(rep, panel[3 + j]);
            const double asym = graft::asymptotic_length(s, a, panel[3 + j], rep);
            const double diff = std::abs(len - asym);
            if (!std::isfinite(diff)) finite = false;
            overall = std::max(overall, diff);
            if (a >= 1e5 * (1 - 1e-9)) last_decade = std::max(last_decade, diff);
        }
    }
    std::ostringstream os;
    os << "remainder max " << overall << ", final-decade max " << last_decade
       << (finite ? "" : ", NON-FINITE");
    detail = os.str();
    return finite && last_decade <= overall + 1e-12;
}

// --------------------------------------------------------------------------
// 6. Spacetime audits: wedge closed form T(t, 0, z) = t to 1e-12 on a
//    1000-point grid, cone-tangent times within 1e-6 of a brute-force
//    maximization over past timelike rays at 10 audit points, and zero
//    violations on 10^4 midpoint concavity tests.

double brute_force_time(const spacetime::RegularDomain& d,
                        const spacetime::MinkowskiVector& p) {
    auto ray_time = [&](double phi, double r) {
        const double g = 1.0 / std::sqrt(1 - r * r);
        const spacetime::MinkowskiVector u{g, g * r * std::cos(phi),
                                           g * r * std::sin(phi)};
        double lo = 0, hi = 1;
        while (spacetime::contains(d, p - hi * u, 0) && hi < 1e9) hi *= 2;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (spacetime::contains(d, p - mid * u, 0) ? lo : hi) = mid;
        }
        return lo;  // proper time along the unit ray until the boundary
    };
    double best = 0, bphi = 0, br = 0;
    for (int i = 0; i < 96; ++i)
        for (int j = 0; j < 40; ++j) {
            const double phi = 2 * kPi * i / 96, r = 0.999 * j / 40;
            const double t = ray_time(phi, r);
            if (t > best) { best = t; bphi = phi; br = r; }
        }
    double wphi = 2 * kPi / 96, wr = 0.999 / 40;
    for (int round = 0; round < 6; ++round) {
        const double phi0 = bphi, r0 = br;
        for (int i = -10; i <= 10; ++i)
            for (int j = -10; j <= 10; ++j) {
                const double phi = phi0 + wphi * i / 10;
                const double r =
                    std::min(0.999999, std::max(0.0, r0 + wr * j / 10));
                const double t = ray_time(phi, r);
                if (t > best) { best = t; bphi = phi; br = r; }
            }
        wphi /= 5;
        wr /= 5;
    }
    return best;
}

bool criterion6(std::string& detail) {
    const spacetime::RegularDomain wedge = spacetime::build_domain(
        {spacetime::LightlikePlane({1, 1, 0}, 0),
         spacetime::LightlikePlane({1, -1, 0}, 0)});
    double wedge_err = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 100; ++j) {
            const double t = 0.1 + 0.5 * i;
            const double z = -5.0 + 10.0 * j / 99;
            wedge_err = std::max(
                wedge_err,
                std::abs(spacetime::cosmological_time(wedge, {t, 0, z}).time - t));
        }
    const spacetime::RegularDomain cone = spacetime::build_domain(
        {spacetime::LightlikePlane::cone_tangent(0),
         spacetime::LightlikePlane::cone_tangent(kPi / 2),
         spacetime::LightlikePlane::cone_tangent(kPi),
         spacetime::LightlikePlane::cone_tangent(3 * kPi / 2)});
    double cone_err = 0;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ut(0.8, 2.0), ux(-0.35, 0.35);
    for (int i = 0; i < 10; ++i) {
        spacetime::MinkowskiVector p{ut(rng), ux(rng), ux(rng)};
        while (!spacetime::contains(cone, p, 1e-6))
            p = {ut(rng), ux(rng), ux(rng)};
        const double exact = spacetime::cosmological_time(cone, p).time;
        cone_err = std::max(cone_err, std::abs(exact - brute_force_time(cone, p)));
    }
    const spacetime::ConcavityReport cw = spacetime::check_concavity(wedge, 5000, 2);
    const spacetime::ConcavityReport cc = spacetime::check_concavity(cone, 5000, 3);
    std::ostringstream os;
    os << "wedge grid err " << wedge_err << " (tol 1e-12), cone vs brute force "
       << cone_err << " (tol 1e-6), concavity violations "
       << cw.violations + cc.violations << "/10000 (tol 0)";
    detail = os.str();
    return wedge_err < 1e-12 && cone_err < 1e-6 &&
           cw.violations + cc.violations == 0;
}

// --------------------------------------------------------------------------
// 7. Constants ledger: reparametrizations and comparison constants agree
//    with their closed forms to round-off (4 ulp scale, 1e-15 pinned).

bool criterion7(std::string& detail) {
    using spacetime::Curvature;
    double worst = 0;
    auto chk = [&](double got, double want) {
        worst = std::max(worst,
                         std::abs(got - want) / std::max(1.0, std::abs(want)));
    };
    chk(spacetime::cmc_reparam(Curvature::flat, -2.0), 0.5);
    chk(spacetime::cmc_reparam(Curvature::flat, -0.25), 4.0);
    chk(spacetime::cmc_reparam(Curvature::deSitter, -2.0), 0.5 * std::log(3.0));
    const auto flat = spacetime::comparison_constants(Curvature::flat);
    chk(flat.ratio_bound, 2.0);
    chk(flat.bilip_K, 2.0);
    chk(flat.bilip_power4, 16.0);
    chk(flat.teich_bound, 4 * std::log(3.0));
    const auto ds = spacetime::comparison_constants(Curvature::deSitter, 2.0);
    chk(ds.bilip_K, 2 * std::cosh(1.0));
    chk(ds.bilip_power4, std::pow(2 * std::cosh(1.0), 4));
    chk(spacetime::k_level_for_cmc(-1.0), -1.0);
    chk(spacetime::k_level_for_cmc(-2.0), -7.0 - 4 * std::sqrt(3.0));
    chk(twist::lemma24_window(3.0, 0.0), 3.0);
    std::ostringstream os;
    os << "max relative deviation " << worst << " (tol 1e-15)";
    detail = os.str();
    return worst <= 1e-15;
}

// --------------------------------------------------------------------------
// 8. Determinism: converge and spacetime runs produce byte-identical outputs
//    across repeated invocations.

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool criterion8(std::string& detail) {
    const runner::Config conv = runner::load_config("configs/simplicial-12.cfg");
    const runner::Config cone = runner::load_config("configs/cone4.cfg");
    const auto tmp = std::filesystem::temp_directory_path();
    const auto c1 = tmp / "graftlab_acc_c1", c2 = tmp / "graftlab_acc_c2";
    const auto s1 = tmp / "graftlab_acc_s1", s2 = tmp / "graftlab_acc_s2";
    for (const auto& d : {c1, c2, s1, s2}) std::filesystem::remove_all(d);
    const int rc1 = runner::cmd_converge(conv, c1.string());
    const int rc2 = runner::cmd_converge(conv, c2.string());
    const int rs1 = runner::cmd_spacetime(cone, s1.string());
    const int rs2 = runner::cmd_spacetime(cone, s2.string());
    const bool conv_same =
        slurp(c1 / "convergence.csv") == slurp(c2 / "convergence.csv") &&
        slurp(c1 / "report.txt") == slurp(c2 / "report.txt");
    const bool st_same = slurp(s1 / "cosmo.csv") == slurp(s2 / "cosmo.csv") &&
                         slurp(s1 / "report.txt") == slurp(s2 / "report.txt");
    std::ostringstream os;
    os << "converge rc " << rc1 << "/" << rc2 << " bytes "
       << (conv_same ? "identical" : "DIFFER") << "; spacetime rc " << rs1 << "/"
       << rs2 << " bytes " << (st_same ? "identical" : "DIFFER");
    detail = os.str();
    return rc1 == 0 && rc2 == 0 && rs1 == 0 && rs2 == 0 && conv_same && st_same;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*run)(std::string&);
    };
    const Criterion criteria[] = {
        {"1 random holonomies: relator < 1e-9, pants lengths < 1e-6 rel, < 10 s",
         criterion1},
        {"2 single crossing: Tw recovers ln(-a_l) (1e-10), Dehn shift = l (1e-8)",
         criterion2},
        {"3 convergence to [gamma1 + 2 gamma2]: error < 0.05 decreasing, "
         "scaled within 10%, weight doubling, < 60 s",
         criterion3},
        {"4 prop5 containment (K = 0, theta = 1) and bounded twist products",
         criterion4},
        {"5 dual-length remainder bounded along the ray", criterion5},
        {"6 spacetime: wedge 1e-12, cone vs brute force 1e-6, concavity 0/10^4",
         criterion6},
        {"7 constants ledger exact to round-off", criterion7},
        {"8 deterministic converge/spacetime outputs", criterion8},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const Error& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %s -- %s\n", ok ? "PASS" : "FAIL", c.name,
                    detail.c_str());
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
