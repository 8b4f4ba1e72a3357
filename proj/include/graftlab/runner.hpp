#pragma once

// Experiment runner: flat key = value configs, schedule execution for the
// convergence and spacetime experiments, deterministic CSV/report emission,
// and the self-test suite behind the CLI.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <graftlab/errors.hpp>
#include <graftlab/graft.hpp>
#include <graftlab/spacetime.hpp>
#include <graftlab/surface.hpp>
#include <graftlab/thurston.hpp>
#include <graftlab/twist.hpp>

namespace graftlab::runner {

// ---------------------------------------------------------------------------
// Config: one `key = value` per line, `#` comments, comma-separated arrays.

struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    std::string get(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError("config: missing key '" + k + "'");
        return it->second;
    }
    std::string get(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    double get_num(const std::string& k) const { return parse_num(k, get(k)); }
    double get_num(const std::string& k, double dflt) const {
        return has(k) ? get_num(k) : dflt;
    }
    std::vector<double> get_list(const std::string& k) const {
        std::vector<double> out;
        std::stringstream ss(get(k));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_num(k, item));
        if (out.empty()) throw ConfigError("config: empty list for '" + k + "'");
        return out;
    }

    static double parse_num(const std::string& k, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
                ++pos;
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: bad number '" + s + "' for key '" + k + "'");
        }
    }
};

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline Config parse_config(std::istream& in) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config: line " << lineno << " is not 'key = value'";
            throw ConfigError(os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            std::ostringstream os;
            os << "config: empty key or value on line " << lineno;
            throw ConfigError(os.str());
        }
        cfg.kv[key] = val;
    }
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

// 17 significant digits, '.' decimal separator, locale-independent.
inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// converge: schedule execution, convergence.csv + report.txt.

struct ConvergeSetup {
    graft::RaySchedule schedule;
    double tol;
};

inline ConvergeSetup converge_setup(const Config& cfg) {
    const std::vector<double> lens = cfg.get_list("lengths");
    const std::vector<double> tws = cfg.get_list("twists");
    const std::vector<double> wts = cfg.get_list("weights");
    if (lens.size() != 3 || tws.size() != 3 || wts.size() != 3)
        throw ConfigError("config: lengths, twists, weights must have 3 entries");
    surface::FNPoint base;
    graft::SimplicialLamination lam;
    try {
        base = surface::FNPoint(lens[0], lens[1], lens[2], tws[0], tws[1], tws[2]);
        lam = graft::SimplicialLamination({wts[0], wts[1], wts[2]});
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const double a0 = cfg.get_num("a0");
    const double ratio = cfg.get_num("ratio");
    const double steps_d = cfg.get_num("steps");
    const int steps = static_cast<int>(steps_d);
    if (!(a0 > 0) || !(ratio > 1) || steps != steps_d || steps < 2)
        throw ConfigError("config: need a0 > 0, ratio > 1, integer steps >= 2");
    std::vector<double> as;
    double a = a0;
    for (int i = 0; i < steps; ++i, a *= ratio) as.push_back(a);
    if (!(as.back() >= 1e4 * (1 - 1e-9) * as.front()))
        throw ConfigError("config: schedule must span at least four decades");
    const double K = cfg.get_num("K", 0.0);
    const double theta = cfg.get_num("theta", 1.0);
    const double tol = cfg.get_num("tol", 0.05);
    if (!(tol > 0)) throw ConfigError("config: tol must be positive");
    try {
        return {graft::RaySchedule(as, base, lam, K, theta), tol};
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline int cmd_converge(const Config& cfg, const std::string& outdir) {
    ConvergeSetup setup = converge_setup(cfg);  // ConfigError -> exit 2 in main
    const graft::RaySchedule& s = setup.schedule;
    const std::vector<surface::CurveClass> panel = surface::curve_table();
    thurston::ConvergenceReport rep;
    std::vector<std::vector<double>> twist_products(s.a_values.size());
    const std::vector<int> support = s.lamination.support();
    try {
        rep = thurston::run_convergence(s, panel, setup.tol);
        for (std::size_t i = 0; i < s.a_values.size(); ++i) {
            const surface::FNPoint h = graft::synthetic_curve(s, s.a_values[i]);
            for (int j : support) {
                const surface::Holonomy rj = surface::build_holonomy(h, j);
                twist_products[i].push_back(twist::twist_product(
                    rj, panel[3 + j], panel[j], graft::pinched_scan_options()));
            }
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "converge: numeric failure: %s\n", e.what());
        return 3;
    }
    if (!rep.a_values.size()) {
        std::fprintf(stderr, "converge: %s\n", rep.diagnostic.c_str());
        return 3;
    }
    std::filesystem::create_directories(outdir);
    {
        std::ofstream csv(outdir + "/convergence.csv");
        csv << "a";
        for (const auto& c : panel) csv << ",len_" << c.name;
        for (const auto& c : panel) csv << ",scaled_" << c.name;
        for (const auto& c : panel) csv << ",norm_" << c.name;
        csv << ",projective_error";
        for (int j : support) csv << ",twist_product_gamma" << j + 1;
        csv << "\n";
        for (std::size_t i = 0; i < rep.a_values.size(); ++i) {
            csv << fmt(rep.a_values[i]);
            for (double v : rep.raw[i].values) csv << "," << fmt(v);
            for (double v : rep.scaled[i].values) csv << "," << fmt(v);
            for (double v : rep.normalized[i].values) csv << "," << fmt(v);
            csv << "," << fmt(rep.errors[i]);
            for (double v : twist_products[i]) csv << "," << fmt(v);
            csv << "\n";
        }
    }
    {
        std::ofstream report(outdir + "/report.txt");
        report << "convergence experiment\n";
        report << "support:";
        for (int j : support) report << " gamma" << j + 1;
        report << "\ntarget direction (weights forgotten):\n";
        for (std::size_t j = 0; j < rep.target.names.size(); ++j)
            report << "  i(" << rep.target.names[j] << ", sum gamma_i) = "
                   << fmt(rep.target.values[j]) << "\n";
        report << "schedule: " << rep.a_values.size() << " points, a = "
               << fmt(rep.a_values.front()) << " .. " << fmt(rep.a_values.back())
               << "\n";
        report << "final projective error: " << fmt(rep.errors.back()) << " (tol "
               << fmt(setup.tol) << ")\n";
        report << rep.diagnostic << "\n";
        report << "verdict: " << (rep.verdict ? "true" : "false") << "\n";
    }
    return rep.verdict ? 0 : 1;
}

// ---------------------------------------------------------------------------
// spacetime: cosmological-time grid + concavity audit.

inline spacetime::RegularDomain domain_from_config(const Config& cfg) {
    std::vector<spacetime::LightlikePlane> planes;
    for (int i = 1;; ++i) {
        std::ostringstream key;
        key << "plane" << i;
        if (!cfg.has(key.str())) break;
        const std::vector<double> v = cfg.get_list(key.str());
        if (v.size() != 4)
            throw ConfigError("config: " + key.str() + " must be x0,x1,x2,offset");
        try {
            planes.emplace_back(spacetime::MinkowskiVector{v[0], v[1], v[2]}, v[3]);
        } catch (const Error& e) {
            throw ConfigError("config: " + key.str() + ": " + e.what());
        }
    }
    if (cfg.has("cone_angles"))
        for (double phi : cfg.get_list("cone_angles"))
            planes.push_back(spacetime::LightlikePlane::cone_tangent(phi));
    if (planes.size() < 2)
        throw ConfigError("config: need at least two planes (planeN / cone_angles)");
    return spacetime::build_domain(planes);  // throws EmptyDomain / DegenerateFamily
}

inline int cmd_spacetime(const Config& cfg, const std::string& outdir) {
    spacetime::RegularDomain dom;
    try {
        dom = domain_from_config(cfg);
    } catch (const ConfigError&) {
        throw;  // exit 2 in main
    } catch (const Error& e) {
        std::fprintf(stderr, "spacetime: %s\n", e.what());
        return 3;
    }
    auto axis = [&](const char* k, double dflt_lo, double dflt_hi,
                    int dflt_n) -> std::vector<double> {
        std::vector<double> v =
            cfg.has(k) ? cfg.get_list(k)
                       : std::vector<double>{dflt_lo, dflt_hi, double(dflt_n)};
        if (v.size() != 3 || !(v[2] >= 1) || v[2] != int(v[2]))
            throw ConfigError(std::string("config: ") + k + " must be lo,hi,count");
        std::vector<double> out;
        const int n = int(v[2]);
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (n - 1));
        return out;
    };
    const std::vector<double> ts = axis("grid_t", 0.5, 2.0, 4);
    const std::vector<double> xs = axis("grid_x", 0.0, 0.0, 1);
    const std::vector<double> zs = axis("grid_z", -0.5, 0.5, 5);
    const int samples = static_cast<int>(cfg.get_num("concavity_samples", 2000));
    const unsigned seed = static_cast<unsigned>(cfg.get_num("seed", 1));
    std::filesystem::create_directories(outdir);
    std::ofstream csv(outdir + "/cosmo.csv");
    csv << "x0,x1,x2,T,ret_x0,ret_x1,ret_x2,stratum\n";
    int skipped = 0;
    try {
        for (double t : ts)
            for (double x : xs)
                for (double z : zs) {
                    const spacetime::MinkowskiVector p{t, x, z};
                    if (!spacetime::contains(dom, p, 0)) {
                        ++skipped;
                        continue;
                    }
                    const spacetime::CosmologicalValue cv =
                        spacetime::cosmological_time(dom, p);
                    csv << fmt(t) << "," << fmt(x) << "," << fmt(z) << ","
                        << fmt(cv.time) << "," << fmt(cv.retraction_point.x0) << ","
                        << fmt(cv.retraction_point.x1) << ","
                        << fmt(cv.retraction_point.x2) << "," << cv.stratum << "\n";
                }
        const spacetime::ConcavityReport rep =
            spacetime::check_concavity(dom, samples, seed);
        std::ofstream report(outdir + "/report.txt");
        report << "spacetime experiment\n";
        report << "planes: " << dom.planes.size()
               << (dom.planes.size() == 2 ? " (degenerate-regular wedge)" : "")
               << "\n";
        report << "grid points outside domain (skipped): " << skipped << "\n";
        report << "concavity samples: " << rep.samples << "\n";
        report << "concavity violations: " << rep.violations << "\n";
        report << "min midpoint slack: " << fmt(rep.min_slack) << "\n";
        return rep.violations == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "spacetime: numeric failure: %s\n", e.what());
        return 3;
    }
}

// ---------------------------------------------------------------------------
// panel: curve table with crossing-count validation at a moderate point.

inline int cmd_panel(const Config& cfg) {
    std::vector<double> lens = cfg.has("lengths")
                                   ? cfg.get_list("lengths")
                                   : std::vector<double>{2, 2, 2};
    std::vector<double> tws = cfg.has("twists") ? cfg.get_list("twists")
                                                : std::vector<double>{0, 0, 0};
    if (lens.size() != 3 || tws.size() != 3)
        throw ConfigError("config: lengths and twists must have 3 entries");
    surface::FNPoint h;
    try {
        h = surface::FNPoint(lens[0], lens[1], lens[2], tws[0], tws[1], tws[2]);
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const surface::Holonomy rep = surface::build_holonomy(h);
    std::printf("%-10s %-8s %8s %8s %8s   validation\n", "name", "word", "i(.,g1)",
                "i(.,g2)", "i(.,g3)");
    bool ok = true;
    for (const surface::CurveClass& c : surface::curve_table()) {
        bool match = true;
        for (int j = 0; j < 3; ++j) {
            try {
                if (surface::geometric_intersection(rep, c, j) !=
                    c.dt_intersections[j])
                    match = false;
            } catch (const Error&) {
                match = false;
            }
        }
        ok = ok && match;
        std::printf("%-10s %-8s %8d %8d %8d   %s\n", c.name.c_str(),
                    surface::word_to_string(c.word).c_str(), c.dt_intersections[0],
                    c.dt_intersections[1], c.dt_intersections[2],
                    match ? "ok" : "MISMATCH");
    }
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// selftest: each module's invariant suite at default sizes.

inline int cmd_selftest(unsigned seed = 1) {
    struct Case {
        std::string name;
        std::function<bool()> run;
    };
    std::vector<Case> cases;
    auto add = [&](std::string n, std::function<bool()> f) {
        cases.push_back({std::move(n), std::move(f)});
    };

    add("hyp2: translation length vs axis displacement", [] {
        const hyp2::MoebiusMap m(2.0, 1.0, 1.0, 1.0);
        const hyp2::OrientedGeodesic ax = hyp2::axis(m);
        const hyp2::BoundaryPoint p(7.0);
        const double d = hyp2::project_to_axis(ax, hyp2::apply(m, p)) -
                         hyp2::project_to_axis(ax, p);
        return std::abs(d - hyp2::translation_length(m)) < 1e-9;
    });
    add("surface: relator residual and pants lengths", [seed] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ul(0.6, 3.0), ut(-1.5, 1.5);
        for (int t = 0; t < 10; ++t) {
            const surface::FNPoint h(ul(rng), ul(rng), ul(rng), ut(rng), ut(rng),
                                     ut(rng));
            const surface::Holonomy rep = surface::build_holonomy(h);
            if (!(rep.relator_residual() < 1e-9)) return false;
            for (int i = 0; i < 3; ++i) {
                const double l = hyp2::translation_length(
                    rep.evaluate(surface::pants_words()[i]));
                if (std::abs(l - h.length[i]) > 1e-6 * h.length[i]) return false;
            }
        }
        return true;
    });
    add("surface: panel crossing counts match dt data", [] {
        const surface::Holonomy rep =
            surface::build_holonomy(surface::FNPoint(2.1, 1.7, 2.6, 0.4, -0.3, 0.2));
        for (const surface::CurveClass& c : surface::curve_table())
            for (int j = 0; j < 3; ++j)
                if (surface::geometric_intersection(rep, c, j) !=
                    c.dt_intersections[j])
                    return false;
        return true;
    });
    add("twist: Dehn-twist response on the normalized configuration", [] {
        // Crossing geodesic from a_l = -e^3 to a_r = 1 against the axis
        // (0, inf) of a translation by l. A full Dehn twist translates the
        // right endpoint by the deck map, shifting the displacement by l.
        const double l = 2.0;
        const hyp2::OrientedGeodesic g(hyp2::BoundaryPoint(-std::exp(3.0)),
                                       hyp2::BoundaryPoint(1.0));
        const hyp2::OrientedGeodesic gt(hyp2::BoundaryPoint(-std::exp(3.0)),
                                        hyp2::BoundaryPoint(std::exp(l)));
        const double d0 = twist::normalized_displacement(g);
        const double d1 = twist::normalized_displacement(gt);
        return std::abs(d0 + 3) < 1e-10 && std::abs(d1 - d0 - l) < 1e-8;
    });
    add("twist: lemma24 window monotone with identity at K = 0", [] {
        return std::abs(twist::lemma24_window(3, 0) - 3) < 1e-12 &&
               twist::lemma24_window(3, 0.1) <= twist::lemma24_window(3, 0.2) &&
               twist::lemma24_window(3, 0.1) >= 3;
    });
    add("graft: prop5 lower <= upper on random draws", [seed] {
        std::mt19937_64 rng(seed + 1);
        std::uniform_real_distribution<double> uk(0, 2), uth(0.05, 1.5),
            ua(1e-3, 6), uw(0.1, 3);
        const surface::FNPoint base(2, 2, 2, 0, 0, 0);
        for (int t = 0; t < 1000; ++t) {
            const graft::SimplicialLamination lam({uw(rng), uw(rng), uw(rng)});
            const double a = std::pow(10.0, ua(rng));
            const auto [lo, hi] =
                graft::prop5_bounds(base, lam, uk(rng), uth(rng), a, 0);
            if (!(lo <= hi)) return false;
        }
        return true;
    });
    add("graft: synthetic curve inside prop5 bounds (K = 0)", [] {
        const surface::FNPoint base(2, 4.2, 3.1, 0.3, -0.4, 1.3);
        const graft::SimplicialLamination lam({1, 2, 0});
        const graft::RaySchedule s({1e2, 1e4, 1e6}, base, lam);
        for (double a : s.a_values) {
            const surface::FNPoint h = graft::synthetic_curve(s, a);
            for (int i : lam.support()) {
                const auto [lo, hi] = graft::prop5_bounds(base, lam, 0, 1.0, a, i);
                if (!(lo <= h.length[i] && h.length[i] <= hi * (1 + 1e-12)))
                    return false;
            }
        }
        return true;
    });
    add("thurston: projective error scale invariance", [] {
        thurston::PanelVector v{{"a", "b", "c"}, {1, 2, 3}};
        thurston::PanelVector w{{"a", "b", "c"}, {2, 1, 3}};
        thurston::PanelVector v2 = v;
        for (double& x : v2.values) x *= 37.5;
        return thurston::projective_error(v, w) ==
                   thurston::projective_error(v2, w) &&
               thurston::projective_error(v, v2) == 0;
    });
    add("thurston: weight forgetting in the target vector", [] {
        const std::vector<surface::CurveClass> panel = surface::curve_table();
        const thurston::PanelVector t1 = thurston::intersection_vector({0, 1}, panel);
        const graft::SimplicialLamination l1({1, 2, 0}), l2({2, 4, 0});
        return thurston::intersection_vector(l1.support(), panel).values ==
               thurston::intersection_vector(l2.support(), panel).values;
    });
    add("spacetime: wedge closed form and concavity", [seed] {
        const spacetime::RegularDomain wedge = spacetime::build_domain(
            {spacetime::LightlikePlane({1, 1, 0}, 0),
             spacetime::LightlikePlane({1, -1, 0}, 0)});
        const spacetime::CosmologicalValue cv =
            spacetime::cosmological_time(wedge, {1.25, 0, 0.5});
        if (std::abs(cv.time - 1.25) > 1e-12) return false;
        return spacetime::check_concavity(wedge, 2000, seed).violations == 0;
    });
    add("spacetime: constants ledger", [] {
        using spacetime::Curvature;
        const spacetime::ComparisonConstants cc =
            spacetime::comparison_constants(Curvature::deSitter, 2.0);
        return std::abs(spacetime::cmc_reparam(Curvature::flat, -2) - 0.5) == 0 &&
               std::abs(spacetime::cmc_reparam(Curvature::deSitter, -2) -
                        0.5 * std::log(3.0)) < 1e-15 &&
               std::abs(cc.bilip_K - 2 * std::cosh(1.0)) < 1e-15 &&
               std::abs(cc.teich_bound - 4 * std::log(3.0)) < 1e-15 &&
               spacetime::k_level_for_cmc(-1) == -1 &&
               std::abs(spacetime::k_level_for_cmc(-2) - (-7 - 4 * std::sqrt(3.0))) <
                   1e-12;
    });

    int failures = 0;
    for (const Case& c : cases) {
        bool ok = false;
        std::string note;
        try {
            ok = c.run();
        } catch (const Error& e) {
            note = std::string(" (") + e.what() + ")";
        }
        std::printf("[%s] %s%s\n", ok ? "pass" : "FAIL", c.name.c_str(),
                    note.c_str());
        if (!ok) ++failures;
    }
    std::printf("%zu checks, %d failures\n", cases.size(), failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace graftlab::runner
