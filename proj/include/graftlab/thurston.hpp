#pragma once

// Thurston-boundary convergence engine: length vectors over a finite curve
// panel, projective comparison against intersection-number vectors, and the
// convergence verdict for a grafting-ray schedule -- the family's normalized
// length functionals approach i(sum_{c_i > 0} gamma_i, .) on the panel.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <graftlab/errors.hpp>
#include <graftlab/graft.hpp>
#include <graftlab/surface.hpp>

namespace graftlab::thurston {

using graft::RaySchedule;
using surface::CurveClass;
using surface::Holonomy;

// Non-negative functional on the curve panel, kept in panel order.
struct PanelVector {
    std::vector<std::string> names;
    std::vector<double> values;

    double max_entry() const {
        double mx = 0;
        for (double v : values) mx = std::max(mx, v);
        return mx;
    }
    PanelVector normalized() const {
        const double mx = max_entry();
        if (!(mx > 0))
            throw Error("PanelVector: normalization requires a positive entry");
        PanelVector out = *this;
        for (double& v : out.values) v /= mx;
        return out;
    }
};

struct ConvergenceReport {
    std::vector<double> a_values;
    std::vector<PanelVector> raw;         // geodesic lengths per schedule point
    std::vector<PanelVector> normalized;  // raw / max entry
    std::vector<PanelVector> scaled;      // raw / (2 ln a)
    PanelVector target;                   // intersection numbers with the support
    std::vector<double> errors;           // projective error per schedule point
    bool verdict = false;
    std::string diagnostic;
};

inline PanelVector length_vector(const Holonomy& rep,
                                 const std::vector<CurveClass>& panel) {
    PanelVector out;
    for (const CurveClass& c : panel) {
        out.names.push_back(c.name);
        out.values.push_back(surface::geodesic_length(rep, c));
    }
    return out;
}

// Target direction i(sum_{i in support} gamma_i, .): intersection numbers
// summed over the support, weights forgotten.
inline PanelVector intersection_vector(const std::vector<int>& support,
                                       const std::vector<CurveClass>& panel) {
    if (support.empty())
        throw Error("intersection_vector: empty support");
    PanelVector out;
    for (const CurveClass& c : panel) {
        double sum = 0;
        for (int i : support) {
            if (i < 0 || i > 2)
                throw Error("intersection_vector: pants index out of range");
            sum += c.dt_intersections[i];
        }
        out.names.push_back(c.name);
        out.values.push_back(sum);
    }
    return out;
}

// l_inf distance after max-normalizing each side; zero iff the vectors are
// projectively equal on the panel.
inline double projective_error(const PanelVector& v, const PanelVector& w) {
    if (v.values.size() != w.values.size())
        throw Error("projective_error: panel size mismatch");
    const PanelVector nv = v.normalized();
    const PanelVector nw = w.normalized();
    double err = 0;
    for (std::size_t i = 0; i < nv.values.size(); ++i)
        err = std::max(err, std::abs(nv.values[i] - nw.values[i]));
    return err;
}

// Runs the schedule: builds the synthetic surface and its holonomy at each
// a, records raw / normalized / (2 ln a)-scaled length vectors and the
// projective error against the support's intersection vector. Verdict is
// true iff the final error is below tol and the errors at the last three
// decade marks are strictly decreasing.
inline ConvergenceReport run_convergence(const RaySchedule& s,
                                         const std::vector<CurveClass>& panel,
                                         double tol = 0.05) {
    ConvergenceReport rep;
    rep.target = intersection_vector(s.lamination.support(), panel);
    const double a_lo = s.a_values.front();
    const double a_hi = s.a_values.back();
    if (s.a_values.size() < 2 || !(a_hi >= 1e3 * a_lo)) {
        rep.diagnostic = "schedule does not span three decades";
        return rep;
    }
    for (double a : s.a_values) {
        try {
            const surface::FNPoint h = graft::synthetic_curve(s, a);
            const Holonomy hol = surface::build_holonomy(h);
            const PanelVector lv = length_vector(hol, panel);
            rep.a_values.push_back(a);
            rep.raw.push_back(lv);
            rep.normalized.push_back(lv.normalized());
            PanelVector sc = lv;
            for (double& v : sc.values) v /= 2 * std::log(a);
            rep.scaled.push_back(sc);
            rep.errors.push_back(projective_error(lv, rep.target));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "schedule point a = " << a << " failed: " << e.what();
            throw Error(os.str());
        }
    }
    // Error values at the decade marks a_hi / 10^k, k = 3..0 (nearest
    // schedule point each), must strictly decrease.
    std::vector<std::size_t> marks;
    for (int k = 3; k >= 0; --k) {
        const double want = a_hi / std::pow(10.0, k);
        std::size_t best = 0;
        for (std::size_t i = 1; i < rep.a_values.size(); ++i)
            if (std::abs(std::log(rep.a_values[i] / want)) <
                std::abs(std::log(rep.a_values[best] / want)))
                best = i;
        if (marks.empty() || marks.back() != best) marks.push_back(best);
    }
    bool decreasing = marks.size() >= 2;
    for (std::size_t i = 1; i < marks.size(); ++i)
        if (!(rep.errors[marks[i]] < rep.errors[marks[i - 1]])) decreasing = false;
    const double final_err = rep.errors.back();
    rep.verdict = final_err < tol && decreasing;
    std::ostringstream os;
    os << "final projective error " << final_err << " (tol " << tol << "); tail "
       << (decreasing ? "strictly decreasing" : "NOT strictly decreasing");
    rep.diagnostic = os.str();
    return rep;
}

}  // namespace graftlab::thurston
