#pragma once

// Length-level model of grafting rays: the two-sided pinching bounds for
// grafted pants curves, a synthetic generator of FN schedules realizing the
// upper bound exactly, the leading-order length expansion of dual curves,
// and the uniform upper bound for the length of the lamination itself.

#include <array>
#include <cmath>
#include <vector>

#include <graftlab/errors.hpp>
#include <graftlab/surface.hpp>
#include <graftlab/twist.hpp>

namespace graftlab::graft {

using surface::CurveClass;
using surface::FNPoint;
using surface::Holonomy;

// Simplicial measured lamination sum c_i gamma_i supported on the three
// pants curves; weights are transverse measures, at least one positive.
struct SimplicialLamination {
    std::array<double, 3> weights{1, 0, 0};

    SimplicialLamination() = default;
    explicit SimplicialLamination(std::array<double, 3> w) : weights(w) {
        double mx = 0;
        for (double c : weights) {
            if (!(c >= 0) || !std::isfinite(c))
                throw Error("SimplicialLamination: weights must be >= 0 and finite");
            mx = std::max(mx, c);
        }
        if (!(mx > 0))
            throw Error("SimplicialLamination: at least one weight must be positive");
    }

    double max_weight() const {
        return std::max(weights[0], std::max(weights[1], weights[2]));
    }
    std::vector<int> support() const {
        std::vector<int> s;
        for (int i = 0; i < 3; ++i)
            if (weights[i] > 0) s.push_back(i);
        return s;
    }
};

// A family of surfaces within Teichmueller distance K of the grafting ray
// a -> gr_{lam/a}(base), sampled at the given grafting parameters.
struct RaySchedule {
    std::vector<double> a_values;
    FNPoint base;
    SimplicialLamination lamination;
    double K = 0;
    double theta = 1.0;

    RaySchedule(std::vector<double> a, FNPoint b, SimplicialLamination lam,
                double K_ = 0, double theta_ = 1.0)
        : a_values(std::move(a)), base(b), lamination(lam), K(K_), theta(theta_) {
        if (a_values.empty())
            throw Error("RaySchedule: empty schedule");
        double prev = 0;
        for (double v : a_values) {
            if (!(v > prev) || !std::isfinite(v))
                throw Error("RaySchedule: a_values must be positive and strictly increasing");
            prev = v;
        }
        if (!(K >= 0)) throw Error("RaySchedule: K must be >= 0");
        const double half_pi = 2 * std::atan(1.0);
        if (!(theta > 0 && theta < half_pi))
            throw Error("RaySchedule: theta must lie in (0, pi/2)");
    }
};

// Two-sided bounds for the length of grafted curve gamma_i on any surface
// within distance K of the grafting ray at parameter a:
//   2 e^{-2K} theta / (2 theta + c a) * l  <=  l_a  <=  e^{2K} pi / (pi + c_i a) * l
// with c = max weight. theta is the lemma's aperture constant, an input here.
inline std::pair<double, double> prop5_bounds(const FNPoint& base,
                                              const SimplicialLamination& lam,
                                              double K, double theta, double a,
                                              int i) {
    if (i < 0 || i > 2) throw Error("prop5_bounds: index out of range");
    if (!(lam.weights[i] > 0))
        throw ZeroWeight("prop5_bounds: curve has zero weight; bounds do not apply");
    if (!(a > 0)) throw DomainError("prop5_bounds: requires a > 0");
    if (!(K >= 0) || !(theta > 0))
        throw DomainError("prop5_bounds: requires K >= 0 and theta > 0");
    const double pi = 4 * std::atan(1.0);
    const double l = base.length[i];
    const double c = lam.max_weight();
    const double lower = 2 * std::exp(-2 * K) * theta / (2 * theta + c * a) * l;
    const double upper = std::exp(2 * K) * pi / (pi + lam.weights[i] * a) * l;
    return {lower, upper};
}

// Canonical witness family: grafted lengths follow the K = 0 upper bound
// with equality, ungrafted lengths and all twists stay at base values. Its
// twist products stay bounded along the schedule because the twists are
// frozen in the FN chart of the pinching curves themselves.
inline FNPoint synthetic_curve(const RaySchedule& s, double a) {
    if (!(a >= 0) || !std::isfinite(a))
        throw DomainError("synthetic_curve: requires a >= 0");
    const double pi = 4 * std::atan(1.0);
    FNPoint h = s.base;
    for (int i = 0; i < 3; ++i)
        if (s.lamination.weights[i] > 0)
            h.length[i] = pi * s.base.length[i] / (pi + s.lamination.weights[i] * a);
    return h;
}

// Crossing scans against deeply pinched curves run quad precision to its
// limit; the forward error bound on a witness endpoint can reach ~0.9 at
// a = 1e6 while the actual displacement error stays ~1e-2 (the bound charges
// worst-case alignment at every cancellation). Candidates are accepted up
// to bound 1 here and the bound is surfaced in Crossing::err.
inline surface::ScanOptions pinched_scan_options() {
    surface::ScanOptions opt;
    opt.max_endpoint_err = 1.0;
    return opt;
}

// Leading terms of the length expansion of beta over the pinched curves:
//   sum_j i(beta, gamma_j) (2 ln(1/l_a(gamma_j)) + Tw_a(beta, gamma_j) l_a(gamma_j))
// i.e. the displayed sum without its O(1) remainder. rep_a must be the
// holonomy of synthetic_curve(s, a); fresh holonomies framed on each pinched
// curve are built internally for the twist scans.
inline double asymptotic_length(const RaySchedule& s, double a,
                                const CurveClass& beta, const Holonomy& rep_a) {
    const FNPoint h = rep_a.fn();
    const std::vector<CurveClass> panel = surface::curve_table();
    double total = 0;
    for (int j : s.lamination.support()) {
        const int inter = beta.dt_intersections[j];
        if (inter == 0) continue;
        const Holonomy rep_j = surface::build_holonomy(h, j);
        const double tp =
            twist::twist_product(rep_j, beta, panel[j], pinched_scan_options());
        total += inter * (2 * std::log(1.0 / h.length[j]) + tp);
    }
    return total;
}

// Uniform upper bound for l_{h_a}(lam) along the whole ray:
// e^{2K} l_base(lam) = e^{2K} sum c_i l_base(gamma_i).
inline double grafting_length_upper(const FNPoint& base,
                                    const SimplicialLamination& lam,
                                    double K = 0) {
    if (!(K >= 0)) throw DomainError("grafting_length_upper: requires K >= 0");
    double sum = 0;
    for (int i = 0; i < 3; ++i) sum += lam.weights[i] * base.length[i];
    return std::exp(2 * K) * sum;
}

}  // namespace graftlab::graft
