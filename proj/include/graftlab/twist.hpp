#pragma once

// Twisting numbers Tw_h(gamma, beta): minimum-modulus normalized projection
// offset over the crossing classes of gamma against the oriented axis of
// beta, plus the quasi-symmetric distortion window used to transport
// twist-product bounds between surfaces at bounded distance.

#include <algorithm>
#include <cmath>
#include <vector>

#include <graftlab/errors.hpp>
#include <graftlab/surface.hpp>

namespace graftlab::twist {

using hyp2::BoundaryPoint;
using hyp2::OrientedGeodesic;
using surface::CurveClass;
using surface::Holonomy;

struct TwistResult {
    double value = 0;    // Tw = min |d| / l(beta), dimensionless
    int witness_count = 0;
    std::vector<double> per_class_displacements;  // pr(a_r) - pr(a_l)
    double beta_length = 0;
};

// Displacement pr(a_r) - pr(a_l) of a geodesic crossing the standard axis
// (0, inf): a_r is the endpoint on the positive reals ("right" of the
// upward-oriented axis), a_l the one on the negative reals.
inline double normalized_displacement(const OrientedGeodesic& crossing) {
    auto side = [](const BoundaryPoint& p) { return p.inf ? 0 : (p.v > 0 ? 1 : (p.v < 0 ? -1 : 0)); };
    const int su = side(crossing.start);
    const int sw = side(crossing.end);
    if (su * sw >= 0)
        throw NoIntersection("normalized_displacement: geodesic does not cross (0, inf)");
    const double ar = su > 0 ? crossing.start.v : crossing.end.v;
    const double al = su < 0 ? crossing.start.v : crossing.end.v;
    return std::log(ar) - std::log(-al);
}

inline TwistResult twisting_number(const Holonomy& rep, const CurveClass& gamma,
                                   const CurveClass& beta,
                                   const surface::ScanOptions& opt = {}) {
    const surface::CrossingScan scan =
        surface::scan_crossings(rep, beta.word, gamma.word, opt);
    if (scan.classes.empty())
        throw NoIntersection("twisting_number: curves have no crossing class");
    TwistResult out;
    out.beta_length = scan.beta_length;
    out.witness_count = static_cast<int>(scan.classes.size());
    double best = std::numeric_limits<double>::infinity();
    for (const surface::Crossing& c : scan.classes) {
        out.per_class_displacements.push_back(c.displacement);
        best = std::min(best, std::abs(c.displacement));
    }
    out.value = best / scan.beta_length;
    return out;
}

inline double twist_product(const Holonomy& rep, const CurveClass& gamma,
                            const CurveClass& beta,
                            const surface::ScanOptions& opt = {}) {
    const TwistResult t = twisting_number(rep, gamma, beta, opt);
    return t.beta_length * t.value;
}

// Transport window for twist products between surfaces at distance <= K:
// the boundary extension of a K-quasi-conformal map is k-quasi-symmetric
// with distortion exponent k = e^{2K}, and feeding the projection offsets
// through the cross-ratio bound (Mori constant 16) gives
//   M' = e^{2K} (M + ln 16) - ln 16.
// K = 0 collapses to the identity window M' = M; M' is monotone in both
// arguments and always >= M.
inline double lemma24_window(double M, double K) {
    if (!(M > 0) || K < 0)
        throw DomainError("lemma24_window: requires M > 0 and K >= 0");
    const double ln16 = std::log(16.0);
    return std::exp(2 * K) * (M + ln16) - ln16;
}

}  // namespace graftlab::twist
