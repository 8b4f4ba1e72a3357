#pragma once

// Upper half-plane kernel: Moebius maps acting on the boundary circle,
// oriented geodesics given by their endpoints, signed projections onto axes.

#include <cmath>
#include <limits>
#include <ostream>

#include <graftlab/errors.hpp>

namespace graftlab::hyp2 {

inline constexpr double kDetTol = 1e-12;
inline constexpr double kHyperbolicTol = 1e-9;  // |trace| must exceed 2 + this

// Real fractional-linear map, normalized so |det| = 1. Orientation-preserving
// maps (det = +1) are the isometries of H^2; det = -1 occurs only as the
// output of normalize_to_standard for negatively oriented triples.
//
// The determinant sign is carried as a separate field maintained
// algebraically: for products of maps with large entries the numeric ad - bc
// cancels catastrophically, while the true determinant of a product of
// unimodular maps is known exactly. Products are therefore never
// renormalized from computed entries.
struct MoebiusMap {
    double a{1}, b{0}, c{0}, d{1};
    int det_sign{1};

    MoebiusMap() = default;

    MoebiusMap(double a_, double b_, double c_, double d_) {
        const double det = a_ * d_ - b_ * c_;
        if (!(std::abs(det) > 0.0) || !std::isfinite(det))
            throw Error("MoebiusMap: singular or non-finite matrix");
        const double s = std::sqrt(std::abs(det));
        a = a_ / s;
        b = b_ / s;
        c = c_ / s;
        d = d_ / s;
        det_sign = det > 0 ? 1 : -1;
    }

    static MoebiusMap identity() { return MoebiusMap(); }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    // Projectively the inverse: adj(M) satisfies M * adj(M) = det(M) * I.
    MoebiusMap inverse() const {
        MoebiusMap m;
        m.a = d;
        m.b = -b;
        m.c = -c;
        m.d = a;
        m.det_sign = det_sign;
        return m;
    }
};

inline MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) {
    MoebiusMap r;
    r.a = m.a * n.a + m.b * n.c;
    r.b = m.a * n.b + m.b * n.d;
    r.c = m.c * n.a + m.d * n.c;
    r.d = m.c * n.b + m.d * n.d;
    r.det_sign = m.det_sign * n.det_sign;
    if (!std::isfinite(r.a) || !std::isfinite(r.b) || !std::isfinite(r.c) ||
        !std::isfinite(r.d))
        throw Error("MoebiusMap: non-finite product");
    return r;
}

// Frobenius distance to +-I, minimized over the sign.
inline double dist_to_identity(const MoebiusMap& m) {
    auto frob = [](double w, double x, double y, double z) {
        return std::sqrt(w * w + x * x + y * y + z * z);
    };
    const double plus = frob(m.a - 1, m.b, m.c, m.d - 1);
    const double minus = frob(m.a + 1, m.b, m.c, m.d + 1);
    return std::min(plus, minus);
}

inline bool is_hyperbolic(const MoebiusMap& m) {
    return std::abs(m.trace()) > 2.0 + kHyperbolicTol;
}

// Point of the boundary circle R u {inf}; infinity is an explicit tag.
struct BoundaryPoint {
    double v{0};
    bool inf{false};

    BoundaryPoint() = default;
    explicit BoundaryPoint(double x) : v(x) {
        if (!std::isfinite(x)) throw Error("BoundaryPoint: non-finite value");
    }
    static BoundaryPoint infinity() {
        BoundaryPoint p;
        p.inf = true;
        return p;
    }
    bool is_infinity() const { return inf; }
};

inline bool same_point(const BoundaryPoint& p, const BoundaryPoint& q, double tol = 0.0) {
    if (p.inf || q.inf) return p.inf && q.inf;
    return std::abs(p.v - q.v) <= tol;
}

inline std::ostream& operator<<(std::ostream& os, const BoundaryPoint& p) {
    if (p.inf) return os << "inf";
    return os << p.v;
}

inline BoundaryPoint apply(const MoebiusMap& m, const BoundaryPoint& p) {
    if (p.inf) {
        if (m.c == 0.0) return BoundaryPoint::infinity();
        return BoundaryPoint(m.a / m.c);
    }
    const double num = m.a * p.v + m.b;
    const double den = m.c * p.v + m.d;
    if (den == 0.0) return BoundaryPoint::infinity();
    const double q = num / den;
    if (!std::isfinite(q)) return BoundaryPoint::infinity();
    return BoundaryPoint(q);
}

struct OrientedGeodesic {
    BoundaryPoint start;
    BoundaryPoint end;

    OrientedGeodesic(const BoundaryPoint& s, const BoundaryPoint& e) : start(s), end(e) {
        if (same_point(s, e)) throw Error("OrientedGeodesic: equal endpoints");
    }
    OrientedGeodesic reversed() const { return OrientedGeodesic(end, start); }
};

inline double translation_length(const MoebiusMap& m) {
    if (m.det_sign < 0)
        throw NonHyperbolic("translation_length: orientation-reversing map");
    const double t = std::abs(m.trace());
    if (t <= 2.0 + kHyperbolicTol)
        throw NonHyperbolic("translation_length: |trace| <= 2 + tol");
    return 2.0 * std::acosh(t / 2.0);
}

// Axis oriented from the repelling to the attracting fixed point.
inline OrientedGeodesic axis(const MoebiusMap& m) {
    if (!is_hyperbolic(m) || m.det_sign < 0)
        throw NonHyperbolic("axis: map is not hyperbolic");
    const double tr = m.trace();
    const double s = std::sqrt(tr * tr - 4.0);
    // Eigenvalue of larger modulus; its fixed point is attracting. The
    // subdominant one comes from det = 1 to avoid cancellation in (tr - s)/2.
    const double lam_att = (tr > 0) ? (tr + s) / 2.0 : (tr - s) / 2.0;
    const double lam_rep = 1.0 / lam_att;
    if (m.c == 0.0) {
        // Fixed points are inf (eigenvalue a) and b/(d-a).
        const BoundaryPoint fin(m.b / (m.d - m.a));
        if (std::abs(m.a) > 1.0)
            return OrientedGeodesic(fin, BoundaryPoint::infinity());
        return OrientedGeodesic(BoundaryPoint::infinity(), fin);
    }
    // The fixed point of eigenvalue lam is (lam - d)/c = b/(lam - a); for a
    // near-diagonal matrix one of the two is a ratio of round-off terms, so
    // pick the formula with the better-conditioned numerator/denominator.
    auto fixed_point = [&](double lam) {
        if (std::abs(lam - m.d) >= std::abs(lam - m.a))
            return BoundaryPoint((lam - m.d) / m.c);
        return BoundaryPoint(m.b / (lam - m.a));
    };
    return OrientedGeodesic(fixed_point(lam_rep), fixed_point(lam_att));
}

// The fixed orientation-preserving map sending (g.start, g.end) to (0, inf)
// used as the origin convention for signed projections.
inline MoebiusMap standardize(const OrientedGeodesic& g) {
    const BoundaryPoint& p = g.start;
    const BoundaryPoint& q = g.end;
    if (q.inf) return MoebiusMap(1, -p.v, 0, 1);
    if (p.inf) return MoebiusMap(0, -1, 1, -q.v);
    if (p.v > q.v) return MoebiusMap(1, -p.v, 1, -q.v);
    return MoebiusMap(-1, p.v, 1, -q.v);
}

// Signed arclength coordinate along g of the orthogonal projection of p.
// In the standard position (0, inf) the projection of x != 0 is ln|x|.
inline double project_to_axis(const OrientedGeodesic& g, const BoundaryPoint& p) {
    const BoundaryPoint q = apply(standardize(g), p);
    if (q.inf || q.v == 0.0)
        throw ProjectionUndefined("project_to_axis: point is an endpoint of the axis");
    return std::log(std::abs(q.v));
}

// Unique fractional-linear map sending (g.start, g.end, right_point) to
// (0, inf, 1). det = -1 when the triple is negatively oriented.
inline MoebiusMap normalize_to_standard(const OrientedGeodesic& g,
                                        const BoundaryPoint& right_point) {
    if (same_point(g.start, right_point) || same_point(g.end, right_point))
        throw DegenerateTriple("normalize_to_standard: repeated point in triple");
    const MoebiusMap m0 = standardize(g);
    const BoundaryPoint r = apply(m0, right_point);
    if (r.inf || r.v == 0.0)
        throw DegenerateTriple("normalize_to_standard: degenerate image of third point");
    const double s = std::sqrt(std::abs(r.v));
    MoebiusMap scale;  // z -> z / r, assembled entry-wise to keep det sign
    scale.a = (r.v > 0) ? 1.0 / s : -1.0 / s;
    scale.b = 0;
    scale.c = 0;
    scale.d = s;
    scale.det_sign = (r.v > 0) ? 1 : -1;
    return scale * m0;
}

}  // namespace graftlab::hyp2
