#pragma once

// Genus-2 surface: holonomy from Fenchel-Nielsen coordinates over the fixed
// two-pants decomposition (curves g1, g2, g3), length spectrum of free
// homotopy classes, and intersection counting by enumeration of conjugate
// axes in the universal cover.
//
// Construction: one pair of pants with boundary half-lengths l_i/2 is built
// from right-angled hexagon relations; the second pants is its mirror image
// across the axis of g1, translated by the twists. Generators a1, b1, a2, b2
// satisfy the genus-2 relator [a1,b1][a2,b2] = 1 exactly (up to round-off).

#include <quadmath.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <graftlab/errors.hpp>
#include <graftlab/hyp2.hpp>

namespace graftlab::surface {

using hyp2::BoundaryPoint;
using hyp2::MoebiusMap;
using hyp2::OrientedGeodesic;

// Fenchel-Nielsen coordinates: three lengths, three twists.
struct FNPoint {
    std::array<double, 3> length{2, 2, 2};
    std::array<double, 3> twist{0, 0, 0};

    FNPoint() = default;
    FNPoint(double l1, double l2, double l3, double t1, double t2, double t3)
        : length{l1, l2, l3}, twist{t1, t2, t3} {
        for (double l : length)
            if (!(l > 0) || !std::isfinite(l))
                throw Error("FNPoint: lengths must be positive and finite");
        for (double t : twist)
            if (!std::isfinite(t)) throw Error("FNPoint: twists must be finite");
    }
};

// Word in the standard generators. Letters 1..4 stand for a1, b1, a2, b2;
// negative values are inverses.
using Word = std::vector<int>;

// Letter code: a/A = a1 / a1^-1, b/B = b1 / b1^-1, c/C = a2, d/D = b2.
inline Word word_from_string(const std::string& s) {
    Word w;
    for (char ch : s) {
        switch (ch) {
            case 'a': w.push_back(1); break;
            case 'A': w.push_back(-1); break;
            case 'b': w.push_back(2); break;
            case 'B': w.push_back(-2); break;
            case 'c': w.push_back(3); break;
            case 'C': w.push_back(-3); break;
            case 'd': w.push_back(4); break;
            case 'D': w.push_back(-4); break;
            case ' ': break;
            default: throw Error(std::string("word_from_string: bad letter '") + ch + "'");
        }
    }
    return w;
}

inline std::string word_to_string(const Word& w) {
    static const char* pos = "abcd";
    static const char* neg = "ABCD";
    std::string s;
    for (int x : w) s += (x > 0) ? pos[x - 1] : neg[-x - 1];
    return s;
}

inline Word inverse_word(const Word& w) {
    Word r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(-*it);
    return r;
}

inline Word concat(const Word& u, const Word& v) {
    Word w = u;
    w.insert(w.end(), v.begin(), v.end());
    return w;
}

// Free reduction followed by cyclic reduction.
inline Word cyclically_reduce(Word w) {
    Word r;
    for (int x : w) {
        if (!r.empty() && r.back() == -x)
            r.pop_back();
        else
            r.push_back(x);
    }
    while (r.size() >= 2 && r.front() == -r.back()) {
        r.erase(r.begin());
        r.pop_back();
    }
    return r;
}

// Free homotopy class: a word plus its geometric intersection numbers with
// the three pants curves.
struct CurveClass {
    std::string name;
    Word word;
    std::array<int, 3> dt_intersections{0, 0, 0};

    CurveClass() = default;
    CurveClass(std::string name_, const std::string& word_, std::array<int, 3> dt)
        : name(std::move(name_)), word(cyclically_reduce(word_from_string(word_))),
          dt_intersections(dt) {
        if (word.empty()) throw Error("CurveClass: trivial word");
    }
};

// Exact axis data for one pants curve in the frame of a representation:
// the standardizing map to (0, inf) and the endpoints (repelling,
// attracting). Stored by build_holonomy because recovering a deeply pinched
// pants curve's length and axis from its word's matrix product loses the
// trace excess |tr| - 2 ~ l^2/4 to round-off.
struct PantsFrame {
    bool valid = false;
    MoebiusMap norm;
    BoundaryPoint start, end;
};

namespace detail {

// Scalar shims so the holonomy assembly and the crossing scan can run in
// either double or quad precision. Quad is needed because the double
// generators fail the surface relator by ~eps * e^{2 d12}, and collar
// wrapping at deeply pinched points amplifies that inconsistency into O(1)
// errors in crossing data.
using scan_real = __float128;
inline double x_abs(double v) { return std::abs(v); }
inline double x_sqrt(double v) { return std::sqrt(v); }
inline double x_exp(double v) { return std::exp(v); }
inline double x_log(double v) { return std::log(v); }
inline double x_cosh(double v) { return std::cosh(v); }
inline double x_sinh(double v) { return std::sinh(v); }
inline double x_acosh(double v) { return std::acosh(v); }
inline bool x_finite(double v) { return std::isfinite(v); }
inline scan_real x_abs(scan_real v) { return fabsq(v); }
inline scan_real x_sqrt(scan_real v) { return sqrtq(v); }
inline scan_real x_exp(scan_real v) { return expq(v); }
inline scan_real x_log(scan_real v) { return logq(v); }
inline scan_real x_cosh(scan_real v) { return coshq(v); }
inline scan_real x_sinh(scan_real v) { return sinhq(v); }
inline scan_real x_acosh(scan_real v) { return acoshq(v); }
inline bool x_finite(scan_real v) { return !isinfq(v) && !isnanq(v); }

// Plain projective 2x2 matrix; every map built here has determinant +1 by
// construction, so no sign bookkeeping is needed.
template <class T>
struct Mat {
    T a{1}, b{0}, c{0}, d{1};
};

template <class T>
Mat<T> mul(const Mat<T>& m, const Mat<T>& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

template <class T>
Mat<T> inv(const Mat<T>& m) {  // adjugate; projectively the inverse
    return {m.d, -m.b, -m.c, m.a};
}

template <class T>
Mat<T> neg(const Mat<T>& m) {
    return {-m.a, -m.b, -m.c, -m.d};
}

// Boundary point; infinity tagged explicitly.
template <class T>
struct Pt {
    T v{0};
    bool inf{false};
};

template <class T>
Pt<T> apply(const Mat<T>& m, const Pt<T>& p) {
    if (p.inf) {
        if (m.c == 0) return {0, true};
        return {m.a / m.c, false};
    }
    const T den = m.c * p.v + m.d;
    if (den == 0) return {0, true};
    const T q = (m.a * p.v + m.b) / den;
    if (!x_finite(q)) return {0, true};
    return {q, false};
}

template <class T>
Mat<T> diag_translate(T l) {
    // translation by l along (0, inf)
    return {x_exp(l / 2), 0, 0, x_exp(-l / 2)};
}

template <class T>
Mat<T> perp_translate(T d) {
    // Translation by d along the geodesic (-1, 1).
    const T ch = x_cosh(d / 2), sh = x_sinh(d / 2);
    return {ch, sh, sh, ch};
}

// m * diag_translate(l) * m^-1 for det(m) = +1, assembled from the
// cancellation-free forms (s = sinh(l/2), x = e^{l/2}):
//   [ 1/x + 2ads   -2abs ]
//   [ 2cds          x - 2ads ]
// The naive triple product cancels entries of size ~|ad| down to O(1) once
// the conjugator is large (deeply pinched pants), while these forms keep
// full relative accuracy and an exact unit determinant.
template <class T>
Mat<T> conj_diag_translate(const Mat<T>& m, T l) {
    const T s = x_sinh(l / 2);
    const T x = x_exp(l / 2);
    return {1 / x + 2 * m.a * m.d * s, -2 * m.a * m.b * s,
            2 * m.c * m.d * s, x - 2 * m.a * m.d * s};
}

// Fixed points of a hyperbolic map as midpoint -+ half-separation: with
// s = sqrt(tr^2 - 4)/2 the endpoints are ((tr/2 -+ s) - d)/c and the
// separation 2s/c stays relatively accurate where subtracting the two
// generic fixed-point formulas would cancel it away (pinched curves).
template <class T>
void axis_mid_sep(const Mat<T>& X, T& p, T& q, T& sep) {
    const T tr = X.a + X.d;
    if (X.c == 0 || !(x_abs(tr) > 2))
        throw ConstructionFailure("axis_mid_sep: map not hyperbolic or diagonal");
    const T sh = (tr < 0 ? T(-1) : T(1)) * x_sqrt(tr * tr - 4) / 2;
    q = (tr / 2 + sh - X.d) / X.c;  // attracting
    p = (tr / 2 - sh - X.d) / X.c;  // repelling
    sep = 2 * sh / X.c;             // q - p
}

// The standardizing map sending (p, q) to (0, inf) when the endpoint
// separation q - p is known analytically; recomputing it as a determinant
// cancels catastrophically for pinched curves.
template <class T>
Mat<T> standardize_with_sep(T p, T q, T sep) {
    const T n = x_sqrt(x_abs(sep));
    if (p > q) return {1 / n, -p / n, 1 / n, -q / n};
    return {-1 / n, p / n, 1 / n, -q / n};
}

// Generic standardize for axes with possibly infinite endpoints.
template <class T>
Mat<T> standardize_pts(const Pt<T>& p, const Pt<T>& q) {
    if (q.inf) return {1, -p.v, 0, 1};
    if (p.inf) return {0, -1, 1, -q.v};
    return standardize_with_sep(p.v, q.v, q.v - p.v);
}

// Conjugation by the reflection z -> -conj(z).
template <class T>
Mat<T> mirror(const Mat<T>& m) {
    return {m.a, -m.b, -m.c, m.d};
}

template <class T>
struct TFrame {
    Mat<T> norm;
    Pt<T> start, end;
};

// Holonomy generators and pants-curve frame data at scalar type T.
template <class T>
struct Assembly {
    std::array<Mat<T>, 4> gens, invs;
    std::array<TFrame<T>, 3> pants;
    T d12{0};
    T tr3{0};  // |trace X3|, for the hexagon closure check

    const Mat<T>& generator(int letter) const {
        return letter > 0 ? gens[letter - 1] : invs[-letter - 1];
    }
};

// The construction of build_holonomy at scalar type T; see the comments
// there for the geometry. frame selects which pants curve's axis lands on
// (0, inf).
template <class T>
Assembly<T> assemble(const FNPoint& h, int frame) {
    const T l1 = h.length[0], l2 = h.length[1], l3 = h.length[2];
    const T t1 = h.twist[0], t2 = h.twist[1], t3 = h.twist[2];

    // Right-angled hexagon relation: distance between the g1 and g2 boundary
    // geodesics of a pants with boundary lengths (l1, l2, l3).
    const T num = x_cosh(l3 / 2) + x_cosh(l1 / 2) * x_cosh(l2 / 2);
    const T den = x_sinh(l1 / 2) * x_sinh(l2 / 2);
    if (!(den > 0) || !x_finite(num / den) || num / den <= 1)
        throw ConstructionFailure("build_holonomy: degenerate hexagon data");
    const T d12 = x_acosh(num / den);
    const T C = x_cosh(d12 / 2), S = x_sinh(d12 / 2);

    // First pants: X1 X2 X3 = 1 with trace(X_i) = -2 cosh(l_i / 2).
    const Mat<T> B = perp_translate(d12);
    const Mat<T> X2 = neg(conj_diag_translate(B, -l2));
    Mat<T> X1{-x_exp(l1 / 2), 0, 0, -x_exp(-l1 / 2)};
    const Mat<T> X3 = inv(mul(X1, X2));

    // Second pants: the mirror image across axis(X1) = (0, inf), translated
    // by the twists. T_i = G_i(tau_i) C_i mirror(C_i)^-1 D(-tau_1), where C_i
    // takes (0, inf) to axis(X_i).
    const Mat<T> Dm1 = diag_translate(-t1);

    // mirror(B)^-1 = B for the symmetric perp translation, so
    // T2 = (B D(t2) B^-1) B mirror(B)^-1 D(-t1) collapses to B D(t2) B Dm1,
    // whose entries are all-positive sums (the factored product instead
    // cancels its leading e^{3 d12} terms down to e^{2 d12}):
    //   B D(x) B = [ C^2 x + S^2 / x   2 C S cosh(t2/2) ]
    //              [ 2 C S cosh(t2/2)  S^2 x + C^2 / x  ]
    Mat<T> BDB;
    {
        const T x = x_exp(t2 / 2);
        const T off = 2 * C * S * x_cosh(t2 / 2);
        BDB = {C * C * x + S * S / x, off, off, S * S * x + C * C / x};
    }
    const Mat<T> T2 = mul(BDB, Dm1);

    // Axis of X3, with the endpoint separation kept accurate; C3 sends
    // (0, inf) to it. The residual diagonal freedom in that choice cancels
    // in both C3 D(t3) C3^-1 and C3 mirror(C3)^-1.
    T p3, q3, sep3;
    axis_mid_sep(X3, p3, q3, sep3);
    const T n3 = x_sqrt(x_abs(sep3));
    Mat<T> C3{q3 / n3, p3 / n3, 1 / n3, 1 / n3};
    if (sep3 < 0) { C3.a = -C3.a; C3.c = -C3.c; }

    // Same collapse for the third handle: T3 = C3 D(t3) mirror(C3)^-1 Dm1,
    // assembled from the cancellation-free closed form (K = ad, ch =
    // cosh(t3/2)):
    //   C3 D(x) mirror(C3)^-1 = [ 2K ch - 1/x   2ab ch ]
    //                           [ 2cd ch        2K ch - x ]
    Mat<T> CDC;
    {
        const T x = x_exp(t3 / 2);
        const T ch = x_cosh(t3 / 2);
        const T K = C3.a * C3.d;
        CDC = {2 * K * ch - 1 / x, 2 * C3.a * C3.b * ch,
               2 * C3.c * C3.d * ch, 2 * K * ch - x};
    }
    const Mat<T> T3 = mul(CDC, Dm1);

    // Standard generators: a1 = X2^-1, b1 = T2^-1, a2 = T3^-1, b2 = X3
    // turn the gluing relation into [a1,b1][a2,b2] = 1. For frames 1 and 2
    // the whole set is conjugated (analytically where the numeric product
    // would cancel) so the requested pants axis lands on (0, inf).
    Assembly<T> out;
    out.d12 = d12;
    out.tr3 = x_abs(X3.a + X3.d);
    const T th = S / C, ct = C / S;        // tanh, coth of d12/2
    const T sep12 = 2 / x_sinh(d12);       // coth - tanh
    const Pt<T> zero{0, false}, infty{0, true};

    if (frame == 0) {
        out.gens = {inv(X2), inv(T2), inv(T3), X3};
        out.pants[0] = {Mat<T>{}, zero, infty};
        // axis(X2) = B(0, inf) reversed: repelling coth, attracting tanh
        out.pants[1] = {standardize_with_sep(ct, th, -sep12), {ct, false}, {th, false}};
        out.pants[2] = {standardize_with_sep(p3, q3, sep3), {p3, false}, {q3, false}};
    } else if (frame == 1) {
        // Conjugate by B^-1. X1f = -(B^-1 D(l1) B), entrywise:
        const T s1 = x_sinh(l1 / 2), x1 = x_exp(l1 / 2);
        const Mat<T> X1f{-(x1 + 2 * S * S * s1), -2 * C * S * s1,
                         2 * C * S * s1, -(1 / x1 - 2 * S * S * s1)};
        const Mat<T> X2f{-x_exp(-l2 / 2), 0, 0, -x_exp(l2 / 2)};
        const Mat<T> X3f = inv(mul(X1f, X2f));
        // T2f = B^-1 (B D(t2) B Dm1) B = D(t2) (B D(-t1) B)
        Mat<T> BD1B;
        {
            const T y = x_exp(-t1 / 2);
            const T off = 2 * C * S * x_cosh(t1 / 2);
            BD1B = {C * C * y + S * S / y, off, off, S * S * y + C * C / y};
        }
        const Mat<T> T2f = mul(diag_translate(t2), BD1B);
        const Mat<T> T3f = mul(mul(inv(B), T3), B);
        out.gens = {inv(X2f), inv(T2f), inv(T3f), X3f};
        out.pants[0] = {standardize_with_sep(-th, -ct, -sep12),
                        {-th, false}, {-ct, false}};
        // axis(X2f) = (inf, 0)
        out.pants[1] = {Mat<T>{0, -1, 1, 0}, infty, zero};
        T p3f, q3f, sep3f;
        axis_mid_sep(X3f, p3f, q3f, sep3f);
        out.pants[2] = {standardize_with_sep(p3f, q3f, sep3f),
                        {p3f, false}, {q3f, false}};
    } else {
        // Conjugate by C3^-1; gamma1 and gamma2 axes stay well separated in
        // this frame as long as they are not themselves deeply pinched (use
        // their own frames for that).
        const Mat<T> C3i = inv(C3);
        const Mat<T> X1f = neg(conj_diag_translate(C3i, l1));
        const Mat<T> X3f{-x_exp(l3 / 2), 0, 0, -x_exp(-l3 / 2)};
        const Mat<T> X2f = mul(inv(X1f), inv(X3f));
        const Mat<T> T2f = mul(mul(C3i, T2), C3);
        // C3^-1 T3 C3 = D(t3) mirror(C3)^-1 Dm1 C3
        const Mat<T> T3f =
            mul(mul(mul(diag_translate(t3), inv(mirror(C3))), Dm1), C3);
        out.gens = {inv(X2f), inv(T2f), inv(T3f), X3f};
        const Pt<T> a1s = apply(C3i, zero), a1e = apply(C3i, infty);
        out.pants[0] = {standardize_pts(a1s, a1e), a1s, a1e};
        const Pt<T> a2s = apply(C3i, Pt<T>{ct, false});
        const Pt<T> a2e = apply(C3i, Pt<T>{th, false});
        out.pants[1] = {standardize_pts(a2s, a2e), a2s, a2e};
        out.pants[2] = {Mat<T>{}, zero, infty};
    }
    for (int i = 0; i < 4; ++i) out.invs[i] = inv(out.gens[i]);
    return out;
}

}  // namespace detail

class Holonomy {
  public:
    // Internal: use build_holonomy. fn and frame must describe gens, since
    // the high-precision assembly is re-derived from them on demand.
    Holonomy(std::array<MoebiusMap, 4> gens, FNPoint fn, int frame = 0)
        : gens_(gens), fn_(fn), frame_(frame) {
        for (int i = 0; i < 4; ++i) inv_[i] = gens_[i].inverse();
        // First-order perturbation bound for the relator product: an entry
        // rounding of generator i propagates as prefix * dg_i * suffix, so
        // the residual floor is eps * sum_i |prefix_i| |g_i| |suffix_i|.
        const Word relator = word_from_string("abABcdCD");
        const std::size_t n = relator.size();
        auto knorm = [](const MoebiusMap& m) {
            return std::max(std::max(std::abs(m.a), std::abs(m.b)),
                            std::max(std::abs(m.c), std::abs(m.d)));
        };
        std::vector<double> prefix(n + 1, 1.0), suffix(n + 1, 1.0);
        {
            MoebiusMap m;
            for (std::size_t i = 0; i < n; ++i) {
                m = m * generator(relator[i]);
                prefix[i + 1] = knorm(m);
            }
            double_residual_ = hyp2::dist_to_identity(m);
        }
        {
            MoebiusMap m;
            for (std::size_t i = n; i-- > 0;) {
                m = generator(relator[i]) * m;
                suffix[i] = knorm(m);
            }
        }
        relator_condition_ = 1;
        for (std::size_t i = 0; i < n; ++i)
            relator_condition_ +=
                prefix[i] * knorm(generator(relator[i])) * suffix[i + 1];
    }

    const MoebiusMap& generator(int letter) const {
        // letter in {+-1..+-4}
        return letter > 0 ? gens_[letter - 1] : inv_[-letter - 1];
    }

    MoebiusMap evaluate(const Word& w) const {
        MoebiusMap m;
        for (int x : w) m = m * generator(x);
        return m;
    }

    // Residual of the relator product of the representation proper, i.e. of
    // the quad-precision generators the length and crossing computations run
    // on. The double generators are a rounded view: their product misses the
    // identity by ~eps times relator_condition() no matter how they are
    // produced, which exceeds any fixed tolerance once the pants are thin.
    double relator_residual() const {
        if (relator_residual_ < 0) {
            using detail::scan_real;
            const detail::Assembly<scan_real>& A = high();
            detail::Mat<scan_real> m;
            for (int x : word_from_string("abABcdCD"))
                m = detail::mul(m, A.generator(x));
            const scan_real s = (m.a + m.d) / 2;  // +-1 for +-identity
            const scan_real r =
                std::max(std::max(detail::x_abs(m.a - s), detail::x_abs(m.d - s)),
                         std::max(detail::x_abs(m.b), detail::x_abs(m.c)));
            relator_residual_ =
                std::max((double)r, std::abs((double)detail::x_abs(s) - 1.0));
        }
        return relator_residual_;
    }
    // Residual of the double generators' relator product.
    double double_residual() const { return double_residual_; }
    // Perturbation bound of the relator product; eps times this is the
    // round-off floor of double_residual().
    double relator_condition() const { return relator_condition_; }
    const FNPoint& fn() const { return fn_; }
    int frame_index() const { return frame_; }

    // Quad-precision generators and frames, assembled on first use. The
    // double generators fail the surface relator by ~eps e^{2 d12}, which
    // deep scans amplify into O(1) errors; length and crossing computations
    // therefore run on these.
    const detail::Assembly<detail::scan_real>& high() const {
        if (!high_)
            high_ = std::make_shared<detail::Assembly<detail::scan_real>>(
                detail::assemble<detail::scan_real>(fn_, frame_));
        return *high_;
    }

    void set_pants_frame(int i, const PantsFrame& f) { pants_[i] = f; }
    const PantsFrame& pants_frame(int i) const { return pants_[i]; }

  private:
    std::array<MoebiusMap, 4> gens_;
    std::array<MoebiusMap, 4> inv_;
    FNPoint fn_;
    int frame_{0};
    double double_residual_{0};
    mutable double relator_residual_{-1};
    double relator_condition_{1};
    std::array<PantsFrame, 3> pants_{};
    mutable std::shared_ptr<const detail::Assembly<detail::scan_real>> high_;
};

// Pants curve words in the standard generators of this construction.
inline const std::array<Word, 3>& pants_words() {
    static const std::array<Word, 3> words = {
        word_from_string("Da"),  // g1: maps to X3^-1 X2^-1 = X1
        word_from_string("A"),   // g2: maps to X2
        word_from_string("d"),   // g3: maps to X3
    };
    return words;
}

// frame selects which pants curve's axis is placed at (0, inf) (0-based
// index). Scans against a deeply pinched pants curve are only accurate in
// its own frame: in any other frame its axis endpoints collide to within
// ~e^{-d12} and the crossing projections lose the separation to round-off.
inline Holonomy build_holonomy(const FNPoint& h, int frame = 0) {
    if (frame < 0 || frame > 2)
        throw Error("build_holonomy: frame must be 0, 1, or 2");

    const detail::Assembly<double> A = detail::assemble<double>(h, frame);

    // Round-off floor of the closure: conjugations cancel entry products of
    // size ~e^{2 d12} down to O(1), so traces carry that relative error.
    const double closure_tol =
        std::max(1e-9, 1e2 * std::numeric_limits<double>::epsilon() *
                           std::exp(std::min(2 * double(A.d12), 500.0)));
    if (std::abs(A.tr3 - 2 * std::cosh(h.length[2] / 2)) >
        closure_tol * (1 + A.tr3))
        throw ConstructionFailure("build_holonomy: hexagon closure failed");

    std::array<MoebiusMap, 4> gens;
    for (int i = 0; i < 4; ++i) {
        gens[i].a = A.gens[i].a;
        gens[i].b = A.gens[i].b;
        gens[i].c = A.gens[i].c;
        gens[i].d = A.gens[i].d;
        gens[i].det_sign = 1;
    }
    Holonomy rep(gens, h, frame);

    // Threshold: 1e-9 at well-conditioned points, relaxed to the round-off
    // floor of the relator product deep in the pinched regime.
    const double res_tol =
        std::max(1e-9, 1e2 * std::numeric_limits<double>::epsilon() *
                           rep.relator_condition());
    if (rep.double_residual() > res_tol)
        throw ConstructionFailure("build_holonomy: relator residual too large: " +
                                  std::to_string(rep.double_residual()));
    for (int i = 0; i < 3; ++i) {
        const double tr = std::abs(rep.evaluate(pants_words()[i]).trace());
        const double want = 2 * std::cosh(h.length[i] / 2);
        if (std::abs(tr - want) > closure_tol * want)
            throw ConstructionFailure("build_holonomy: pants-curve trace mismatch");
    }
    for (int i = 0; i < 3; ++i) {
        const detail::TFrame<double>& f = A.pants[i];
        PantsFrame pf;
        pf.valid = true;
        pf.norm.a = f.norm.a;
        pf.norm.b = f.norm.b;
        pf.norm.c = f.norm.c;
        pf.norm.d = f.norm.d;
        pf.norm.det_sign = 1;
        pf.start = f.start.inf ? BoundaryPoint::infinity() : BoundaryPoint(f.start.v);
        pf.end = f.end.inf ? BoundaryPoint::infinity() : BoundaryPoint(f.end.v);
        rep.set_pants_frame(i, pf);
    }
    return rep;
}

inline double geodesic_length(const Holonomy& rep, const CurveClass& c) {
    // For the pants curves themselves the FN length is exact, while the
    // trace excess |tr| - 2 ~ l^2/4 of the evaluated word drowns in
    // round-off once the curve is deeply pinched.
    for (int i = 0; i < 3; ++i)
        if (rep.pants_frame(i).valid &&
            (c.word == pants_words()[i] ||
             c.word == inverse_word(pants_words()[i])))
            return rep.fn().length[i];
    // Quad evaluation with running rescale: double entries of long products
    // lose several digits to the cancellations of bracket-like words.
    using hp = detail::scan_real;
    const detail::Assembly<hp>& A = rep.high();
    detail::Mat<hp> m;
    hp det = 1;
    for (int x : c.word) {
        m = detail::mul(m, A.generator(x));
        const hp s = std::max(std::max(detail::x_abs(m.a), detail::x_abs(m.b)),
                              std::max(detail::x_abs(m.c), detail::x_abs(m.d)));
        if (s > 0) {
            m.a /= s; m.b /= s; m.c /= s; m.d /= s;
            det /= s * s;
        }
    }
    const hp t = detail::x_abs(m.a + m.d) / (2 * detail::x_sqrt(det));
    if (!(t > 1 + 1e-12))
        throw NonHyperbolic("geodesic_length: class is not hyperbolic");
    return (double)(2 * detail::x_acosh(t));
}

// ---------------------------------------------------------------------------
// Crossing enumeration: conjugates g rho(gamma) g^-1 whose axes cross the
// axis of rho(beta), deduped modulo the <rho(beta)> action. Each class keeps
// its crossing parameter in [0, l(beta)) and the signed projection
// displacement pr(a_r) - pr(a_l) along the normalized axis (0, inf).

struct Crossing {
    double param;         // crossing parameter mod l(beta)
    double displacement;  // pr(a_r) - pr(a_l), length units
    double err = 0;       // estimated round-off in param/displacement
};

struct CrossingScan {
    std::vector<Crossing> classes;
    int stabilized_at = -1;  // level at which the count matched the previous one
    double beta_length = 0;
};

struct ScanOptions {
    int max_level = 8;
    int min_stable_level = 5;
    bool allow_unstable = false;  // return partial results instead of throwing
    double max_endpoint_err = 1e-3;  // reject candidates with larger endpoint error
    std::size_t node_cap = 2'000'000;
};

inline CrossingScan scan_crossings(const Holonomy& rep, const Word& beta,
                                   const Word& gamma, const ScanOptions& opt = {}) {
    CrossingScan out;
    // For a pants-curve beta use the exact frame data recorded by
    // build_holonomy; the word's matrix product cannot recover the length
    // or axis of a deeply pinched curve.
    int pidx = -1;
    for (int i = 0; i < 3; ++i)
        if (rep.pants_frame(i).valid && beta == pants_words()[i]) pidx = i;
    using hp = detail::scan_real;
    const detail::Assembly<hp>& A = rep.high();

    detail::Mat<hp> norm;
    detail::Pt<hp> bstart, bend;
    double lb;
    if (pidx >= 0) {
        lb = rep.fn().length[pidx];
        norm = A.pants[pidx].norm;
        bstart = A.pants[pidx].start;
        bend = A.pants[pidx].end;
    } else {
        const MoebiusMap mb = rep.evaluate(beta);
        lb = hyp2::translation_length(mb);
        const MoebiusMap nd = hyp2::standardize(hyp2::axis(mb));
        norm = {(hp)nd.a, (hp)nd.b, (hp)nd.c, (hp)nd.d};
        const OrientedGeodesic ax = hyp2::axis(mb);
        bstart = {ax.start.inf ? 0 : (hp)ax.start.v, ax.start.inf};
        bend = {ax.end.inf ? 0 : (hp)ax.end.v, ax.end.inf};
    }
    out.beta_length = lb;

    // The matrix pipeline below runs in quad precision with first-order
    // forward error tracking: each multiply charges the worst cancellation
    // ratio sum|terms| / |entry| of its sums, and each Moebius application
    // charges its numerator and denominator likewise. The bound is
    // deliberately pessimistic -- correlated entries often cancel exactly --
    // but quad leaves ~30 digits of headroom, and a candidate whose
    // endpoint signs or logs it cannot certify is simply dropped: a clean
    // re-centered witness of the same crossing class always remains.
    constexpr hp kQEps = 1.93e-34;  // quad machine epsilon

    struct LPE {
        hp v;
        bool inf;
        hp rel;
    };
    auto lp_of = [](const detail::Pt<hp>& p) { return LPE{p.v, p.inf, 0}; };
    const LPE bs = lp_of(bstart), be = lp_of(bend);

    // Projective matrices rescaled by their largest entry.
    struct Raw {
        hp a, b, c, d;
        hp relerr;
    };
    auto raw_mul = [kQEps](const Raw& x, const detail::Mat<hp>& m,
                           hp* scale = nullptr) {
        using detail::x_abs;
        const hp ta1 = x.a * m.a, ta2 = x.b * m.c;
        const hp tb1 = x.a * m.b, tb2 = x.b * m.d;
        const hp tc1 = x.c * m.a, tc2 = x.d * m.c;
        const hp td1 = x.c * m.b, td2 = x.d * m.d;
        Raw r{ta1 + ta2, tb1 + tb2, tc1 + tc2, td1 + td2, 0};
        hp amp = 1;
        auto upd = [&](hp t1, hp t2, hp res) {
            const hp mag = x_abs(t1) + x_abs(t2);
            if (mag == 0) return;
            amp = std::max(amp, mag / std::max(x_abs(res), mag * kQEps));
        };
        upd(ta1, ta2, r.a);
        upd(tb1, tb2, r.b);
        upd(tc1, tc2, r.c);
        upd(td1, td2, r.d);
        r.relerr = (x.relerr + kQEps) * amp;
        const hp s = std::max(std::max(x_abs(r.a), x_abs(r.b)),
                              std::max(x_abs(r.c), x_abs(r.d)));
        if (s > 0) { r.a /= s; r.b /= s; r.c /= s; r.d /= s; }
        if (scale) *scale = s;
        return r;
    };
    auto raw_apply = [kQEps](const Raw& m, const LPE& p) -> LPE {
        using detail::x_abs;
        if (p.inf) {
            if (m.c == 0) return LPE{0, true, m.relerr};
            return LPE{m.a / m.c, false, 2 * m.relerr + kQEps};
        }
        const hp n1 = m.a * p.v, num = n1 + m.b;
        const hp d1 = m.c * p.v, den = d1 + m.d;
        if (den == 0) return LPE{0, true, m.relerr + p.rel};
        const hp nmag = x_abs(n1) + x_abs(m.b);
        const hp dmag = x_abs(d1) + x_abs(m.d);
        const hp ampn = nmag == 0 ? 1 : nmag / std::max(x_abs(num), nmag * kQEps);
        const hp ampd = dmag / std::max(x_abs(den), dmag * kQEps);
        const hp q = num / den;
        if (!detail::x_finite(q)) return LPE{0, true, m.relerr + p.rel};
        return LPE{q, false, (m.relerr + p.rel + kQEps) * (ampn + ampd)};
    };

    // gamma holonomy and its axis, with the true determinant tracked
    // algebraically through the rescales (generators are unimodular).
    Raw mg{1, 0, 0, 1, 0};
    hp mdet = 1;
    for (int x : gamma) {
        hp s = 1;
        mg = raw_mul(mg, A.generator(x), &s);
        if (s > 0) mdet /= s * s;
    }
    LPE gs{}, ge{};
    {
        using detail::x_abs;
        const hp tr = mg.a + mg.d;
        const hp disc2 = tr * tr - 4 * mdet;
        if (!(disc2 > 4 * mdet * 1e-9))
            throw NonHyperbolic("scan_crossings: gamma holonomy not hyperbolic");
        const hp disc = detail::x_sqrt(disc2);
        // Near-parabolic maps lose accuracy in the discriminant.
        const hp rel_lam = (mg.relerr + kQEps) * (1 + tr * tr / disc2);
        const hp lam_att = (tr >= 0) ? (tr + disc) / 2 : (tr - disc) / 2;
        const hp lam_rep = mdet / lam_att;
        if (mg.c == 0) {
            const LPE fin{mg.b / (mg.d - mg.a), false, 4 * rel_lam};
            const LPE at_inf{0, true, 0};
            if (x_abs(mg.a) > x_abs(mg.d)) { gs = fin; ge = at_inf; }
            else { gs = at_inf; ge = fin; }
        } else {
            // Fixed point of eigenvalue lam is (lam - d)/c = b/(lam - a);
            // for near-diagonal matrices one formula is a ratio of round-off
            // terms, so pick the better-conditioned one and charge its
            // cancellation.
            auto fixed_point = [&](hp lam) -> LPE {
                if (x_abs(lam - mg.d) >= x_abs(lam - mg.a)) {
                    const hp amp = (x_abs(lam) + x_abs(mg.d)) / x_abs(lam - mg.d);
                    return LPE{(lam - mg.d) / mg.c, false, rel_lam * amp};
                }
                const hp amp = (x_abs(lam) + x_abs(mg.a)) / x_abs(lam - mg.a);
                return LPE{mg.b / (lam - mg.a), false, rel_lam * amp};
            };
            gs = fixed_point(lam_rep);
            ge = fixed_point(lam_att);
        }
    }

    // For a pants-curve gamma the computed axis carries a tiny residual off
    // the exact fixed points; translates with a pole nearby amplify it into
    // phantom crossings, so the exact frame endpoints are used instead.
    for (int i = 0; i < 3; ++i)
        if (rep.pants_frame(i).valid && gamma == pants_words()[i]) {
            gs = lp_of(A.pants[i].start);
            ge = lp_of(A.pants[i].end);
        }

    // Distinct crossing classes on the panel are separated by >> 1e-3 in
    // parameter and displacement, while round-off on deep conjugators can
    // reach ~1e-7; tolerances sit between the two.
    const double param_tol = std::max(1e-6 * lb, 1e-12);

    auto near = [](const LPE& p, const LPE& q) {
        if (p.inf || q.inf) return p.inf && q.inf;
        return detail::x_abs(p.v - q.v) <= 1e-6 * (1 + detail::x_abs(q.v));
    };

    // The crossing geodesic depends only on the coset g<gamma>: a trailing
    // gamma^+-1 leaves the translate unchanged, so such words are skipped.
    // Words with a beta^+-1 prefix do repeat a class (beta shifts its own
    // crossings), but they are kept: when a crossing sits far along a
    // pinched axis, the beta-power translate is the re-centered, numerically
    // usable witness, and the error-aware dedup merges the copies.
    const Word gi = inverse_word(gamma);
    auto ends_with = [](const Word& w, const Word& t) {
        if (w.size() < t.size()) return false;
        return std::equal(t.begin(), t.end(), w.end() - t.size());
    };

    const Raw nrm{norm.a, norm.b, norm.c, norm.d, 0};

    auto consider = [&](const Raw& g, const Word& word) {
        if (ends_with(word, gamma) || ends_with(word, gi)) return;
        const LPE gp = raw_apply(g, gs);
        const LPE gq = raw_apply(g, ge);
        // Translates preserving the beta axis (conjugators commensurable with
        // gamma = beta) are tangential, not crossings; near-equality below
        // this tolerance only arises from round-off on exact coincidence.
        if ((near(gp, bs) && near(gq, be)) || (near(gp, be) && near(gq, bs)))
            return;
        const LPE u = raw_apply(nrm, gp);
        const LPE w = raw_apply(nrm, gq);
        if (u.inf || w.inf || u.v == 0 || w.v == 0) return;
        if ((u.v > 0) == (w.v > 0)) return;  // same side of (0, inf)
        // The relative error of a coordinate bounds the absolute error of
        // its log (and of the sign decision above when < 1).
        const double err = 1e-13 + (double)(u.rel + w.rel);
        if (!(err < opt.max_endpoint_err)) return;
        const hp ar = (u.v > 0) ? u.v : w.v;
        const hp al = (u.v < 0) ? u.v : w.v;
        const hp pr = detail::x_log(ar);
        const hp pl = detail::x_log(-al);
        const double disp = (double)(pr - pl);
        const hp sc = (pr + pl) / 2;
        double sr = (double)(sc - (hp)std::floor((double)(sc / (hp)lb)) * (hp)lb);
        if (sr >= lb || sr < 0) sr = 0;
        // Below the collar scale the axis period cannot be resolved (the
        // re-centered copies of one class scatter in param by many periods),
        // so classes are then identified by displacement alone; that can
        // only under-count coincident classes and leaves the minimum
        // displacement used downstream intact.
        const bool param_resolved = lb > 1e-2;
        for (Crossing& c : out.classes) {
            double dp = std::abs(c.param - sr);
            dp = std::min(dp, lb - dp);
            const double tol = 10 * (err + c.err);
            if ((!param_resolved || dp < std::max(param_tol, tol)) &&
                std::abs(c.displacement - disp) <
                    std::max(1e-6 * (1 + std::abs(disp)), tol)) {
                if (err < c.err) c = {sr, disp, err};
                return;
            }
        }
        out.classes.push_back({sr, disp, err});
    };

    struct Node {
        Raw g;
        Word word;
    };
    std::vector<Node> frontier{{Raw{1, 0, 0, 1, 0}, {}}};
    consider(frontier.front().g, frontier.front().word);
    std::size_t prev_count = out.classes.size();

    for (int level = 1; level <= opt.max_level; ++level) {
        std::vector<Node> next;
        next.reserve(frontier.size() * 7 + 8);
        for (const Node& n : frontier) {
            for (int gidx = 1; gidx <= 4; ++gidx) {
                for (int sgn : {1, -1}) {
                    const int letter = sgn * gidx;
                    if (!n.word.empty() && letter == -n.word.back()) continue;
                    Node child{raw_mul(n.g, A.generator(letter)), n.word};
                    child.word.push_back(letter);
                    consider(child.g, child.word);
                    next.push_back(std::move(child));
                }
            }
        }
        if (level >= opt.min_stable_level && out.classes.size() == prev_count) {
            out.stabilized_at = level;
            return out;
        }
        prev_count = out.classes.size();
        if (next.size() > opt.node_cap)
            throw EnumerationInconclusive(
                "scan_crossings: node cap exceeded before stabilization");
        frontier.swap(next);
    }
    if (opt.allow_unstable) {
        out.stabilized_at = -1;
        return out;
    }
    throw EnumerationInconclusive(
        "scan_crossings: class count did not stabilize up to max level");
}

// Geometric intersection number with pants curve gamma_{pants_index}
// (0-based), as the number of crossing conjugacy classes.
inline int geometric_intersection(const Holonomy& rep, const CurveClass& c,
                                  int pants_index, const ScanOptions& opt = {}) {
    if (pants_index < 0 || pants_index > 2)
        throw Error("geometric_intersection: pants index out of range");
    const CrossingScan scan =
        scan_crossings(rep, pants_words()[pants_index], c.word, opt);
    return static_cast<int>(scan.classes.size());
}

// Fixed curve panel: pants curves, dual curves, two composites.
// Dual words were selected by enumerating short words and validating their
// crossing counts against the required patterns (see tests).
inline std::vector<CurveClass> curve_table() {
    return {
        CurveClass("gamma1", "Da", {0, 0, 0}),
        CurveClass("gamma2", "A", {0, 0, 0}),
        CurveClass("gamma3", "d", {0, 0, 0}),
        CurveClass("delta1", "abAB", {2, 0, 0}),
        CurveClass("delta2", "abdBD", {0, 2, 0}),
        CurveClass("delta3", "acaCD", {0, 0, 2}),
        CurveClass("sigma12", "abb", {2, 2, 0}),
        CurveClass("sigma23", "bC", {0, 1, 1}),
    };
}

inline double distance_lower_bound(const FNPoint& hA, const FNPoint& hB,
                                   const std::vector<CurveClass>& panel) {
    if (panel.empty()) throw Error("distance_lower_bound: empty panel");
    const Holonomy ra = build_holonomy(hA);
    const Holonomy rb = build_holonomy(hB);
    double best = 0;
    for (const CurveClass& c : panel) {
        const double la = geodesic_length(ra, c);
        const double lb = geodesic_length(rb, c);
        best = std::max(best, 0.5 * std::abs(std::log(la / lb)));
    }
    return best;
}

}  // namespace graftlab::surface
