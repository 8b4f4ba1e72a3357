#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <graftlab/surface.hpp>

using namespace graftlab;
using namespace graftlab::surface;

TEST_CASE("word utilities: parse, print, invert, reduce") {
    CHECK(word_to_string(word_from_string("abAB")) == "abAB");
    CHECK(word_to_string(inverse_word(word_from_string("abc"))) == "CBA");
    CHECK(word_to_string(cyclically_reduce(word_from_string("aBbcdDA"))) == "c");
    CHECK(cyclically_reduce(word_from_string("aA")).empty());
    CHECK_THROWS_AS(word_from_string("ax"), Error);
    CHECK_THROWS_AS(CurveClass("bad", "aA", {0, 0, 0}), Error);
}

TEST_CASE("fn point validation") {
    CHECK_THROWS_AS(FNPoint(0, 1, 1, 0, 0, 0), Error);
    CHECK_THROWS_AS(FNPoint(1, -2, 1, 0, 0, 0), Error);
    CHECK_THROWS_AS(FNPoint(1, 1, 1, 0, 1.0 / 0.0, 0), Error);
}

TEST_CASE("holonomy satisfies the surface relator") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ul(0.5, 4.0), ut(-2.0, 2.0);
    for (int t = 0; t < 25; ++t) {
        FNPoint h(ul(rng), ul(rng), ul(rng), ut(rng), ut(rng), ut(rng));
        Holonomy rep = build_holonomy(h);
        CHECK(rep.relator_residual() < 1e-9);
    }
}

TEST_CASE("pants curve lengths reproduce the fn input") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ul(0.5, 4.0), ut(-2.0, 2.0);
    for (int t = 0; t < 10; ++t) {
        FNPoint h(ul(rng), ul(rng), ul(rng), ut(rng), ut(rng), ut(rng));
        Holonomy rep = build_holonomy(h);
        for (int i = 0; i < 3; ++i) {
            double l = hyp2::translation_length(rep.evaluate(pants_words()[i]));
            CHECK(l == doctest::Approx(h.length[i]).epsilon(1e-6));
        }
    }
}

TEST_CASE("frames agree on lengths and crossing counts") {
    FNPoint h(1.8, 2.3, 1.1, 0.6, -0.9, 0.4);
    std::vector<CurveClass> panel = curve_table();
    Holonomy r0 = build_holonomy(h, 0);
    for (int f : {1, 2}) {
        Holonomy rf = build_holonomy(h, f);
        for (const CurveClass& c : panel)
            CHECK(geodesic_length(rf, c) ==
                  doctest::Approx(geodesic_length(r0, c)).epsilon(1e-9));
    }
}

TEST_CASE("geodesic length: frozen panel oracle at (1,2,3,0.3,-0.7,0.1)") {
    // Independent oracle: trace of the double-precision matrix product,
    // 2 acosh(|tr|/2). Values frozen from that computation.
    const double want[8] = {1.0,
                            2.0,
                            3.0,
                            10.999653426280929,
                            9.2213071029645821,
                            6.0711060458010904,
                            12.017761852791926,
                            2.6787091773228884};
    FNPoint h(1, 2, 3, 0.3, -0.7, 0.1);
    Holonomy rep = build_holonomy(h);
    std::vector<CurveClass> panel = curve_table();
    for (int i = 0; i < 8; ++i) {
        CHECK(geodesic_length(rep, panel[i]) ==
              doctest::Approx(want[i]).epsilon(1e-10));
        // and the in-run double-trace oracle agrees
        CHECK(hyp2::translation_length(rep.evaluate(panel[i].word)) ==
              doctest::Approx(want[i]).epsilon(1e-10));
    }
}

TEST_CASE("pants curve length is exact under deep pinching") {
    FNPoint h(1e-7, 2.0, 1.5, 0.2, 0.0, 0.0);
    Holonomy rep = build_holonomy(h);
    std::vector<CurveClass> panel = curve_table();
    CHECK(geodesic_length(rep, panel[0]) == 1e-7);  // fn value, exact
}

TEST_CASE("trivial and non-hyperbolic classes are rejected") {
    FNPoint h(2, 2, 2, 0, 0, 0);
    Holonomy rep = build_holonomy(h);
    // The commutator of a generator with itself is trivial; the evaluated
    // word "aA" never arises (CurveClass rejects it), so use the relator,
    // which evaluates to +-identity.
    CurveClass relator("relator", "abABcdCD", {0, 0, 0});
    CHECK_THROWS_AS(geodesic_length(rep, relator), NonHyperbolic);
}

TEST_CASE("panel crossing counts match the stored intersection data") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ul(0.6, 2.8), ut(-1.0, 1.0);
    std::vector<CurveClass> panel = curve_table();
    for (int t = 0; t < 3; ++t) {
        FNPoint h(ul(rng), ul(rng), ul(rng), ut(rng), ut(rng), ut(rng));
        Holonomy rep = build_holonomy(h);
        for (const CurveClass& c : panel)
            for (int j = 0; j < 3; ++j)
                CHECK(geometric_intersection(rep, c, j) == c.dt_intersections[j]);
    }
}

TEST_CASE("crossing displacements are the same for both delta3 classes") {
    // gamma3 and delta3 cross twice with symmetric geometry at the
    // untwisted point: the two class displacements coincide exactly.
    FNPoint h(2, 2, 2, 0, 0, 0);
    Holonomy rep = build_holonomy(h);
    std::vector<CurveClass> panel = curve_table();
    CrossingScan s = scan_crossings(rep, panel[2].word, panel[5].word);
    REQUIRE(s.classes.size() == 2);
    CHECK(s.classes[0].displacement ==
          doctest::Approx(s.classes[1].displacement).epsilon(1e-12));
    CHECK(s.beta_length == doctest::Approx(2.0));
}

TEST_CASE("scan honours the stabilization contract") {
    FNPoint h(2, 2, 2, 0, 0, 0);
    Holonomy rep = build_holonomy(h);
    std::vector<CurveClass> panel = curve_table();
    ScanOptions opt;
    opt.max_level = 3;  // below min_stable_level: cannot stabilize
    CHECK_THROWS_AS(scan_crossings(rep, panel[0].word, panel[3].word, opt),
                    EnumerationInconclusive);
    opt.allow_unstable = true;
    CrossingScan s = scan_crossings(rep, panel[0].word, panel[3].word, opt);
    CHECK(s.stabilized_at == -1);
}

TEST_CASE("scan against own pants curve finds no transverse class") {
    FNPoint h(2.2, 1.7, 2.9, 0.3, -0.2, 0.1);
    Holonomy rep = build_holonomy(h);
    std::vector<CurveClass> panel = curve_table();
    for (int i = 0; i < 3; ++i) {
        CrossingScan s = scan_crossings(rep, panel[i].word, panel[i].word);
        CHECK(s.classes.empty());
    }
}

TEST_CASE("deeply pinched point: dual crossing classes survive") {
    // Schedule-style point: gamma1, gamma2 pinched by four orders of
    // magnitude; the dual curves must still produce their crossing classes
    // with displacements near the frozen twists.
    const double pi = 4 * std::atan(1.0);
    const double a = 1e4;
    FNPoint h(pi * 2.0 / (pi + a), pi * 4.2 / (pi + 2 * a), 3.1, 0.3, -0.4, 1.3);
    std::vector<CurveClass> panel = curve_table();
    ScanOptions opt;
    opt.max_endpoint_err = 1.0;
    Holonomy r0 = build_holonomy(h, 0);
    CrossingScan s1 = scan_crossings(r0, panel[0].word, panel[3].word, opt);
    REQUIRE(!s1.classes.empty());
    double best1 = 1e9;
    for (const Crossing& c : s1.classes)
        best1 = std::min(best1, std::abs(c.displacement));
    CHECK(best1 == doctest::Approx(0.3).epsilon(1e-4));
    Holonomy r1 = build_holonomy(h, 1);
    CrossingScan s2 = scan_crossings(r1, panel[1].word, panel[4].word, opt);
    REQUIRE(!s2.classes.empty());
    double best2 = 1e9;
    for (const Crossing& c : s2.classes)
        best2 = std::min(best2, std::abs(c.displacement));
    CHECK(best2 == doctest::Approx(0.4).epsilon(1e-4));
}

TEST_CASE("distance lower bound: zero at equal points, positive under scaling") {
    FNPoint h(2, 2, 2, 0.1, 0.2, 0.3);
    std::vector<CurveClass> panel = curve_table();
    CHECK(distance_lower_bound(h, h, panel) == doctest::Approx(0.0));
    FNPoint h2(2.2, 2, 2, 0.1, 0.2, 0.3);
    CHECK(distance_lower_bound(h, h2, panel) >=
          0.5 * std::log(2.2 / 2.0) - 1e-9);
}
