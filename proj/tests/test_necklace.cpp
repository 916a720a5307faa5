#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "twistlab/necklace.hpp"
#include "twistlab/transport.hpp"

using namespace twistlab;

TEST_CASE("sample_codes: N=2 gives the two balanced strings") {
    auto codes = sample_codes(2, 50, 7);
    for (const auto& c : codes) {
        CHECK(c.popcount() == 1);
        CHECK((c.get(0) || c.get(1)));
        CHECK(!(c.get(0) && c.get(1)));
    }
}

TEST_CASE("sample_codes: uniform over the six balanced 4-bit strings (chi-square)") {
    int draws = 60000;
    auto codes = sample_codes(4, draws, 12345);
    std::map<int, int> hist;
    for (const auto& c : codes) {
        CHECK(c.popcount() == 2);
        int key = (c.get(0) ? 1 : 0) | (c.get(1) ? 2 : 0) | (c.get(2) ? 4 : 0) | (c.get(3) ? 8 : 0);
        hist[key]++;
    }
    REQUIRE(hist.size() == 6);
    double expected = draws / 6.0;
    double chi2 = 0.0;
    for (auto& [k, o] : hist) chi2 += (o - expected) * (o - expected) / expected;
    // 0.99 quantile of chi-square with 5 dof
    CHECK(chi2 < 15.086);
}

TEST_CASE("balanced sampler: exact usage counts, distinct colors per row") {
    auto codes = sample_codes_balanced(72, 10, 99);
    REQUIRE(codes.size() == 10);
    std::vector<int> usage(72, 0);
    for (const auto& c : codes) {
        CHECK(c.popcount() == 36);
        for (int i = 0; i < 72; ++i)
            if (c.get(i)) usage[size_t(i)]++;
    }
    for (int u : usage) CHECK(u == 5);
}

TEST_CASE("verify_coloring trivial and worst cases") {
    // M = 1: property (2) vacuous
    auto one = sample_codes(8, 1, 3);
    auto c1 = coloring_from_codes(8, one);
    auto rep1 = verify_coloring(c1, 2, 0.5);
    CHECK(rep1.property2);
    CHECK(rep1.max_usage == 1);
    CHECK(rep1.property1);

    // two identical columns: agreement fraction 1 >= 3/4, fail
    auto c2 = coloring_from_codes(8, {one[0], one[0]});
    auto rep2 = verify_coloring(c2, 2, 0.5);
    CHECK(rep2.agreement_fraction == doctest::Approx(1.0));
    CHECK(!rep2.property2);
    CHECK(!rep2.pass);
}

TEST_CASE("agreement counts: bitset equals brute force over all 36 pairs at N=4") {
    // enumerate all six balanced codes
    std::vector<BalancedCode> all;
    for (int mask = 0; mask < 16; ++mask) {
        if (std::popcount(static_cast<unsigned>(mask)) != 2) continue;
        BalancedCode c = make_code(4);
        for (int i = 0; i < 4; ++i)
            if (mask & (1 << i)) c.set(i);
        all.push_back(c);
    }
    REQUIRE(all.size() == 6);
    int checked = 0;
    for (const auto& f : all) {
        for (const auto& g : all) {
            // hand enumeration of #{(i,i') : C_f(i) = C_g(i')} = |supp f cap supp g|
            int brute = 0;
            for (int i = 0; i < 4; ++i)
                for (int i2 = 0; i2 < 4; ++i2)
                    if (f.get(i) && g.get(i2) && i == i2) ++brute;
            CHECK(brute == f.and_popcount(g));
            ++checked;
        }
    }
    CHECK(checked == 36);
}

TEST_CASE("bernstein bounds at the criterion point and monotonicity") {
    auto r = bernstein_bounds(200, 4925, 0.1);
    CHECK(r.p == doctest::Approx(std::sqrt(400.0) * std::exp(-20.0)).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(4.12e-8).epsilon(2e-3));
    CHECK(r.pair_term <= 0.5);
    CHECK(r.pair_term > 0.49);
    CHECK(r.total <= 0.6);

    // pair term grows with M; total grows once the formula regime is reached
    auto r2 = bernstein_bounds(200, 2 * 4925, 0.1);
    auto r4 = bernstein_bounds(200, 4 * 4925, 0.1);
    CHECK(r2.pair_term > r.pair_term);
    CHECK(r4.pair_term > r2.pair_term);
    CHECK(r2.total > r.total);
    CHECK(r4.total > r2.total);

    // M = 0: only the code term remains
    auto r0 = bernstein_bounds(200, 0, 0.1);
    CHECK(r0.pair_term == 0.0);
    CHECK(r0.total == doctest::Approx(r0.code_term));
}

TEST_CASE("layout n=10 eps=0.1: M = 4925 and the box constants") {
    auto l = build_layout(10, 0.1);
    CHECK(l.N == 200);
    CHECK(l.M == 4925);
    CHECK(l.eta == doctest::Approx(0.01 / 50.0));

    // volume display check
    double volume = (2.0 * (1.0 - 2.0 * std::pow(0.1, 3) / l.N) / l.N) *
                    (2.0 * (1.0 - 0.1) / l.M);
    CHECK(l.pearl_volume == doctest::Approx(volume).epsilon(1e-12));
    auto b = l.pearl(3, 7);
    CHECK((b.th_hi - b.th_lo) * (b.y_hi - b.y_lo) == doctest::Approx(volume).epsilon(1e-12));
    CHECK(l.case_volume == doctest::Approx(std::pow(1.0 - 0.01, 2) / 100.0).epsilon(1e-12));

    // pearls pairwise disjoint (spot neighbours)
    auto b2 = l.pearl(4, 7);
    CHECK(b.th_hi < b2.th_lo);
    auto b3 = l.pearl(3, 8);
    CHECK(b.y_hi < b3.y_lo);

    // case gap: adjacent interiors are eps^2/n apart, which meets the
    // stated eps^2/n^2 margin
    auto c0 = l.case_box(0);
    auto c1 = l.case_box(1);
    CHECK(c1.th_lo - c0.th_hi == doctest::Approx(0.01 / 10.0).epsilon(1e-9));
    CHECK(c1.th_lo - c0.th_hi >= 0.01 / 100.0);

    // desk-scale: the asymptotic M >= exp(eta^{-2+eps}) inequality fails and
    // is reported as such
    CHECK(!l.exp_bound_holds);

    // segments sit inside (0,2) with the advertised length
    for (const auto& s : l.segments) {
        CHECK(s.lo > 0.0);
        CHECK(s.hi < 2.0);
        CHECK(s.hi - s.lo == doctest::Approx((1.0 - 0.1) * 2.0 / l.M).epsilon(1e-9));
    }
}

TEST_CASE("layout rejects epsilon violating the inequalities") {
    CHECK_THROWS_AS(build_layout(10, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(2, 0.45), std::invalid_argument);
}

TEST_CASE("necklace rearrangement: pieces, areas, support and pushforward") {
    auto l = build_layout(6, 0.1);
    REQUIRE(l.M == 10);
    auto codes = sample_codes_balanced(l.N, l.M, 2024);
    auto coloring = coloring_from_codes(l.N, codes);
    auto rep = verify_coloring(coloring, l.n, l.eps);
    REQUIRE(rep.property1);  // balanced usage == 5 <= 5.5
    REQUIRE(rep.property2);

    auto h = build_rearrangement(l, coloring);
    CHECK(h.pieces().size() == static_cast<size_t>(l.N / 2 * l.M));

    // det-1: every image strip has the area of its source box
    for (const auto& p : h.pieces()) {
        double sa = (p.s_th_hi - p.s_th_lo) * (p.s_y_hi - p.s_y_lo);
        double ta = (p.t_th_hi - p.t_th_lo) * (p.t_y_hi - p.t_y_lo);
        CHECK(std::fabs(sa - ta) <= 1e-12);
    }

    // identity on neighbourhoods of {0} x fiber and base x {0}; the fiber
    // margin has width eps^3/n^2 * (1/N), so probe well inside it
    double fiber_margin = std::pow(l.eps, 3) / l.N * 2.0 / l.N;
    for (double y : {0.001, 0.5, 1.2, 1.999}) {
        AnnulusPoint p{0.4 * fiber_margin, y};
        auto q = h.apply(p);
        CHECK(q.theta == p.theta);
        CHECK(q.y == p.y);
    }
    for (double th : {0.1, 0.45, 0.93}) {
        AnnulusPoint p{th, 0.004};
        auto q = h.apply(p);
        CHECK(q.theta == p.theta);
        CHECK(q.y == p.y);
    }

    // pushforward of a circle through segment j: nearly all mass lands in the
    // cases of the colors of column j
    int j = 4;
    double y = 0.5 * (l.segments[size_t(j)].lo + l.segments[size_t(j)].hi);
    std::set<int> col_colors(coloring.cols[size_t(j)].begin(), coloring.cols[size_t(j)].end());
    int atoms = 10000, inside = 0;
    for (int a = 0; a < atoms; ++a) {
        AnnulusPoint x{(a + 0.5) / atoms, y};
        auto q = h.apply(x);
        // locate the case containing the image
        for (int k : col_colors) {
            auto cb = l.case_box(k);
            if (q.theta >= cb.th_lo && q.theta < cb.th_hi && q.y >= cb.y_lo && q.y < cb.y_hi) {
                ++inside;
                break;
            }
        }
    }
    double frac = static_cast<double>(inside) / atoms;
    CHECK(frac >= 1.0 - 2.0 * std::pow(l.eps, 3) / (l.n * l.n) - 2.0 / atoms);

    // inverse is exact on the targets
    for (const auto& p : h.pieces()) {
        AnnulusPoint mid{0.5 * (p.s_th_lo + p.s_th_hi), 0.5 * (p.s_y_lo + p.s_y_hi)};
        auto fwd = h.apply(mid);
        auto back = h.apply_inverse(fwd);
        CHECK(annulus_dist(back, mid) <= 1e-13);
    }
}

TEST_CASE("capacity violation raises") {
    auto l = build_layout(6, 0.1);
    // force one color to be over-used: all columns identical
    auto codes = sample_codes(l.N, 1, 5);
    std::vector<BalancedCode> rep(static_cast<size_t>(l.M), codes[0]);
    auto coloring = coloring_from_codes(l.N, rep);
    CHECK_THROWS_WITH_AS(static_cast<void>(build_rearrangement(l, coloring)),
                         doctest::Contains("capacity"), std::runtime_error);
}

TEST_CASE("equidistribution map: bijection, diameters, equidistribution") {
    int n = 20;
    double eps = 0.1;
    auto h = build_equidistribution_rearrangement(n, eps);
    CHECK(h.covers_domain());
    CHECK(h.pieces().size() == static_cast<size_t>(5 * n * n));

    // exact bijection: round trips both ways
    Rng rng(15);
    for (int i = 0; i < 500; ++i) {
        AnnulusPoint x{rng.uniform(), rng.uniform(-0.999, 0.999)};
        auto y = h.apply(x);
        auto back = h.apply_inverse(y);
        CHECK(annulus_dist(back, x) <= 1e-12);
        auto z = h.apply_inverse(x);
        auto fwd = h.apply(z);
        CHECK(annulus_dist(fwd, x) <= 1e-12);
    }

    // image diameters
    double diam = equidistribution_cell_diameter(n, eps);
    CHECK(diam <= std::sqrt(5.0) / n + 1e-12);
    for (const auto& p : h.pieces()) {
        double d = std::hypot(p.t_th_hi - p.t_th_lo, p.t_y_hi - p.t_y_lo);
        CHECK(d <= diam + 1e-12);
    }

    // pushforward of an interior circle is close to Leb_{A0}
    DiscreteMeasure push = pushforward(uniform_circle(0.37, 800),
                                       [&](const AnnulusPoint& p) { return h.apply(p); });
    DiscreteMeasure leb = lebesgue_a0_grid(48);
    double w1 = wasserstein1(push, leb);
    MESSAGE("equidistribution W1 at n=20: ", w1);
    CHECK(w1 <= std::sqrt(5.0) / n + 0.05);

    // off-core mass of a circle: the two side gaps account for eps/4
    int atoms = 20000, off = 0;
    for (int a = 0; a < atoms; ++a) {
        double th = (a + 0.5) / atoms;
        double colpos = th * n * n - std::floor(th * n * n);
        double g = eps / 8.0;
        if (colpos < g || colpos > 1.0 - g) ++off;
    }
    // stratified atoms can round by one per column edge
    double slack = 2.0 * n * n / static_cast<double>(atoms);
    CHECK(static_cast<double>(off) / atoms <= eps / 4.0 + slack);
}

TEST_CASE("equidistribution n=1 maps single strip to single cell") {
    auto h = build_equidistribution_rearrangement(1, 0.2);
    CHECK(h.pieces().size() == 5);
    AnnulusPoint x{0.5, 0.0};
    auto y = h.apply(x);
    CHECK(y.theta >= 0.0);
    CHECK(y.theta < 1.0);
    CHECK(y.y >= -1.0);
    CHECK(y.y <= 1.0);
}

TEST_CASE("area preservation under pushforward of uniform samples (Monte Carlo)") {
    int n = 8;
    auto h = build_equidistribution_rearrangement(n, 0.1);
    Rng rng(8181);
    // measure the area of a target box by counting mapped samples
    auto p = h.pieces()[3 * 5 + 3];  // interior piece of column 3
    int samples = 200000, inside = 0;
    for (int i = 0; i < samples; ++i) {
        AnnulusPoint x{rng.uniform(), rng.uniform(-1.0, 1.0)};
        auto q = h.apply(x);
        if (q.theta >= p.t_th_lo && q.theta < p.t_th_hi && q.y >= p.t_y_lo && q.y < p.t_y_hi)
            ++inside;
    }
    double est = 2.0 * inside / samples;  // domain area is 2
    double truth = (p.t_th_hi - p.t_th_lo) * (p.t_y_hi - p.t_y_lo);
    CHECK(std::fabs(est - truth) / truth <= 2.0 / std::sqrt(static_cast<double>(inside)) * 3.0);
}

TEST_CASE("layout and coloring CSV emitters produce rows") {
    auto l = build_layout(4, 0.1);
    auto codes = sample_codes(l.N, 3, 77);
    auto c = coloring_from_codes(l.N, codes);
    CHECK(layout_to_csv(l).find("case,") != std::string::npos);
    CHECK(coloring_to_csv(c).find(',') != std::string::npos);
}
