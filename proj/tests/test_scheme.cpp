#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "twistlab/scheme.hpp"

using namespace twistlab;

namespace {

SchemeConfig fast_ergodic_config() {
    SchemeConfig cfg;
    cfg.mode = SchemeMode::Ergodic;
    cfg.stages = 2;
    cfg.seed = 11;
    cfg.sample_heights = 24;
    cfg.circle_atoms = 300;
    cfg.leb_grid = 32;
    cfg.orbit_samples = 3;
    cfg.orbit_cap = 400;
    cfg.p2_points = 3;
    cfg.p2_k_values = 5;
    cfg.p4_grid = 25;
    cfg.c0_grid_theta = 24;
    cfg.c0_grid_y = 13;
    cfg.commutation_grid = 100;
    return cfg;
}

}  // namespace

TEST_CASE("rational iterate angles are exact") {
    Rational a{3, 7};
    CHECK(a.iterate_angle(7) == 0.0);
    CHECK(a.iterate_angle(1) == doctest::Approx(3.0 / 7.0));
    CHECK(a.iterate_angle(5) == doctest::Approx(1.0 / 7.0));
    CHECK(a.iterate_angle(-1) == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("eps sequence default sums below one") {
    SchemeConfig cfg;
    double s = 0.0;
    for (int n = 1; n <= 30; ++n) s += cfg.eps_n(n);
    CHECK(s < 1.0);
    CHECK(cfg.eps_n(1) == doctest::Approx(0.125));
}

TEST_CASE("verify_P4 trivial cases") {
    SchemeState id;
    id.alpha = {0, 1};
    // q_prev = 1: vacuous pass
    auto rep = verify_P4(id, id, 1, 10, 100);
    CHECK(rep.pass);

    // F_prev = R_{1/2}, F_cur = identity: fails at k = 1
    SchemeState prev;
    prev.alpha = {1, 2};
    SchemeState cur;
    cur.alpha = {0, 1};
    cur.conjugators = {};
    auto rep2 = verify_P4(cur, prev, 2, 20, 10);
    CHECK(!rep2.pass);
    CHECK(rep2.min_ratio < 1e-6);

    // F_cur = F_prev: ratio 1 > 1 - 2^{-n}
    auto rep3 = verify_P4(prev, prev, 2, 20, 10);
    CHECK(rep3.pass);
    CHECK(rep3.min_ratio == doctest::Approx(1.0));
}

TEST_CASE("two-stage ergodic run: denominators, conjugacy, diagnostics") {
    SchemeConfig cfg = fast_ergodic_config();
    SchemeResult res = run_scheme(cfg);
    REQUIRE(res.stages.size() == 2);
    const auto& s1 = res.stages[0];
    const auto& s2 = res.stages[1];

    // q_n is a strictly increasing multiple of q_{n-1}
    CHECK(s1.alpha.q >= 2);
    CHECK(s2.alpha.q % s1.alpha.q == 0);
    CHECK(s2.alpha.q > s1.alpha.q);
    CHECK(std::gcd(s2.alpha.p, s2.alpha.q) == 1);

    // commutation of h_n with R_{alpha_{n-1}} (exact by the lift construction)
    CHECK(s1.commutation_sup <= 1e-10);
    CHECK(s2.commutation_sup <= 1e-10);
    CHECK(s2.periodicity_defect <= 1e-12);

    // P2 / P3 below the stage budgets
    CHECK(s1.c0_prev < cfg.eps_n(1));
    CHECK(s2.c0_prev < cfg.eps_n(2));
    CHECK(s1.p2_sup <= cfg.eps_n(1) + 1e-9);
    CHECK(s2.p2_sup <= cfg.eps_n(2) + 1e-9);

    // P4 min ratio above 1 - 2^{-n}
    CHECK(s2.p4_min_ratio > 1.0 - std::pow(0.5, 2));

    // equidistribution gates
    CHECK(s1.equid_fraction >= 0.9);
    CHECK(s1.equid_worst < 2.0 * cfg.eps_n(1));
    CHECK(s2.equid_worst < 2.0 * cfg.eps_n(2) + 0.05);
    CHECK(s1.cell_diameter <= std::sqrt(5.0) / s1.equidist_n + 1e-9);

    // orbit closure after q_n iterates
    CHECK(s1.orbit_closure <= 1e-9);
    CHECK(s2.orbit_closure <= 1e-9);
}

TEST_CASE("two-stage run final map round-trips through serialization") {
    SchemeConfig cfg = fast_ergodic_config();
    cfg.sample_heights = 12;
    SchemeResult res = run_scheme(cfg);
    SchemeState back = scheme_state_from_json(res.final_map_json);
    CHECK(scheme_state_to_json(back) == res.final_map_json);
    for (int g = 0; g < 50; ++g) {
        AnnulusPoint x{mod1(0.17 + 0.613 * g), -0.9 + 1.8 * (g % 11) / 10.0};
        AnnulusPoint a = res.state.apply_F(x);
        AnnulusPoint b = back.apply_F(x);
        CHECK(annulus_dist(a, b) <= 1e-14);
    }
}

TEST_CASE("determinism: equal seeds give byte-identical records") {
    SchemeConfig cfg = fast_ergodic_config();
    cfg.stages = 1;
    cfg.sample_heights = 10;
    SchemeResult a = run_scheme(cfg);
    SchemeResult b = run_scheme(cfg);
    REQUIRE(a.stages.size() == b.stages.size());
    CHECK(a.stages[0].to_json() == b.stages[0].to_json());
    CHECK(a.final_map_json == b.final_map_json);
}

TEST_CASE("zero stages give identity dynamics") {
    SchemeConfig cfg = fast_ergodic_config();
    cfg.stages = 0;
    SchemeResult res = run_scheme(cfg);
    CHECK(res.stages.empty());
    AnnulusPoint x{0.3, 0.2};
    CHECK(annulus_dist(res.state.apply_F(x), x) == 0.0);
}

TEST_CASE("stage-1 emergence run: separations and bookkeeping") {
    SchemeConfig cfg;
    cfg.mode = SchemeMode::Emergence;
    cfg.stages = 1;
    cfg.seed = 5;
    cfg.necklace_n = 6;
    cfg.necklace_eps = 0.1;
    cfg.separation_atoms = 400;  // lighter than the acceptance setting
    cfg.max_separation_classes = 6;
    cfg.p4_grid = 20;
    cfg.c0_grid_theta = 24;
    cfg.c0_grid_y = 13;
    SchemeResult res = run_scheme(cfg);
    REQUIRE(res.stages.size() == 1);
    const auto& s = res.stages[0];
    CHECK(s.tile_Q == 1);
    CHECK(s.M_n == 10);  // layout M at n = 6
    CHECK(s.eta_n == doctest::Approx(0.01 / 30.0));
    CHECK(s.min_separation >= 0.5 * s.separation_target);
    CHECK(s.commutation_sup <= 1e-10);
    REQUIRE(s.segments.size() >= 2);
    // segment lengths (1-eps) * 2 / M_n
    for (auto& [lo, hi] : s.segments)
        CHECK(hi - lo == doctest::Approx((1.0 - 0.1) * 2.0 / s.M_n).epsilon(1e-9));
    // tile invariance is unconditional at Q = 1; the lemma's (c): mind the axes
    CHECK(s.p2_emergence < s.p2_emergence_budget);
}

TEST_CASE("choose_alpha: measured closeness shrinks with the multiplier") {
    SchemeConfig cfg = fast_ergodic_config();
    cfg.stages = 1;
    cfg.sample_heights = 8;
    SchemeResult res = run_scheme(cfg);
    SchemeState st = res.state;

    // C0(F_m, F_prev) decreases monotonically in m on a test stage
    SchemeState prev = st;
    double last = 1e9;
    for (long long m : {10, 100, 1000}) {
        SchemeState cand = prev;
        __int128 num = static_cast<__int128>(m) * prev.alpha.p * prev.alpha.q + 1;
        __int128 den = static_cast<__int128>(m) * prev.alpha.q * prev.alpha.q;
        cand.alpha = {static_cast<long long>(num), static_cast<long long>(den)};
        double c0 = 0.0;
        for (int g = 0; g < 120; ++g) {
            AnnulusPoint x{mod1(0.77 * g), -0.9 + 1.8 * (g % 7) / 6.0};
            c0 = std::max(c0, annulus_dist(cand.apply_F(x), prev.apply_F(x)));
        }
        CHECK(c0 < last);
        last = c0;
    }
}
