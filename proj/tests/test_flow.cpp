#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "twistlab/flow.hpp"
#include "twistlab/rng.hpp"

using namespace twistlab;

namespace {

// two compactly supported modes, the workhorse fixture
HamiltonianField two_mode_field() {
    HamiltonianField H;
    H.delta = 0.3;
    H.C = Profile::zero();
    HamiltonianField::Mode m1;
    m1.m = 1;
    m1.a = Profile::bump(0.0, 0.25, 0.65, 0.35);
    m1.b = Profile::zero();
    HamiltonianField::Mode m2;
    m2.m = 2;
    m2.a = Profile::zero();
    m2.b = Profile::bump(0.05, 0.2, 0.6, 0.25);
    H.modes = {m1, m2};
    return H;
}

double sup_word_vs_flow(const MapWord& w, const HamiltonianField& H, double time) {
    double sup = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 12; ++j) {
            AnnulusPoint x{(i + 0.5) / 16.0, -0.85 + 1.7 * j / 11.0};
            AnnulusPoint a = w.eval(x);
            AnnulusPoint b = flow_oracle(H, time, x, 1e-11);
            sup = std::max(sup, annulus_dist(a, b));
        }
    return sup;
}

}  // namespace

TEST_CASE("symplectic gradient: drift and single mode") {
    HamiltonianField H;
    H.C = Profile::poly({0.0, 1.0});  // C(y) = y
    auto g = symplectic_gradient(H, {0.3, 0.7});
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[1] == doctest::Approx(0.0));

    HamiltonianField H2;
    H2.C = Profile::zero();
    HamiltonianField::Mode md;
    md.m = 1;
    md.a = Profile::poly({0.0, 0.0, 1.0});  // a_1(y) = y^2
    md.b = Profile::zero();
    H2.modes = {md};
    AnnulusPoint x{0.2, 0.5};
    auto g2 = symplectic_gradient(H2, x);
    CHECK(g2[0] == doctest::Approx(2.0 * 0.5 * std::cos(kTwoPi * 0.2)).epsilon(1e-12));
    CHECK(g2[1] == doctest::Approx(kTwoPi * 0.25 * std::sin(kTwoPi * 0.2)).epsilon(1e-12));
}

TEST_CASE("symplectic gradient matches central differences of H") {
    HamiltonianField H = two_mode_field();
    H.C = Profile::poly({0.1, -0.2, 0.3});
    Rng rng(8);
    double h = 1e-5;
    for (int i = 0; i < 30; ++i) {
        double th = rng.uniform(), y = rng.uniform(-0.9, 0.9);
        auto g = H.gradient(th, y);
        double dth = (H.value(th + h, y) - H.value(th - h, y)) / (2 * h);
        double dy = (H.value(th, y + h) - H.value(th, y - h)) / (2 * h);
        CHECK(g[0] == doctest::Approx(dy).epsilon(1e-8).scale(1.0));
        CHECK(g[1] == doctest::Approx(-dth).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("poisson bracket of separable profiles") {
    // {cos(2 pi m)/2 pi m, A(y)} = A'(y) ... realizes b_m sin when A = -int b_m
    Profile b = Profile::poly({0.3, 0.5});
    Profile A = b.antiderivative_profile(0.0).negated();
    int m = 2;
    Profile f = Profile::trig(0.0, {1.0 / (kTwoPi * m)}, {});
    Profile fm = f.theta_compressed(m);
    HamiltonianField br = poisson_bracket(fm, A);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        double th = rng.uniform(), y = rng.uniform(-1, 1);
        double expect = b(y) * std::sin(kTwoPi * m * th);
        CHECK(br.value(th, y) == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
    }

    // {const, g} = 0
    HamiltonianField z = poisson_bracket(Profile::trig(0.4, {}, {}), Profile::poly({1.0, 2.0}));
    CHECK(z.modes.empty());

    // {sin(2 pi t)/2 pi, B} with B = int a gives a(y) cos(2 pi t)
    Profile a = Profile::poly({-0.2, 0.0, 1.0});
    Profile B = a.antiderivative_profile(0.0);
    HamiltonianField br2 = poisson_bracket(Profile::trig(0.0, {}, {1.0 / kTwoPi}), B);
    for (int i = 0; i < 20; ++i) {
        double th = rng.uniform(), y = rng.uniform(-1, 1);
        CHECK(br2.value(th, y) ==
              doctest::Approx(a(y) * std::cos(kTwoPi * th)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("bracket-Lie consistency on a grid") {
    // The field of {f,g} equals the Lie bracket of the separate gradient
    // fields, with the bracket oriented as DX1(X2) - DX2(X1).
    Profile f = Profile::trig(0.0, {0.3}, {0.2});
    Profile g = Profile::poly({0.0, 0.4, -0.3});
    HamiltonianField br = poisson_bracket(f, g);

    auto Xf = [&](double th, double) { return std::array<double, 2>{0.0, -f.deriv(th)}; };
    auto Xg = [&](double, double y) { return std::array<double, 2>{g.deriv(y), 0.0}; };
    double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            double th = (i + 0.5) / 12.0, y = -0.9 + 1.8 * j / 11.0;
            // DXg(Xf) - DXf(Xg)
            auto x1 = Xf(th, y), x2 = Xg(th, y);
            std::array<double, 2> lie;
            for (int c = 0; c < 2; ++c) {
                double d2 = (Xg(th + h * x1[0], y + h * x1[1])[c] -
                             Xg(th - h * x1[0], y - h * x1[1])[c]) /
                            (2 * h);
                double d1 = (Xf(th + h * x2[0], y + h * x2[1])[c] -
                             Xf(th - h * x2[0], y - h * x2[1])[c]) /
                            (2 * h);
                lie[c] = d1 - d2;
            }
            auto xb = br.gradient(th, y);
            worst = std::max(worst, std::hypot(lie[0] - xb[0], lie[1] - xb[1]));
        }
    CHECK(worst <= 1e-6);
}

TEST_CASE("fourier decomposition recovers a single mode exactly") {
    auto H = [](double th, double y) { return (0.5 - y * y) * std::cos(kTwoPi * 3.0 * th); };
    auto res = fourier_decompose(H, 64, 32, 4, 0.0);
    CHECK(!res.aliasing_warning);
    REQUIRE(res.field.modes.size() == 1);
    CHECK(res.field.modes[0].m == 3);
    for (double y : {-0.75, 0.0, 0.5})
        CHECK(res.field.modes[0].a(y) == doctest::Approx(0.5 - y * y).epsilon(1e-10));
    // reconstruction on the sampling grid
    double worst = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j <= 32; ++j) {
            double th = i / 64.0, y = -1.0 + 2.0 * j / 32.0;
            worst = std::max(worst, std::fabs(res.field.value(th, y) - H(th, y)));
        }
    CHECK(worst <= 1e-10);
}

TEST_CASE("fourier decomposition of zero is empty") {
    auto res = fourier_decompose([](double, double) { return 0.0; }, 32, 16, 2, 0.1);
    CHECK(res.field.modes.empty());
    CHECK(!res.aliasing_warning);
}

TEST_CASE("fourier reconstruction of a smooth two-mode field at N=8") {
    HamiltonianField ref = two_mode_field();
    auto fn = [&](double th, double y) { return ref.value(th, y); };
    auto res = fourier_decompose(fn, 256, 64, 8, 0.3);
    CHECK(!res.aliasing_warning);
    double worst = 0.0;
    for (int i = 0; i < 256; i += 2)
        for (int j = 0; j <= 64; ++j) {
            double th = i / 256.0, y = -1.0 + 2.0 * j / 64.0;
            worst = std::max(worst, std::fabs(res.field.value(th, y) - fn(th, y)));
        }
    CHECK(worst <= 1e-6);
}

TEST_CASE("fourier aliasing warning fires for undersampled high modes") {
    auto H = [](double th, double y) {
        return (1.0 - y * y) * (std::cos(kTwoPi * th) + 0.5 * std::cos(kTwoPi * 5 * th));
    };
    auto res = fourier_decompose(H, 64, 16, 1, 0.0);
    CHECK(res.aliasing_warning);
    CHECK(res.aliased_energy_ratio > 1e-3);
}

TEST_CASE("flow oracle basics") {
    HamiltonianField H;
    H.C = Profile::poly({0.0, 0.0, 0.5});  // C = y^2/2, flow theta += t*y
    AnnulusPoint x{0.2, 0.6};
    AnnulusPoint out = flow_oracle(H, 0.5, x, 1e-12);
    CHECK(out.theta == doctest::Approx(mod1(0.2 + 0.5 * 0.6)).epsilon(1e-10));
    CHECK(out.y == doctest::Approx(0.6).epsilon(1e-12));

    CHECK(flow_oracle(H, 0.0, x, 1e-10).theta == x.theta);

    // time reversal on the two-mode field
    HamiltonianField H2 = two_mode_field();
    AnnulusPoint p{0.37, 0.21};
    AnnulusPoint fwd = flow_oracle(H2, 0.8, p, 1e-11);
    AnnulusPoint back = flow_oracle(H2, -0.8, fwd, 1e-11);
    CHECK(annulus_dist(back, p) <= 1e-9);

    // energy conservation along the oracle
    double drift = std::fabs(H2.value(fwd.theta, fwd.y) - H2.value(p.theta, p.y));
    CHECK(drift <= 10.0 * 1e-11 * 0.8 + 1e-12);
}

TEST_CASE("commutator flow approx: integrable case is exact, t=0 identity") {
    HamiltonianField H;
    H.C = Profile::poly({0.0, 0.0, 0.5});
    MapWord w = commutator_flow_approx(H, 0.3);
    REQUIRE(w.size() == 1);
    AnnulusPoint x{0.1, 0.8};
    AnnulusPoint a = w.eval(x);
    CHECK(a.theta == doctest::Approx(mod1(0.1 + 0.09 * 0.8)).epsilon(1e-14));
    CHECK(a.y == 0.8);

    CHECK(commutator_flow_approx(H, 0.0).size() == 0);
}

TEST_CASE("normalization bounds and zero mean of generated v_j") {
    HamiltonianField H = two_mode_field();
    for (auto norm : {Normalization::Real2PiM, Normalization::AnalyticMm}) {
        H.norm = norm;
        H.rho0 = 0.15;
        auto terms = bracket_terms(H);
        REQUIRE(terms.size() == 4);
        for (const auto& bt : terms) {
            // zero mean
            CHECK(std::fabs(bt.v.circle_mean()) <= 1e-12);
            if (norm == Normalization::Real2PiM) {
                double sup = 0.0;
                for (int i = 0; i < 512; ++i) sup = std::max(sup, std::fabs(bt.v(i / 512.0)));
                CHECK(sup <= 1.0 + 1e-12);
            } else {
                // discretized T_rho0 sup
                double sup = 0.0;
                for (int i = 0; i < 256; ++i)
                    for (double im : {-0.15, -0.075, 0.0, 0.075, 0.15}) {
                        cplx z(i / 256.0, im);
                        sup = std::max(sup, std::abs(bt.v(z)));
                    }
                CHECK(sup <= 1.0 + 1e-9);
            }
        }
    }
}

TEST_CASE("splitting error decays with log-log slope near 3") {
    HamiltonianField H = two_mode_field();
    std::vector<double> ts = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> errs;
    for (double t : ts) {
        MapWord w = commutator_flow_approx(H, t);
        errs.push_back(sup_word_vs_flow(w, H, t * t));
    }
    // least squares slope of log err vs log t
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(ts.size());
    for (int i = 0; i < n; ++i) {
        double lx = std::log(ts[size_t(i)]), ly = std::log(errs[size_t(i)]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    MESSAGE("splitting slope = ", slope);
    CHECK(slope >= 2.5);
    CHECK(slope <= 3.5);
}

TEST_CASE("realize_time_one: exact for drift, error decays in K, letter count") {
    HamiltonianField H;
    H.C = Profile::poly({0.0, 0.0, 0.4});
    auto rep = realize_time_one(H, 9);
    CHECK(rep.sup_error <= 1e-9);

    // letter count = K (8N + 1), N = 2 modes
    {
        auto rl = realize_time_one(two_mode_field(), 4, 4, 4);
        CHECK(static_cast<int>(rl.word.size()) == 4 * (8 * 2 + 1));
    }

    // Mild amplitudes keep the time-one flow contraction-friendly.  The
    // composed error decays like K^{-1/2}: each of the K factors carries an
    // O(t^3) defect with t^2 = 1/K, so the sum is O(K * K^{-3/2}).
    HamiltonianField H2 = two_mode_field();
    for (auto& md : H2.modes) {
        md.a = md.a.scaled(0.02);
        md.b = md.b.scaled(0.02);
    }
    auto r4 = realize_time_one(H2, 4);
    auto r16 = realize_time_one(H2, 16);
    auto r64 = realize_time_one(H2, 64);
    auto r256 = realize_time_one(H2, 256);
    MESSAGE("K errors: ", r4.sup_error, " ", r16.sup_error, " ", r64.sup_error, " ",
            r256.sup_error);
    CHECK(r16.sup_error < r4.sup_error);
    CHECK(r64.sup_error < r16.sup_error);
    CHECK(r64.sup_error <= 0.55 * r4.sup_error);
    // asymptotic quadrupling ratio approaches 2
    CHECK(r256.sup_error <= r64.sup_error / 1.8);
}

TEST_CASE("field text serialization round trips") {
    HamiltonianField H = two_mode_field();
    H.C = Profile::poly({0.05, 0.1});
    std::string s1 = field_to_text(H);
    HamiltonianField back = field_from_text(s1);
    CHECK(field_to_text(back) == s1);
    Rng rng(21);
    for (int i = 0; i < 20; ++i) {
        double th = rng.uniform(), y = rng.uniform(-1, 1);
        CHECK(back.value(th, y) == H.value(th, y));
    }
}
