#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "twistlab/profile.hpp"
#include "twistlab/rng.hpp"

using namespace twistlab;

TEST_CASE("trig polynomial evaluation and derivative") {
    Profile p = Profile::trig(0.5, {1.0, 0.25}, {0.0, -0.5});
    double x = 0.137;
    double expect = 0.5 + std::cos(kTwoPi * x) + 0.25 * std::cos(2 * kTwoPi * x) -
                    0.5 * std::sin(2 * kTwoPi * x);
    CHECK(p(x) == doctest::Approx(expect).epsilon(1e-14));

    double h = 1e-6;
    CHECK(p.deriv(x) == doctest::Approx((p(x + h) - p(x - h)) / (2 * h)).epsilon(1e-7));

    Profile d = p.derivative_profile();
    CHECK(d(x) == doctest::Approx(p.deriv(x)).epsilon(1e-13));
}

TEST_CASE("polynomial antiderivative anchored at -1") {
    Profile p = Profile::poly({1.0, 2.0, 3.0});
    Profile a = p.antiderivative_profile(-1.0);
    CHECK(a(-1.0) == doctest::Approx(0.0));
    CHECK(a.deriv(0.37) == doctest::Approx(p(0.37)).epsilon(1e-13));
}

TEST_CASE("bump is exactly zero outside and flat inside") {
    Profile b = Profile::bump(0.0, 0.2, 0.7, 1.5);
    CHECK(b(0.7) == 0.0);
    CHECK(b(0.9) == 0.0);
    CHECK(b(-0.71) == 0.0);
    CHECK(b(0.1) == 1.5);
    CHECK(b(0.0) == 1.5);
    CHECK(b(0.45) > 0.0);
    CHECK(b(0.45) < 1.5);
    // derivative against finite differences in the transition zone
    double h = 1e-6;
    for (double y : {0.3, 0.45, 0.6, -0.5}) {
        CHECK(b.deriv(y) == doctest::Approx((b(y + h) - b(y - h)) / (2 * h)).epsilon(1e-5));
    }
    Profile db = b.derivative_profile();
    CHECK(db(0.45) == doctest::Approx(b.deriv(0.45)));
    CHECK(db(0.9) == 0.0);
}

TEST_CASE("spline interpolates samples and differentiates") {
    int n = 65;
    double x0 = -1.0, dx = 2.0 / (n - 1);
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = x0 + i * dx;
        v[size_t(i)] = std::sin(2.0 * x) + 0.3 * x * x;
    }
    Profile s = Profile::spline(x0, dx, v);
    for (int i = 0; i < n; ++i)
        CHECK(s(x0 + i * dx) == doctest::Approx(v[size_t(i)]).epsilon(1e-12));
    for (double x : {-0.63, -0.11, 0.42, 0.87}) {
        CHECK(s(x) == doctest::Approx(std::sin(2 * x) + 0.3 * x * x).epsilon(1e-5));
        CHECK(s.deriv(x) == doctest::Approx(2 * std::cos(2 * x) + 0.6 * x).epsilon(1e-3));
    }
}

TEST_CASE("hermite reproduces node data") {
    std::vector<double> v = {1.0, 2.0, 0.5}, d = {0.0, 1.0, -2.0};
    Profile h = Profile::hermite(0.0, 0.5, v, d);
    CHECK(h(0.0) == doctest::Approx(1.0));
    CHECK(h(0.5) == doctest::Approx(2.0));
    CHECK(h(1.0) == doctest::Approx(0.5));
    CHECK(h.deriv(0.5) == doctest::Approx(1.0));
}

TEST_CASE("piecewise antiderivative differentiates back") {
    int n = 129;
    double x0 = -1.0, dx = 2.0 / (n - 1);
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[size_t(i)] = std::cos(1.7 * (x0 + i * dx));
    Profile s = Profile::spline(x0, dx, v);
    Profile a = s.antiderivative_profile(-1.0);
    CHECK(a(-1.0) == doctest::Approx(0.0));
    for (double x : {-0.4, 0.1, 0.77}) {
        double expect = (std::sin(1.7 * x) - std::sin(-1.7)) / 1.7;
        CHECK(a(x) == doctest::Approx(expect).epsilon(1e-6));
        CHECK(a.deriv(x) == doctest::Approx(s(x)).epsilon(1e-5));
    }
}

TEST_CASE("bump antiderivative is a smooth ramp") {
    Profile b = Profile::bump(0.0, 0.2, 0.5, 2.0);
    Profile a = b.antiderivative_profile(-0.5);
    CHECK(a(-0.5) == doctest::Approx(0.0));
    CHECK(a(-0.6) == doctest::Approx(0.0).epsilon(1e-12));
    double total = a(0.5);
    CHECK(total > 2.0 * 0.4);   // at least the plateau mass
    CHECK(total < 2.0 * 1.0);
    CHECK(a.deriv(0.1) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("complex evaluation is conjugate-symmetric for real coefficients") {
    Profile p = Profile::poly({0.3, -1.0, 0.0, 2.0});
    Profile t = Profile::trig(0.0, {0.7}, {0.1});
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        cplx z(rng.uniform(-2, 2), rng.uniform(-2, 2));
        for (const Profile* f : {&p, &t}) {
            cplx a = (*f)(std::conj(z));
            cplx b = std::conj((*f)(z));
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
        }
    }
}

TEST_CASE("theta compression multiplies trig modes") {
    Profile v = Profile::trig(0.0, {}, {1.0});  // sin(2 pi t)
    Profile v3 = v.theta_compressed(3);
    for (double t : {0.05, 0.21, 0.9}) {
        CHECK(v3(t) == doctest::Approx(std::sin(kTwoPi * 3 * t)).epsilon(1e-12));
    }
}

TEST_CASE("circle mean of trig profile is the constant term") {
    Profile v = Profile::trig(0.25, {0.5}, {1.0});
    CHECK(v.circle_mean() == doctest::Approx(0.25));
}

TEST_CASE("negation is exact at the bit level") {
    Profile t = Profile::trig(0.0, {0.3121, -0.177}, {0.9, 0.0003});
    Profile nt = t.negated();
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        double x = rng.uniform();
        CHECK(nt(x) == -t(x));
    }
}
