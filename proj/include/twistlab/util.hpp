// Small numeric helpers shared across the library: compensated (double-double)
// arithmetic for map-word evaluation, circle distance, grids and a thread fan-out.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace twistlab {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// ---- compensated arithmetic ------------------------------------------------
// A value represented as hi + lo with |lo| <= ulp(hi)/2.  Words are evaluated
// in this representation so that a displacement added by one letter and
// removed by a later inverse letter cancels to the bit.
struct DD {
    double hi = 0.0;
    double lo = 0.0;
};

inline DD dd_from(double x) { return {x, 0.0}; }

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD dd_add(DD a, double b) {
    DD s = two_sum(a.hi, b);
    s.lo += a.lo;
    DD r = two_sum(s.hi, s.lo);
    return r;
}

inline double dd_value(DD a) { return a.hi + a.lo; }

// Reduce hi+lo modulo 1 into [0,1); exact when the shift is integral.
inline DD dd_mod1(DD a) {
    double f = std::floor(a.hi);
    if (f != 0.0) a = dd_add(a, -f);
    double v = dd_value(a);
    if (v >= 1.0) a = dd_add(a, -1.0);
    else if (v < 0.0) a = dd_add(a, 1.0);
    // final guard for values that round exactly to 1
    if (dd_value(a) >= 1.0) a = dd_add(a, -1.0);
    if (dd_value(a) < 0.0) a = {0.0, 0.0};
    return a;
}

// ---- circle geometry -------------------------------------------------------

inline double mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;
    if (r < 0.0) r = 0.0;
    return r;
}

// distance on T = R/Z
inline double circle_dist(double a, double b) {
    double d = std::fabs(mod1(a) - mod1(b));
    return std::min(d, 1.0 - d);
}

// ---- grids -----------------------------------------------------------------

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    if (n == 1) { v[0] = 0.5 * (a + b); return v; }
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

// midpoints of n equal cells of [a,b]
inline std::vector<double> midpoints(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * (i + 0.5) / n;
    return v;
}

// ---- parallel fan-out ------------------------------------------------------
// Runs fn(i) for i in [0,n).  Results must be written to pre-indexed slots so
// the outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned workers = 0) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// ---- misc ------------------------------------------------------------------

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct CheckError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace twistlab
