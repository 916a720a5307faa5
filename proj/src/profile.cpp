#include "twistlab/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace twistlab {

namespace {

// smooth step built from phi(t) = e^{-1/t}: 0 for u<=0, 1 for u>=1
double cutoff_phi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double cutoff_phi_d(double t) {
    if (t <= 0.0) return 0.0;
    double e = std::exp(-1.0 / t);
    return e / (t * t);
}

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = cutoff_phi(u), b = cutoff_phi(1.0 - u);
    return a / (a + b);
}

double smoothstep_d(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double a = cutoff_phi(u), b = cutoff_phi(1.0 - u);
    double ad = cutoff_phi_d(u), bd = -cutoff_phi_d(1.0 - u);
    double s = a + b;
    return (ad * s - a * (ad + bd)) / (s * s);
}

// bump(y) = A * s((r_out - |y-c|)/(r_out - r_in))
double bump_value(const BumpData& b, double y) {
    double r = std::fabs(y - b.center);
    if (r >= b.r_out) return 0.0;
    if (r <= b.r_in) return b.amplitude;
    double u = (b.r_out - r) / (b.r_out - b.r_in);
    return b.amplitude * smoothstep(u);
}

double bump_deriv_value(const BumpData& b, double y) {
    double d = y - b.center;
    double r = std::fabs(d);
    if (r >= b.r_out || r <= b.r_in) return 0.0;
    double u = (b.r_out - r) / (b.r_out - b.r_in);
    double sign = d >= 0.0 ? 1.0 : -1.0;
    return -b.amplitude * smoothstep_d(u) * sign / (b.r_out - b.r_in);
}

cplx bump_value_c(const BumpData& b, cplx z) {
    // deterministic complex extension by the same formula, branch chosen by Re
    double re = z.real() - b.center;
    double r = std::fabs(re);
    if (r >= b.r_out) return {0.0, 0.0};
    if (r <= b.r_in && std::fabs(z.imag()) == 0.0) return {b.amplitude, 0.0};
    cplx d = z - cplx(b.center, 0.0);
    cplx rr = re >= 0.0 ? d : -d;
    cplx u = (cplx(b.r_out, 0) - rr) / (b.r_out - b.r_in);
    cplx one_minus = cplx(1.0, 0.0) - u;
    cplx a = std::exp(-1.0 / u), bb = std::exp(-1.0 / one_minus);
    return b.amplitude * a / (a + bb);
}

template <typename T>
T poly_eval(const std::vector<double>& c, T x) {
    T acc = T(0.0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

const PiecewisePolyData& as_pp(const Profile::Data& d) { return std::get<PiecewisePolyData>(d); }

template <typename T>
T pp_eval(const PiecewisePolyData& p, T x) {
    double xr;
    if constexpr (std::is_same_v<T, cplx>) xr = x.real(); else xr = x;
    int n = static_cast<int>(p.cells.size());
    int i = static_cast<int>(std::floor((xr - p.x0) / p.dx));
    i = std::clamp(i, 0, n - 1);
    T u = x - T(p.x0 + i * p.dx);
    const auto& c = p.cells[static_cast<size_t>(i)];
    return ((T(c[3]) * u + T(c[2])) * u + T(c[1])) * u + T(c[0]);
}

template <typename T>
T arnoldi_eval(const ArnoldiPolyData& a, T z) {
    int k = a.degree;
    std::vector<T> q(static_cast<size_t>(k + 1));
    q[0] = T(1.0);
    for (int j = 0; j < k; ++j) {
        T w = z * q[static_cast<size_t>(j)];
        for (int i = 0; i <= j; ++i)
            w -= T(a.hess[static_cast<size_t>(j) * (k + 1) + i]) * q[static_cast<size_t>(i)];
        q[static_cast<size_t>(j + 1)] = w / T(a.hess[static_cast<size_t>(j) * (k + 1) + j + 1]);
    }
    T acc = T(0.0);
    for (int i = 0; i <= k; ++i) acc += T(a.coeffs[static_cast<size_t>(i)]) * q[static_cast<size_t>(i)];
    return acc;
}

double arnoldi_deriv(const ArnoldiPolyData& a, double z) {
    int k = a.degree;
    std::vector<double> q(static_cast<size_t>(k + 1)), dq(static_cast<size_t>(k + 1), 0.0);
    q[0] = 1.0;
    for (int j = 0; j < k; ++j) {
        double w = z * q[static_cast<size_t>(j)];
        double dw = q[static_cast<size_t>(j)] + z * dq[static_cast<size_t>(j)];
        for (int i = 0; i <= j; ++i) {
            double hij = a.hess[static_cast<size_t>(j) * (k + 1) + i];
            w -= hij * q[static_cast<size_t>(i)];
            dw -= hij * dq[static_cast<size_t>(i)];
        }
        double hk = a.hess[static_cast<size_t>(j) * (k + 1) + j + 1];
        q[static_cast<size_t>(j + 1)] = w / hk;
        dq[static_cast<size_t>(j + 1)] = dw / hk;
    }
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) acc += a.coeffs[static_cast<size_t>(i)] * dq[static_cast<size_t>(i)];
    return acc;
}

double pp_deriv(const PiecewisePolyData& p, double x) {
    int n = static_cast<int>(p.cells.size());
    int i = static_cast<int>(std::floor((x - p.x0) / p.dx));
    i = std::clamp(i, 0, n - 1);
    double u = x - (p.x0 + i * p.dx);
    const auto& c = p.cells[static_cast<size_t>(i)];
    return (3.0 * c[3] * u + 2.0 * c[2]) * u + c[1];
}

}  // namespace

Profile Profile::trig(double a0, std::vector<double> cos_c, std::vector<double> sin_c) {
    std::size_t n = std::max(cos_c.size(), sin_c.size());
    cos_c.resize(n, 0.0);
    sin_c.resize(n, 0.0);
    return Profile(TrigPolyData{a0, std::move(cos_c), std::move(sin_c)});
}

Profile Profile::poly(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    return Profile(PolyData{std::move(coeffs)});
}

Profile Profile::bump(double center, double r_in, double r_out, double amplitude) {
    if (!(r_out > r_in) || r_in < 0.0)
        throw std::invalid_argument("bump: need 0 <= r_in < r_out");
    return Profile(BumpData{center, r_in, r_out, amplitude});
}

Profile Profile::bump_deriv(const BumpData& b) { return Profile(BumpDerivData{b}); }

Profile Profile::spline(double x0, double dx, const std::vector<double>& v) {
    std::size_t n = v.size();
    if (n < 2) throw std::invalid_argument("spline: need >= 2 samples");
    // natural cubic spline second derivatives (tridiagonal, Thomas algorithm)
    std::vector<double> m(n, 0.0);
    if (n > 2) {
        std::size_t k = n - 2;
        std::vector<double> diag(k, 4.0), rhs(k), cp(k);
        for (std::size_t i = 0; i < k; ++i)
            rhs[i] = 6.0 * (v[i] - 2.0 * v[i + 1] + v[i + 2]) / (dx * dx);
        cp[0] = 1.0 / diag[0];
        rhs[0] /= diag[0];
        for (std::size_t i = 1; i < k; ++i) {
            double denom = 4.0 - cp[i - 1];
            cp[i] = 1.0 / denom;
            rhs[i] = (rhs[i] - rhs[i - 1]) / denom;
        }
        for (std::size_t i = k - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
        for (std::size_t i = 0; i < k; ++i) m[i + 1] = rhs[i];
    }
    PiecewisePolyData p{x0, dx, {}};
    p.cells.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double a = v[i];
        double b = (v[i + 1] - v[i]) / dx - dx * (2.0 * m[i] + m[i + 1]) / 6.0;
        double c = m[i] / 2.0;
        double d = (m[i + 1] - m[i]) / (6.0 * dx);
        p.cells[i] = {a, b, c, d};
    }
    return Profile(std::move(p));
}

Profile Profile::hermite(double x0, double dx, const std::vector<double>& v,
                         const std::vector<double>& dv) {
    std::size_t n = v.size();
    if (n < 2 || dv.size() != n) throw std::invalid_argument("hermite: bad sample arrays");
    PiecewisePolyData p{x0, dx, {}};
    p.cells.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double a = v[i], b = dv[i];
        double c = (3.0 * (v[i + 1] - v[i]) / dx - 2.0 * dv[i] - dv[i + 1]) / dx;
        double d = (2.0 * (v[i] - v[i + 1]) / dx + dv[i] + dv[i + 1]) / (dx * dx);
        p.cells[i] = {a, b, c, d};
    }
    return Profile(std::move(p));
}

double Profile::operator()(double x) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) {
                double acc = d.a0;
                double t = mod1(x);
                for (std::size_t m = 0; m < d.cos_c.size(); ++m) {
                    double w = kTwoPi * static_cast<double>(m + 1) * t;
                    acc += d.cos_c[m] * std::cos(w) + d.sin_c[m] * std::sin(w);
                }
                return acc;
            } else if constexpr (std::is_same_v<T, PolyData>) {
                return poly_eval(d.c, x);
            } else if constexpr (std::is_same_v<T, BumpData>) {
                return bump_value(d, x);
            } else if constexpr (std::is_same_v<T, BumpDerivData>) {
                return bump_deriv_value(d.base, x);
            } else if constexpr (std::is_same_v<T, ArnoldiPolyData>) {
                return arnoldi_eval(d, x);
            } else {
                return pp_eval(d, x);
            }
        },
        data_);
}

cplx Profile::operator()(cplx z) const {
    return std::visit(
        [&](const auto& d) -> cplx {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) {
                cplx zz(mod1(z.real()), z.imag());
                cplx acc(d.a0, 0.0);
                for (std::size_t m = 0; m < d.cos_c.size(); ++m) {
                    cplx w = kTwoPi * static_cast<double>(m + 1) * zz;
                    acc += d.cos_c[m] * std::cos(w) + d.sin_c[m] * std::sin(w);
                }
                return acc;
            } else if constexpr (std::is_same_v<T, PolyData>) {
                return poly_eval(d.c, z);
            } else if constexpr (std::is_same_v<T, BumpData>) {
                return bump_value_c(d, z);
            } else if constexpr (std::is_same_v<T, BumpDerivData>) {
                // finite difference of the complex extension; only used for
                // diagnostics, never inside entire words
                cplx h(1e-6, 0.0);
                return (bump_value_c(d.base, z + h) - bump_value_c(d.base, z - h)) / (2.0 * h);
            } else if constexpr (std::is_same_v<T, ArnoldiPolyData>) {
                return arnoldi_eval(d, z);
            } else {
                return pp_eval(d, z);
            }
        },
        data_);
}

double Profile::deriv(double x) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) {
                double acc = 0.0;
                double t = mod1(x);
                for (std::size_t m = 0; m < d.cos_c.size(); ++m) {
                    double f = kTwoPi * static_cast<double>(m + 1);
                    double w = f * t;
                    acc += -d.cos_c[m] * f * std::sin(w) + d.sin_c[m] * f * std::cos(w);
                }
                return acc;
            } else if constexpr (std::is_same_v<T, PolyData>) {
                double acc = 0.0;
                for (std::size_t i = d.c.size(); i-- > 1;)
                    acc = acc * x + d.c[i] * static_cast<double>(i);
                return acc;
            } else if constexpr (std::is_same_v<T, BumpData>) {
                return bump_deriv_value(d, x);
            } else if constexpr (std::is_same_v<T, BumpDerivData>) {
                double h = 1e-6;
                return (bump_deriv_value(d.base, x + h) - bump_deriv_value(d.base, x - h)) /
                       (2.0 * h);
            } else if constexpr (std::is_same_v<T, ArnoldiPolyData>) {
                return arnoldi_deriv(d, x);
            } else {
                return pp_deriv(d, x);
            }
        },
        data_);
}

Profile Profile::derivative_profile() const {
    return std::visit(
        [&](const auto& d) -> Profile {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) {
                TrigPolyData r;
                r.a0 = 0.0;
                r.cos_c.resize(d.cos_c.size());
                r.sin_c.resize(d.sin_c.size());
                for (std::size_t m = 0; m < d.cos_c.size(); ++m) {
                    double f = kTwoPi * static_cast<double>(m + 1);
                    r.cos_c[m] = d.sin_c[m] * f;
                    r.sin_c[m] = -d.cos_c[m] * f;
                }
                return Profile(std::move(r));
            } else if constexpr (std::is_same_v<T, PolyData>) {
                PolyData r;
                if (d.c.size() <= 1) return poly({0.0});
                r.c.resize(d.c.size() - 1);
                for (std::size_t i = 1; i < d.c.size(); ++i)
                    r.c[i - 1] = d.c[i] * static_cast<double>(i);
                return Profile(std::move(r));
            } else if constexpr (std::is_same_v<T, BumpData>) {
                return bump_deriv(d);
            } else if constexpr (std::is_same_v<T, BumpDerivData>) {
                throw std::logic_error("derivative_profile: not available for bump derivative");
            } else if constexpr (std::is_same_v<T, ArnoldiPolyData>) {
                throw std::logic_error("derivative_profile: not available for arnoldi basis");
            } else {
                PiecewisePolyData r{d.x0, d.dx, {}};
                r.cells.resize(d.cells.size());
                for (std::size_t i = 0; i < d.cells.size(); ++i) {
                    const auto& c = d.cells[i];
                    r.cells[i] = {c[1], 2.0 * c[2], 3.0 * c[3], 0.0};
                }
                return Profile(std::move(r));
            }
        },
        data_);
}

Profile Profile::antiderivative_profile(double anchor) const {
    return std::visit(
        [&](const auto& d) -> Profile {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PolyData>) {
                PolyData r;
                r.c.resize(d.c.size() + 1, 0.0);
                for (std::size_t i = 0; i < d.c.size(); ++i)
                    r.c[i + 1] = d.c[i] / static_cast<double>(i + 1);
                Profile p(std::move(r));
                double off = p(anchor);
                auto& rc = std::get<PolyData>(p.data_).c;
                rc[0] -= off;
                return p;
            } else if constexpr (std::is_same_v<T, TrigPolyData>) {
                if (d.a0 != 0.0)
                    throw std::invalid_argument("antiderivative: trig profile has nonzero mean");
                TrigPolyData r;
                r.cos_c.resize(d.cos_c.size());
                r.sin_c.resize(d.sin_c.size());
                for (std::size_t m = 0; m < d.cos_c.size(); ++m) {
                    double f = kTwoPi * static_cast<double>(m + 1);
                    r.cos_c[m] = -d.sin_c[m] / f;
                    r.sin_c[m] = d.cos_c[m] / f;
                }
                Profile p(std::move(r));
                double off = p(anchor);
                std::get<TrigPolyData>(p.data_).a0 = -off;
                return p;
            } else if constexpr (std::is_same_v<T, PiecewisePolyData>) {
                PiecewisePolyData r{d.x0, d.dx, {}};
                r.cells.resize(d.cells.size());
                double acc = 0.0;
                for (std::size_t i = 0; i < d.cells.size(); ++i) {
                    const auto& c = d.cells[i];
                    r.cells[i] = {acc, c[0], c[1] / 2.0, c[2] / 3.0};
                    // quartic term c[3]/4 u^4 is folded into the running constant
                    double u = d.dx;
                    acc += ((c[3] / 4.0 * u + c[2] / 3.0) * u + c[1] / 2.0) * u * u + c[0] * u;
                }
                Profile p(std::move(r));
                double off = p(anchor);
                for (auto& cell : std::get<PiecewisePolyData>(p.data_).cells) cell[0] -= off;
                return p;
            } else if constexpr (std::is_same_v<T, ArnoldiPolyData>) {
                throw std::logic_error("antiderivative: not available for arnoldi basis");
            } else {
                // Bump / BumpDeriv: cumulative integral sampled onto a fine
                // Hermite grid (exact derivative data).
                auto sup = support();
                double lo = sup ? sup->first : anchor - 1.0;
                double hi = sup ? sup->second : anchor + 1.0;
                lo = std::min(lo, anchor);
                hi = std::max(hi, anchor);
                int n = 4096;
                double dx = (hi - lo) / n;
                std::vector<double> vals(static_cast<size_t>(n + 1)), ders(static_cast<size_t>(n + 1));
                // Simpson on each half-step pair
                ders[0] = (*this)(lo);
                vals[0] = 0.0;
                for (int i = 1; i <= n; ++i) {
                    double a = lo + (i - 1) * dx, b = lo + i * dx;
                    double fm = (*this)(0.5 * (a + b));
                    ders[static_cast<size_t>(i)] = (*this)(b);
                    vals[static_cast<size_t>(i)] =
                        vals[static_cast<size_t>(i - 1)] +
                        dx / 6.0 * (ders[static_cast<size_t>(i - 1)] + 4.0 * fm + ders[static_cast<size_t>(i)]);
                }
                Profile p = hermite(lo, dx, vals, ders);
                double off = p(anchor);
                for (auto& cell : std::get<PiecewisePolyData>(p.data_).cells) cell[0] -= off;
                return p;
            }
        },
        data_);
}

Profile Profile::negated() const { return scaled(-1.0); }

Profile Profile::scaled(double s) const {
    return std::visit(
        [&](const auto& d) -> Profile {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) {
                TrigPolyData r = d;
                r.a0 *= s;
                for (auto& c : r.cos_c) c *= s;
                for (auto& c : r.sin_c) c *= s;
                return Profile(std::move(r));
            } else if constexpr (std::is_same_v<T, PolyData>) {
                PolyData r = d;
                for (auto& c : r.c) c *= s;
                return Profile(std::move(r));
            } else if constexpr (std::is_same_v<T, BumpData>) {
                BumpData r = d;
                r.amplitude *= s;
                return Profile(r);
            } else if constexpr (std::is_same_v<T, BumpDerivData>) {
                BumpDerivData r = d;
                r.base.amplitude *= s;
                return Profile(r);
            } else if constexpr (std::is_same_v<T, ArnoldiPolyData>) {
                ArnoldiPolyData r = d;
                for (auto& c : r.coeffs) c *= s;
                return Profile(std::move(r));
            } else {
                PiecewisePolyData r = d;
                for (auto& cell : r.cells)
                    for (auto& c : cell) c *= s;
                return Profile(std::move(r));
            }
        },
        data_);
}

Profile Profile::theta_compressed(int q) const {
    if (q == 1) return *this;
    return std::visit(
        [&](const auto& d) -> Profile {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) {
                TrigPolyData r;
                r.a0 = d.a0;
                r.cos_c.assign(d.cos_c.size() * static_cast<size_t>(q), 0.0);
                r.sin_c.assign(d.sin_c.size() * static_cast<size_t>(q), 0.0);
                for (std::size_t m = 0; m < d.cos_c.size(); ++m) {
                    r.cos_c[(m + 1) * static_cast<size_t>(q) - 1] = d.cos_c[m];
                    r.sin_c[(m + 1) * static_cast<size_t>(q) - 1] = d.sin_c[m];
                }
                return Profile(std::move(r));
            } else if constexpr (std::is_same_v<T, PolyData>) {
                if (d.c.size() == 1) return Profile(d);
                throw std::invalid_argument("theta_compressed: only constant polynomials");
            } else {
                throw std::invalid_argument("theta_compressed: profile kind not periodic");
            }
        },
        data_);
}

double Profile::circle_mean() const {
    if (const auto* t = std::get_if<TrigPolyData>(&data_)) return t->a0;
    // 1024-point midpoint quadrature over one period
    double acc = 0.0;
    for (int i = 0; i < 1024; ++i) acc += (*this)((i + 0.5) / 1024.0);
    return acc / 1024.0;
}

std::optional<std::pair<double, double>> Profile::support() const {
    if (const auto* b = std::get_if<BumpData>(&data_))
        return std::make_pair(b->center - b->r_out, b->center + b->r_out);
    if (const auto* b = std::get_if<BumpDerivData>(&data_))
        return std::make_pair(b->base.center - b->base.r_out, b->base.center + b->base.r_out);
    return std::nullopt;
}

std::string Profile::kind_name() const {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) return "trig";
            else if constexpr (std::is_same_v<T, PolyData>) return "poly";
            else if constexpr (std::is_same_v<T, BumpData>) return "bump";
            else if constexpr (std::is_same_v<T, BumpDerivData>) return "bump_deriv";
            else if constexpr (std::is_same_v<T, ArnoldiPolyData>) return "arnoldi";
            else return "piecewise";
        },
        data_);
}

}  // namespace twistlab
