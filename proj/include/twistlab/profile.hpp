// One-dimensional real profiles: trig polynomials on the circle, polynomials,
// compactly supported smooth plateau bumps, and piecewise cubics.  Profiles
// drive the twist letters (tau in y, v in theta) and the Hamiltonian
// coefficient functions, and are evaluable at real and complex arguments.
#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "twistlab/util.hpp"

namespace twistlab {

using cplx = std::complex<double>;

// f(t) = a0 + sum_m cos_c[m-1] cos(2 pi m t) + sin_c[m-1] sin(2 pi m t)
struct TrigPolyData {
    double a0 = 0.0;
    std::vector<double> cos_c;
    std::vector<double> sin_c;
};

// p(y) = sum_k c[k] y^k
struct PolyData {
    std::vector<double> c;
};

// Plateau bump from the standard e^{-1/t} cutoff: equals `amplitude` on
// |y-center| <= r_in, vanishes identically on |y-center| >= r_out.
struct BumpData {
    double center = 0.0;
    double r_in = 0.0;
    double r_out = 1.0;
    double amplitude = 1.0;
};

// Closed-form derivative of BumpData (odd around the plateau).
struct BumpDerivData {
    BumpData base;
};

// Polynomial in a discretely orthogonalized (Vandermonde-with-Arnoldi) basis:
// p = sum_k coeffs[k] q_k where q_{k+1}(z) = (z q_k(z) - sum_j H(j,k) q_j(z)) / H(k+1,k).
// Keeps degree-60 fits on complex collars well conditioned; coefficients and
// the Hessenberg recurrence are real, so conjugate symmetry is automatic.
struct ArnoldiPolyData {
    int degree = 0;                 // k_max; basis size degree+1
    std::vector<double> hess;       // (degree+1) x degree, column-major
    std::vector<double> coeffs;     // degree+1
};

// Piecewise cubic on a uniform grid over [x0, x0 + n*dx]; cell i holds
// coefficients in the local variable u = x - (x0 + i*dx).  Evaluation clamps
// to the nearest cell outside the grid (profiles are used inside it).
struct PiecewisePolyData {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<std::array<double, 4>> cells;
};

class Profile {
  public:
    using Data = std::variant<TrigPolyData, PolyData, BumpData, BumpDerivData, PiecewisePolyData,
                              ArnoldiPolyData>;

    Profile() : data_(PolyData{{0.0}}) {}
    explicit Profile(Data d) : data_(std::move(d)) {}

    static Profile trig(double a0, std::vector<double> cos_c, std::vector<double> sin_c);
    static Profile poly(std::vector<double> coeffs);
    static Profile zero() { return poly({0.0}); }
    static Profile bump(double center, double r_in, double r_out, double amplitude);
    static Profile bump_deriv(const BumpData& b);
    // natural cubic spline through values on a uniform grid
    static Profile spline(double x0, double dx, const std::vector<double>& values);
    // cubic Hermite from values and derivatives on a uniform grid
    static Profile hermite(double x0, double dx, const std::vector<double>& values,
                           const std::vector<double>& derivs);

    double operator()(double x) const;
    cplx operator()(cplx z) const;
    double deriv(double x) const;

    // Exact derivative profile where representable; Bump falls back to its
    // closed-form derivative kind.  Throws for BumpDeriv.
    Profile derivative_profile() const;
    // Antiderivative with F(anchor) = 0.  TrigPoly requires a0 == 0.
    Profile antiderivative_profile(double anchor) const;

    Profile negated() const;
    Profile scaled(double s) const;
    // v(q*t) for theta-profiles; supported for TrigPoly (mode multiplication)
    // and constants.
    Profile theta_compressed(int q) const;

    // mean over one period / the support; used for the zero-mean invariant
    double circle_mean() const;

    // closed interval outside which the profile vanishes identically, when known
    std::optional<std::pair<double, double>> support() const;

    const Data& data() const { return data_; }
    std::string kind_name() const;

  private:
    Data data_;
};

}  // namespace twistlab
