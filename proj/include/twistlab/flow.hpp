// Hamiltonian fields on the annulus in Fourier-mode form, their symplectic
// gradients, the decomposition into twist-commutator words, and a trusted
// adaptive integrator used as the flow reference.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "twistlab/maps.hpp"
#include "twistlab/profile.hpp"

namespace twistlab {

enum class Normalization { Real2PiM, AnalyticMm };

// H(theta, y) = C(y) + sum_m a_m(y) cos(2 pi m theta) + b_m(y) sin(2 pi m theta)
struct HamiltonianField {
    struct Mode {
        int m = 1;
        Profile a;
        Profile b;
    };

    Profile C = Profile::zero();
    std::vector<Mode> modes;
    Normalization norm = Normalization::Real2PiM;
    double rho0 = 0.1;   // collar half-width entering M_m under AnalyticMm
    double delta = 0.0;  // declared support margin of the coefficients

    double value(double theta, double y) const;
    // X_H = (dH/dy, -dH/dtheta)
    std::array<double, 2> gradient(double theta, double y) const;

    // sup-normalization constant M_m = sup_{T_rho0} |2 pi m exp(2 pi i m z)|
    double analytic_mm(int m) const;
};

std::array<double, 2> symplectic_gradient(const HamiltonianField& H, const AnnulusPoint& x);

// {f, g} = f'(theta) g'(y) for separable f(theta), g(y); returned in mode form
HamiltonianField poisson_bracket(const Profile& f_theta, const Profile& g_y);

// One commutator factor of the splitting: H_j = {f_j, g_j} with
// tau = g', v = -f'.
struct BracketTerm {
    int index = 0;  // paper's j: 2m-1 = cos coefficient, 2m = sin coefficient
    int m = 1;
    Profile f;
    Profile g;
    Profile tau;
    Profile v;
};

std::vector<BracketTerm> bracket_terms(const HamiltonianField& H);

struct DecompositionResult {
    HamiltonianField field;
    bool aliasing_warning = false;
    double aliased_energy_ratio = 0.0;
};

// trapezoidal Fourier coefficients from callable samples on a uniform grid;
// n_theta must be >= 4*N
DecompositionResult fourier_decompose(const std::function<double(double, double)>& H, int n_theta,
                                      int n_y, int N, double delta,
                                      Normalization norm = Normalization::Real2PiM,
                                      double rho0 = 0.1);

// word [T_2N^t, V_2N^t] ... [T_1^t, V_1^t] T_0^{t^2} approximating the time-t^2
// flow of H with O(t^3) error
MapWord commutator_flow_approx(const HamiltonianField& H, double t);

// adaptive Dormand-Prince reference for phi^t_H
AnnulusPoint flow_oracle(const HamiltonianField& H, double t, const AnnulusPoint& x, double tol);

struct RealizeReport {
    MapWord word;
    double sup_error = 0.0;  // against the oracle on the measurement grid
    int splitting_steps = 0;
};

// K copies of commutator_flow_approx(H, 1/sqrt(K)) approximating phi^1_H
RealizeReport realize_time_one(const HamiltonianField& H, int K, int grid_theta = 24,
                               int grid_y = 12);

std::string field_to_text(const HamiltonianField& H);
HamiltonianField field_from_text(const std::string& text);

}  // namespace twistlab
