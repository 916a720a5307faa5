// Constrained polynomial fitting on complex collars (accurate on a real
// window, uniformly small on the off-band boxes), complex evaluation of twist
// words, and the quantitative collar-composition bounds.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "twistlab/lp.hpp"
#include "twistlab/maps.hpp"

namespace twistlab {

// Discretizations of T_rho = T + i[-rho, rho], Q_rho = ([-rho,-1] u [1,rho])
// + i[-rho,rho], their eps-fattenings, and the real fitting window N.
struct CollarGrid {
    double rho = 2.0;
    double eps = 0.1;
    double window_lo = -0.9;
    double window_hi = 0.9;
    int nodes_per_side = 64;

    std::vector<double> window;        // fitting window grid
    std::vector<double> window_fine;   // 4x refined
    std::vector<cplx> q_fit;           // Q_{rho,eps} boundary (constraints)
    std::vector<cplx> q_coarse;        // Q_rho boundary at base resolution
    std::vector<cplx> q_fine;          // Q_rho boundary 4x refined
    std::vector<cplx> t_grid;          // T_rho sample lines
    std::vector<cplx> t_fine;
};

CollarGrid make_collar_grid(double rho, double eps, int nodes_per_side = 64,
                            double window_lo = -0.9, double window_hi = 0.9);

struct RungeFitReport {
    Profile profile;  // Arnoldi-basis polynomial, real coefficients
    int degree = 0;
    double bound = 0.0;
    bool solved = false;
    double window_err = 0.0;          // on the fitting grid
    double window_err_refined = 0.0;  // on the 4x validation grid
    double collar_sup_coarse = 0.0;   // on Q_rho
    double collar_sup_refined = 0.0;
    double collar_sup_fattened = 0.0; // on Q_{rho,eps}
};

// minimize the window sup-error subject to |p| <= bound on the fattened
// collar grid, as an LP over discretized sup norms (16-gon for the modulus)
RungeFitReport runge_fit(const Profile& target, const CollarGrid& grid, double bound, int degree);

// sup over the K_rho product grid of |h(z) - z| under complex evaluation
double collar_distance(const MapWord& w, const CollarGrid& grid, bool fattened = false);

struct CommutatorCollarReport {
    double lhs = 0.0;       // sup_{K_{rho,eps'}} |[V,T] - id|
    double rhs = 0.0;       // 1 / rho_k'
    double rho_k_prime = 0.0;
    bool holds = false;     // lhs <= rhs * (1 + slack)
};

// Collar bound for the commutator of V in V^w_{rho,eps} and T in
// T^w_{rho_k,eps}: requires eps > eps' + 2/rho and rho_k > rho.
CommutatorCollarReport commutator_collar_bound(const MapWord& V, const MapWord& T, double rho,
                                               double rho_k, double eps, double eps_prime,
                                               int nodes = 48, double slack = 0.05);

struct CompositionStabilityReport {
    std::vector<double> word_distances;     // sup_{K_{rho,eps'}} |F_k - id|
    std::vector<double> budgets;            // 1 / rho_k'
    std::vector<double> partial_distances;  // sup_{K_rho} |F_1...F_k - id|
    bool budgets_ok = false;
    bool composed_ok = false;               // final < 1/rho
};

CompositionStabilityReport composition_stability(const std::vector<MapWord>& words, double rho,
                                                 double eps_prime, int nodes = 40);

struct PeriodizedFit {
    MapWord word;  // (1/q,0)-periodic entire word
    std::vector<RungeFitReport> letter_reports;
    double periodicity_defect = 0.0;
    double quotient_collar_distance = 0.0;  // of the fitted quotient word
};

// Fit the horizontal-twist letters of a smooth quotient word by collar-small
// entire profiles and pull back through the q-cover; vertical trig letters
// pass through (they are already entire) with their modes multiplied.
PeriodizedFit periodized_fit(const MapWord& quotient_word, int q, const CollarGrid& grid,
                             double bound, int degree);

}  // namespace twistlab
