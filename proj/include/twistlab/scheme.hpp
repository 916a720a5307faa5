// Finite-stage approximation-by-conjugacy runner: builds alpha_n = p_n/q_n and
// the conjugators h_n, assembles F_n = H_n R_{alpha_n} H_n^{-1}, and measures
// the per-stage closeness, periodic-avoidance and equidistribution/separation
// diagnostics.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/dynmap.hpp"
#include "twistlab/transport.hpp"

namespace twistlab {

struct Rational {
    long long p = 0;
    long long q = 1;
    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    // exact angle of the k-th iterate: ((k p) mod q) / q
    double iterate_angle(long long k) const;
};

enum class SchemeMode { Ergodic, Emergence, Analytic };

struct SchemeConfig {
    SchemeMode mode = SchemeMode::Ergodic;
    int stages = 2;
    std::uint64_t seed = 1;
    double L = 2.0;                   // ambient bound for W1 diagnostics
    std::vector<double> eps_seq;      // empty: defaults to 2^{-n-2}
    int circle_atoms = 500;
    int leb_grid = 40;
    int sample_heights = 100;         // P1 circle sample
    int orbit_samples = 6;            // points for the orbit-based P1 check
    int orbit_cap = 800;              // atom cap for the q_n empirical measure
    int p2_points = 5;
    int p2_k_values = 8;
    int p4_grid = 50;
    int p4_max_k = 1000;
    int c0_grid_theta = 40;
    int c0_grid_y = 21;
    int commutation_grid = 200;
    std::vector<long long> alpha_multipliers;  // empty: 1,2,4,...,2^22
    int retry_budget = 3;
    // emergence mode
    int necklace_n = 6;
    double necklace_eps = 0.1;
    int separation_atoms = 1000;
    int max_separation_classes = 12;
    int coloring_seed_attempts = 32;
    // analytic mode
    double analytic_rho = 2.0;
    int analytic_degree = 40;
    int analytic_N = 1;  // collar index offset in K_{n+N}

    double eps_n(int n) const;  // n >= 1
};

struct StageRecord {
    int n = 0;
    std::string mode;
    Rational alpha;
    long long multiplier = 0;

    // conjugator data
    int equidist_n = 0;
    int tile_Q = 0;

    // measured P-diagnostics
    double c0_prev = 0.0;            // P3: trimmed C0(F_n, F_{n-1}) on the grid
    double c0_prev_raw = 0.0;        // raw sup including discontinuity hits
    double c0_exceed_fraction = 0.0;
    double c0_inverse_prev = 0.0;    // same for inverses
    double p2_sup = 0.0;             // sup_k W1(e_k^{F_n}, e_k^{F_{n-1}})
    double p4_min_ratio = 0.0;
    double p4_min_ratio_raw = 0.0;
    double commutation_sup = 0.0;    // h_n vs R_{alpha_{n-1}} commutation
    double orbit_closure = 0.0;      // d(F^{q_n} x, x) max over grid
    double periodicity_defect = 0.0; // q-lift identity residual

    // ergodic diagnostics
    double equid_fraction = 0.0;     // circles within eps_n of Leb_{A0}
    double equid_worst = 0.0;
    double equid_median = 0.0;
    double orbit_equid_worst = 0.0;  // strided q_n-orbit empirical measures
    double cell_diameter = 0.0;

    // emergence diagnostics
    int M_n = 0;
    double eta_n = 0.0;
    double min_separation = 0.0;
    double separation_target = 0.0;  // 2 eta_n
    double p2_emergence = 0.0;       // sup |H_n - H_{n-1}|
    double p2_emergence_budget = 0.0;
    double dh_prev_norm = 0.0;
    std::vector<std::pair<double, double>> segments;  // sampled I_{n,i}

    // analytic diagnostics
    double collar_distance = 0.0;    // sup_{K_rho} |h_n - id|
    double collar_budget = 0.0;
    double p0_collar = 0.0;          // sup_{K_{n+N}} |H_n - H_{n-1}|
    double p0_budget = 0.0;

    std::string to_json() const;
};

struct SchemeState {
    std::vector<DynMapPtr> conjugators;  // h_1 .. h_n
    Rational alpha{0, 1};
    double H_lip = 1.0;
    double last_eta = 4.0;  // eta_{n-1} of the emergence chain (formal at n=0)
    int n = 0;

    AnnulusPoint apply_H(const AnnulusPoint& x) const;
    AnnulusPoint apply_H_inverse(const AnnulusPoint& x) const;
    AnnulusPoint apply_F(const AnnulusPoint& x) const;
    // F^k via the exact rational conjugacy
    AnnulusPoint apply_F_iterate(const AnnulusPoint& x, long long k) const;
    DynMapPtr H_map() const;
};

struct P4Report {
    double min_ratio = 0.0;      // 2%-trimmed minimum (piecewise relaxation)
    double min_ratio_raw = 0.0;  // untrimmed minimum
    bool pass = false;
    long long checked_k = 0;
};

// d(F_n^k x, x) > d(F_prev^k x, x) (1 - 2^{-n}) over the grid and k < q_prev
P4Report verify_P4(const SchemeState& cur, const SchemeState& prev, int n, int grid_points,
                   int max_k);

struct AlphaChoice {
    Rational alpha;
    long long multiplier = 0;
    double c0_dist = 0.0;     // trimmed-quantile C0 distance
    double c0_raw = 0.0;      // raw sup (may see piece-boundary jumps)
    double c0_exceed = 0.0;   // fraction of grid points at or above eps_n
    double c0_inverse = 0.0;
    P4Report p4;
};

// smallest multiplier m with alpha = (m p q + 1) / (m q^2) passing the C0 and
// P4 gates; throws when the candidate list is exhausted
AlphaChoice choose_alpha(const SchemeState& prev, DynMapPtr h_next, int n, double eps_n,
                         const SchemeConfig& cfg);

StageRecord build_stage_ergodic(SchemeState& state, double eps_n, const SchemeConfig& cfg);
StageRecord build_stage_emergence(SchemeState& state, double eps_n, const SchemeConfig& cfg);
// defined in analytic.cpp
StageRecord build_stage_analytic(SchemeState& state, double eps_n, const SchemeConfig& cfg);

struct SchemeResult {
    SchemeConfig config;
    std::vector<StageRecord> stages;
    std::string final_map_json;  // {"H": ..., "alpha": {p,q}} of the last stage
    SchemeState state;
};

SchemeResult run_scheme(const SchemeConfig& cfg);

// (re)build the final F_n evaluator from its serialized form
SchemeState scheme_state_from_json(const std::string& text);
std::string scheme_state_to_json(const SchemeState& st);

}  // namespace twistlab
