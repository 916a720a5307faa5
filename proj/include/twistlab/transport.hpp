// Discrete measures on the annulus, pushforwards, empirical measures, and the
// Kantorovich-Wasserstein W1 distance.  The exact solver is a network simplex
// on the bipartite transport graph with integerized costs; the entropic
// solver is a log-domain Sinkhorn with a certified primal-dual gap.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "twistlab/maps.hpp"

namespace twistlab {

struct DiscreteMeasure {
    struct Atom {
        AnnulusPoint point;
        double weight = 0.0;
    };
    std::vector<Atom> atoms;

    double total_mass() const;
    void normalize();
    bool is_normalized(double tol = 1e-12) const;
};

// M equi-spaced, equi-weight atoms on T x {y}
DiscreteMeasure uniform_circle(double y, int atom_count);

// k x k midpoint grid with equal weights on T x (-1,1), standing for Leb_{A0}
DiscreteMeasure lebesgue_a0_grid(int k);

// pushforward through an arbitrary point map
DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<AnnulusPoint(const AnnulusPoint&)>& f);

// pushforward of Leb_{T x {y}} through a word
DiscreteMeasure circle_pushforward(const MapWord& w, double y, int atom_count);

// empirical measure (1/n) sum_{k=1..n} delta_{F^k(x)}
DiscreteMeasure empirical_measure(const MapWord& w, const AnnulusPoint& x, int n);

struct TransportPlan {
    struct Entry {
        int source = 0;
        int target = 0;
        double mass = 0.0;
    };
    std::vector<Entry> entries;
    double cost = 0.0;
};

enum class W1Method { Exact, Entropic };

struct W1Result {
    double value = 0.0;
    // entropic only: value - certified_gap <= exact W1 <= value
    double certified_gap = 0.0;
    double epsilon_reg = 0.0;
    TransportPlan plan;  // exact method only
};

// product of support sizes must stay <= 4e6 for the exact method
W1Result wasserstein1_full(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           W1Method method = W1Method::Exact, bool want_plan = false);

double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    W1Method method = W1Method::Exact);

// brute-force oracle for supports with at most `max_atoms` per side: enumerates
// the spanning-tree vertices of the transport polytope
double wasserstein1_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct TransportInequalityReport {
    double w1 = 0.0;        // d(f_* mu, g_* mu)
    double sup_dist = 0.0;  // max over atoms of d(f(x), g(x))
    bool holds = false;     // w1 <= sup_dist + tol
};

TransportInequalityReport transport_inequality_check(const MapWord& f, const MapWord& g,
                                                     const DiscreteMeasure& mu,
                                                     double tol = 1e-6);

// measures serialize to CSV: theta,y,weight
std::string measure_to_csv(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_csv(const std::string& text);

}  // namespace twistlab
