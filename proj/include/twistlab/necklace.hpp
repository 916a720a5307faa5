// Balanced random codes and the necklace coloring check, the pearl/case box
// layout with its quantitative constants, and piecewise-affine area-preserving
// rearrangements standing in for the smooth transport step.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/maps.hpp"
#include "twistlab/rng.hpp"

namespace twistlab {

// binary string of length N with exactly N/2 ones, packed into 64-bit words
struct BalancedCode {
    int n_bits = 0;
    std::vector<std::uint64_t> words;

    bool get(int i) const { return (words[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1ULL; }
    void set(int i) { words[static_cast<size_t>(i) >> 6] |= 1ULL << (i & 63); }
    void clear(int i) { words[static_cast<size_t>(i) >> 6] &= ~(1ULL << (i & 63)); }
    int popcount() const;
    int and_popcount(const BalancedCode& other) const;
};

BalancedCode make_code(int n_bits);

// M independent uniform draws from the balanced-code family (shuffle based)
std::vector<BalancedCode> sample_codes(int N, int M, std::uint64_t seed);

// Balanced variant: each color is used exactly M*(N/2)/N times overall (up to
// rounding), sampled as a random filling of the usage multiset with distinct
// colors per row.  Needed at desk scale where per-case capacity leaves no
// slack for binomial fluctuation.
std::vector<BalancedCode> sample_codes_balanced(int N, int M, std::uint64_t seed);

// color matrix: column j lists the support of code j in increasing order
struct Coloring {
    int n_colors = 0;                     // N
    int pearls = 0;                       // N/2 rows
    std::vector<std::vector<int>> cols;   // M columns
    std::vector<BalancedCode> codes;
};

Coloring coloring_from_codes(int N, const std::vector<BalancedCode>& codes);

struct ColoringReport {
    std::vector<int> usage;              // per-color counts
    int max_usage = 0;
    double usage_threshold = 0.0;        // M(1+eps)/2, the pass/fail gate
    double usage_threshold_paper = 0.0;  // M(1+eps^3/n^2)/2, reported
    bool property1 = false;
    int max_agreement = 0;               // max_{j != j'} popcount(f_j & f_j')
    double agreement_fraction = 0.0;     // (2/N) * max_agreement
    bool property2 = false;              // fraction < 3/4
    bool pass = false;
};

ColoringReport verify_coloring(const Coloring& c, int n, double eps);

struct BernsteinReport {
    double p0 = 0.0;           // per-color usage tail, slack eps
    double p = 0.0;            // per-pair agreement tail <= sqrt(2N) exp(-N/10)
    double pair_term = 0.0;    // M^2 p / 2
    double code_term = 0.0;    // N p0
    double total = 0.0;
};

BernsteinReport bernstein_bounds(int N, int M, double eps);

// box layout of the necklace lemma on T x R/2Z
struct NecklaceLayout {
    int n = 0;
    int N = 0;          // 2 n^2
    int M = 0;          // floor((2N)^{-1/4} e^{N/20})
    double eps = 0.0;
    double eta = 0.0;   // eps^2 / (5n)
    bool exp_bound_holds = false;  // M >= exp(eta^{-2+eps}) (asymptotic; reported)

    double pearl_width = 0.0;      // theta-extent of B_{i,j}
    double pearl_height = 0.0;     // Leb J_{eps,j}
    double pearl_volume = 0.0;
    double case_side = 0.0;        // (1 - eps^2)/n
    double case_volume = 0.0;
    double case_gap = 0.0;         // eps^2 / n^2 per coordinate family... see tests

    // segments J_{eps,j} in (0,2)
    struct Segment {
        double lo = 0.0, hi = 0.0;
    };
    std::vector<Segment> segments;

    // pearl box (i = 0..N/2-1, j = 0..M-1)
    struct Box {
        double th_lo = 0.0, th_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    };
    Box pearl(int i, int j) const;
    Box case_box(int k) const;  // k = 0..N-1
    std::pair<double, double> case_anchor(int k) const;  // z_k
};

// throws when eps violates (1-eps) < (1-eps^2)^2 or the separation inequality
NecklaceLayout build_layout(int n, double eps);

// area-preserving piecewise-affine map: det-1 affine on each source box,
// identity elsewhere; the inverse acts on the target boxes
class Rearrangement {
  public:
    struct Piece {
        // axis-aligned source and target rectangles; the affine map scales
        // (sx, sy) with sx * sy = 1 and translates
        double s_th_lo, s_th_hi, s_y_lo, s_y_hi;
        double t_th_lo, t_th_hi, t_y_lo, t_y_hi;
    };

    Rearrangement() = default;
    explicit Rearrangement(std::vector<Piece> pieces, double y_period = 0.0);

    AnnulusPoint apply(const AnnulusPoint& x) const;
    AnnulusPoint apply_inverse(const AnnulusPoint& x) const;

    const std::vector<Piece>& pieces() const { return pieces_; }
    double y_period() const { return y_period_; }
    bool covers_domain() const { return covers_domain_; }
    void set_covers_domain(bool b) { covers_domain_ = b; }

    double max_piece_scale() const;  // Lipschitz bound over pieces (>= 1)

  private:
    std::vector<Piece> pieces_;
    std::vector<std::size_t> order_;  // pieces sorted by source theta
    double y_period_ = 0.0;           // 2 for the torus constructions, 0 = none
    bool covers_domain_ = false;      // sources partition the band (bijection)
    const Piece* find_source(double th, double y) const;
    const Piece* find_target(double th, double y) const;
    std::vector<std::size_t> torder_;
    double max_src_w_ = 0.0;
    double max_tgt_w_ = 0.0;
};

// the necklace map h: pearl B_{i,j} -> a dedicated horizontal sub-strip of the
// case of color C(i,j); throws on per-case capacity violation
Rearrangement build_rearrangement(const NecklaceLayout& layout, const Coloring& coloring);

// Same pearl pieces plus a det-1 rectangle exchange of the complement, making
// h an exact bijection of the torus; identity bands are kept around
// {0} x fiber (width of the pearl gap) and around base x {0} (the case-frame
// inset).  The stage runner needs the bijection so conjugated dynamics stay
// close to the previous stage away from piece boundaries.
Rearrangement build_rearrangement_complete(const NecklaceLayout& layout,
                                           const Coloring& coloring);

// The equidistribution map of the classic scheme: an exact bijection of
// T x [-1,1] sending column k's margin-framed strip onto cell k of the n x n
// grid piece by piece (five det-1 affine pieces per column).
Rearrangement build_equidistribution_rearrangement(int n, double eps);

// image-cell diameter bound sqrt(5)/n claimed by the construction
double equidistribution_cell_diameter(int n, double eps);

// the five det-1 pieces of column k; shared by the materialized builder above
// and the on-the-fly map used inside the stage runner at large n
std::array<Rearrangement::Piece, 5> equidist_column_pieces(int n, double eps, int k);

std::string layout_to_csv(const NecklaceLayout& l);
std::string coloring_to_csv(const Coloring& c);

}  // namespace twistlab
