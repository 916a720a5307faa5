// A uniform evaluable-map interface over twist words, piecewise-affine
// rearrangements, q-lifts and compositions so stages can mix them freely.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "twistlab/maps.hpp"
#include "twistlab/necklace.hpp"

namespace twistlab {

class DynMap;
using DynMapPtr = std::shared_ptr<const DynMap>;

class DynMap {
  public:
    virtual ~DynMap() = default;
    virtual AnnulusPoint apply(const AnnulusPoint& x) const = 0;
    virtual AnnulusPoint apply_inverse(const AnnulusPoint& x) const = 0;
    // an upper bound on the operator norm of the differential (exact for the
    // piecewise-affine maps, sampled finite differences for words)
    virtual double lipschitz_bound() const = 0;
    virtual std::string describe_json() const = 0;
};

DynMapPtr identity_map();
DynMapPtr word_map(MapWord w);
DynMapPtr rotation_map(long long p, long long q);
// the equidistribution shuffle at resolution n (on-the-fly pieces; O(1) eval)
DynMapPtr equidist_map(int n, double eps);
// necklace rearrangement tiled over the Q x Q grid of A0 (Q a multiple of the
// previous denominator); Q = 1 applies the plain torus map on A0
DynMapPtr tile_necklace_map(int layout_n, double layout_eps, std::vector<std::vector<int>> cols,
                            int Q);
// conjugation by (theta, y) -> (q theta, y)
DynMapPtr q_lift_map(DynMapPtr base, int q);
// h1 o h2 o ... o hk (rightmost applied first)
DynMapPtr composite_map(std::vector<DynMapPtr> maps);

DynMapPtr dynmap_from_json(const std::string& text);

// sup over a uniform grid on T x [-L, L] of d(f(x), g(x))
double c0_distance(const DynMap& f, const DynMap& g, int grid_theta, int grid_y, double L);

}  // namespace twistlab
