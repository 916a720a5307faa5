// Exact algebra of annulus symplectomorphism words built from rotations and
// horizontal/vertical twists.  Letters are exactly invertible; words evaluate
// right-to-left in compensated arithmetic so inverse letters cancel bitwise.
#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "twistlab/profile.hpp"
#include "twistlab/util.hpp"

namespace twistlab {

struct AnnulusPoint {
    double theta = 0.0;  // in [0,1)
    double y = 0.0;
};

// metric on A = T x R: sqrt(circle_dist^2 + dy^2)
double annulus_dist(const AnnulusPoint& a, const AnnulusPoint& b);

// signed theta difference reduced to [-1/2, 1/2)
double theta_diff(double a, double b);

struct Rotation {
    double alpha = 0.0;
};

struct HTwist {
    Profile tau;  // shift in theta as a function of y
};

struct VTwist {
    Profile v;  // shift in y as a function of theta; zero mean
};

using PrimitiveMap = std::variant<Rotation, HTwist, VTwist>;

PrimitiveMap invert_letter(const PrimitiveMap& m);

struct CPoint {
    cplx theta;
    cplx y;
};

class MapWord {
  public:
    MapWord() = default;
    explicit MapWord(std::vector<PrimitiveMap> letters, std::string label = "")
        : letters_(std::move(letters)), label_(std::move(label)) {}

    static MapWord identity() { return MapWord(); }
    static MapWord rotation(double alpha) { return MapWord({Rotation{alpha}}); }
    static MapWord h_twist(Profile tau) { return MapWord({HTwist{std::move(tau)}}); }
    static MapWord v_twist(Profile v);

    // letters in notation order: front() applied last
    const std::vector<PrimitiveMap>& letters() const { return letters_; }
    const std::string& label() const { return label_; }
    MapWord with_label(std::string l) const { return MapWord(letters_, std::move(l)); }
    std::size_t size() const { return letters_.size(); }

    AnnulusPoint eval(const AnnulusPoint& x) const;
    CPoint eval_complex(const CPoint& z) const;

    MapWord inverted() const;

  private:
    std::vector<PrimitiveMap> letters_;
    std::string label_;
};

// A o B (apply B first)
MapWord compose(const MapWord& a, const MapWord& b);
MapWord compose(const std::vector<MapWord>& ws);

// [a, b] = a^-1 b^-1 a b (apply b first)
MapWord commutator(const MapWord& a, const MapWord& b);
MapWord commutator(const PrimitiveMap& a, const PrimitiveMap& b);

// conjugation by psi_q : (theta, y) -> (q theta, y); the result is
// (1/q, 0)-periodic.  Rotations lift to alpha/q, horizontal twists to tau/q,
// vertical twists to v(q theta).
MapWord q_lift(const MapWord& w, int q);

// central-difference Jacobian; determinant should be 1 up to O(h^2)
std::array<std::array<double, 2>, 2> jacobian(const MapWord& w, const AnnulusPoint& x, double h);

double jacobian_det(const std::array<std::array<double, 2>, 2>& j);

// JSON-lines serialization, one letter per line; deterministic round trip.
std::string word_to_jsonl(const MapWord& w);
MapWord word_from_jsonl(const std::string& text);

}  // namespace twistlab
