#include "twistlab/maps.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace twistlab {

using json = nlohmann::ordered_json;

double annulus_dist(const AnnulusPoint& a, const AnnulusPoint& b) {
    double dt = circle_dist(a.theta, b.theta);
    double dy = a.y - b.y;
    return std::sqrt(dt * dt + dy * dy);
}

double theta_diff(double a, double b) {
    double d = mod1(a) - mod1(b);
    if (d >= 0.5) d -= 1.0;
    if (d < -0.5) d += 1.0;
    return d;
}

PrimitiveMap invert_letter(const PrimitiveMap& m) {
    return std::visit(
        [](const auto& l) -> PrimitiveMap {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Rotation>) return Rotation{-l.alpha};
            else if constexpr (std::is_same_v<T, HTwist>) return HTwist{l.tau.negated()};
            else return VTwist{l.v.negated()};
        },
        m);
}

MapWord MapWord::v_twist(Profile v) {
    if (std::fabs(v.circle_mean()) > 1e-9)
        throw std::invalid_argument("v_twist: profile must have zero mean");
    return MapWord({VTwist{std::move(v)}});
}

namespace {

struct DDPoint {
    DD theta;
    DD y;
};

void apply_letter(const PrimitiveMap& m, DDPoint& p, std::size_t idx) {
    std::visit(
        [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Rotation>) {
                p.theta = dd_mod1(dd_add(p.theta, l.alpha));
            } else if constexpr (std::is_same_v<T, HTwist>) {
                double shift = l.tau(dd_value(p.y));
                if (!std::isfinite(shift))
                    throw std::runtime_error("eval: non-finite horizontal shift at letter " +
                                             std::to_string(idx));
                if (shift != 0.0) p.theta = dd_mod1(dd_add(p.theta, shift));
            } else {
                double shift = l.v(dd_value(p.theta));
                if (!std::isfinite(shift))
                    throw std::runtime_error("eval: non-finite vertical shift at letter " +
                                             std::to_string(idx));
                if (shift != 0.0) p.y = dd_add(p.y, shift);
            }
        },
        m);
}

}  // namespace

AnnulusPoint MapWord::eval(const AnnulusPoint& x) const {
    DDPoint p{dd_mod1(dd_from(x.theta)), dd_from(x.y)};
    for (std::size_t i = letters_.size(); i-- > 0;) apply_letter(letters_[i], p, i);
    return {mod1(dd_value(p.theta)), dd_value(p.y)};
}

CPoint MapWord::eval_complex(const CPoint& z) const {
    CPoint p{cplx(mod1(z.theta.real()), z.theta.imag()), z.y};
    for (std::size_t i = letters_.size(); i-- > 0;) {
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Rotation>) {
                    p.theta += l.alpha;
                } else if constexpr (std::is_same_v<T, HTwist>) {
                    p.theta += l.tau(p.y);
                } else {
                    p.y += l.v(p.theta);
                }
                p.theta = cplx(mod1(p.theta.real()), p.theta.imag());
            },
            letters_[i]);
    }
    return p;
}

MapWord MapWord::inverted() const {
    std::vector<PrimitiveMap> out;
    out.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
        out.push_back(invert_letter(*it));
    std::string l = label_.empty() ? std::string() : label_ + "^-1";
    return MapWord(std::move(out), std::move(l));
}

MapWord compose(const MapWord& a, const MapWord& b) {
    std::vector<PrimitiveMap> out = a.letters();
    out.insert(out.end(), b.letters().begin(), b.letters().end());
    return MapWord(std::move(out));
}

MapWord compose(const std::vector<MapWord>& ws) {
    MapWord acc;
    std::vector<PrimitiveMap> out;
    for (const auto& w : ws) out.insert(out.end(), w.letters().begin(), w.letters().end());
    return MapWord(std::move(out));
}

MapWord commutator(const MapWord& a, const MapWord& b) {
    return compose(compose(a.inverted(), b.inverted()), compose(a, b));
}

MapWord commutator(const PrimitiveMap& a, const PrimitiveMap& b) {
    return commutator(MapWord({a}), MapWord({b}));
}

MapWord q_lift(const MapWord& w, int q) {
    if (q <= 0) throw std::invalid_argument("q_lift: q must be a positive integer");
    if (q == 1) return w;
    std::vector<PrimitiveMap> out;
    out.reserve(w.size());
    for (const auto& m : w.letters()) {
        out.push_back(std::visit(
            [&](const auto& l) -> PrimitiveMap {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Rotation>) {
                    return Rotation{l.alpha / q};
                } else if constexpr (std::is_same_v<T, HTwist>) {
                    return HTwist{l.tau.scaled(1.0 / q)};
                } else {
                    return VTwist{l.v.theta_compressed(q)};
                }
            },
            m));
    }
    std::string label = w.label().empty() ? std::string() : w.label() + "_lift" + std::to_string(q);
    return MapWord(std::move(out), std::move(label));
}

std::array<std::array<double, 2>, 2> jacobian(const MapWord& w, const AnnulusPoint& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("jacobian: h must be positive");
    AnnulusPoint tp = w.eval(AnnulusPoint{mod1(x.theta + h), x.y});
    AnnulusPoint tm = w.eval(AnnulusPoint{mod1(x.theta - h), x.y});
    AnnulusPoint yp = w.eval(AnnulusPoint{x.theta, x.y + h});
    AnnulusPoint ym = w.eval(AnnulusPoint{x.theta, x.y - h});
    std::array<std::array<double, 2>, 2> j;
    j[0][0] = theta_diff(tp.theta, tm.theta) / (2.0 * h);
    j[0][1] = theta_diff(yp.theta, ym.theta) / (2.0 * h);
    j[1][0] = (tp.y - tm.y) / (2.0 * h);
    j[1][1] = (yp.y - ym.y) / (2.0 * h);
    return j;
}

double jacobian_det(const std::array<std::array<double, 2>, 2>& j) {
    return j[0][0] * j[1][1] - j[0][1] * j[1][0];
}

// ---- serialization ----------------------------------------------------------

namespace {

json profile_to_json(const Profile& p) {
    json j;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrigPolyData>) {
                j["kind"] = "trig";
                j["a0"] = d.a0;
                j["cos"] = d.cos_c;
                j["sin"] = d.sin_c;
            } else if constexpr (std::is_same_v<T, PolyData>) {
                j["kind"] = "poly";
                j["coeffs"] = d.c;
            } else if constexpr (std::is_same_v<T, BumpData>) {
                j["kind"] = "bump";
                j["center"] = d.center;
                j["r_in"] = d.r_in;
                j["r_out"] = d.r_out;
                j["amplitude"] = d.amplitude;
            } else if constexpr (std::is_same_v<T, BumpDerivData>) {
                j["kind"] = "bump_deriv";
                j["center"] = d.base.center;
                j["r_in"] = d.base.r_in;
                j["r_out"] = d.base.r_out;
                j["amplitude"] = d.base.amplitude;
            } else if constexpr (std::is_same_v<T, ArnoldiPolyData>) {
                j["kind"] = "arnoldi";
                j["degree"] = d.degree;
                j["hess"] = d.hess;
                j["coeffs"] = d.coeffs;
            } else {
                j["kind"] = "piecewise";
                j["x0"] = d.x0;
                j["dx"] = d.dx;
                json cells = json::array();
                for (const auto& c : d.cells) cells.push_back({c[0], c[1], c[2], c[3]});
                j["cells"] = std::move(cells);
            }
        },
        p.data());
    return j;
}

Profile profile_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "trig") {
        return Profile::trig(j.at("a0").get<double>(), j.at("cos").get<std::vector<double>>(),
                             j.at("sin").get<std::vector<double>>());
    }
    if (kind == "poly") return Profile::poly(j.at("coeffs").get<std::vector<double>>());
    if (kind == "bump")
        return Profile::bump(j.at("center").get<double>(), j.at("r_in").get<double>(),
                             j.at("r_out").get<double>(), j.at("amplitude").get<double>());
    if (kind == "bump_deriv")
        return Profile::bump_deriv(BumpData{j.at("center").get<double>(), j.at("r_in").get<double>(),
                                            j.at("r_out").get<double>(),
                                            j.at("amplitude").get<double>()});
    if (kind == "arnoldi") {
        ArnoldiPolyData d;
        d.degree = j.at("degree").get<int>();
        d.hess = j.at("hess").get<std::vector<double>>();
        d.coeffs = j.at("coeffs").get<std::vector<double>>();
        return Profile(std::move(d));
    }
    if (kind == "piecewise") {
        PiecewisePolyData d;
        d.x0 = j.at("x0").get<double>();
        d.dx = j.at("dx").get<double>();
        for (const auto& c : j.at("cells"))
            d.cells.push_back({c[0].get<double>(), c[1].get<double>(), c[2].get<double>(),
                               c[3].get<double>()});
        return Profile(std::move(d));
    }
    throw std::runtime_error("unknown profile kind: " + kind);
}

}  // namespace

std::string word_to_jsonl(const MapWord& w) {
    std::ostringstream out;
    json header;
    header["word"] = true;
    header["label"] = w.label();
    header["letters"] = w.size();
    out << header.dump() << "\n";
    for (const auto& m : w.letters()) {
        json j;
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Rotation>) {
                    j["kind"] = "rotation";
                    j["alpha"] = l.alpha;
                } else if constexpr (std::is_same_v<T, HTwist>) {
                    j["kind"] = "htwist";
                    j["tau"] = profile_to_json(l.tau);
                } else {
                    j["kind"] = "vtwist";
                    j["v"] = profile_to_json(l.v);
                }
            },
            m);
        out << j.dump() << "\n";
    }
    return out.str();
}

MapWord word_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<PrimitiveMap> letters;
    std::string label;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (!have_header && j.contains("word")) {
            label = j.value("label", std::string());
            have_header = true;
            continue;
        }
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "rotation") letters.push_back(Rotation{j.at("alpha").get<double>()});
        else if (kind == "htwist") letters.push_back(HTwist{profile_from_json(j.at("tau"))});
        else if (kind == "vtwist") letters.push_back(VTwist{profile_from_json(j.at("v"))});
        else throw std::runtime_error("unknown letter kind: " + kind);
    }
    return MapWord(std::move(letters), std::move(label));
}

}  // namespace twistlab
