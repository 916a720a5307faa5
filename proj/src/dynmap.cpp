#include "twistlab/dynmap.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace twistlab {

using json = nlohmann::ordered_json;

namespace {

double clamp_into(double v, double lo, double hi) {
    if (v < lo) return lo;
    if (v >= hi) return std::nextafter(hi, lo);
    return v;
}

class IdentityMap final : public DynMap {
  public:
    AnnulusPoint apply(const AnnulusPoint& x) const override { return {mod1(x.theta), x.y}; }
    AnnulusPoint apply_inverse(const AnnulusPoint& x) const override {
        return {mod1(x.theta), x.y};
    }
    double lipschitz_bound() const override { return 1.0; }
    std::string describe_json() const override {
        json j;
        j["kind"] = "identity";
        return j.dump();
    }
};

class WordMap final : public DynMap {
  public:
    explicit WordMap(MapWord w) : word_(std::move(w)), inv_(word_.inverted()) {}

    AnnulusPoint apply(const AnnulusPoint& x) const override { return word_.eval(x); }
    AnnulusPoint apply_inverse(const AnnulusPoint& x) const override { return inv_.eval(x); }

    double lipschitz_bound() const override {
        // sampled finite-difference operator norm with a 20% safety margin
        double worst = 0.0;
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                AnnulusPoint x{(i + 0.5) / 16.0, -1.4 + 2.8 * j / 15.0};
                auto m = jacobian(word_, x, 1e-6);
                double n1 = std::fabs(m[0][0]) + std::fabs(m[0][1]);
                double n2 = std::fabs(m[1][0]) + std::fabs(m[1][1]);
                worst = std::max(worst, std::max(n1, n2));
            }
        return 1.2 * std::max(1.0, worst);
    }

    std::string describe_json() const override {
        json j;
        j["kind"] = "word";
        j["jsonl"] = word_to_jsonl(word_);
        return j.dump();
    }

    const MapWord& word() const { return word_; }

  private:
    MapWord word_;
    MapWord inv_;
};

class RotationDyn final : public DynMap {
  public:
    RotationDyn(long long p, long long q) : p_(p), q_(q) {}
    AnnulusPoint apply(const AnnulusPoint& x) const override {
        return {mod1(x.theta + static_cast<double>(p_) / static_cast<double>(q_)), x.y};
    }
    AnnulusPoint apply_inverse(const AnnulusPoint& x) const override {
        return {mod1(x.theta - static_cast<double>(p_) / static_cast<double>(q_)), x.y};
    }
    double lipschitz_bound() const override { return 1.0; }
    std::string describe_json() const override {
        json j;
        j["kind"] = "rotation";
        j["p"] = p_;
        j["q"] = q_;
        return j.dump();
    }

  private:
    long long p_, q_;
};

class EquidistMap final : public DynMap {
  public:
    EquidistMap(int n, double eps) : n_(n), eps_(eps), N_(n * n) {}

    AnnulusPoint apply(const AnnulusPoint& x) const override {
        double th = mod1(x.theta);
        if (x.y < -1.0 || x.y >= 1.0) return {th, x.y};
        int k = std::min(N_ - 1, static_cast<int>(std::floor(th * N_)));
        auto cps = equidist_column_pieces(n_, eps_, k);
        for (const auto& p : cps) {
            if (th >= p.s_th_lo && th < p.s_th_hi && x.y >= p.s_y_lo && x.y < p.s_y_hi) {
                double sx = (p.t_th_hi - p.t_th_lo) / (p.s_th_hi - p.s_th_lo);
                double sy = (p.t_y_hi - p.t_y_lo) / (p.s_y_hi - p.s_y_lo);
                return {mod1(clamp_into(p.t_th_lo + (th - p.s_th_lo) * sx, p.t_th_lo, p.t_th_hi)),
                        clamp_into(p.t_y_lo + (x.y - p.s_y_lo) * sy, p.t_y_lo, p.t_y_hi)};
            }
        }
        return {th, x.y};
    }

    AnnulusPoint apply_inverse(const AnnulusPoint& x) const override {
        double th = mod1(x.theta);
        if (x.y < -1.0 || x.y >= 1.0) return {th, x.y};
        int cx = std::min(n_ - 1, static_cast<int>(std::floor(th * n_)));
        int cy = std::min(n_ - 1, static_cast<int>(std::floor((x.y + 1.0) * n_ / 2.0)));
        int k = cx + cy * n_;
        auto cps = equidist_column_pieces(n_, eps_, k);
        for (const auto& p : cps) {
            if (th >= p.t_th_lo && th < p.t_th_hi && x.y >= p.t_y_lo && x.y < p.t_y_hi) {
                double sx = (p.s_th_hi - p.s_th_lo) / (p.t_th_hi - p.t_th_lo);
                double sy = (p.s_y_hi - p.s_y_lo) / (p.t_y_hi - p.t_y_lo);
                return {mod1(clamp_into(p.s_th_lo + (th - p.t_th_lo) * sx, p.s_th_lo, p.s_th_hi)),
                        clamp_into(p.s_y_lo + (x.y - p.t_y_lo) * sy, p.s_y_lo, p.s_y_hi)};
            }
        }
        return {th, x.y};
    }

    double lipschitz_bound() const override { return static_cast<double>(n_); }

    std::string describe_json() const override {
        json j;
        j["kind"] = "equidist";
        j["n"] = n_;
        j["eps"] = eps_;
        return j.dump();
    }

  private:
    int n_;
    double eps_;
    int N_;
};

class TileNecklaceMap final : public DynMap {
  public:
    TileNecklaceMap(int layout_n, double layout_eps, std::vector<std::vector<int>> cols, int Q)
        : layout_n_(layout_n), layout_eps_(layout_eps), cols_(std::move(cols)), Q_(Q) {
        NecklaceLayout l = build_layout(layout_n_, layout_eps_);
        Coloring c;
        c.n_colors = l.N;
        c.pearls = l.N / 2;
        c.cols = cols_;
        c.codes.reserve(cols_.size());
        for (const auto& col : cols_) {
            BalancedCode code = make_code(l.N);
            for (int i : col) code.set(i);
            c.codes.push_back(std::move(code));
        }
        rearr_ = build_rearrangement_complete(l, c);
    }

    AnnulusPoint apply(const AnnulusPoint& x) const override { return tile_apply(x, false); }
    AnnulusPoint apply_inverse(const AnnulusPoint& x) const override {
        return tile_apply(x, true);
    }

    double lipschitz_bound() const override { return rearr_.max_piece_scale(); }

    std::string describe_json() const override {
        json j;
        j["kind"] = "tile_necklace";
        j["layout_n"] = layout_n_;
        j["layout_eps"] = layout_eps_;
        j["Q"] = Q_;
        j["cols"] = cols_;
        return j.dump();
    }

  private:
    AnnulusPoint tile_apply(const AnnulusPoint& x, bool inverse) const {
        double th = mod1(x.theta);
        if (x.y <= -1.0 || x.y >= 1.0) return {th, x.y};
        int k = std::min(Q_ - 1, static_cast<int>(std::floor(th * Q_)));
        int l = std::min(Q_ - 1, static_cast<int>(std::floor((x.y + 1.0) * Q_ / 2.0)));
        double u = th * Q_ - k;
        double w = Q_ * x.y + Q_ - 2.0 * l;
        AnnulusPoint inner{u, w};
        AnnulusPoint out = inverse ? rearr_.apply_inverse(inner) : rearr_.apply(inner);
        return {mod1((k + mod1(out.theta)) / Q_), (out.y - Q_ + 2.0 * l) / Q_};
    }

    int layout_n_;
    double layout_eps_;
    std::vector<std::vector<int>> cols_;
    int Q_;
    Rearrangement rearr_;
};

class QLiftMap final : public DynMap {
  public:
    QLiftMap(DynMapPtr base, int q) : base_(std::move(base)), q_(q) {
        if (q_ < 1) throw std::invalid_argument("q_lift_map: q >= 1");
    }

    AnnulusPoint apply(const AnnulusPoint& x) const override { return lift(x, false); }
    AnnulusPoint apply_inverse(const AnnulusPoint& x) const override { return lift(x, true); }

    double lipschitz_bound() const override {
        // our lifted maps are axis-diagonal piecewise-affines, for which the
        // conjugation by (q theta, y) preserves the operator norm
        return base_->lipschitz_bound();
    }

    std::string describe_json() const override {
        json j;
        j["kind"] = "qlift";
        j["q"] = q_;
        j["base"] = json::parse(base_->describe_json());
        return j.dump();
    }

  private:
    AnnulusPoint lift(const AnnulusPoint& x, bool inverse) const {
        double th = mod1(x.theta);
        double scaled = th * q_;
        double c = std::floor(scaled);
        if (c >= q_) c = q_ - 1;
        AnnulusPoint inner{scaled - c, x.y};
        AnnulusPoint out = inverse ? base_->apply_inverse(inner) : base_->apply(inner);
        return {mod1((c + mod1(out.theta)) / q_), out.y};
    }

    DynMapPtr base_;
    int q_;
};

class CompositeMap final : public DynMap {
  public:
    explicit CompositeMap(std::vector<DynMapPtr> maps) : maps_(std::move(maps)) {}

    AnnulusPoint apply(const AnnulusPoint& x) const override {
        AnnulusPoint p = x;
        for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) p = (*it)->apply(p);
        return p;
    }
    AnnulusPoint apply_inverse(const AnnulusPoint& x) const override {
        AnnulusPoint p = x;
        for (const auto& m : maps_) p = m->apply_inverse(p);
        return p;
    }
    double lipschitz_bound() const override {
        double l = 1.0;
        for (const auto& m : maps_) l *= m->lipschitz_bound();
        return l;
    }
    std::string describe_json() const override {
        json j;
        j["kind"] = "composite";
        json parts = json::array();
        for (const auto& m : maps_) parts.push_back(json::parse(m->describe_json()));
        j["maps"] = std::move(parts);
        return j.dump();
    }

  private:
    std::vector<DynMapPtr> maps_;
};

}  // namespace

DynMapPtr identity_map() { return std::make_shared<IdentityMap>(); }
DynMapPtr word_map(MapWord w) { return std::make_shared<WordMap>(std::move(w)); }
DynMapPtr rotation_map(long long p, long long q) { return std::make_shared<RotationDyn>(p, q); }
DynMapPtr equidist_map(int n, double eps) { return std::make_shared<EquidistMap>(n, eps); }
DynMapPtr tile_necklace_map(int layout_n, double layout_eps, std::vector<std::vector<int>> cols,
                            int Q) {
    return std::make_shared<TileNecklaceMap>(layout_n, layout_eps, std::move(cols), Q);
}
DynMapPtr q_lift_map(DynMapPtr base, int q) {
    if (q == 1) return base;
    return std::make_shared<QLiftMap>(std::move(base), q);
}
DynMapPtr composite_map(std::vector<DynMapPtr> maps) {
    return std::make_shared<CompositeMap>(std::move(maps));
}

namespace {

DynMapPtr from_json_obj(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return identity_map();
    if (kind == "word") return word_map(word_from_jsonl(j.at("jsonl").get<std::string>()));
    if (kind == "rotation")
        return rotation_map(j.at("p").get<long long>(), j.at("q").get<long long>());
    if (kind == "equidist")
        return equidist_map(j.at("n").get<int>(), j.at("eps").get<double>());
    if (kind == "tile_necklace")
        return tile_necklace_map(j.at("layout_n").get<int>(), j.at("layout_eps").get<double>(),
                                 j.at("cols").get<std::vector<std::vector<int>>>(),
                                 j.at("Q").get<int>());
    if (kind == "qlift")
        return q_lift_map(from_json_obj(j.at("base")), j.at("q").get<int>());
    if (kind == "composite") {
        std::vector<DynMapPtr> parts;
        for (const auto& p : j.at("maps")) parts.push_back(from_json_obj(p));
        return composite_map(std::move(parts));
    }
    throw std::runtime_error("dynmap_from_json: unknown kind " + kind);
}

}  // namespace

DynMapPtr dynmap_from_json(const std::string& text) { return from_json_obj(json::parse(text)); }

double c0_distance(const DynMap& f, const DynMap& g, int grid_theta, int grid_y, double L) {
    double sup = 0.0;
    for (int i = 0; i < grid_theta; ++i)
        for (int j = 0; j < grid_y; ++j) {
            AnnulusPoint x{(i + 0.5) / grid_theta, -L + 2.0 * L * j / (grid_y - 1)};
            sup = std::max(sup, annulus_dist(f.apply(x), g.apply(x)));
        }
    return sup;
}

}  // namespace twistlab
