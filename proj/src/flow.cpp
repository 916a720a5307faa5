#include "twistlab/flow.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace twistlab {

using json = nlohmann::ordered_json;

double HamiltonianField::value(double theta, double y) const {
    double acc = C(y);
    for (const auto& md : modes) {
        double w = kTwoPi * md.m * theta;
        acc += md.a(y) * std::cos(w) + md.b(y) * std::sin(w);
    }
    return acc;
}

std::array<double, 2> HamiltonianField::gradient(double theta, double y) const {
    double dy = C.deriv(y);
    double dth = 0.0;
    for (const auto& md : modes) {
        double w = kTwoPi * md.m * theta;
        double c = std::cos(w), s = std::sin(w);
        dy += md.a.deriv(y) * c + md.b.deriv(y) * s;
        dth += kTwoPi * md.m * (-md.a(y) * s + md.b(y) * c);
    }
    return {dy, -dth};
}

double HamiltonianField::analytic_mm(int m) const {
    return kTwoPi * m * std::exp(kTwoPi * m * rho0);
}

std::array<double, 2> symplectic_gradient(const HamiltonianField& H, const AnnulusPoint& x) {
    return H.gradient(x.theta, x.y);
}

HamiltonianField poisson_bracket(const Profile& f_theta, const Profile& g_y) {
    // {f, g} = f'(theta) * g'(y); expand f' in modes
    Profile fp = f_theta.derivative_profile();
    const auto* trig = std::get_if<TrigPolyData>(&fp.data());
    if (trig == nullptr) throw std::invalid_argument("poisson_bracket: f must be a trig profile");
    Profile gp = g_y.derivative_profile();
    HamiltonianField out;
    out.C = Profile::zero();
    if (std::fabs(trig->a0) > 0.0)
        throw std::invalid_argument("poisson_bracket: f' cannot have a mean");
    for (std::size_t m = 0; m < trig->cos_c.size(); ++m) {
        double ca = trig->cos_c[m], sb = trig->sin_c[m];
        if (ca == 0.0 && sb == 0.0) continue;
        HamiltonianField::Mode md;
        md.m = static_cast<int>(m + 1);
        md.a = ca != 0.0 ? gp.scaled(ca) : Profile::zero();
        md.b = sb != 0.0 ? gp.scaled(sb) : Profile::zero();
        out.modes.push_back(std::move(md));
    }
    return out;
}

std::vector<BracketTerm> bracket_terms(const HamiltonianField& H) {
    std::vector<BracketTerm> out;
    for (const auto& md : H.modes) {
        double sm = H.norm == Normalization::Real2PiM ? 1.0 / (kTwoPi * md.m)
                                                      : 1.0 / H.analytic_mm(md.m);
        double inv = 1.0 / (kTwoPi * md.m * sm);  // 1 under Real2PiM

        // j = 2m-1: f = sin(2 pi m theta) * sm realizes a_m(y) cos(2 pi m theta)
        {
            BracketTerm bt;
            bt.index = 2 * md.m - 1;
            bt.m = md.m;
            std::vector<double> sc(static_cast<size_t>(md.m), 0.0);
            sc.back() = sm;
            bt.f = Profile::trig(0.0, {}, sc);
            bt.tau = md.a.scaled(inv);
            bt.g = bt.tau.antiderivative_profile(-1.0);
            std::vector<double> vc(static_cast<size_t>(md.m), 0.0);
            vc.back() = -kTwoPi * md.m * sm;
            bt.v = Profile::trig(0.0, vc, {});  // -f' = -2 pi m sm cos
            out.push_back(std::move(bt));
        }
        // j = 2m: f = cos(2 pi m theta) * sm realizes b_m(y) sin(2 pi m theta)
        {
            BracketTerm bt;
            bt.index = 2 * md.m;
            bt.m = md.m;
            std::vector<double> cc(static_cast<size_t>(md.m), 0.0);
            cc.back() = sm;
            bt.f = Profile::trig(0.0, cc, {});
            bt.tau = md.b.scaled(-inv);
            bt.g = bt.tau.antiderivative_profile(-1.0);
            std::vector<double> vs(static_cast<size_t>(md.m), 0.0);
            vs.back() = kTwoPi * md.m * sm;
            bt.v = Profile::trig(0.0, {}, vs);  // -f' = 2 pi m sm sin
            out.push_back(std::move(bt));
        }
    }
    return out;
}

DecompositionResult fourier_decompose(const std::function<double(double, double)>& H, int n_theta,
                                      int n_y, int N, double delta, Normalization norm,
                                      double rho0) {
    if (n_theta < 4 * std::max(N, 1))
        throw std::invalid_argument("fourier_decompose: grid must resolve >= 4N in theta");
    if (n_y < 8) throw std::invalid_argument("fourier_decompose: n_y too small");

    std::vector<double> ys(static_cast<size_t>(n_y + 1));
    for (int j = 0; j <= n_y; ++j) ys[static_cast<size_t>(j)] = -1.0 + 2.0 * j / n_y;
    double dy = 2.0 / n_y;

    std::vector<double> samples(static_cast<size_t>(n_theta) * (static_cast<size_t>(n_y) + 1));
    for (int j = 0; j <= n_y; ++j)
        for (int i = 0; i < n_theta; ++i)
            samples[static_cast<size_t>(j) * n_theta + i] =
                H(static_cast<double>(i) / n_theta, ys[static_cast<size_t>(j)]);

    int n_modes_max = n_theta / 2 - 1;
    std::vector<double> c0(static_cast<size_t>(n_y + 1), 0.0);
    std::vector<std::vector<double>> am(static_cast<size_t>(n_modes_max)),
        bm(static_cast<size_t>(n_modes_max));
    for (auto& v : am) v.assign(static_cast<size_t>(n_y + 1), 0.0);
    for (auto& v : bm) v.assign(static_cast<size_t>(n_y + 1), 0.0);

    for (int j = 0; j <= n_y; ++j) {
        const double* row = &samples[static_cast<size_t>(j) * n_theta];
        double mean = 0.0;
        for (int i = 0; i < n_theta; ++i) mean += row[i];
        mean /= n_theta;
        c0[static_cast<size_t>(j)] = mean;
        for (int m = 1; m <= n_modes_max; ++m) {
            double ca = 0.0, sa = 0.0;
            for (int i = 0; i < n_theta; ++i) {
                double w = kTwoPi * m * i / n_theta;
                ca += row[i] * std::cos(w);
                sa += row[i] * std::sin(w);
            }
            am[static_cast<size_t>(m - 1)][static_cast<size_t>(j)] = 2.0 * ca / n_theta;
            bm[static_cast<size_t>(m - 1)][static_cast<size_t>(j)] = 2.0 * sa / n_theta;
        }
    }

    double energy_kept = 0.0, energy_above = 0.0;
    for (int m = 1; m <= n_modes_max; ++m) {
        double e = 0.0;
        for (int j = 0; j <= n_y; ++j) {
            double a = am[static_cast<size_t>(m - 1)][static_cast<size_t>(j)];
            double b = bm[static_cast<size_t>(m - 1)][static_cast<size_t>(j)];
            e += 0.5 * (a * a + b * b) * dy;
        }
        if (m <= N) energy_kept += e;
        else energy_above += e;
    }
    DecompositionResult res;
    double total = energy_kept + energy_above;
    res.aliased_energy_ratio = total > 0.0 ? energy_above / total : 0.0;
    res.aliasing_warning = total > 0.0 && res.aliased_energy_ratio > 1e-3;

    HamiltonianField field;
    field.norm = norm;
    field.rho0 = rho0;
    field.delta = delta;
    double scale = 0.0;
    for (double s : samples) scale = std::max(scale, std::fabs(s));
    double drop = std::max(1e-300, 1e-12 * scale);

    bool c_nonzero = false;
    for (double c : c0) c_nonzero = c_nonzero || std::fabs(c) > drop;
    field.C = c_nonzero ? Profile::spline(-1.0, dy, c0) : Profile::zero();
    for (int m = 1; m <= N; ++m) {
        const auto& av = am[static_cast<size_t>(m - 1)];
        const auto& bv = bm[static_cast<size_t>(m - 1)];
        bool a_nz = false, b_nz = false;
        for (double x : av) a_nz = a_nz || std::fabs(x) > drop;
        for (double x : bv) b_nz = b_nz || std::fabs(x) > drop;
        if (!a_nz && !b_nz) continue;
        HamiltonianField::Mode md;
        md.m = m;
        md.a = a_nz ? Profile::spline(-1.0, dy, av) : Profile::zero();
        md.b = b_nz ? Profile::spline(-1.0, dy, bv) : Profile::zero();
        field.modes.push_back(std::move(md));
    }
    res.field = std::move(field);
    return res;
}

MapWord commutator_flow_approx(const HamiltonianField& H, double t) {
    if (t == 0.0) return MapWord::identity();
    std::vector<MapWord> parts;
    auto terms = bracket_terms(H);
    // highest index first, then the integrable drift
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        MapWord T = MapWord::h_twist(it->tau.scaled(t));
        MapWord V = MapWord(std::vector<PrimitiveMap>{VTwist{it->v.scaled(t)}});
        parts.push_back(commutator(V, T));
    }
    Profile cd = H.C.derivative_profile();
    parts.push_back(MapWord::h_twist(cd.scaled(t * t)));
    return compose(parts);
}

namespace {

// Dormand-Prince 5(4) tableau
const double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
const double kB5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
const double kB4[7] = {5179.0 / 57600,    0,            7571.0 / 16695, 393.0 / 640,
                       -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace

AnnulusPoint flow_oracle(const HamiltonianField& H, double t, const AnnulusPoint& x, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("flow_oracle: tol must be positive");
    if (t == 0.0) return x;
    double dir = t > 0.0 ? 1.0 : -1.0;
    double remain = std::fabs(t);
    double th = x.theta, y = x.y;
    double h = std::min(remain, 0.1);
    int guard = 0;
    while (remain > 0.0) {
        if (++guard > 2000000) throw std::runtime_error("flow_oracle: too many steps");
        h = std::min(h, remain);
        if (h < 1e-14) throw std::runtime_error("flow_oracle: step size underflow");
        double kth[7], ky[7];
        for (int s = 0; s < 7; ++s) {
            double ath = th, ay = y;
            for (int q = 0; q < s; ++q) {
                ath += dir * h * kA[s][q] * kth[q];
                ay += dir * h * kA[s][q] * ky[q];
            }
            auto g = H.gradient(ath, ay);
            kth[s] = g[0];
            ky[s] = g[1];
        }
        double th5 = th, y5 = y, th4 = th, y4 = y;
        for (int s = 0; s < 7; ++s) {
            th5 += dir * h * kB5[s] * kth[s];
            y5 += dir * h * kB5[s] * ky[s];
            th4 += dir * h * kB4[s] * kth[s];
            y4 += dir * h * kB4[s] * ky[s];
        }
        double err = std::hypot(th5 - th4, y5 - y4);
        if (err <= tol) {
            th = th5;
            y = y5;
            remain -= h;
        }
        double scale = err > 1e-300 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
        h *= std::clamp(scale, 0.2, 4.0);
    }
    return {mod1(th), y};
}

RealizeReport realize_time_one(const HamiltonianField& H, int K, int grid_theta, int grid_y) {
    if (K < 1) throw std::invalid_argument("realize_time_one: K >= 1");
    double t = 1.0 / std::sqrt(static_cast<double>(K));
    MapWord step = commutator_flow_approx(H, t);
    std::vector<MapWord> reps(static_cast<size_t>(K), step);
    RealizeReport rep;
    rep.word = compose(reps);
    rep.splitting_steps = K;
    double sup = 0.0;
    for (int i = 0; i < grid_theta; ++i) {
        for (int j = 0; j < grid_y; ++j) {
            AnnulusPoint x{(i + 0.5) / grid_theta, -0.95 + 1.9 * j / (grid_y - 1)};
            AnnulusPoint a = rep.word.eval(x);
            AnnulusPoint b = flow_oracle(H, 1.0, x, 1e-11);
            sup = std::max(sup, annulus_dist(a, b));
        }
    }
    rep.sup_error = sup;
    return rep;
}

// ---- serialization -----------------------------------------------------------

namespace {

json profile_json(const Profile& p) {
    // reuse the letter serializer via a single-letter word
    std::istringstream in(word_to_jsonl(MapWord::h_twist(p)));
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    return json::parse(last).at("tau");
}

Profile profile_from(const json& j) {
    json letter;
    letter["kind"] = "htwist";
    letter["tau"] = j;
    json header;
    header["word"] = true;
    header["label"] = "";
    header["letters"] = 1;
    MapWord w = word_from_jsonl(header.dump() + "\n" + letter.dump() + "\n");
    return std::get<HTwist>(w.letters()[0]).tau;
}

}  // namespace

std::string field_to_text(const HamiltonianField& H) {
    json j;
    j["normalization"] = H.norm == Normalization::Real2PiM ? "real_2pim" : "analytic_mm";
    j["rho0"] = H.rho0;
    j["delta"] = H.delta;
    j["C"] = profile_json(H.C);
    json modes = json::array();
    for (const auto& md : H.modes) {
        json jm;
        jm["m"] = md.m;
        jm["a"] = profile_json(md.a);
        jm["b"] = profile_json(md.b);
        modes.push_back(std::move(jm));
    }
    j["modes"] = std::move(modes);
    return j.dump(2) + "\n";
}

HamiltonianField field_from_text(const std::string& text) {
    json j = json::parse(text);
    HamiltonianField H;
    H.norm = j.at("normalization").get<std::string>() == "real_2pim" ? Normalization::Real2PiM
                                                                     : Normalization::AnalyticMm;
    H.rho0 = j.at("rho0").get<double>();
    H.delta = j.at("delta").get<double>();
    H.C = profile_from(j.at("C"));
    for (const auto& jm : j.at("modes")) {
        HamiltonianField::Mode md;
        md.m = jm.at("m").get<int>();
        md.a = profile_from(jm.at("a"));
        md.b = profile_from(jm.at("b"));
        H.modes.push_back(std::move(md));
    }
    return H;
}

}  // namespace twistlab
