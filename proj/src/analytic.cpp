#include "twistlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "twistlab/scheme.hpp"
#include "twistlab/util.hpp"

namespace twistlab {

namespace {

// rectangle boundary samples, conjugate-symmetric
void rect_boundary(double re_lo, double re_hi, double im_lo, double im_hi, int nodes,
                   std::vector<cplx>& out) {
    for (int i = 0; i < nodes; ++i) {
        double t = (i + 0.5) / nodes;
        out.emplace_back(re_lo + (re_hi - re_lo) * t, im_lo);
        out.emplace_back(re_lo + (re_hi - re_lo) * t, im_hi);
        out.emplace_back(re_lo, im_lo + (im_hi - im_lo) * t);
        out.emplace_back(re_hi, im_lo + (im_hi - im_lo) * t);
    }
}

void q_boundary(double rho, double eps, int nodes, std::vector<cplx>& out) {
    rect_boundary(1.0 - eps, rho + eps, -rho - eps, rho + eps, nodes, out);
    rect_boundary(-rho - eps, -1.0 + eps, -rho - eps, rho + eps, nodes, out);
}

}  // namespace

CollarGrid make_collar_grid(double rho, double eps, int nodes_per_side, double window_lo,
                            double window_hi) {
    if (!(rho > 1.0)) throw std::invalid_argument("collar grid: rho > 1");
    if (!(window_hi > window_lo) || window_lo < -1.0 + eps || window_hi > 1.0 - eps)
        throw std::invalid_argument("collar grid: window must sit inside (-1+eps, 1-eps)");
    CollarGrid g;
    g.rho = rho;
    g.eps = eps;
    g.window_lo = window_lo;
    g.window_hi = window_hi;
    g.nodes_per_side = nodes_per_side;

    int wn = 4 * nodes_per_side;
    for (int i = 0; i <= wn; ++i)
        g.window.push_back(window_lo + (window_hi - window_lo) * i / wn);
    for (int i = 0; i <= 4 * wn; ++i)
        g.window_fine.push_back(window_lo + (window_hi - window_lo) * i / (4 * wn));

    q_boundary(rho, eps, nodes_per_side, g.q_fit);
    q_boundary(rho, 0.0, nodes_per_side, g.q_coarse);
    q_boundary(rho, 0.0, 4 * nodes_per_side, g.q_fine);

    // T_rho: horizontal lines at several heights (sup of periodic entire
    // functions concentrates on the extreme lines)
    for (double frac : {1.0, 0.5, 0.0}) {
        double im = rho * frac;
        for (int i = 0; i < 2 * nodes_per_side; ++i) {
            double th = (i + 0.5) / (2 * nodes_per_side);
            g.t_grid.emplace_back(th, im);
            if (im != 0.0) g.t_grid.emplace_back(th, -im);
        }
    }
    for (double frac : {1.0, 0.75, 0.5, 0.25, 0.0}) {
        double im = rho * frac;
        for (int i = 0; i < 4 * nodes_per_side; ++i) {
            double th = (i + 0.5) / (4 * nodes_per_side);
            g.t_fine.emplace_back(th, im);
            if (im != 0.0) g.t_fine.emplace_back(th, -im);
        }
    }
    return g;
}

// ---- constrained fit -------------------------------------------------------------

namespace {

// Vandermonde-with-Arnoldi basis on the training points; H is real because
// the point set is conjugate-symmetric and the seed vector is real.
struct ArnoldiBasis {
    int degree;
    std::vector<double> hess;               // (degree+1) x degree column-major
    std::vector<std::vector<cplx>> q_cols;  // basis values on the training grid
};

ArnoldiBasis build_basis(const std::vector<cplx>& pts, int degree) {
    std::size_t M = pts.size();
    ArnoldiBasis b;
    b.degree = degree;
    b.hess.assign(static_cast<size_t>(degree + 1) * static_cast<size_t>(degree), 0.0);
    b.q_cols.assign(static_cast<size_t>(degree + 1), std::vector<cplx>(M));
    for (std::size_t i = 0; i < M; ++i) b.q_cols[0][i] = 1.0;
    std::vector<cplx> w(M);
    for (int k = 0; k < degree; ++k) {
        for (std::size_t i = 0; i < M; ++i) w[i] = pts[i] * b.q_cols[static_cast<size_t>(k)][i];
        for (int j = 0; j <= k; ++j) {
            cplx dot = 0.0;
            for (std::size_t i = 0; i < M; ++i)
                dot += std::conj(b.q_cols[static_cast<size_t>(j)][i]) * w[i];
            double h = dot.real() / static_cast<double>(M);
            b.hess[static_cast<size_t>(k) * (degree + 1) + j] = h;
            for (std::size_t i = 0; i < M; ++i) w[i] -= h * b.q_cols[static_cast<size_t>(j)][i];
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < M; ++i) nrm += std::norm(w[i]);
        nrm = std::sqrt(nrm / static_cast<double>(M));
        if (nrm < 1e-200) nrm = 1e-200;
        b.hess[static_cast<size_t>(k) * (degree + 1) + k + 1] = nrm;
        for (std::size_t i = 0; i < M; ++i)
            b.q_cols[static_cast<size_t>(k + 1)][i] = w[i] / nrm;
    }
    return b;
}

double sup_abs(const Profile& p, const std::vector<cplx>& pts) {
    double s = 0.0;
    for (const auto& z : pts) s = std::max(s, std::abs(p(z)));
    return s;
}

double sup_err_real(const Profile& p, const Profile& target, const std::vector<double>& pts) {
    double s = 0.0;
    for (double x : pts) s = std::max(s, std::fabs(p(x) - target(x)));
    return s;
}

}  // namespace

RungeFitReport runge_fit(const Profile& target, const CollarGrid& grid, double bound, int degree) {
    if (!(bound > 0.0)) throw std::invalid_argument("runge_fit: bound must be positive");
    if (degree < 1) throw std::invalid_argument("runge_fit: degree >= 1");

    // training set: window plus constraint collar (conjugate-symmetric)
    std::vector<cplx> train;
    for (double x : grid.window) train.emplace_back(x, 0.0);
    train.insert(train.end(), grid.q_fit.begin(), grid.q_fit.end());
    ArnoldiBasis basis = build_basis(train, degree);

    std::size_t W = grid.window.size();
    std::size_t C = grid.q_fit.size();
    int nv = degree + 2;  // coefficients + sup variable t
    std::vector<double> rows, rhs, cost(static_cast<size_t>(nv), 0.0);
    cost[static_cast<size_t>(nv - 1)] = 1.0;
    rows.reserve((2 * W + 16 * C) * static_cast<size_t>(nv));

    // window rows: +-(p(x_i) - f_i) <= t
    for (std::size_t i = 0; i < W; ++i) {
        double fi = target(grid.window[i]);
        for (int sgn : {1, -1}) {
            for (int k = 0; k <= degree; ++k)
                rows.push_back(sgn * basis.q_cols[static_cast<size_t>(k)][i].real());
            rows.push_back(-1.0);
            rhs.push_back(sgn * fi);
        }
    }
    // collar rows: Re(e^{-i phi} p(z)) <= bound over a 16-gon
    for (std::size_t c = 0; c < C; ++c) {
        std::size_t i = W + c;
        for (int a = 0; a < 16; ++a) {
            double phi = kTwoPi * a / 16.0;
            cplx rot(std::cos(phi), std::sin(phi));
            for (int k = 0; k <= degree; ++k)
                rows.push_back((rot * basis.q_cols[static_cast<size_t>(k)][i]).real());
            rows.push_back(0.0);
            rhs.push_back(bound);
        }
    }

    int m = static_cast<int>(rhs.size());
    LpResult lp = solve_lp(rows, m, nv, rhs, cost);

    RungeFitReport rep;
    rep.degree = degree;
    rep.bound = bound;
    rep.solved = lp.status == LpStatus::Optimal;
    if (!rep.solved) {
        rep.profile = Profile::zero();
        return rep;
    }
    ArnoldiPolyData data;
    data.degree = degree;
    data.hess = basis.hess;
    data.coeffs.assign(lp.x.begin(), lp.x.begin() + degree + 1);
    rep.profile = Profile(std::move(data));

    rep.window_err = sup_err_real(rep.profile, target, grid.window);
    rep.window_err_refined = sup_err_real(rep.profile, target, grid.window_fine);
    rep.collar_sup_coarse = sup_abs(rep.profile, grid.q_coarse);
    rep.collar_sup_refined = sup_abs(rep.profile, grid.q_fine);
    rep.collar_sup_fattened = sup_abs(rep.profile, grid.q_fit);
    return rep;
}

// ---- collar evaluation ------------------------------------------------------------

namespace {

double cdist(const CPoint& a, const CPoint& b) {
    double dre = theta_diff(a.theta.real(), b.theta.real());
    cplx dth(dre, a.theta.imag() - b.theta.imag());
    return std::sqrt(std::norm(dth) + std::norm(a.y - b.y));
}

double word_collar_sup(const MapWord& w, const std::vector<cplx>& tgrid,
                       const std::vector<cplx>& qgrid) {
    double sup = 0.0;
    for (const auto& th : tgrid) {
        for (const auto& y : qgrid) {
            CPoint z{th, y};
            CPoint img = w.eval_complex(z);
            sup = std::max(sup, cdist(img, z));
        }
    }
    return sup;
}

std::vector<cplx> subsample(const std::vector<cplx>& v, std::size_t cap) {
    if (v.size() <= cap) return v;
    std::vector<cplx> out;
    out.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) out.push_back(v[(i * v.size()) / cap]);
    return out;
}

}  // namespace

double collar_distance(const MapWord& w, const CollarGrid& grid, bool fattened) {
    const auto& q = fattened ? grid.q_fit : grid.q_coarse;
    auto t = subsample(grid.t_grid, 160);
    auto qq = subsample(q, 320);
    return word_collar_sup(w, t, qq);
}

CommutatorCollarReport commutator_collar_bound(const MapWord& V, const MapWord& T, double rho,
                                               double rho_k, double eps, double eps_prime,
                                               int nodes, double slack) {
    if (!(eps > eps_prime + 2.0 / rho))
        throw std::invalid_argument("commutator_collar_bound: need eps > eps' + 2/rho");
    if (!(rho_k > rho))
        throw std::invalid_argument("commutator_collar_bound: need rho_k > rho");
    CommutatorCollarReport rep;
    rep.rho_k_prime = (eps - eps_prime - 2.0 / rho) / (eps - eps_prime - 1.0 / rho) * rho_k;
    rep.rhs = 1.0 / rep.rho_k_prime;

    MapWord c = commutator(V, T);
    CollarGrid g = make_collar_grid(rho, eps_prime, nodes, -0.5, 0.5);
    auto t = subsample(g.t_grid, 96);
    auto q = subsample(g.q_fit, 192);
    rep.lhs = word_collar_sup(c, t, q);
    rep.holds = rep.lhs <= rep.rhs * (1.0 + slack);
    return rep;
}

CompositionStabilityReport composition_stability(const std::vector<MapWord>& words, double rho,
                                                 double eps_prime, int nodes) {
    CompositionStabilityReport rep;
    CollarGrid fat = make_collar_grid(rho, eps_prime, nodes, -0.5, 0.5);
    auto t_fat = subsample(fat.t_grid, 96);
    auto q_fat = subsample(fat.q_fit, 192);
    auto t0 = subsample(fat.t_grid, 96);
    auto q0 = subsample(fat.q_coarse, 192);

    rep.budgets_ok = true;
    double base = std::max(1.0 / eps_prime, rho);
    for (std::size_t k = 0; k < words.size(); ++k) {
        double budget = 1.0 / (std::pow(2.0, static_cast<double>(k + 1)) * base);
        double d = word_collar_sup(words[k], t_fat, q_fat);
        rep.word_distances.push_back(d);
        rep.budgets.push_back(budget);
        if (d >= budget) rep.budgets_ok = false;
    }
    MapWord acc;
    for (std::size_t k = 0; k < words.size(); ++k) {
        acc = compose(acc, words[k]);  // F_1 o ... o F_k
        rep.partial_distances.push_back(word_collar_sup(acc, t0, q0));
    }
    rep.composed_ok =
        rep.partial_distances.empty() || rep.partial_distances.back() < 1.0 / rho;
    return rep;
}

PeriodizedFit periodized_fit(const MapWord& quotient_word, int q, const CollarGrid& grid,
                             double bound, int degree) {
    if (q < 1) throw std::invalid_argument("periodized_fit: q >= 1");
    PeriodizedFit out;
    std::vector<PrimitiveMap> letters;
    for (const auto& letter : quotient_word.letters()) {
        if (const auto* ht = std::get_if<HTwist>(&letter)) {
            RungeFitReport rep = runge_fit(ht->tau, grid, bound, degree);
            if (!rep.solved)
                throw std::runtime_error("periodized_fit: letter fit infeasible");
            letters.push_back(HTwist{rep.profile});
            out.letter_reports.push_back(std::move(rep));
        } else if (const auto* vt = std::get_if<VTwist>(&letter)) {
            // trig profiles are entire already; they pass through
            if (!std::holds_alternative<TrigPolyData>(vt->v.data()))
                throw std::invalid_argument("periodized_fit: vertical letters must be trig");
            letters.push_back(*vt);
        } else {
            letters.push_back(letter);
        }
    }
    MapWord fitted(std::move(letters), quotient_word.label());
    out.quotient_collar_distance = collar_distance(fitted, grid);
    out.word = q_lift(fitted, q);

    // periodicity identity on a grid
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 5; ++j) {
            AnnulusPoint x{(i + 0.5) / 100.0, -0.9 + 0.45 * j};
            AnnulusPoint a = out.word.eval(AnnulusPoint{mod1(x.theta + 1.0 / q), x.y});
            AnnulusPoint b = out.word.eval(x);
            worst = std::max(worst, std::fabs(theta_diff(a.theta, mod1(b.theta + 1.0 / q))) +
                                        std::fabs(a.y - b.y));
        }
    }
    out.periodicity_defect = worst;
    return out;
}

// ---- analytic stage of the scheme ---------------------------------------------------

StageRecord build_stage_analytic(SchemeState& state, double eps_n, const SchemeConfig& cfg) {
    StageRecord rec;
    rec.n = state.n + 1;
    rec.mode = "analytic";

    SchemeState prev = state;
    long long qp = prev.alpha.q;
    double rho = cfg.analytic_rho;
    double eps_prime = 0.25;

    // fact-compo budget for this stage and the collar radius covering K_{n+N}
    double base = std::max(1.0 / eps_prime, rho);
    double budget = 1.0 / (std::pow(2.0, rec.n) * base);
    double p0_eps = cfg.eps_n(rec.n + cfg.analytic_N);
    double rho_fit = std::max(rho + eps_prime, static_cast<double>(rec.n + cfg.analytic_N)) + 0.5;

    // smooth shear target for this stage
    double amp = 0.02 * std::pow(0.5, rec.n - 1);
    Profile tau_target = Profile::bump(0.0, 0.25, 0.65, amp);

    CollarGrid grid = make_collar_grid(rho_fit, eps_prime, 48, -0.9, 0.9);
    double fit_bound = static_cast<double>(qp) * std::min(0.5 * budget, 0.25 * p0_eps);
    MapWord quotient = MapWord::h_twist(tau_target);
    PeriodizedFit fit = periodized_fit(quotient, static_cast<int>(qp), grid,
                                       fit_bound, cfg.analytic_degree);
    rec.periodicity_defect = fit.periodicity_defect;
    rec.collar_budget = budget;

    // lifted-word collar distance on K_{rho,eps'}
    CollarGrid lifted_grid = make_collar_grid(rho, eps_prime, 32, -0.9, 0.9);
    rec.collar_distance = collar_distance(fit.word, lifted_grid, true);
    if (rec.collar_distance >= budget)
        throw std::runtime_error("build_stage_analytic: fitted conjugator violates its "
                                 "collar budget");

    DynMapPtr h = word_map(fit.word);
    SchemeState cand = prev;
    cand.conjugators.push_back(h);
    cand.n = rec.n;

    // P0: sup over K_{n+N} of |H_n - H_{n-1}|; both are horizontal twist
    // words, evaluated complex
    {
        std::vector<MapWord> hw;
        for (const auto& c : prev.conjugators) {
            auto desc = c->describe_json();
            auto parsed = dynmap_from_json(desc);  // ensures the kind survives
            (void)parsed;
            hw.push_back(word_from_jsonl(
                nlohmann::ordered_json::parse(desc).at("jsonl").get<std::string>()));
        }
        MapWord Hprev;
        for (const auto& wmap : hw) Hprev = compose(Hprev, wmap);
        MapWord Hcur = compose(Hprev, fit.word);

        double rhoK = static_cast<double>(rec.n + cfg.analytic_N);
        if (rhoK > 1.0) {
            CollarGrid kg = make_collar_grid(rhoK, 0.0 + 0.05, 24, -0.9, 0.9);
            auto t = subsample(kg.t_grid, 64);
            auto qpts = subsample(kg.q_coarse, 128);
            double sup = 0.0;
            for (const auto& th : t)
                for (const auto& y : qpts) {
                    CPoint z{th, y};
                    sup = std::max(sup, cdist(Hcur.eval_complex(z), Hprev.eval_complex(z)));
                }
            rec.p0_collar = sup;
            rec.p0_budget = p0_eps;
            if (sup >= p0_eps)
                throw std::runtime_error("build_stage_analytic: P0 collar closeness " +
                                         std::to_string(sup) + " exceeds budget");
        }
    }

    AlphaChoice ac = choose_alpha(prev, h, rec.n, eps_n, cfg);
    cand.alpha = ac.alpha;
    rec.alpha = ac.alpha;
    rec.multiplier = ac.multiplier;
    rec.c0_prev = ac.c0_dist;
    rec.c0_prev_raw = ac.c0_raw;
    rec.c0_exceed_fraction = ac.c0_exceed;
    rec.c0_inverse_prev = ac.c0_inverse;
    rec.p4_min_ratio = ac.p4.min_ratio;
    rec.p4_min_ratio_raw = ac.p4.min_ratio_raw;
    rec.commutation_sup = 0.0;  // horizontal twists commute with rotations identically

    state = cand;
    state.H_lip = prev.H_lip * h->lipschitz_bound();
    {
        double sup = 0.0;
        for (int g = 0; g < 20; ++g) {
            AnnulusPoint x{mod1(0.4142 * g + 0.11), -0.85 + 1.7 * ((g % 13) + 0.558) / 13.0};
            sup = std::max(sup, annulus_dist(state.apply_F_iterate(x, state.alpha.q), x));
        }
        rec.orbit_closure = sup;
    }
    return rec;
}

}  // namespace twistlab
