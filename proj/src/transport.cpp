#include "twistlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace twistlab {

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

void DiscreteMeasure::normalize() {
    double s = total_mass();
    if (s <= 0.0) throw std::invalid_argument("normalize: zero total mass");
    for (auto& a : atoms) a.weight /= s;
}

bool DiscreteMeasure::is_normalized(double tol) const {
    if (atoms.empty()) return false;
    return std::fabs(total_mass() - 1.0) <= tol;
}

DiscreteMeasure uniform_circle(double y, int atom_count) {
    if (atom_count < 1) throw std::invalid_argument("uniform_circle: atom_count >= 1");
    DiscreteMeasure mu;
    mu.atoms.reserve(static_cast<size_t>(atom_count));
    double w = 1.0 / atom_count;
    for (int k = 0; k < atom_count; ++k)
        mu.atoms.push_back({{(k + 0.5) / atom_count, y}, w});
    return mu;
}

DiscreteMeasure lebesgue_a0_grid(int k) {
    if (k < 1) throw std::invalid_argument("lebesgue_a0_grid: k >= 1");
    DiscreteMeasure mu;
    mu.atoms.reserve(static_cast<size_t>(k) * static_cast<size_t>(k));
    double w = 1.0 / (static_cast<double>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            mu.atoms.push_back({{(i + 0.5) / k, -1.0 + 2.0 * (j + 0.5) / k}, w});
    return mu;
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<AnnulusPoint(const AnnulusPoint&)>& f) {
    DiscreteMeasure out;
    out.atoms.reserve(mu.atoms.size());
    for (const auto& a : mu.atoms) out.atoms.push_back({f(a.point), a.weight});
    return out;
}

DiscreteMeasure circle_pushforward(const MapWord& w, double y, int atom_count) {
    if (atom_count < 2) throw std::invalid_argument("circle_pushforward: need >= 2 atoms");
    DiscreteMeasure mu = uniform_circle(y, atom_count);
    return pushforward(mu, [&](const AnnulusPoint& p) { return w.eval(p); });
}

DiscreteMeasure empirical_measure(const MapWord& w, const AnnulusPoint& x, int n) {
    if (n < 1) throw std::invalid_argument("empirical_measure: n >= 1");
    DiscreteMeasure mu;
    mu.atoms.reserve(static_cast<size_t>(n));
    AnnulusPoint p = x;
    for (int k = 0; k < n; ++k) {
        p = w.eval(p);
        mu.atoms.push_back({p, 1.0 / n});
    }
    return mu;
}

// ---- exact solver: network simplex ------------------------------------------

namespace {

constexpr std::int64_t kCostScale = 1000000000;  // 1e-9 cost resolution
constexpr std::int64_t kMassScale = 1000000000000LL;

std::vector<std::int64_t> integerize_masses(const std::vector<double>& w) {
    std::vector<std::int64_t> m(w.size());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = std::llround(w[i] * static_cast<double>(kMassScale));
        total += m[i];
    }
    std::int64_t diff = kMassScale - total;
    std::size_t i = 0;
    while (diff != 0 && !m.empty()) {
        std::int64_t step = diff > 0 ? 1 : -1;
        if (m[i] + step > 0) {
            m[i] += step;
            diff -= step;
        }
        i = (i + 1) % m.size();
    }
    return m;
}

// Transportation network simplex on the dense bipartite graph, with a
// strongly feasible initial star basis through an artificial root.
class NetSimplex {
  public:
    NetSimplex(const std::vector<AnnulusPoint>& src, const std::vector<std::int64_t>& supply,
               const std::vector<AnnulusPoint>& dst, const std::vector<std::int64_t>& demand)
        : m_(static_cast<int>(src.size())), n_(static_cast<int>(dst.size())) {
        num_arcs_ = static_cast<std::size_t>(m_) * static_cast<std::size_t>(n_);
        cost_.resize(num_arcs_);
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) {
                double d = annulus_dist(src[static_cast<size_t>(i)], dst[static_cast<size_t>(j)]);
                cost_[static_cast<std::size_t>(i) * n_ + j] =
                    std::llround(d * static_cast<double>(kCostScale));
            }
        int nn = m_ + n_ + 1;
        root_ = m_ + n_;
        parent_.assign(static_cast<size_t>(nn), root_);
        pred_flow_.assign(static_cast<size_t>(nn), 0);
        pred_to_parent_.assign(static_cast<size_t>(nn), 1);
        pred_arc_.assign(static_cast<size_t>(nn), SIZE_MAX);
        depth_.assign(static_cast<size_t>(nn), 1);
        pi_.assign(static_cast<size_t>(nn), 0);
        first_child_.assign(static_cast<size_t>(nn), -1);
        next_sib_.assign(static_cast<size_t>(nn), -1);
        prev_sib_.assign(static_cast<size_t>(nn), -1);
        flow_.assign(num_arcs_, 0);
        basic_.assign(num_arcs_, 0);

        std::int64_t max_c = 1;
        for (auto c : cost_) max_c = std::max(max_c, c);
        big_ = 4 * max_c + 1;

        parent_[static_cast<size_t>(root_)] = -1;
        depth_[static_cast<size_t>(root_)] = 0;
        for (int i = 0; i < m_; ++i) {
            pi_[static_cast<size_t>(i)] = big_;
            pred_flow_[static_cast<size_t>(i)] = supply[static_cast<size_t>(i)];
            pred_to_parent_[static_cast<size_t>(i)] = 1;  // node -> root
            attach_child(root_, i);
        }
        for (int j = 0; j < n_; ++j) {
            int node = m_ + j;
            pi_[static_cast<size_t>(node)] = -big_;
            pred_flow_[static_cast<size_t>(node)] = demand[static_cast<size_t>(j)];
            pred_to_parent_[static_cast<size_t>(node)] = 0;  // root -> node
            attach_child(root_, node);
        }
        block_ = std::max<std::size_t>(64, static_cast<std::size_t>(
                                               std::sqrt(static_cast<double>(num_arcs_))));
    }

    void run() {
        std::size_t next = 0;
        std::size_t guard = 0;
        std::size_t guard_max = 64 * (num_arcs_ + 4096);
        while (true) {
            std::int64_t best_rc = 0;
            std::size_t best = SIZE_MAX;
            std::size_t scanned = 0;
            while (scanned < num_arcs_) {
                std::size_t stop = std::min(num_arcs_, next + block_);
                for (std::size_t e = next; e < stop; ++e) {
                    if (basic_[e]) continue;
                    int i = static_cast<int>(e / static_cast<std::size_t>(n_));
                    int j = static_cast<int>(e % static_cast<std::size_t>(n_));
                    std::int64_t rc =
                        cost_[e] - pi_[static_cast<size_t>(i)] + pi_[static_cast<size_t>(m_ + j)];
                    if (rc < best_rc) {
                        best_rc = rc;
                        best = e;
                    }
                }
                scanned += stop - next;
                next = stop == num_arcs_ ? 0 : stop;
                if (best != SIZE_MAX) break;
            }
            if (best == SIZE_MAX) break;  // optimal
            pivot(best);
            if (++guard > guard_max)
                throw std::runtime_error("network simplex: iteration guard tripped");
        }
        for (int k = 0; k < m_ + n_; ++k)
            if (parent_[static_cast<size_t>(k)] == root_ && pred_flow_[static_cast<size_t>(k)] != 0)
                throw std::runtime_error("network simplex: infeasible (unbalanced masses)");
    }

    double objective() const {
        __int128 acc = 0;
        for (std::size_t e = 0; e < num_arcs_; ++e)
            if (flow_[e] != 0) acc += static_cast<__int128>(flow_[e]) * cost_[e];
        return static_cast<double>(acc) /
               (static_cast<double>(kMassScale) * static_cast<double>(kCostScale));
    }

    TransportPlan plan() const {
        TransportPlan p;
        __int128 acc = 0;
        for (std::size_t e = 0; e < num_arcs_; ++e) {
            if (flow_[e] > 0) {
                p.entries.push_back({static_cast<int>(e / static_cast<std::size_t>(n_)),
                                     static_cast<int>(e % static_cast<std::size_t>(n_)),
                                     static_cast<double>(flow_[e]) /
                                         static_cast<double>(kMassScale)});
                acc += static_cast<__int128>(flow_[e]) * cost_[e];
            }
        }
        p.cost = static_cast<double>(acc) /
                 (static_cast<double>(kMassScale) * static_cast<double>(kCostScale));
        return p;
    }

  private:
    void attach_child(int parent, int child) {
        next_sib_[static_cast<size_t>(child)] = first_child_[static_cast<size_t>(parent)];
        prev_sib_[static_cast<size_t>(child)] = -1;
        if (first_child_[static_cast<size_t>(parent)] >= 0)
            prev_sib_[static_cast<size_t>(first_child_[static_cast<size_t>(parent)])] = child;
        first_child_[static_cast<size_t>(parent)] = child;
    }

    void detach_child(int parent, int child) {
        int prev = prev_sib_[static_cast<size_t>(child)];
        int nxt = next_sib_[static_cast<size_t>(child)];
        if (prev >= 0) next_sib_[static_cast<size_t>(prev)] = nxt;
        else first_child_[static_cast<size_t>(parent)] = nxt;
        if (nxt >= 0) prev_sib_[static_cast<size_t>(nxt)] = prev;
    }

    void pivot(std::size_t enter) {
        int u = static_cast<int>(enter / static_cast<std::size_t>(n_));
        int v = m_ + static_cast<int>(enter % static_cast<std::size_t>(n_));

        int a = u, b = v;
        while (a != b) {
            if (depth_[static_cast<size_t>(a)] >= depth_[static_cast<size_t>(b)])
                a = parent_[static_cast<size_t>(a)];
            else
                b = parent_[static_cast<size_t>(b)];
        }
        int apex = a;

        // The circulation runs apex -> u -> (enter) -> v -> apex.  On the
        // u-path an arc pointing child->parent loses flow, on the v-path an
        // arc pointing parent->child loses flow.  Ties are broken in cycle
        // order starting at the apex, which keeps the basis strongly feasible.
        std::int64_t t = std::numeric_limits<std::int64_t>::max();
        int leave_node = -1;
        bool leave_on_u_side = true;
        for (int x = u; x != apex; x = parent_[static_cast<size_t>(x)]) {
            if (pred_to_parent_[static_cast<size_t>(x)]) {
                if (pred_flow_[static_cast<size_t>(x)] <= t) {
                    t = pred_flow_[static_cast<size_t>(x)];
                    leave_node = x;
                    leave_on_u_side = true;
                }
            }
        }
        for (int x = v; x != apex; x = parent_[static_cast<size_t>(x)]) {
            if (!pred_to_parent_[static_cast<size_t>(x)]) {
                if (pred_flow_[static_cast<size_t>(x)] < t) {
                    t = pred_flow_[static_cast<size_t>(x)];
                    leave_node = x;
                    leave_on_u_side = false;
                }
            }
        }
        if (leave_node < 0)
            throw std::runtime_error("network simplex: unbounded pivot");

        for (int x = u; x != apex; x = parent_[static_cast<size_t>(x)]) {
            pred_flow_[static_cast<size_t>(x)] += pred_to_parent_[static_cast<size_t>(x)] ? -t : t;
            std::size_t e = pred_arc_[static_cast<size_t>(x)];
            if (e != SIZE_MAX) flow_[e] = pred_flow_[static_cast<size_t>(x)];
        }
        for (int x = v; x != apex; x = parent_[static_cast<size_t>(x)]) {
            pred_flow_[static_cast<size_t>(x)] += pred_to_parent_[static_cast<size_t>(x)] ? t : -t;
            std::size_t e = pred_arc_[static_cast<size_t>(x)];
            if (e != SIZE_MAX) flow_[e] = pred_flow_[static_cast<size_t>(x)];
        }

        std::int64_t rc = cost_[enter] - pi_[static_cast<size_t>(u)] + pi_[static_cast<size_t>(v)];
        int w_in = leave_on_u_side ? u : v;
        int w_out = leave_on_u_side ? v : u;
        std::int64_t delta = leave_on_u_side ? rc : -rc;

        std::size_t leave_arc = pred_arc_[static_cast<size_t>(leave_node)];
        if (leave_arc != SIZE_MAX) {
            basic_[leave_arc] = 0;
            flow_[leave_arc] = 0;
        }
        detach_child(parent_[static_cast<size_t>(leave_node)], leave_node);

        // re-root the cut subtree at w_in, reversing the chain to leave_node
        int x = w_in;
        int new_parent = w_out;
        std::size_t new_arc = enter;
        std::uint8_t new_dir = leave_on_u_side ? 1 : 0;
        std::int64_t new_flow = t;
        while (true) {
            int old_parent = parent_[static_cast<size_t>(x)];
            std::size_t old_arc = pred_arc_[static_cast<size_t>(x)];
            std::uint8_t old_dir = pred_to_parent_[static_cast<size_t>(x)];
            std::int64_t old_flow = pred_flow_[static_cast<size_t>(x)];
            if (x != leave_node) detach_child(old_parent, x);

            parent_[static_cast<size_t>(x)] = new_parent;
            pred_arc_[static_cast<size_t>(x)] = new_arc;
            pred_to_parent_[static_cast<size_t>(x)] = new_dir;
            pred_flow_[static_cast<size_t>(x)] = new_flow;
            attach_child(new_parent, x);

            if (x == leave_node) break;
            new_parent = x;
            new_arc = old_arc;
            new_dir = old_dir ? 0 : 1;
            new_flow = old_flow;
            x = old_parent;
        }

        basic_[enter] = 1;
        flow_[enter] = t;
        refresh_subtree(w_in, delta);
    }

    void refresh_subtree(int top, std::int64_t delta) {
        stack_.clear();
        stack_.push_back(top);
        while (!stack_.empty()) {
            int x = stack_.back();
            stack_.pop_back();
            depth_[static_cast<size_t>(x)] =
                depth_[static_cast<size_t>(parent_[static_cast<size_t>(x)])] + 1;
            pi_[static_cast<size_t>(x)] += delta;
            for (int c = first_child_[static_cast<size_t>(x)]; c >= 0;
                 c = next_sib_[static_cast<size_t>(c)])
                stack_.push_back(c);
        }
    }


    int m_, n_, root_ = 0;
    std::size_t num_arcs_ = 0, block_ = 64;
    std::int64_t big_ = 0;
    std::vector<std::int64_t> cost_;
    std::vector<std::int64_t> flow_;
    std::vector<std::uint8_t> basic_;
    std::vector<int> parent_, first_child_, next_sib_, prev_sib_, depth_;
    std::vector<std::size_t> pred_arc_;
    std::vector<std::int64_t> pred_flow_;
    std::vector<std::uint8_t> pred_to_parent_;
    std::vector<std::int64_t> pi_;
    std::vector<int> stack_;
};

struct Cleaned {
    std::vector<AnnulusPoint> pts;
    std::vector<double> w;
};

Cleaned strip_zero_atoms(const DiscreteMeasure& mu) {
    Cleaned c;
    for (const auto& a : mu.atoms) {
        if (a.weight > 0.0) {
            c.pts.push_back(a.point);
            c.w.push_back(a.weight);
        }
    }
    return c;
}

double logsumexp(const std::vector<double>& v, std::size_t n) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, v[i]);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - mx);
    return mx + std::log(s);
}

W1Result sinkhorn_w1(const Cleaned& a, const Cleaned& b, double eps_target) {
    std::size_t m = a.pts.size(), n = b.pts.size();
    std::vector<double> C(m * n);
    double cmax = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            C[i * n + j] = annulus_dist(a.pts[i], b.pts[j]);
            cmax = std::max(cmax, C[i * n + j]);
        }
    std::vector<double> la(m), lb(n);
    for (std::size_t i = 0; i < m; ++i) la[i] = std::log(a.w[i]);
    for (std::size_t j = 0; j < n; ++j) lb[j] = std::log(b.w[j]);

    std::vector<double> f(m, 0.0), g(n, 0.0), buf(std::max(m, n));
    double eps = std::max(eps_target, cmax / 4.0);
    while (true) {
        for (int iter = 0; iter < 200; ++iter) {
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) buf[j] = lb[j] + (g[j] - C[i * n + j]) / eps;
                f[i] = -eps * logsumexp(buf, n);
            }
            double err = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < m; ++i) buf[i] = la[i] + (f[i] - C[i * n + j]) / eps;
                double newg = -eps * logsumexp(buf, m);
                err = std::max(err, std::fabs(newg - g[j]));
                g[j] = newg;
            }
            if (err < 1e-9 * (1.0 + cmax)) break;
        }
        if (eps <= eps_target * 1.0000001) break;
        eps = std::max(eps_target, eps / 2.0);
    }

    // primal candidate rounded to exact marginals
    std::vector<double> P(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            P[i * n + j] = a.w[i] * b.w[j] * std::exp((f[i] + g[j] - C[i * n + j]) / eps);
    for (std::size_t i = 0; i < m; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += P[i * n + j];
        double s = r > 0 ? std::min(1.0, a.w[i] / r) : 0.0;
        for (std::size_t j = 0; j < n; ++j) P[i * n + j] *= s;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < m; ++i) c += P[i * n + j];
        double s = c > 0 ? std::min(1.0, b.w[j] / c) : 0.0;
        for (std::size_t i = 0; i < m; ++i) P[i * n + j] *= s;
    }
    std::vector<double> ea(m, 0.0), eb(n, 0.0);
    double ta = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += P[i * n + j];
        ea[i] = a.w[i] - r;
        ta += ea[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < m; ++i) c += P[i * n + j];
        eb[j] = b.w[j] - c;
    }
    double ub = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double pij = P[i * n + j];
            if (ta > 1e-300) pij += ea[i] * eb[j] / ta;
            ub += pij * C[i * n + j];
        }

    // dual feasible pair via the c-transform of f
    double lb_val = 0.0;
    for (std::size_t i = 0; i < m; ++i) lb_val += a.w[i] * f[i];
    for (std::size_t j = 0; j < n; ++j) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) v = std::min(v, C[i * n + j] - f[i]);
        lb_val += b.w[j] * v;
    }

    W1Result r;
    r.value = ub;
    r.certified_gap = std::max(0.0, ub - lb_val);
    r.epsilon_reg = eps;
    return r;
}

}  // namespace

W1Result wasserstein1_full(const DiscreteMeasure& mu, const DiscreteMeasure& nu, W1Method method,
                           bool want_plan) {
    if (!mu.is_normalized(1e-9) || !nu.is_normalized(1e-9))
        throw std::invalid_argument("wasserstein1: measures must be normalized");
    Cleaned a = strip_zero_atoms(mu), b = strip_zero_atoms(nu);
    if (method == W1Method::Entropic) {
        double spread = 0.1;
        for (std::size_t i = 1; i < a.pts.size(); ++i)
            spread = std::max(spread, annulus_dist(a.pts[0], a.pts[i]));
        return sinkhorn_w1(a, b, std::max(1e-4, 2e-3 * spread));
    }
    double prod = static_cast<double>(a.pts.size()) * static_cast<double>(b.pts.size());
    if (prod > 4e6)
        throw std::invalid_argument("wasserstein1: exact method limited to 4e6 support product");
    auto sm = integerize_masses(a.w);
    auto dm = integerize_masses(b.w);
    NetSimplex ns(a.pts, sm, b.pts, dm);
    ns.run();
    W1Result r;
    if (want_plan) {
        r.plan = ns.plan();
        r.value = r.plan.cost;
    } else {
        r.value = ns.objective();
    }
    return r;
}

double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu, W1Method method) {
    return wasserstein1_full(mu, nu, method).value;
}

double wasserstein1_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    Cleaned a = strip_zero_atoms(mu), b = strip_zero_atoms(nu);
    int m = static_cast<int>(a.pts.size()), n = static_cast<int>(b.pts.size());
    if (m * n > 36) throw std::invalid_argument("bruteforce: supports too large");
    int arcs = m * n;
    int basis = m + n - 1;
    double best = std::numeric_limits<double>::infinity();

    std::vector<int> pick(static_cast<size_t>(basis));
    std::function<void(int, int)> rec = [&](int start, int chosen) {
        if (chosen == basis) {
            std::vector<double> flow(static_cast<size_t>(arcs), 0.0);
            std::vector<double> rs(a.w.begin(), a.w.end()), cs(b.w.begin(), b.w.end());
            std::vector<char> used(static_cast<size_t>(basis), 0);
            for (int round = 0; round < basis; ++round) {
                bool progress = false;
                for (int t = 0; t < basis; ++t) {
                    if (used[static_cast<size_t>(t)]) continue;
                    int e = pick[static_cast<size_t>(t)];
                    int i = e / n, j = e % n;
                    int row_cnt = 0, col_cnt = 0;
                    for (int t2 = 0; t2 < basis; ++t2) {
                        if (used[static_cast<size_t>(t2)]) continue;
                        int e2 = pick[static_cast<size_t>(t2)];
                        if (e2 / n == i) ++row_cnt;
                        if (e2 % n == j) ++col_cnt;
                    }
                    if (row_cnt == 1) {
                        flow[static_cast<size_t>(e)] = rs[static_cast<size_t>(i)];
                        cs[static_cast<size_t>(j)] -= rs[static_cast<size_t>(i)];
                        rs[static_cast<size_t>(i)] = 0.0;
                        used[static_cast<size_t>(t)] = 1;
                        progress = true;
                    } else if (col_cnt == 1) {
                        flow[static_cast<size_t>(e)] = cs[static_cast<size_t>(j)];
                        rs[static_cast<size_t>(i)] -= cs[static_cast<size_t>(j)];
                        cs[static_cast<size_t>(j)] = 0.0;
                        used[static_cast<size_t>(t)] = 1;
                        progress = true;
                    }
                }
                if (!progress) break;
            }
            for (int t = 0; t < basis; ++t)
                if (!used[static_cast<size_t>(t)]) return;
            double resid = 0.0;
            for (double r : rs) resid += std::fabs(r);
            for (double c : cs) resid += std::fabs(c);
            if (resid > 1e-9) return;
            double cost = 0.0;
            bool ok = true;
            for (int e = 0; e < arcs; ++e) {
                if (flow[static_cast<size_t>(e)] < -1e-12) ok = false;
                if (flow[static_cast<size_t>(e)] > 0)
                    cost += flow[static_cast<size_t>(e)] *
                            annulus_dist(a.pts[static_cast<size_t>(e / n)],
                                         b.pts[static_cast<size_t>(e % n)]);
            }
            if (ok) best = std::min(best, cost);
            return;
        }
        for (int e = start; e < arcs; ++e) {
            pick[static_cast<size_t>(chosen)] = e;
            rec(e + 1, chosen + 1);
        }
    };
    rec(0, 0);
    return best;
}

TransportInequalityReport transport_inequality_check(const MapWord& f, const MapWord& g,
                                                     const DiscreteMeasure& mu, double tol) {
    DiscreteMeasure fm = pushforward(mu, [&](const AnnulusPoint& p) { return f.eval(p); });
    DiscreteMeasure gm = pushforward(mu, [&](const AnnulusPoint& p) { return g.eval(p); });
    TransportInequalityReport rep;
    rep.w1 = wasserstein1(fm, gm);
    rep.sup_dist = 0.0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
        rep.sup_dist = std::max(rep.sup_dist, annulus_dist(fm.atoms[i].point, gm.atoms[i].point));
    rep.holds = rep.w1 <= rep.sup_dist + tol;
    return rep;
}

std::string measure_to_csv(const DiscreteMeasure& mu) {
    std::ostringstream out;
    out << "# theta,y,weight\n";
    for (const auto& a : mu.atoms)
        out << format_g17(a.point.theta) << "," << format_g17(a.point.y) << ","
            << format_g17(a.weight) << "\n";
    return out.str();
}

DiscreteMeasure measure_from_csv(const std::string& text) {
    DiscreteMeasure mu;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string cell;
        double vals[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("measure csv: short row");
            vals[i] = std::stod(cell);
        }
        mu.atoms.push_back({{vals[0], vals[1]}, vals[2]});
    }
    return mu;
}

}  // namespace twistlab
