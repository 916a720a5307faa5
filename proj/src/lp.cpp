#include "twistlab/lp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twistlab {

namespace {

// Revised simplex on min f'lam s.t. M lam = g, lam >= 0, where M = A^T
// (n x m), g = -c, f = b.  The primal solution of the original problem is the
// vector of equality multipliers at the optimum.
struct StandardLp {
    int n;  // equality rows
    int m;  // columns
    const std::vector<double>& rows;  // original A, row-major m x n
    std::vector<double> f;            // column costs (= b)
    Eigen::VectorXd g;                // rhs (= -c)

    double col(int i, int j) const { return rows[static_cast<size_t>(j) * n + i]; }
};

struct SimplexOutcome {
    bool optimal = false;
    bool unbounded = false;
    std::vector<int> basis;
    Eigen::VectorXd lam;
    Eigen::VectorXd pi;
};

// phase: minimize sum of artificials first (columns >= m are artificial)
SimplexOutcome run_simplex(const StandardLp& lp, std::vector<int> basis,
                           std::vector<double> art_sign, bool phase1, int max_iter) {
    int n = lp.n, m = lp.m;
    Eigen::MatrixXd B(n, n);
    Eigen::VectorXd cb(n);
    auto col_cost = [&](int j) -> double {
        if (j >= m) return phase1 ? 1.0 : 0.0;
        return phase1 ? 0.0 : lp.f[static_cast<size_t>(j)];
    };
    auto fill_col = [&](int j, Eigen::Ref<Eigen::VectorXd> out) {
        if (j >= m) {
            out.setZero();
            out[j - m] = art_sign[static_cast<size_t>(j - m)];
        } else {
            for (int i = 0; i < n; ++i) out[i] = lp.col(i, j);
        }
    };

    SimplexOutcome res;
    Eigen::VectorXd lam(n), pi(n), colv(n), dir(n);
    std::vector<char> in_basis(static_cast<size_t>(m + n), 0);
    int stall = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::fill(in_basis.begin(), in_basis.end(), 0);
        for (int i = 0; i < n; ++i) {
            fill_col(basis[static_cast<size_t>(i)], B.col(i));
            cb[i] = col_cost(basis[static_cast<size_t>(i)]);
            in_basis[static_cast<size_t>(basis[static_cast<size_t>(i)])] = 1;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        lam = lu.solve(lp.g);
        pi = lu.transpose().solve(cb);

        // pricing: Dantzig by default, Bland after stalls
        bool bland = stall > 2 * (n + 8);
        int enter = -1;
        double best = -1e-9;
        int total_cols = m + n;
        for (int j = 0; j < total_cols; ++j) {
            if (j >= m && !phase1) continue;  // artificials locked out in phase 2
            if (in_basis[static_cast<size_t>(j)]) continue;
            double rc;
            if (j >= m) {
                rc = col_cost(j) - pi[j - m] * art_sign[static_cast<size_t>(j - m)];
            } else {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += pi[i] * lp.col(i, j);
                rc = col_cost(j) - dot;
            }
            if (rc < best - 1e-12 || (bland && rc < -1e-9)) {
                best = rc;
                enter = j;
                if (bland) break;
            }
        }
        if (enter < 0) {
            res.optimal = true;
            res.basis = basis;
            res.lam = lam;
            res.pi = pi;
            return res;
        }

        fill_col(enter, colv);
        dir = lu.solve(colv);
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (dir[i] > 1e-11) {
                double ratio = lam[i] / dir[i];
                if (ratio < best_ratio - 1e-12 ||
                    (std::fabs(ratio - best_ratio) <= 1e-12 && leave >= 0 &&
                     basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            res.unbounded = true;
            res.basis = basis;
            return res;
        }
        stall = best_ratio < 1e-12 ? stall + 1 : 0;
        basis[static_cast<size_t>(leave)] = enter;
    }
    return res;  // iteration limit
}

}  // namespace

LpResult solve_lp(const std::vector<double>& rows, int m, int n, const std::vector<double>& rhs,
                  const std::vector<double>& cost) {
    if (static_cast<int>(rows.size()) != m * n || static_cast<int>(rhs.size()) != m ||
        static_cast<int>(cost.size()) != n)
        throw std::invalid_argument("solve_lp: dimension mismatch");

    // transpose layout: standard LP rows are the original columns
    std::vector<double> cols(rows.size());
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            cols[static_cast<size_t>(r) * n + c] = rows[static_cast<size_t>(r) * n + c];

    StandardLp lp{n, m, cols, rhs, Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) lp.g[i] = -cost[static_cast<size_t>(i)];

    // phase 1: artificial start with signs matching g
    std::vector<int> basis(static_cast<size_t>(n));
    std::vector<double> art_sign(static_cast<size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
        basis[static_cast<size_t>(i)] = m + i;
        art_sign[static_cast<size_t>(i)] = lp.g[i] >= 0.0 ? 1.0 : -1.0;
    }
    int max_iter = 400 * (n + 16) + 40 * m;
    SimplexOutcome p1 = run_simplex(lp, basis, art_sign, true, max_iter);
    LpResult out;
    if (!p1.optimal) {
        out.status = p1.unbounded ? LpStatus::Unbounded : LpStatus::IterationLimit;
        return out;
    }
    double art_residual = 0.0;
    for (int i = 0; i < lp.n; ++i)
        if (p1.basis[static_cast<size_t>(i)] >= m) art_residual += std::fabs(p1.lam[i]);
    if (art_residual > 1e-7) {
        // dual infeasible => primal unbounded below (or numerically stuck)
        out.status = LpStatus::Unbounded;
        return out;
    }

    SimplexOutcome p2 = run_simplex(lp, p1.basis, art_sign, false, max_iter);
    if (!p2.optimal) {
        out.status = p2.unbounded ? LpStatus::Infeasible : LpStatus::IterationLimit;
        return out;
    }
    out.status = LpStatus::Optimal;
    out.x.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) out.x[static_cast<size_t>(i)] = p2.pi[i];
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += cost[static_cast<size_t>(i)] * out.x[static_cast<size_t>(i)];
    out.objective = obj;
    return out;
}

}  // namespace twistlab
