// Dense linear programming: minimize c'x subject to A x <= b with free x,
// solved through the standard-form dual by a revised simplex.  Built for the
// sup-norm fitting problems: few variables, many rows.
#pragma once

#include <vector>

namespace twistlab {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    std::vector<double> x;
    double objective = 0.0;
};

// rows: m x n (row-major), rhs: m, cost: n
LpResult solve_lp(const std::vector<double>& rows, int m, int n, const std::vector<double>& rhs,
                  const std::vector<double>& cost);

}  // namespace twistlab
