#pragma once

// Brute-force reference oracles used by tests and the acceptance suite. These
// deliberately avoid the solver code paths they are checking.

#include <cmath>
#include <vector>

#include "tariffgrid/convex/program.hpp"

namespace brute {

using tariffgrid::convex::ConicProgram;
using tariffgrid::convex::ConKind;
using tariffgrid::convex::Constraint;
using tariffgrid::convex::LinTerm;
using tariffgrid::convex::QuadTerm;

// max constraint violation at x (equalities as |.|)
inline double violation(const ConicProgram& p, const std::vector<double>& x) {
    double worst = 0.0;
    for (int id = 0; id < p.num_cons(); ++id) {
        const Constraint& con = p.con(id);
        switch (con.kind) {
        case ConKind::LinearEq:
            worst = std::max(worst, std::abs(p.eval_expr(con.expr, x) - con.rhs));
            break;
        case ConKind::LinearIneq:
            worst = std::max(worst, p.eval_expr(con.expr, x) - con.rhs);
            break;
        case ConKind::QuadIneq: {
            double q = 0.0;
            for (const QuadTerm& t : con.quad)
                q += t.coef * x[static_cast<size_t>(t.a)] * x[static_cast<size_t>(t.b)];
            worst = std::max(worst, q + p.eval_expr(con.expr, x) - con.rhs);
            break;
        }
        case ConKind::Soc: {
            double tail2 = 0.0;
            for (const auto& te : con.soc_tail) {
                const double v = p.eval_expr(te, x);
                tail2 += v * v;
            }
            worst = std::max(worst, std::sqrt(tail2) - p.eval_expr(con.soc_head, x));
            break;
        }
        }
    }
    for (int v = 0; v < p.num_vars(); ++v) {
        const auto& var = p.var(v);
        worst = std::max(worst, var.lb - x[static_cast<size_t>(v)]);
        worst = std::max(worst, x[static_cast<size_t>(v)] - var.ub);
    }
    return worst;
}

struct GridResult {
    bool found = false;
    std::vector<double> x;
    double objective = 0.0;
};

// Adaptive grid minimization over a box, for programs with <= 3 variables.
// Each round lays a uniform grid over the current window, keeps the best
// point whose violation is within a cell-proportional slack, then zooms in
// around it.
inline GridResult grid_minimize(const ConicProgram& p, std::vector<double> lo,
                                std::vector<double> hi, int rounds = 7, int pts = 33) {
    const size_t n = static_cast<size_t>(p.num_vars());
    GridResult best;
    for (int round = 0; round < rounds; ++round) {
        double cell = 0.0;
        for (size_t d = 0; d < n; ++d) cell = std::max(cell, (hi[d] - lo[d]) / (pts - 1));
        const double slack = 2.0 * cell + 1e-12;
        std::vector<int> idx(n, 0);
        std::vector<double> x(n);
        bool done = false;
        GridResult round_best;
        while (!done) {
            for (size_t d = 0; d < n; ++d)
                x[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (pts - 1);
            if (violation(p, x) <= slack) {
                const double f = p.eval_objective(x);
                if (!round_best.found || f < round_best.objective) {
                    round_best.found = true;
                    round_best.objective = f;
                    round_best.x = x;
                }
            }
            size_t d = 0;
            for (; d < n; ++d) {
                if (++idx[d] < pts) break;
                idx[d] = 0;
            }
            done = (d == n);
        }
        if (!round_best.found) break;
        best = round_best;
        // zoom: window of +-2 cells around the incumbent
        for (size_t d = 0; d < n; ++d) {
            const double c = (hi[d] - lo[d]) / (pts - 1);
            const double center = best.x[d];
            lo[d] = center - 2.0 * c;
            hi[d] = center + 2.0 * c;
        }
    }
    return best;
}

} // namespace brute
