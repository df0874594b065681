#pragma once

// Random small QP/SOC instance generator shared by the convex unit tests and
// the acceptance suite. Instances are strongly convex, box-bounded, and keep
// the origin strictly feasible so the grid oracle is reliable.

#include "tariffgrid/convex/program.hpp"
#include "tariffgrid/rng.hpp"

namespace qp_random {

inline tariffgrid::convex::ConicProgram make(tariffgrid::Rng& rng, int n) {
    using namespace tariffgrid::convex;
    ConicProgram p;
    for (int i = 0; i < n; ++i) p.add_var({"x", i}, -2.0, 2.0);

    // Q = L^T L + 0.3 I, objective x'Qx + c'x
    std::vector<std::vector<double>> L(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
    for (auto& row : L)
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double q = (i == j) ? 0.3 : 0.0;
            for (int k = 0; k < n; ++k) q += L[static_cast<size_t>(k)][static_cast<size_t>(i)] * L[static_cast<size_t>(k)][static_cast<size_t>(j)];
            p.obj_quad(i, j, i == j ? q : 2.0 * q);
        }
        p.obj_linear(i, rng.uniform(-2.0, 2.0));
    }

    const int n_ineq = rng.uniform_int(0, 2);
    for (int k = 0; k < n_ineq; ++k) {
        LinExpr e;
        for (int i = 0; i < n; ++i) e.add(i, rng.uniform(-1.0, 1.0));
        p.add_lin_ineq({"lin", k}, e, rng.uniform(0.5, 1.5));
    }
    if (rng.next_double() < 0.5 && n >= 2) {
        std::vector<LinExpr> tail;
        for (int i = 0; i < 2; ++i) {
            LinExpr t(i, 1.0);
            t.add_const(rng.uniform(-0.5, 0.5));
            tail.push_back(t);
        }
        LinExpr head;
        head.add_const(rng.uniform(1.0, 2.0));
        p.add_soc({"soc", 0}, head, tail);
    }
    if (rng.next_double() < 0.5) {
        std::vector<QuadTerm> q;
        for (int i = 0; i < n; ++i) q.push_back({i, i, 1.0});
        const double r = rng.uniform(1.2, 2.0);
        p.add_quad_ineq({"ball", 0}, q, LinExpr{}, r * r);
    }
    return p;
}

} // namespace qp_random
