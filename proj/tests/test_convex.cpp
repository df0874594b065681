#include <cmath>
#include <cstring>

#include "brute.hpp"
#include "convex/ipm.hpp"
#include "doctest.h"
#include "qp_random.hpp"
#include "tariffgrid/convex/solver.hpp"
#include "tariffgrid/convex/standard_form.hpp"
#include "tariffgrid/errors.hpp"
#include "tariffgrid/rng.hpp"

using namespace tariffgrid;
using namespace tariffgrid::convex;

TEST_CASE("min x^2 subject to x >= 1") {
    ConicProgram p;
    const VarId x = p.add_var({"x"});
    p.obj_quad(x, x, 1.0);
    const ConId c = p.add_lin_ineq({"xmin"}, LinExpr(x, -1.0), -1.0);  // -x <= -1
    ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
    // stationarity 2x - mu = 0 at x = 1
    CHECK(sol.dual[static_cast<size_t>(c)] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(sol.kkt.max() <= 1e-7);
}

TEST_CASE("min t subject to ||(3,4)|| <= t") {
    ConicProgram p;
    const VarId t = p.add_var({"t"});
    p.obj_linear(t, 1.0);
    std::vector<LinExpr> tail;
    LinExpr e1;
    e1.add_const(3.0);
    LinExpr e2;
    e2.add_const(4.0);
    tail.push_back(e1);
    tail.push_back(e2);
    p.add_soc({"cone"}, LinExpr(t, 1.0), tail);
    ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("x >= 1 and x <= 0 is infeasible with a certificate") {
    ConicProgram p;
    const VarId x = p.add_var({"x"});
    p.obj_linear(x, 1.0);
    const ConId lo = p.add_lin_ineq({"ge1"}, LinExpr(x, -1.0), -1.0);
    const ConId hi = p.add_lin_ineq({"le0"}, LinExpr(x, 1.0), 0.0);
    ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Infeasible);
    REQUIRE(!sol.certificate.empty());
    bool saw_lo = false, saw_hi = false;
    for (const auto& ce : sol.certificate) {
        if (ce.con == lo) saw_lo = true;
        if (ce.con == hi) saw_hi = true;
    }
    CHECK(saw_lo);
    CHECK(saw_hi);
}

TEST_CASE("unbounded problem reports a ray") {
    ConicProgram p;
    const VarId x = p.add_var({"x"}, 0.0, kInf);
    p.obj_linear(x, -1.0);
    ConicSolution sol = solve(p);
    CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("kkt_residuals on the analytic QP") {
    ConicProgram p;
    const VarId x = p.add_var({"x"});
    p.obj_quad(x, x, 1.0);
    const ConId c = p.add_lin_ineq({"xmin"}, LinExpr(x, -1.0), -1.0);
    ConicSolution duals;
    duals.dual.assign(1, 2.0);
    duals.lb_dual.assign(1, 0.0);
    duals.ub_dual.assign(1, 0.0);
    duals.soc_dual.assign(1, {});
    (void)c;

    KktResiduals r = kkt_residuals(p, {1.0}, duals);
    CHECK(r.stationarity == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.primal == doctest::Approx(0.0));
    CHECK(r.complementarity == doctest::Approx(0.0));

    // perturb x to 1.01: primal stays feasible, stationarity picks up 0.02
    r = kkt_residuals(p, {1.01}, duals);
    CHECK(r.primal == doctest::Approx(0.0));
    CHECK(r.stationarity == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("equality constrained QP with dual") {
    ConicProgram p;
    const VarId x = p.add_var({"x"});
    const VarId y = p.add_var({"y"});
    // (x-3)^2 + (y+1)^2
    p.obj_quad(x, x, 1.0);
    p.obj_linear(x, -6.0);
    p.obj_quad(y, y, 1.0);
    p.obj_linear(y, 2.0);
    p.obj_constant(10.0);
    LinExpr e(x, 1.0);
    e.add(y, 1.0);
    const ConId c = p.add_lin_eq({"sum"}, e, 1.0);
    ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(sol.x[1] == doctest::Approx(-1.5).epsilon(1e-6));
    CHECK(sol.dual[static_cast<size_t>(c)] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("quadratic inequality via cone rewrite") {
    ConicProgram p;
    const VarId x = p.add_var({"x"});
    const VarId y = p.add_var({"y"});
    p.obj_linear(x, 1.0);
    p.obj_linear(y, 1.0);
    const ConId ball = p.add_quad_ineq({"ball"}, {{x, x, 1.0}, {y, y, 1.0}}, LinExpr{}, 2.0);
    ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(sol.x[1] == doctest::Approx(-1.0).epsilon(1e-6));
    // stationarity: 1 + 2 mu x = 0 at x = -1
    CHECK(sol.dual[static_cast<size_t>(ball)] == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("rotated-cone identity point lies on the boundary") {
    // minimize ell subject to ||(2p, 2q, ell - v)|| <= ell + v with p=3, q=4, v=25
    ConicProgram p;
    const VarId ell = p.add_var({"ell"}, 0.0, kInf);
    std::vector<LinExpr> tail;
    LinExpr t1;
    t1.add_const(6.0);
    LinExpr t2;
    t2.add_const(8.0);
    LinExpr t3(ell, 1.0);
    t3.add_const(-25.0);
    tail = {t1, t2, t3};
    LinExpr head(ell, 1.0);
    head.add_const(25.0);
    p.add_soc({"bf"}, head, tail);
    p.obj_linear(ell, 1.0);
    ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scale invariance of the argmin") {
    Rng rng(17);
    ConicProgram p = qp_random::make(rng, 2);
    ConicSolution s1 = solve(p);
    REQUIRE(s1.status == SolveStatus::Optimal);

    ConicProgram q = p;
    ConicProgram scaled;
    for (int v = 0; v < p.num_vars(); ++v) scaled.add_var(p.var(v).label, p.var(v).lb, p.var(v).ub);
    for (const auto& t : p.objective_quad()) scaled.obj_quad(t.a, t.b, 3.0 * t.coef);
    for (const auto& t : p.objective_linear()) scaled.obj_linear(t.var, 3.0 * t.coef);
    for (int id = 0; id < p.num_cons(); ++id) {
        const Constraint& con = p.con(id);
        if (con.kind == ConKind::LinearIneq) scaled.add_lin_ineq(con.label, con.expr, con.rhs);
        if (con.kind == ConKind::Soc) scaled.add_soc(con.label, con.soc_head, con.soc_tail);
        if (con.kind == ConKind::QuadIneq)
            scaled.add_quad_ineq(con.label, con.quad, con.expr, con.rhs);
    }
    ConicSolution s2 = solve(scaled);
    REQUIRE(s2.status == SolveStatus::Optimal);
    for (size_t i = 0; i < s1.x.size(); ++i) CHECK(s2.x[i] == doctest::Approx(s1.x[i]).epsilon(1e-5));
    for (size_t i = 0; i < s1.dual.size(); ++i)
        CHECK(s2.dual[i] == doctest::Approx(3.0 * s1.dual[i]).epsilon(1e-4));
}

TEST_CASE("deterministic repeat solves") {
    Rng rng(99);
    ConicProgram p = qp_random::make(rng, 3);
    ConicSolution a = solve(p);
    ConicSolution b = solve(p);
    REQUIRE(a.status == b.status);
    CHECK(a.iterations == b.iterations);
    REQUIRE(a.x.size() == b.x.size());
    CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
    CHECK(a.objective == b.objective);
}

TEST_CASE("weak duality at the returned iterate") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        ConicProgram p = qp_random::make(rng, 2);
        StandardForm sf = compile_standard_form(p);
        detail::IpmSettings st;
        detail::IpmResult res = detail::ipm_solve(sf, st);
        if (res.status == detail::IpmStatus::Optimal)
            CHECK(res.dcost <= res.pcost + 1e-6 * (1.0 + std::abs(res.pcost)));
    }
}

TEST_CASE("random QP/SOC instances match the grid oracle") {
    Rng rng(2024);
    int solved = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + (trial % 2);
        ConicProgram p = qp_random::make(rng, n);
        ConicSolution sol = solve(p);
        REQUIRE(sol.status == SolveStatus::Optimal);
        auto grid = brute::grid_minimize(p, std::vector<double>(static_cast<size_t>(n), -2.0),
                                         std::vector<double>(static_cast<size_t>(n), 2.0));
        REQUIRE(grid.found);
        CHECK(std::abs(sol.objective - grid.objective) <=
              1e-4 * (1.0 + std::abs(grid.objective)));
        CHECK(sol.kkt.max() <= 1e-6);
        ++solved;
    }
    CHECK(solved == 25);
}
