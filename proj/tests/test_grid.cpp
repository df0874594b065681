#include <cmath>

#include "doctest.h"
#include "tariffgrid/convex/solver.hpp"
#include "tariffgrid/errors.hpp"
#include "tariffgrid/grid/distflow.hpp"
#include "tariffgrid/grid/netsolve.hpp"
#include "tariffgrid/grid/network.hpp"

using namespace tariffgrid;
using namespace tariffgrid::grid;

namespace {

NetworkCase two_bus(double r_ohm = 0.01, double x_ohm = 0.01) {
    NetworkCase c;
    c.buses.push_back({"slack", 0.9, 1.1, true});
    c.buses.push_back({"b1", 0.9, 1.1, false});
    c.lines.push_back({"l1", "slack", "b1", r_ohm, x_ohm, 400.0, 92.0});
    return c;
}

NetworkCase chain(int n_children) {
    NetworkCase c;
    c.buses.push_back({"slack", 0.9, 1.1, true});
    std::string prev = "slack";
    for (int i = 0; i < n_children; ++i) {
        const std::string id = "b" + std::to_string(i + 1);
        c.buses.push_back({id, 0.9, 1.1, false});
        c.lines.push_back({"l" + std::to_string(i + 1), prev, id, 0.01, 0.01, 400.0, 92.0});
        prev = id;
    }
    return c;
}

} // namespace

TEST_CASE("validate_radial accepts the smallest tree and records depth") {
    NetworkCase c = two_bus();
    RadialLayout lay = validate_radial(c);
    CHECK(lay.depth[0] == 0);
    CHECK(lay.depth[1] == 1);
    CHECK(lay.parent_bus[1] == 0);
    CHECK(lay.forward[0]);
}

TEST_CASE("validate_radial rejects a triangle") {
    NetworkCase c;
    c.buses.push_back({"s", 0.9, 1.1, true});
    c.buses.push_back({"a", 0.9, 1.1, false});
    c.buses.push_back({"b", 0.9, 1.1, false});
    c.lines.push_back({"l1", "s", "a", 0.01, 0.01, 400.0, 92.0});
    c.lines.push_back({"l2", "a", "b", 0.01, 0.01, 400.0, 92.0});
    c.lines.push_back({"l3", "b", "s", 0.01, 0.01, 400.0, 92.0});
    CHECK_THROWS_WITH_AS(validate_radial(c), doctest::Contains("CycleDetected"), Error);
}

TEST_CASE("validate_radial distinguishes missing slack and disconnection") {
    NetworkCase c = two_bus();
    c.buses[0].is_slack = false;
    CHECK_THROWS_WITH_AS(validate_radial(c), doctest::Contains("NoSlack"), Error);
    c.buses[0].is_slack = true;
    c.buses[1].is_slack = true;
    CHECK_THROWS_WITH_AS(validate_radial(c), doctest::Contains("MultipleSlack"), Error);

    NetworkCase d = two_bus();
    d.buses.push_back({"lonely", 0.9, 1.1, false});
    d.lines.push_back({"l2", "lonely", "lonely2?", 0.01, 0.01, 400.0, 92.0});
    d.buses.push_back({"lonely2?", 0.9, 1.1, false});
    CHECK_THROWS_WITH_AS(validate_radial(d), doctest::Contains("DisconnectedBus"), Error);
}

TEST_CASE("per-unit conversions round trip") {
    PuBase base;
    CHECK(base.z_base_ohm() == doctest::Approx(0.529).epsilon(1e-12));
    for (double r : {0.01, 0.529, 3.7}) CHECK(base.pu_to_ohm(base.ohm_to_pu(r)) == doctest::Approx(r).epsilon(1e-15));
    for (double kw : {0.5, 92.0}) CHECK(base.pu_to_kw(base.kw_to_pu(kw)) == doctest::Approx(kw).epsilon(1e-15));
    CHECK(base.pu_to_a2(base.a2_to_pu(160000.0)) == doctest::Approx(160000.0).epsilon(1e-15));
}

TEST_CASE("loss balance rows tie sent plus received to r*ell") {
    // r = 0.1 ohm with ell = 4 A^2 forces p_fwd + p_rev = 0.4 W
    NetworkCase c = two_bus(0.1, 0.2);
    RadialLayout lay = validate_radial(c);
    InjectionSeries inj(1, 2);
    inj.p_kw[inj.at(0, 1)] = -5.0;  // load draws through the line
    NetworkSolveOptions opt;
    NetworkSolveResult res = solve_network(c, lay, inj, opt);
    REQUIRE(res.status == convex::SolveStatus::Optimal);
    const double p_sum_w = 1000.0 * (res.flow.p_fwd_kw[0] + res.flow.p_rev_kw[0]);
    const double q_sum_w = 1000.0 * (res.flow.q_fwd_kvar[0] + res.flow.q_rev_kvar[0]);
    CHECK(p_sum_w == doctest::Approx(0.1 * res.flow.ell_a2[0]).epsilon(1e-6));
    CHECK(q_sum_w == doctest::Approx(0.2 * res.flow.ell_a2[0]).epsilon(1e-6));
    CHECK(res.flow.ell_a2[0] > 0.0);
    // loss positivity: sent power exceeds received power
    CHECK(res.flow.p_fwd_kw[0] + res.flow.p_rev_kw[0] >= 0.0);
}

TEST_CASE("lifted voltage drop evaluates to the hand value") {
    // v_i = 1.0, r = x = 0.01 p.u., p = 0.5, q = 0.1, ell = 0.26 -> v_j = 0.988052
    PuBase base;
    NetworkCase c = two_bus(base.pu_to_ohm(0.01), base.pu_to_ohm(0.01));
    RadialLayout lay = validate_radial(c);
    convex::ConicProgram prog;
    InjectionSeries inj(1, 2);
    DistflowVars vars = build_distflow(prog, c, lay, 1, inj);
    std::vector<double> x(static_cast<size_t>(prog.num_vars()), 0.0);
    x[static_cast<size_t>(vars.v[vars.bus_at(0, 0)])] = 1.0;
    x[static_cast<size_t>(vars.p_fwd[0])] = 0.5;
    x[static_cast<size_t>(vars.q_fwd[0])] = 0.1;
    x[static_cast<size_t>(vars.ell[0])] = 0.26;
    x[static_cast<size_t>(vars.v[vars.bus_at(0, 1)])] = 0.988052;
    for (int id = 0; id < prog.num_cons(); ++id) {
        const auto& con = prog.con(id);
        if (std::string_view(con.label.tag) == "vdrop")
            CHECK(prog.eval_expr(con.expr, x) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("cone gap arithmetic") {
    CHECK(cone_gap_value(3.0, 4.0, 1.0, 25.0) == doctest::Approx(0.0));
    CHECK(cone_gap_value(3.0, 4.0, 2.0, 25.0) == doctest::Approx(0.5));
}

TEST_CASE("cone gap report flags inexact rows") {
    NetworkCase c = two_bus();
    RadialLayout lay = validate_radial(c);
    FlowState f;
    f.T = 1;
    f.L = 1;
    f.B = 2;
    PuBase base;
    f.p_fwd_kw = {base.pu_to_kw(3.0)};
    f.q_fwd_kvar = {base.pu_to_kw(4.0)};
    f.p_rev_kw = {0.0};
    f.q_rev_kvar = {0.0};
    f.ell_a2 = {base.pu_to_a2(2.0)};
    f.v_pu2 = {25.0, 1.0};
    f.pg_kw = {0.0};
    f.qg_kvar = {0.0};
    ConeGapReport rep = cone_gap(f, c, lay, 1e-4);
    REQUIRE(rep.total == 1);
    CHECK(rep.rows[0].gap == doctest::Approx(0.5));
    CHECK(rep.flagged == 1);
}

TEST_CASE("check_limits reproduces the utilisation examples") {
    NetworkCase c = two_bus();
    RadialLayout lay = validate_radial(c);
    (void)lay;
    FlowState f;
    f.T = 1;
    f.L = 1;
    f.B = 2;
    f.p_fwd_kw = {46.0};
    f.q_fwd_kvar = {0.0};
    f.p_rev_kw = {-46.0};
    f.q_rev_kvar = {0.0};
    f.ell_a2 = {160000.0};
    f.v_pu2 = {1.0, 1.21};
    f.pg_kw = {46.0};
    f.qg_kvar = {0.0};
    LimitReport rep = check_limits(f, c);
    CHECK(rep.max_util_s == doctest::Approx(0.5));
    CHECK(rep.max_util_i == doctest::Approx(1.0));
    // v = 1.21 p.u.^2 sits exactly at the 1.1 p.u. bound
    CHECK(rep.worst_v_hi_slack == doctest::Approx(0.0));
    CHECK(rep.max_violation <= 1e-12);
}

TEST_CASE("network solve on a chain satisfies the branch-flow identities") {
    NetworkCase c = chain(4);
    RadialLayout lay = validate_radial(c);
    InjectionSeries inj(2, c.n_buses());
    for (int b = 1; b < c.n_buses(); ++b) {
        inj.p_kw[inj.at(0, b)] = -2.0;
        inj.q_kvar[inj.at(0, b)] = -reactive_for_pf(2.0, 0.9);
        inj.p_kw[inj.at(1, b)] = 3.0;  // exports in the second step
    }
    NetworkSolveResult res = solve_network(c, lay, inj);
    REQUIRE(res.status == convex::SolveStatus::Optimal);
    const PuBase base = c.base;
    for (int t = 0; t < 2; ++t) {
        for (int l = 0; l < c.n_lines(); ++l) {
            const size_t k = res.flow.line_at(t, l);
            const double r = base.ohm_to_pu(c.lines[static_cast<size_t>(l)].r_ohm);
            const double x = base.ohm_to_pu(c.lines[static_cast<size_t>(l)].x_ohm);
            const double pf = base.kw_to_pu(res.flow.p_fwd_kw[k]);
            const double pr = base.kw_to_pu(res.flow.p_rev_kw[k]);
            const double qf = base.kw_to_pu(res.flow.q_fwd_kvar[k]);
            const double qr = base.kw_to_pu(res.flow.q_rev_kvar[k]);
            const double ell = base.a2_to_pu(res.flow.ell_a2[k]);
            CHECK(pf + pr == doctest::Approx(r * ell).epsilon(1e-6));
            CHECK(qf + qr == doctest::Approx(x * ell).epsilon(1e-6));
            const int parent = lay.parent_of_line(c, l);
            const int child = lay.child_of_line(c, l);
            const double vi = res.flow.v_pu2[res.flow.bus_at(t, parent)];
            const double vj = res.flow.v_pu2[res.flow.bus_at(t, child)];
            CHECK(vj == doctest::Approx(vi - 2.0 * (r * pf + x * qf) + (r * r + x * x) * ell)
                            .epsilon(1e-8));
            CHECK(ell >= -1e-12);
        }
    }
    // exports raise voltages, loads sink them
    CHECK(res.flow.v_pu2[res.flow.bus_at(1, 4)] > res.flow.v_pu2[res.flow.bus_at(0, 4)]);
    // min-loss selection keeps the relaxation tight
    ConeGapReport gaps = cone_gap(res.flow, c, lay);
    CHECK(gaps.flagged == 0);
    CHECK(gaps.max_gap <= 1e-5);
}

TEST_CASE("elastic network solve reports violations instead of failing") {
    NetworkCase c = two_bus();
    RadialLayout lay = validate_radial(c);
    InjectionSeries inj(1, 2);
    inj.p_kw[inj.at(0, 1)] = 150.0;  // far over the 92 kVA line rating
    NetworkSolveOptions hard;
    NetworkSolveResult fail = solve_network(c, lay, inj, hard);
    CHECK(fail.status == convex::SolveStatus::Infeasible);
    CHECK(!fail.certificate.empty());

    NetworkSolveOptions soft;
    soft.elastic = true;
    NetworkSolveResult ok = solve_network(c, lay, inj, soft);
    REQUIRE(ok.status == convex::SolveStatus::Optimal);
    CHECK(ok.max_violation > 1e-3);
    CHECK(ok.limit_dual_per_t[0] > 0.0);
}

TEST_CASE("adjustable injections can back off to keep the network feasible") {
    NetworkCase c = two_bus();
    RadialLayout lay = validate_radial(c);
    InjectionSeries hi(1, 2), lo(1, 2);
    hi.p_kw[hi.at(0, 1)] = 150.0;
    lo.p_kw[lo.at(0, 1)] = 0.0;
    AdjustableOptions opt;
    AdjustableResult res = solve_network_adjustable(c, lay, lo, hi, opt);
    REQUIRE(res.net.status == convex::SolveStatus::Optimal);
    // injection is pushed as high as the apparent-power limit allows
    CHECK(res.injection_kw[1] > 80.0);
    CHECK(res.injection_kw[1] < 92.5);
    LimitReport rep = check_limits(res.net.flow, c);
    CHECK(rep.max_violation <= 1e-6);
}
