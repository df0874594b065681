#include "tariffgrid/grid/netsolve.hpp"

#include <cmath>

#include "tariffgrid/errors.hpp"

namespace tariffgrid::grid {

using convex::ConicProgram;
using convex::ConicSolution;
using convex::LinExpr;
using convex::SolveStatus;

namespace {

void init_flow(FlowState& f, int T, int L, int B) {
    f.T = T;
    f.L = L;
    f.B = B;
    const size_t tl = static_cast<size_t>(T) * static_cast<size_t>(L);
    const size_t tb = static_cast<size_t>(T) * static_cast<size_t>(B);
    f.p_fwd_kw.assign(tl, 0.0);
    f.q_fwd_kvar.assign(tl, 0.0);
    f.p_rev_kw.assign(tl, 0.0);
    f.q_rev_kvar.assign(tl, 0.0);
    f.ell_a2.assign(tl, 0.0);
    f.v_pu2.assign(tb, 0.0);
    f.pg_kw.assign(static_cast<size_t>(T), 0.0);
    f.qg_kvar.assign(static_cast<size_t>(T), 0.0);
}

void copy_step(FlowState& dst, const FlowState& src, int t) {
    for (int l = 0; l < dst.L; ++l) {
        dst.p_fwd_kw[dst.line_at(t, l)] = src.p_fwd_kw[src.line_at(0, l)];
        dst.q_fwd_kvar[dst.line_at(t, l)] = src.q_fwd_kvar[src.line_at(0, l)];
        dst.p_rev_kw[dst.line_at(t, l)] = src.p_rev_kw[src.line_at(0, l)];
        dst.q_rev_kvar[dst.line_at(t, l)] = src.q_rev_kvar[src.line_at(0, l)];
        dst.ell_a2[dst.line_at(t, l)] = src.ell_a2[src.line_at(0, l)];
    }
    for (int b = 0; b < dst.B; ++b) dst.v_pu2[dst.bus_at(t, b)] = src.v_pu2[src.bus_at(0, b)];
    dst.pg_kw[static_cast<size_t>(t)] = src.pg_kw[0];
    dst.qg_kvar[static_cast<size_t>(t)] = src.qg_kvar[0];
}

double elastic_slack_sum(const ConicProgram& prog, const DistflowVars& vars,
                         const std::vector<double>& x) {
    (void)prog;
    double sum = 0.0;
    for (convex::VarId v : vars.s_v_hi) sum += x[static_cast<size_t>(v)];
    for (convex::VarId v : vars.s_v_lo) sum += x[static_cast<size_t>(v)];
    for (convex::VarId v : vars.s_i) sum += x[static_cast<size_t>(v)];
    for (convex::VarId v : vars.s_s) sum += x[static_cast<size_t>(v)];
    return sum;
}

// Dual mass of the limit rows: in elastic mode the binding-limit duals equal
// the penalty, so this is a direct congestion-pressure signal.
double limit_dual_sum(const ConicProgram& prog, const ConicSolution& sol) {
    double sum = 0.0;
    for (int id = 0; id < prog.num_cons(); ++id) {
        const auto& con = prog.con(id);
        const char* tag = con.label.tag;
        const bool limit_row = std::string_view(tag) == "vmax" || std::string_view(tag) == "vmin" ||
                               std::string_view(tag) == "ilim" ||
                               std::string_view(tag) == "slim_f" ||
                               std::string_view(tag) == "slim_r";
        if (!limit_row) continue;
        if (con.kind == convex::ConKind::Soc) {
            const auto& zb = sol.soc_dual[static_cast<size_t>(id)];
            if (!zb.empty()) sum += zb[0];
        } else {
            sum += sol.dual[static_cast<size_t>(id)];
        }
    }
    return sum;
}

} // namespace

NetworkSolveResult solve_network(const NetworkCase& c, const RadialLayout& lay,
                                 const InjectionSeries& inj, const NetworkSolveOptions& opt) {
    if (inj.B != c.n_buses())
        throw Error(ErrorCode::DimensionMismatch, "injection series width != bus count");
    const int T = inj.T;
    NetworkSolveResult res;
    init_flow(res.flow, T, c.n_lines(), c.n_buses());
    res.violation_per_t.assign(static_cast<size_t>(T), 0.0);
    res.limit_dual_per_t.assign(static_cast<size_t>(T), 0.0);
    res.status = SolveStatus::Optimal;

    DistflowOptions dopt;
    dopt.elastic = opt.elastic;
    dopt.elastic_penalty = opt.elastic_penalty;

    for (int t = 0; t < T; ++t) {
        InjectionSeries slice(1, inj.B);
        for (int b = 0; b < inj.B; ++b) {
            slice.p_kw[slice.at(0, b)] = inj.p_kw[inj.at(t, b)];
            slice.q_kvar[slice.at(0, b)] = inj.q_kvar[inj.at(t, b)];
        }
        ConicProgram prog;
        DistflowVars vars = build_distflow(prog, c, lay, 1, slice, dopt);
        ConicSolution sol = convex::solve(prog, opt.solver);
        if (sol.status != SolveStatus::Optimal) {
            res.status = sol.status;
            res.message = "step " + std::to_string(t) + ": " + sol.message;
            res.infeasible_t = t;
            res.certificate = sol.certificate;
            return res;
        }
        copy_step(res.flow, extract_flow(c, vars, sol.x), t);
        if (opt.elastic) {
            res.violation_per_t[static_cast<size_t>(t)] = elastic_slack_sum(prog, vars, sol.x);
            res.max_violation =
                std::max(res.max_violation, res.violation_per_t[static_cast<size_t>(t)]);
            res.limit_dual_per_t[static_cast<size_t>(t)] = limit_dual_sum(prog, sol);
        }
    }
    return res;
}

AdjustableResult solve_network_adjustable(const NetworkCase& c, const RadialLayout& lay,
                                          const InjectionSeries& lo, const InjectionSeries& hi,
                                          const AdjustableOptions& opt) {
    if (lo.T != hi.T || lo.B != hi.B || lo.B != c.n_buses())
        throw Error(ErrorCode::DimensionMismatch, "bound series shapes differ");
    const int T = lo.T;
    const int B = lo.B;
    AdjustableResult out;
    out.net.status = SolveStatus::Optimal;
    init_flow(out.net.flow, T, c.n_lines(), c.n_buses());
    out.net.violation_per_t.assign(static_cast<size_t>(T), 0.0);
    out.net.limit_dual_per_t.assign(static_cast<size_t>(T), 0.0);
    out.injection_kw.assign(static_cast<size_t>(T) * static_cast<size_t>(B), 0.0);

    DistflowOptions dopt;
    dopt.elastic = opt.base.elastic;
    dopt.elastic_penalty = opt.base.elastic_penalty;

    for (int t = 0; t < T; ++t) {
        ConicProgram prog;
        std::vector<convex::VarId> inj_vars(static_cast<size_t>(B), -1);
        for (int b = 0; b < B; ++b) {
            const double plo = c.base.kw_to_pu(lo.p_kw[lo.at(t, b)]);
            const double phi = c.base.kw_to_pu(hi.p_kw[hi.at(t, b)]);
            if (phi - plo > 1e-12) {
                inj_vars[static_cast<size_t>(b)] = prog.add_var({"inj", 0, b}, plo, phi);
                prog.obj_linear(inj_vars[static_cast<size_t>(b)], opt.injection_weight);
            }
        }
        auto inj_p = [&](int, int b) {
            if (inj_vars[static_cast<size_t>(b)] >= 0) return LinExpr(inj_vars[static_cast<size_t>(b)], 1.0);
            LinExpr e;
            e.add_const(c.base.kw_to_pu(hi.p_kw[hi.at(t, b)]));
            return e;
        };
        auto inj_q = [&](int, int b) {
            LinExpr e;
            e.add_const(c.base.kw_to_pu(hi.q_kvar[hi.at(t, b)]));
            return e;
        };
        DistflowVars vars = build_distflow(prog, c, lay, 1, inj_p, inj_q, dopt);
        if (opt.sum_cap_kw.has_value()) {
            LinExpr total;
            for (int b = 0; b < B; ++b)
                if (inj_vars[static_cast<size_t>(b)] >= 0) total.add(inj_vars[static_cast<size_t>(b)], 1.0);
            if (!total.terms.empty())
                prog.add_lin_ineq({"injcap", 0},
                                  total, c.base.kw_to_pu((*opt.sum_cap_kw)[static_cast<size_t>(t)]));
        }
        ConicSolution sol = convex::solve(prog, opt.base.solver);
        if (sol.status != SolveStatus::Optimal) {
            out.net.status = sol.status;
            out.net.message = "step " + std::to_string(t) + ": " + sol.message;
            out.net.infeasible_t = t;
            out.net.certificate = sol.certificate;
            return out;
        }
        copy_step(out.net.flow, extract_flow(c, vars, sol.x), t);
        for (int b = 0; b < B; ++b) {
            const size_t k = static_cast<size_t>(t) * static_cast<size_t>(B) + static_cast<size_t>(b);
            out.injection_kw[k] =
                inj_vars[static_cast<size_t>(b)] >= 0
                    ? c.base.pu_to_kw(sol.x[static_cast<size_t>(inj_vars[static_cast<size_t>(b)])])
                    : hi.p_kw[hi.at(t, b)];
        }
        if (opt.base.elastic) {
            out.net.violation_per_t[static_cast<size_t>(t)] = elastic_slack_sum(prog, vars, sol.x);
            out.net.max_violation = std::max(out.net.max_violation,
                                             out.net.violation_per_t[static_cast<size_t>(t)]);
            out.net.limit_dual_per_t[static_cast<size_t>(t)] = limit_dual_sum(prog, sol);
        }
    }
    return out;
}

} // namespace tariffgrid::grid
