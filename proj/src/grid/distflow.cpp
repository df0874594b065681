#include "tariffgrid/grid/distflow.hpp"

#include <algorithm>
#include <cmath>

#include "tariffgrid/errors.hpp"

namespace tariffgrid::grid {

using convex::ConicProgram;
using convex::LinExpr;
using convex::VarId;

DistflowVars build_distflow(ConicProgram& prog, const NetworkCase& c, const RadialLayout& lay,
                            int T, const std::function<LinExpr(int, int)>& inj_p_pu,
                            const std::function<LinExpr(int, int)>& inj_q_pu,
                            const DistflowOptions& opt) {
    const int L = c.n_lines();
    const int B = c.n_buses();
    const int slack = c.slack_index();

    DistflowVars vars;
    vars.T = T;
    vars.L = L;
    vars.B = B;
    const size_t tl = static_cast<size_t>(T) * static_cast<size_t>(L);
    const size_t tb = static_cast<size_t>(T) * static_cast<size_t>(B);
    vars.p_fwd.resize(tl);
    vars.q_fwd.resize(tl);
    vars.p_rev.resize(tl);
    vars.q_rev.resize(tl);
    vars.ell.resize(tl);
    vars.v.resize(tb);
    vars.pg.resize(static_cast<size_t>(T));
    vars.qg.resize(static_cast<size_t>(T));
    if (opt.elastic) {
        vars.s_v_hi.resize(tb);
        vars.s_v_lo.resize(tb);
        vars.s_i.resize(tl);
        vars.s_s.resize(tl);
    }

    for (int t = 0; t < T; ++t) {
        for (int l = 0; l < L; ++l) {
            vars.p_fwd[vars.line_at(t, l)] = prog.add_var({"pf", t, l});
            vars.q_fwd[vars.line_at(t, l)] = prog.add_var({"qf", t, l});
            vars.p_rev[vars.line_at(t, l)] = prog.add_var({"pr", t, l});
            vars.q_rev[vars.line_at(t, l)] = prog.add_var({"qr", t, l});
            const Line& line = c.lines[static_cast<size_t>(l)];
            const double ell_max = c.base.a2_to_pu(line.imax_a * line.imax_a);
            vars.ell[vars.line_at(t, l)] =
                prog.add_var({"ell", t, l}, 0.0, opt.elastic ? convex::kInf : ell_max);
        }
        for (int b = 0; b < B; ++b) {
            const Bus& bus = c.buses[static_cast<size_t>(b)];
            double lo = bus.vmin_pu * bus.vmin_pu;
            double hi = bus.vmax_pu * bus.vmax_pu;
            if (b == slack) lo = hi = c.slack_v_pu * c.slack_v_pu;
            const bool soft = opt.elastic && b != slack;
            vars.v[vars.bus_at(t, b)] =
                prog.add_var({"v", t, b}, soft ? 0.0 : lo, soft ? convex::kInf : hi);
        }
        vars.pg[static_cast<size_t>(t)] = prog.add_var({"pg", t});
        vars.qg[static_cast<size_t>(t)] = prog.add_var({"qg", t});

        if (opt.elastic) {
            for (int b = 0; b < B; ++b) {
                vars.s_v_hi[vars.bus_at(t, b)] = prog.add_var({"svh", t, b}, 0.0);
                vars.s_v_lo[vars.bus_at(t, b)] = prog.add_var({"svl", t, b}, 0.0);
                prog.obj_linear(vars.s_v_hi[vars.bus_at(t, b)], opt.elastic_penalty);
                prog.obj_linear(vars.s_v_lo[vars.bus_at(t, b)], opt.elastic_penalty);
            }
            for (int l = 0; l < L; ++l) {
                vars.s_i[vars.line_at(t, l)] = prog.add_var({"si", t, l}, 0.0);
                vars.s_s[vars.line_at(t, l)] = prog.add_var({"ss", t, l}, 0.0);
                prog.obj_linear(vars.s_i[vars.line_at(t, l)], opt.elastic_penalty);
                prog.obj_linear(vars.s_s[vars.line_at(t, l)], opt.elastic_penalty);
            }
        }

        for (int l = 0; l < L; ++l) {
            const Line& line = c.lines[static_cast<size_t>(l)];
            const double r = c.base.ohm_to_pu(line.r_ohm);
            const double x = c.base.ohm_to_pu(line.x_ohm);
            const size_t k = vars.line_at(t, l);
            const int parent = lay.parent_of_line(c, l);
            const int child = lay.child_of_line(c, l);

            // sent plus received equals the loss on the line
            LinExpr lbp(vars.p_fwd[k], 1.0);
            lbp.add(vars.p_rev[k], 1.0).add(vars.ell[k], -r);
            prog.add_lin_eq({"loss_p", t, l}, lbp, 0.0);
            LinExpr lbq(vars.q_fwd[k], 1.0);
            lbq.add(vars.q_rev[k], 1.0).add(vars.ell[k], -x);
            prog.add_lin_eq({"loss_q", t, l}, lbq, 0.0);

            // lifted voltage drop along the parent->child orientation
            LinExpr vd(vars.v[vars.bus_at(t, child)], 1.0);
            vd.add(vars.v[vars.bus_at(t, parent)], -1.0);
            vd.add(vars.p_fwd[k], 2.0 * r);
            vd.add(vars.q_fwd[k], 2.0 * x);
            vd.add(vars.ell[k], -(r * r + x * x));
            prog.add_lin_eq({"vdrop", t, l}, vd, 0.0);

            // conic relaxation of p^2 + q^2 = ell * v at the parent side
            LinExpr head(vars.ell[k], 1.0);
            head.add(vars.v[vars.bus_at(t, parent)], 1.0);
            std::vector<LinExpr> tail;
            tail.emplace_back(vars.p_fwd[k], 2.0);
            tail.emplace_back(vars.q_fwd[k], 2.0);
            LinExpr last(vars.ell[k], 1.0);
            last.add(vars.v[vars.bus_at(t, parent)], -1.0);
            tail.push_back(last);
            prog.add_soc({"cone", t, l}, head, tail);

            // current and apparent-power limits
            const double smax = c.base.kw_to_pu(line.smax_kva);
            LinExpr shead_f, shead_r;
            shead_f.add_const(smax);
            shead_r.add_const(smax);
            if (opt.elastic) {
                const double ell_max = c.base.a2_to_pu(line.imax_a * line.imax_a);
                LinExpr er(vars.ell[k], 1.0);
                er.add(vars.s_i[k], -1.0);
                prog.add_lin_ineq({"ilim", t, l}, er, ell_max);
                shead_f.add(vars.s_s[k], 1.0);
                shead_r.add(vars.s_s[k], 1.0);
            }
            prog.add_soc({"slim_f", t, l}, shead_f,
                         {LinExpr(vars.p_fwd[k], 1.0), LinExpr(vars.q_fwd[k], 1.0)});
            prog.add_soc({"slim_r", t, l}, shead_r,
                         {LinExpr(vars.p_rev[k], 1.0), LinExpr(vars.q_rev[k], 1.0)});
        }

        // nodal balances: everything leaving the bus equals generation plus
        // the net prosumer/consumer injection
        for (int b = 0; b < B; ++b) {
            LinExpr bal_p, bal_q;
            for (int l : lay.incident_lines[static_cast<size_t>(b)]) {
                const size_t k = vars.line_at(t, l);
                if (lay.parent_of_line(c, l) == b) {
                    bal_p.add(vars.p_fwd[k], 1.0);
                    bal_q.add(vars.q_fwd[k], 1.0);
                } else {
                    bal_p.add(vars.p_rev[k], 1.0);
                    bal_q.add(vars.q_rev[k], 1.0);
                }
            }
            if (b == slack) {
                bal_p.add(vars.pg[static_cast<size_t>(t)], -1.0);
                bal_q.add(vars.qg[static_cast<size_t>(t)], -1.0);
            }
            const LinExpr inj_p = inj_p_pu(t, b);
            const LinExpr inj_q = inj_q_pu(t, b);
            for (const auto& term : inj_p.terms) bal_p.add(term.var, -term.coef);
            for (const auto& term : inj_q.terms) bal_q.add(term.var, -term.coef);
            prog.add_lin_eq({"bal_p", t, b}, bal_p, inj_p.constant);
            prog.add_lin_eq({"bal_q", t, b}, bal_q, inj_q.constant);
        }

        if (opt.elastic) {
            for (int b = 0; b < B; ++b) {
                if (b == slack) continue;
                const Bus& bus = c.buses[static_cast<size_t>(b)];
                LinExpr hi(vars.v[vars.bus_at(t, b)], 1.0);
                hi.add(vars.s_v_hi[vars.bus_at(t, b)], -1.0);
                prog.add_lin_ineq({"vmax", t, b}, hi, bus.vmax_pu * bus.vmax_pu);
                LinExpr lo(vars.v[vars.bus_at(t, b)], -1.0);
                lo.add(vars.s_v_lo[vars.bus_at(t, b)], -1.0);
                prog.add_lin_ineq({"vmin", t, b}, lo, -(bus.vmin_pu * bus.vmin_pu));
            }
        }

        if (opt.min_loss_objective) {
            for (int l = 0; l < L; ++l) {
                const double r = c.base.ohm_to_pu(c.lines[static_cast<size_t>(l)].r_ohm);
                // tiny floor keeps ell determined on zero-resistance lines
                prog.obj_linear(vars.ell[vars.line_at(t, l)], std::max(r, 1e-9));
            }
        }
    }
    return vars;
}

DistflowVars build_distflow(ConicProgram& prog, const NetworkCase& c, const RadialLayout& lay,
                            int T, const InjectionSeries& inj, const DistflowOptions& opt) {
    if (inj.T != T || inj.B != c.n_buses())
        throw Error(ErrorCode::DimensionMismatch,
                    "injection series is " + std::to_string(inj.T) + "x" + std::to_string(inj.B) +
                        ", expected " + std::to_string(T) + "x" + std::to_string(c.n_buses()));
    const PuBase base = c.base;
    auto inj_p = [&inj, base](int t, int b) {
        LinExpr e;
        e.add_const(base.kw_to_pu(inj.p_kw[inj.at(t, b)]));
        return e;
    };
    auto inj_q = [&inj, base](int t, int b) {
        LinExpr e;
        e.add_const(base.kw_to_pu(inj.q_kvar[inj.at(t, b)]));
        return e;
    };
    return build_distflow(prog, c, lay, T, inj_p, inj_q, opt);
}

FlowState extract_flow(const NetworkCase& c, const DistflowVars& vars,
                       const std::vector<double>& x) {
    FlowState f;
    f.T = vars.T;
    f.L = vars.L;
    f.B = vars.B;
    const size_t tl = static_cast<size_t>(f.T) * static_cast<size_t>(f.L);
    const size_t tb = static_cast<size_t>(f.T) * static_cast<size_t>(f.B);
    f.p_fwd_kw.resize(tl);
    f.q_fwd_kvar.resize(tl);
    f.p_rev_kw.resize(tl);
    f.q_rev_kvar.resize(tl);
    f.ell_a2.resize(tl);
    f.v_pu2.resize(tb);
    f.pg_kw.resize(static_cast<size_t>(f.T));
    f.qg_kvar.resize(static_cast<size_t>(f.T));
    for (size_t k = 0; k < tl; ++k) {
        f.p_fwd_kw[k] = c.base.pu_to_kw(x[static_cast<size_t>(vars.p_fwd[k])]);
        f.q_fwd_kvar[k] = c.base.pu_to_kw(x[static_cast<size_t>(vars.q_fwd[k])]);
        f.p_rev_kw[k] = c.base.pu_to_kw(x[static_cast<size_t>(vars.p_rev[k])]);
        f.q_rev_kvar[k] = c.base.pu_to_kw(x[static_cast<size_t>(vars.q_rev[k])]);
        f.ell_a2[k] = c.base.pu_to_a2(x[static_cast<size_t>(vars.ell[k])]);
    }
    for (size_t k = 0; k < tb; ++k) f.v_pu2[k] = x[static_cast<size_t>(vars.v[k])];
    for (int t = 0; t < f.T; ++t) {
        f.pg_kw[static_cast<size_t>(t)] = c.base.pu_to_kw(x[static_cast<size_t>(vars.pg[static_cast<size_t>(t)])]);
        f.qg_kvar[static_cast<size_t>(t)] = c.base.pu_to_kw(x[static_cast<size_t>(vars.qg[static_cast<size_t>(t)])]);
    }
    return f;
}

double cone_gap_value(double p, double q, double ell, double v) {
    const double lv = ell * v;
    return (lv - p * p - q * q) / std::max(1.0, lv);
}

ConeGapReport cone_gap(const FlowState& flow, const NetworkCase& c, const RadialLayout& lay,
                       double threshold) {
    ConeGapReport rep;
    rep.threshold = threshold;
    rep.rows.reserve(static_cast<size_t>(flow.T) * static_cast<size_t>(flow.L));
    for (int t = 0; t < flow.T; ++t) {
        for (int l = 0; l < flow.L; ++l) {
            const size_t k = flow.line_at(t, l);
            const int parent = lay.parent_of_line(c, l);
            const double p = c.base.kw_to_pu(flow.p_fwd_kw[k]);
            const double q = c.base.kw_to_pu(flow.q_fwd_kvar[k]);
            const double ell = c.base.a2_to_pu(flow.ell_a2[k]);
            const double v = flow.v_pu2[flow.bus_at(t, parent)];
            ConeGapRow row;
            row.t = t;
            row.line = l;
            row.gap = cone_gap_value(p, q, ell, v);
            row.flagged = row.gap > threshold;
            rep.max_gap = std::max(rep.max_gap, row.gap);
            if (row.flagged) ++rep.flagged;
            ++rep.total;
            rep.rows.push_back(row);
        }
    }
    return rep;
}

LimitReport check_limits(const FlowState& flow, const NetworkCase& c) {
    LimitReport rep;
    rep.worst_v_hi_slack = convex::kInf;
    rep.worst_v_lo_slack = convex::kInf;
    const int slack = c.slack_index();
    for (int t = 0; t < flow.T; ++t) {
        for (int b = 0; b < flow.B; ++b) {
            if (b == slack) continue;
            const Bus& bus = c.buses[static_cast<size_t>(b)];
            const double v = flow.v_pu2[flow.bus_at(t, b)];
            const double hi = bus.vmax_pu * bus.vmax_pu;
            const double lo = bus.vmin_pu * bus.vmin_pu;
            rep.rows.push_back({t, bus.id, "v_hi", v, hi, hi - v});
            rep.rows.push_back({t, bus.id, "v_lo", v, lo, v - lo});
            rep.worst_v_hi_slack = std::min(rep.worst_v_hi_slack, hi - v);
            rep.worst_v_lo_slack = std::min(rep.worst_v_lo_slack, v - lo);
            rep.max_violation = std::max({rep.max_violation, v - hi, lo - v});
        }
        for (int l = 0; l < flow.L; ++l) {
            const Line& line = c.lines[static_cast<size_t>(l)];
            const size_t k = flow.line_at(t, l);
            const double s_fwd = std::hypot(flow.p_fwd_kw[k], flow.q_fwd_kvar[k]);
            const double s_rev = std::hypot(flow.p_rev_kw[k], flow.q_rev_kvar[k]);
            const double util_s = std::max(s_fwd, s_rev) / line.smax_kva;
            const double util_i = std::sqrt(std::max(0.0, flow.ell_a2[k])) / line.imax_a;
            rep.rows.push_back({t, line.id, "s", util_s, 1.0, 1.0 - util_s});
            rep.rows.push_back({t, line.id, "i", util_i, 1.0, 1.0 - util_i});
            rep.max_util_s = std::max(rep.max_util_s, util_s);
            rep.max_util_i = std::max(rep.max_util_i, util_i);
            rep.max_violation = std::max({rep.max_violation, util_s - 1.0, util_i - 1.0});
        }
    }
    return rep;
}

} // namespace tariffgrid::grid
