#include "tariffgrid/der/devices.hpp"

#include <cmath>

#include "tariffgrid/errors.hpp"

namespace tariffgrid::der {

using convex::ConicProgram;
using convex::LinExpr;
using convex::VarId;

void validate(const PvSpec& spec) {
    if (spec.rating_kw < 0.0)
        throw Error(ErrorCode::ValidationError, "pv rating must be nonnegative");
    for (double f : spec.forecast_kw)
        if (f < -1e-9 || f > spec.rating_kw + 1e-9)
            throw Error(ErrorCode::ValidationError,
                        "pv forecast outside [0, rating] at bus " + spec.bus);
}

void validate(const BessSpec& spec) {
    if (!(spec.e_min_kwh >= 0.0 && spec.e_min_kwh < spec.e_max_kwh))
        throw Error(ErrorCode::ValidationError, "battery energy window empty at bus " + spec.bus);
    if (!(spec.eta_ch > 0.0 && spec.eta_ch <= 1.0 && spec.eta_dis > 0.0 && spec.eta_dis <= 1.0))
        throw Error(ErrorCode::ValidationError, "battery efficiency outside (0, 1]");
    if (!(spec.e_init_kwh >= spec.e_min_kwh && spec.e_init_kwh <= spec.e_max_kwh))
        throw Error(ErrorCode::ValidationError, "initial SOC outside the energy window");
    if (spec.p_conv_max_kw < std::max(spec.p_ch_max_kw, spec.p_dis_max_kw))
        throw Error(ErrorCode::ValidationError, "converter rating below battery power rating");
    if (spec.p_ch_max_kw <= 0.0 || spec.p_dis_max_kw <= 0.0)
        throw Error(ErrorCode::ValidationError, "battery power limits must be positive");
    if (spec.r_conv_ohm < 0.0)
        throw Error(ErrorCode::ValidationError, "converter resistance must be nonnegative");
}

double end_value(const BessSpec& spec, double e_final_kwh) {
    if (e_final_kwh < -1e-12 || e_final_kwh > spec.e_max_kwh + 1e-12)
        throw Error(ErrorCode::OutOfRangeEnergy,
                    "terminal energy " + std::to_string(e_final_kwh) + " outside [0, " +
                        std::to_string(spec.e_max_kwh) + "]");
    return spec.end_value_slope * (e_final_kwh - e_final_kwh * e_final_kwh / (2.0 * spec.e_max_kwh));
}

double end_value_marginal(const BessSpec& spec, double e_kwh) {
    return spec.end_value_slope * (1.0 - e_kwh / spec.e_max_kwh);
}

BatteryVars battery_constraints(ConicProgram& prog, const BessSpec& spec, int T, double dt_h,
                                int tag) {
    if (dt_h <= 0.0) throw Error(ErrorCode::ValidationError, "dt must be positive");
    validate(spec);
    BatteryVars b;
    b.p_ch.resize(static_cast<size_t>(T));
    b.p_dis.resize(static_cast<size_t>(T));
    b.e.resize(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        b.p_ch[static_cast<size_t>(t)] = prog.add_var({"bch", tag, t}, 0.0, spec.p_ch_max_kw);
        b.p_dis[static_cast<size_t>(t)] = prog.add_var({"bdis", tag, t}, 0.0, spec.p_dis_max_kw);
        b.e[static_cast<size_t>(t)] = prog.add_var({"soc", tag, t}, spec.e_min_kwh, spec.e_max_kwh);
    }
    for (int t = 0; t < T; ++t) {
        const size_t ts = static_cast<size_t>(t);
        // energy recursion
        LinExpr rec(b.e[ts], 1.0);
        rec.add(b.p_ch[ts], -spec.eta_ch * dt_h);
        rec.add(b.p_dis[ts], dt_h / spec.eta_dis);
        double rhs = 0.0;
        if (t == 0)
            rhs = spec.e_init_kwh;
        else
            rec.add(b.e[ts - 1], -1.0);
        prog.add_lin_eq({"erec", tag, t}, rec, rhs);

        // charge/discharge simplex
        LinExpr simplex(b.p_ch[ts], 1.0 / spec.p_ch_max_kw);
        simplex.add(b.p_dis[ts], 1.0 / spec.p_dis_max_kw);
        prog.add_lin_ineq({"bsimplex", tag, t}, simplex, 1.0);

        // hull headroom: charging cannot overfill from the previous state,
        // discharging cannot over-drain it
        LinExpr up(b.p_ch[ts], spec.eta_ch * dt_h);
        LinExpr dn(b.p_dis[ts], dt_h / spec.eta_dis);
        if (t == 0) {
            prog.add_lin_ineq({"bheadup", tag, t}, up, spec.e_max_kwh - spec.e_init_kwh);
            prog.add_lin_ineq({"bheaddn", tag, t}, dn, spec.e_init_kwh - spec.e_min_kwh);
        } else {
            up.add(b.e[ts - 1], 1.0);
            prog.add_lin_ineq({"bheadup", tag, t}, up, spec.e_max_kwh);
            dn.add(b.e[ts - 1], -1.0);
            prog.add_lin_ineq({"bheaddn", tag, t}, dn, -spec.e_min_kwh);
        }
    }
    return b;
}

namespace {

ConverterVars converter_impl(ConicProgram& prog, const BessSpec& spec, const BatteryVars& batt,
                             int T, const PuBase& base, double v_const,
                             const std::vector<VarId>* v_vars, int tag) {
    ConverterVars c;
    c.p_conv.resize(static_cast<size_t>(T));
    c.ell_conv.resize(static_cast<size_t>(T));
    const double s = base.base_kva;
    const double r_pu = base.ohm_to_pu(spec.r_conv_ohm);
    for (int t = 0; t < T; ++t) {
        const size_t ts = static_cast<size_t>(t);
        c.p_conv[ts] = prog.add_var({"pcv", tag, t}, -spec.p_conv_max_kw, spec.p_conv_max_kw);
        c.ell_conv[ts] = prog.add_var({"lcv", tag, t}, 0.0);

        // (p/S)^2 <= v * ell as a rotated cone, v fixed or coupled
        LinExpr head(c.ell_conv[ts], 1.0);
        LinExpr last(c.ell_conv[ts], 1.0);
        if (v_vars != nullptr) {
            head.add((*v_vars)[ts], 1.0);
            last.add((*v_vars)[ts], -1.0);
        } else {
            head.add_const(v_const);
            last.add_const(-v_const);
        }
        std::vector<LinExpr> tail;
        tail.emplace_back(c.p_conv[ts], 2.0 / s);
        tail.push_back(last);
        prog.add_soc({"cvcone", tag, t}, head, tail);

        // resistive loss balance between grid side and battery terminals
        LinExpr loss(c.p_conv[ts], 1.0);
        loss.add(batt.p_dis[ts], 1.0);
        loss.add(batt.p_ch[ts], -1.0);
        loss.add(c.ell_conv[ts], -r_pu * s);
        prog.add_lin_eq({"cvloss", tag, t}, loss, 0.0);
    }
    return c;
}

} // namespace

ConverterVars converter_constraints(ConicProgram& prog, const BessSpec& spec,
                                    const BatteryVars& batt, int T, const PuBase& base,
                                    double bus_v_pu2, int tag) {
    if (bus_v_pu2 <= 0.0)
        throw Error(ErrorCode::NonpositiveVoltageParameter,
                    "converter bus voltage parameter must be positive");
    return converter_impl(prog, spec, batt, T, base, bus_v_pu2, nullptr, tag);
}

ConverterVars converter_constraints(ConicProgram& prog, const BessSpec& spec,
                                    const BatteryVars& batt, int T, const PuBase& base,
                                    const std::vector<VarId>& bus_v_pu2, int tag) {
    if (static_cast<int>(bus_v_pu2.size()) != T)
        throw Error(ErrorCode::DimensionMismatch, "bus voltage series length != T");
    return converter_impl(prog, spec, batt, T, base, 0.0, &bus_v_pu2, tag);
}

PvVars pv_constraints(ConicProgram& prog, const PvSpec& spec, int T, int tag) {
    if (static_cast<int>(spec.forecast_kw.size()) < static_cast<size_t>(T) ||
        static_cast<int>(spec.forecast_kw.size()) < T)
        throw Error(ErrorCode::DimensionMismatch, "pv forecast shorter than horizon");
    PvVars pv;
    pv.p_out.resize(static_cast<size_t>(T));
    pv.p_curtail.resize(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
        const size_t ts = static_cast<size_t>(t);
        pv.p_out[ts] = prog.add_var({"pv", tag, t}, 0.0);
        pv.p_curtail[ts] = prog.add_var({"pvc", tag, t}, 0.0);
        LinExpr bal(pv.p_out[ts], 1.0);
        bal.add(pv.p_curtail[ts], 1.0);
        prog.add_lin_eq({"pvbal", tag, t}, bal, spec.forecast_kw[ts]);
    }
    return pv;
}

void end_value_objective(ConicProgram& prog, const BessSpec& spec, VarId e_final) {
    prog.obj_linear(e_final, -spec.end_value_slope);
    prog.obj_quad(e_final, e_final, spec.end_value_slope / (2.0 * spec.e_max_kwh));
}

} // namespace tariffgrid::der
