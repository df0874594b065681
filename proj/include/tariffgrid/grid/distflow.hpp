#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tariffgrid/convex/program.hpp"
#include "tariffgrid/grid/network.hpp"

namespace tariffgrid::grid {

// Net bus injections in engineering units (positive = injected into the
// grid), dense over (t, bus).
struct InjectionSeries {
    int T = 0;
    int B = 0;
    std::vector<double> p_kw;
    std::vector<double> q_kvar;

    InjectionSeries() = default;
    InjectionSeries(int t, int b)
        : T(t), B(b), p_kw(static_cast<size_t>(t) * static_cast<size_t>(b), 0.0),
          q_kvar(static_cast<size_t>(t) * static_cast<size_t>(b), 0.0) {}

    size_t at(int t, int b) const { return static_cast<size_t>(t) * static_cast<size_t>(B) + static_cast<size_t>(b); }
};

// Solved branch-flow state, engineering units. Line flows are stored for both
// orientations: fwd is parent->child measured at the parent end, rev is
// child->parent measured at the child end.
struct FlowState {
    int T = 0;
    int L = 0;
    int B = 0;
    std::vector<double> p_fwd_kw, q_fwd_kvar, p_rev_kw, q_rev_kvar, ell_a2;  // T x L
    std::vector<double> v_pu2;                                               // T x B
    std::vector<double> pg_kw, qg_kvar;                                      // T

    size_t line_at(int t, int l) const { return static_cast<size_t>(t) * static_cast<size_t>(L) + static_cast<size_t>(l); }
    size_t bus_at(int t, int b) const { return static_cast<size_t>(t) * static_cast<size_t>(B) + static_cast<size_t>(b); }
};

struct DistflowOptions {
    bool elastic = false;           // soften limit rows with penalized slacks
    double elastic_penalty = 100.0; // objective weight per p.u. violation
    bool min_loss_objective = true; // sum r * ell, selects the physical state
};

// Variable ids of one emitted branch-flow block, plus the elastic slack ids
// when enabled. All indexed like the corresponding FlowState arrays.
struct DistflowVars {
    int T = 0, L = 0, B = 0;
    std::vector<convex::VarId> p_fwd, q_fwd, p_rev, q_rev, ell;  // T x L
    std::vector<convex::VarId> v;                                // T x B
    std::vector<convex::VarId> pg, qg;                           // T
    std::vector<convex::VarId> s_v_hi, s_v_lo;                   // T x B, elastic only
    std::vector<convex::VarId> s_i, s_s;                         // T x L, elastic only

    size_t line_at(int t, int l) const { return static_cast<size_t>(t) * static_cast<size_t>(L) + static_cast<size_t>(l); }
    size_t bus_at(int t, int b) const { return static_cast<size_t>(t) * static_cast<size_t>(B) + static_cast<size_t>(b); }
};

// Emits the lifted branch-flow constraint block for T steps: directed-pair
// loss balances, nodal balances against the injection expressions, the lifted
// voltage drop along each line, the conic relaxation of the flow definition,
// and voltage / current / apparent-power limits. Injection expressions are in
// per-unit and may reference other program variables.
DistflowVars build_distflow(convex::ConicProgram& prog, const NetworkCase& c,
                            const RadialLayout& lay, int T,
                            const std::function<convex::LinExpr(int, int)>& inj_p_pu,
                            const std::function<convex::LinExpr(int, int)>& inj_q_pu,
                            const DistflowOptions& opt = {});

// Fixed-injection overload; throws Error(DimensionMismatch) when the series
// shape does not match (T, n_buses).
DistflowVars build_distflow(convex::ConicProgram& prog, const NetworkCase& c,
                            const RadialLayout& lay, int T, const InjectionSeries& inj,
                            const DistflowOptions& opt = {});

// Extracts a FlowState (engineering units) from a solution of a program built
// by build_distflow.
FlowState extract_flow(const NetworkCase& c, const DistflowVars& vars,
                       const std::vector<double>& x);

// relative cone gap (ell*v - p^2 - q^2) / max(1, ell*v), unit-agnostic
double cone_gap_value(double p, double q, double ell, double v);

struct ConeGapRow {
    int t = 0;
    int line = 0;
    double gap = 0.0;
    bool flagged = false;
};

struct ConeGapReport {
    std::vector<ConeGapRow> rows;  // one per (t, line), parent-side orientation
    double max_gap = 0.0;
    int flagged = 0;
    int total = 0;
    double threshold = 1e-4;
};

// Per-unit relative gap of the conic relaxation per (t, line); rows whose gap
// exceeds the threshold are flagged relaxation-inexact.
ConeGapReport cone_gap(const FlowState& flow, const NetworkCase& c, const RadialLayout& lay,
                       double threshold = 1e-4);

struct LimitRow {
    int t = 0;
    std::string element;
    std::string kind;  // v_hi, v_lo, i, s
    double value = 0.0;
    double limit = 0.0;
    double slack = 0.0;  // limit - value (normalized for utilisations)
};

struct LimitReport {
    std::vector<LimitRow> rows;
    double worst_v_hi_slack = 0.0;  // min over rows, p.u.^2
    double worst_v_lo_slack = 0.0;
    double max_util_s = 0.0;  // sqrt(p^2+q^2)/smax, max over orientations
    double max_util_i = 0.0;  // sqrt(ell)/imax
    double max_violation = 0.0;  // positive when any limit is exceeded
};

LimitReport check_limits(const FlowState& flow, const NetworkCase& c);

} // namespace tariffgrid::grid
