#pragma once

#include <optional>

#include "tariffgrid/convex/solver.hpp"
#include "tariffgrid/grid/distflow.hpp"

namespace tariffgrid::grid {

struct NetworkSolveOptions {
    bool elastic = false;
    double elastic_penalty = 100.0;
    convex::SolveOptions solver;
};

struct NetworkSolveResult {
    convex::SolveStatus status = convex::SolveStatus::IterLimit;
    FlowState flow;
    // per-t elastic violation (p.u., sum of slacks) and the worst single one
    std::vector<double> violation_per_t;
    double max_violation = 0.0;
    // per-t dual pressure on binding limit rows (elastic: penalty-weighted)
    std::vector<double> limit_dual_per_t;
    std::string message;
    std::vector<convex::CertificateEntry> certificate;  // first failing step, hard mode
    int infeasible_t = -1;
};

// Solves the branch-flow system with fixed injections, one convex program per
// step (steps decouple once injections are fixed). Minimizing losses selects
// the physical flow among the relaxation's feasible points. In elastic mode
// the limit rows carry penalized slacks so a violated network still returns a
// state plus the violation profile that guides the price update.
NetworkSolveResult solve_network(const NetworkCase& c, const RadialLayout& lay,
                                 const InjectionSeries& inj, const NetworkSolveOptions& opt = {});

// Variant with per-bus adjustable active injections: p in [p_lo, p_hi]
// (per-unit of the fixed series in kW), objective weight per unit of injected
// power (negative to favor injection). Used for curtailment-aware feasibility
// and the optimistic export selection at price-indifferent steps.
struct AdjustableOptions {
    NetworkSolveOptions base;
    double injection_weight = -1.0;  // objective coefficient per p.u. injection
    std::optional<std::vector<double>> sum_cap_kw;  // per-t cap on total adjustable injection
};

struct AdjustableResult {
    NetworkSolveResult net;
    // chosen active injection per (t, bus) in kW for adjustable buses
    std::vector<double> injection_kw;
};

AdjustableResult solve_network_adjustable(const NetworkCase& c, const RadialLayout& lay,
                                          const InjectionSeries& lo, const InjectionSeries& hi,
                                          const AdjustableOptions& opt = {});

} // namespace tariffgrid::grid
