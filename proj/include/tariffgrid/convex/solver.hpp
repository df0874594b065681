#pragma once

#include <string>
#include <vector>

#include "tariffgrid/convex/program.hpp"

namespace tariffgrid::convex {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* status_name(SolveStatus s);

struct KktResiduals {
    double stationarity = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    double complementarity = 0.0;

    double max() const;
};

struct SolveOptions {
    double tol = 1e-7;
    int max_iter = 200;
    bool verbose = false;
};

// Weighted combination of constraints certifying infeasibility (Farkas-type
// ray): sum of weight * row is inconsistent. Bound entries use con = -1 and
// name the variable instead.
struct CertificateEntry {
    ConId con = -1;
    VarId bound_var = -1;
    bool is_upper = false;
    double weight = 0.0;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::IterLimit;
    std::vector<double> x;
    double objective = 0.0;

    // Duals, aligned with program constraint ids. Sign convention for a
    // minimization problem:
    //   grad f + sum(lambda * grad h_eq) + sum(mu * grad g_ineq)
    //          - sum(z0 * grad head + zbar . grad tail) = 0
    // with mu >= 0 and (z0, zbar) in the second-order cone. QuadIneq rows
    // report the scalar mu of the original quadratic constraint.
    std::vector<double> dual;                   // per ConId; 0 for Soc rows
    std::vector<std::vector<double>> soc_dual;  // per ConId; empty unless Soc
    std::vector<double> lb_dual, ub_dual;       // per VarId, >= 0

    KktResiduals kkt;
    int iterations = 0;
    std::string message;
    std::vector<CertificateEntry> certificate;  // set when Infeasible

    bool optimal() const { return status == SolveStatus::Optimal; }
};

// Solve with a homogeneous-embedding primal-dual interior-point method
// (Nesterov-Todd scalings, Mehrotra predictor-corrector). Quadratic
// objectives and quadratic inequalities are rewritten as rotated cones before
// the conic solve; Ruiz equilibration pre-scales the data.
ConicSolution solve(const ConicProgram& program, const SolveOptions& options = {});

// First-order residuals of (point, duals) for the program, infinity norms:
// stationarity, primal violation, dual cone violation, complementarity.
KktResiduals kkt_residuals(const ConicProgram& program, const std::vector<double>& x,
                           const ConicSolution& duals);

} // namespace tariffgrid::convex
