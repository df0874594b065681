#pragma once

#include <Eigen/Sparse>
#include <string>

#include "tariffgrid/convex/standard_form.hpp"

namespace tariffgrid::convex::detail {

// Homogeneous self-dual embedding interior-point method for the standard
// conic form produced by compile_standard_form. Nesterov-Todd scalings for
// the LP and second-order cones, Mehrotra predictor-corrector, sparse LDL^T
// of the statically regularized KKT system with iterative refinement.
//
// Infeasibility is declared through the embedding: tau -> 0 with kappa > 0
// yields a Farkas-type certificate in (y, z) or an unboundedness ray in x.
struct IpmSettings {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    double feastol_inacc = 1e-4;
    double abstol_inacc = 5e-5;
    double reltol_inacc = 5e-5;
    int max_iter = 100;
    int nitref = 3;          // iterative refinement steps per KKT solve
    double linsysacc = 1e-13;
    double deltastat = 7e-8; // static regularization
    double stepmin = 1e-6;
    double stepmax = 0.999;
    double sigmamin = 1e-4;
    double sigmamax = 1.0;
    double step_backoff = 0.99;
    double safeguard = 500.0; // restore best iterate if pres blows up
    int ruiz_iters = 8;
    bool verbose = false;
};

enum class IpmStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter, Numerics };

struct IpmResult {
    IpmStatus status = IpmStatus::Numerics;
    bool reduced_accuracy = false;
    Eigen::VectorXd x, y, z, s;  // unscaled, divided by tau
    int iterations = 0;
    double pres = 0.0, dres = 0.0, gap = 0.0;
    double pcost = 0.0, dcost = 0.0;
    std::string message;
};

IpmResult ipm_solve(const StandardForm& sf, const IpmSettings& settings);

} // namespace tariffgrid::convex::detail
