#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "tariffgrid/convex/program.hpp"

namespace tariffgrid::convex {

// Conic standard form
//
//   minimize    c . x
//   subject to  A x = b
//               G x + s = h,  s in K
//
// with K = R+^n_lp  x  SOC(d_1) x ... x SOC(d_k). Quadratic objectives enter
// through an epigraph variable and every quadratic inequality becomes a
// second-order cone, so the interior-point core only ever sees the form
// above. Row provenance is kept so duals and certificates can be mapped back
// to the source program.
struct StandardForm {
    int n = 0;  // variables (model vars first, epigraph last if present)
    Eigen::SparseMatrix<double> A;  // p x n
    Eigen::SparseMatrix<double> G;  // m x n
    Eigen::VectorXd b, h, c;
    int n_lp = 0;
    std::vector<int> soc_dims;
    int epi_var = -1;

    struct EqSource {
        ConId con = -1;    // LinearEq id, or
        VarId fixed = -1;  // variable pinned by lb == ub
    };
    struct LpSource {
        enum Kind { Ineq, Lower, Upper } kind = Ineq;
        int id = 0;  // ConId for Ineq, VarId for bounds
    };
    struct SocSource {
        enum Kind { ModelSoc, Quad, Objective } kind = ModelSoc;
        ConId con = -1;
    };
    std::vector<EqSource> eq_rows;    // per A row
    std::vector<LpSource> lp_rows;    // per LP cone row
    std::vector<SocSource> soc_blocks;

    double obj_constant = 0.0;
};

// Throws Error(NonconvexQuadratic) when a quadratic form has a negative
// eigenvalue beyond tolerance, Error(DimensionMismatch) on bad var ids.
StandardForm compile_standard_form(const ConicProgram& program);

} // namespace tariffgrid::convex
