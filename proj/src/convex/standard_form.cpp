#include "tariffgrid/convex/standard_form.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "tariffgrid/errors.hpp"

namespace tariffgrid::convex {

namespace {

using Triplet = Eigen::Triplet<double>;

void check_var(int width, VarId v) {
    if (v < 0 || v >= width)
        throw Error(ErrorCode::DimensionMismatch, "variable id out of range: " + std::to_string(v));
}

// Dense factorization Q = F^T F of the (small) quadratic-form support, via a
// symmetric eigendecomposition so semidefinite forms pass through cleanly.
// Returns rows of F as (local col -> coef) maps.
std::vector<std::vector<std::pair<int, double>>> factor_quad(
    const std::vector<QuadTerm>& quad, std::vector<VarId>& support, const char* where) {
    std::map<VarId, int> local;
    for (const QuadTerm& t : quad) {
        local.emplace(t.a, 0);
        local.emplace(t.b, 0);
    }
    support.clear();
    int k = 0;
    for (auto& [var, idx] : local) {
        idx = k++;
        support.push_back(var);
    }
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(k, k);
    for (const QuadTerm& t : quad) {
        const int a = local[t.a];
        const int b = local[t.b];
        if (a == b) {
            Q(a, a) += t.coef;
        } else {
            Q(a, b) += 0.5 * t.coef;
            Q(b, a) += 0.5 * t.coef;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
    const double lmax = k > 0 ? std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()) : 1.0;
    std::vector<std::vector<std::pair<int, double>>> rows;
    for (int r = 0; r < k; ++r) {
        const double lam = eig.eigenvalues()(r);
        if (lam < -1e-9 * lmax)
            throw Error(ErrorCode::NonconvexQuadratic,
                        std::string(where) + ": quadratic form has negative eigenvalue " +
                            std::to_string(lam));
        if (lam <= 1e-14 * lmax) continue;
        const double s = std::sqrt(lam);
        std::vector<std::pair<int, double>> row;
        for (int cidx = 0; cidx < k; ++cidx) {
            const double v = s * eig.eigenvectors()(cidx, r);
            if (v != 0.0) row.emplace_back(cidx, v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

StandardForm compile_standard_form(const ConicProgram& p) {
    StandardForm sf;
    const int nv = p.num_vars();
    const bool has_quad_obj = !p.objective_quad().empty();
    sf.n = nv + (has_quad_obj ? 1 : 0);
    sf.epi_var = has_quad_obj ? nv : -1;
    sf.obj_constant = p.objective_constant();

    sf.c = Eigen::VectorXd::Zero(sf.n);
    for (const LinTerm& t : p.objective_linear()) {
        check_var(nv, t.var);
        sf.c(t.var) += t.coef;
    }
    if (has_quad_obj) sf.c(sf.epi_var) = 1.0;

    std::vector<Triplet> ta, tg;
    std::vector<double> b, h;

    auto add_eq_row = [&](const LinExpr& e, double rhs, StandardForm::EqSource src) {
        const int row = static_cast<int>(b.size());
        for (const LinTerm& t : e.terms) {
            check_var(sf.n, t.var);
            ta.emplace_back(row, t.var, t.coef);
        }
        b.push_back(rhs - e.constant);
        sf.eq_rows.push_back(src);
    };
    // s_row = h_row - g . x must be the cone slack
    auto add_g_row = [&](const LinExpr& slack_expr) {
        const int row = static_cast<int>(h.size());
        for (const LinTerm& t : slack_expr.terms) {
            check_var(sf.n, t.var);
            tg.emplace_back(row, t.var, -t.coef);
        }
        h.push_back(slack_expr.constant);
    };

    // equalities: model rows plus variables pinned by lb == ub
    for (ConId id = 0; id < p.num_cons(); ++id) {
        const Constraint& con = p.con(id);
        if (con.kind == ConKind::LinearEq) add_eq_row(con.expr, con.rhs, {id, -1});
    }
    for (VarId v = 0; v < nv; ++v) {
        const Variable& var = p.var(v);
        if (var.lb > var.ub)
            throw Error(ErrorCode::ValidationError,
                        "variable " + var.label.str() + " has lb > ub");
        if (var.lb == var.ub && std::isfinite(var.lb))
            add_eq_row(LinExpr(v, 1.0), var.lb, {-1, v});
    }

    // LP cone: inequalities then bounds
    for (ConId id = 0; id < p.num_cons(); ++id) {
        const Constraint& con = p.con(id);
        if (con.kind != ConKind::LinearIneq) continue;
        LinExpr slack;  // rhs - expr >= 0
        slack.constant = con.rhs - con.expr.constant;
        for (const LinTerm& t : con.expr.terms) slack.add(t.var, -t.coef);
        add_g_row(slack);
        sf.lp_rows.push_back({StandardForm::LpSource::Ineq, id});
    }
    for (VarId v = 0; v < nv; ++v) {
        const Variable& var = p.var(v);
        if (var.lb == var.ub) continue;  // handled as equality
        if (std::isfinite(var.ub)) {
            LinExpr slack;  // ub - x >= 0
            slack.constant = var.ub;
            slack.add(v, -1.0);
            add_g_row(slack);
            sf.lp_rows.push_back({StandardForm::LpSource::Upper, v});
        }
        if (std::isfinite(var.lb)) {
            LinExpr slack;  // x - lb >= 0
            slack.constant = -var.lb;
            slack.add(v, 1.0);
            add_g_row(slack);
            sf.lp_rows.push_back({StandardForm::LpSource::Lower, v});
        }
    }
    sf.n_lp = static_cast<int>(h.size());

    // cone slack is the expression itself: s = (head(x), tail(x)) in SOC
    auto add_soc_rows = [&](const LinExpr& head, const std::vector<LinExpr>& tail,
                            StandardForm::SocSource src) {
        add_g_row(head);
        for (const LinExpr& te : tail) add_g_row(te);
        sf.soc_dims.push_back(1 + static_cast<int>(tail.size()));
        sf.soc_blocks.push_back(src);
    };

    // || F x ||^2 <= u  becomes  || (2 F x, u - 1) || <= u + 1
    auto add_quad_as_soc = [&](const std::vector<QuadTerm>& quad, const LinExpr& u,
                               StandardForm::SocSource src, const char* where) {
        std::vector<VarId> support;
        auto frows = factor_quad(quad, support, where);
        LinExpr head = u;
        head.constant += 1.0;
        std::vector<LinExpr> tail;
        for (const auto& frow : frows) {
            LinExpr te;
            for (const auto& [local, coef] : frow) te.add(support[static_cast<size_t>(local)], 2.0 * coef);
            tail.push_back(std::move(te));
        }
        LinExpr last = u;
        last.constant -= 1.0;
        tail.push_back(std::move(last));
        add_soc_rows(head, tail, src);
    };

    for (ConId id = 0; id < p.num_cons(); ++id) {
        const Constraint& con = p.con(id);
        if (con.kind == ConKind::Soc) {
            add_soc_rows(con.soc_head, con.soc_tail, {StandardForm::SocSource::ModelSoc, id});
        } else if (con.kind == ConKind::QuadIneq) {
            LinExpr u;  // u = rhs - lin(x)
            u.constant = con.rhs - con.expr.constant;
            for (const LinTerm& t : con.expr.terms) u.add(t.var, -t.coef);
            add_quad_as_soc(con.quad, u, {StandardForm::SocSource::Quad, id}, con.label.tag);
        }
    }
    if (has_quad_obj) {
        LinExpr u(sf.epi_var, 1.0);
        add_quad_as_soc(p.objective_quad(), u, {StandardForm::SocSource::Objective, -1}, "objective");
    }

    const int p_rows = static_cast<int>(b.size());
    const int m_rows = static_cast<int>(h.size());
    sf.A.resize(p_rows, sf.n);
    sf.A.setFromTriplets(ta.begin(), ta.end());
    sf.A.makeCompressed();
    sf.G.resize(m_rows, sf.n);
    sf.G.setFromTriplets(tg.begin(), tg.end());
    sf.G.makeCompressed();
    sf.b = Eigen::Map<Eigen::VectorXd>(b.data(), p_rows);
    sf.h = Eigen::Map<Eigen::VectorXd>(h.data(), m_rows);
    return sf;
}

} // namespace tariffgrid::convex
