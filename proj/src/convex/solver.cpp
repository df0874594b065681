#include "tariffgrid/convex/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "ipm.hpp"
#include "tariffgrid/convex/standard_form.hpp"
#include "tariffgrid/errors.hpp"

namespace tariffgrid::convex {

const char* status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterLimit: return "IterLimit";
    }
    return "?";
}

double KktResiduals::max() const {
    return std::max(std::max(stationarity, primal), std::max(dual, complementarity));
}

namespace {

// Map standard-form duals back onto program constraints and variable bounds.
void recover_duals(const ConicProgram& p, const StandardForm& sf, const detail::IpmResult& ipm,
                   ConicSolution& sol) {
    const int nc = p.num_cons();
    const int nv = p.num_vars();
    sol.dual.assign(static_cast<size_t>(nc), 0.0);
    sol.soc_dual.assign(static_cast<size_t>(nc), {});
    sol.lb_dual.assign(static_cast<size_t>(nv), 0.0);
    sol.ub_dual.assign(static_cast<size_t>(nv), 0.0);

    for (int r = 0; r < static_cast<int>(sf.eq_rows.size()); ++r) {
        const auto& src = sf.eq_rows[static_cast<size_t>(r)];
        const double y = ipm.y(r);
        if (src.con >= 0) {
            sol.dual[static_cast<size_t>(src.con)] = y;
        } else {
            // variable pinned by lb == ub: fold the multiplier into the bound duals
            if (y >= 0.0)
                sol.ub_dual[static_cast<size_t>(src.fixed)] = y;
            else
                sol.lb_dual[static_cast<size_t>(src.fixed)] = -y;
        }
    }
    for (int r = 0; r < sf.n_lp; ++r) {
        const auto& src = sf.lp_rows[static_cast<size_t>(r)];
        const double z = ipm.z(r);
        switch (src.kind) {
        case StandardForm::LpSource::Ineq: sol.dual[static_cast<size_t>(src.id)] = z; break;
        case StandardForm::LpSource::Upper: sol.ub_dual[static_cast<size_t>(src.id)] = z; break;
        case StandardForm::LpSource::Lower: sol.lb_dual[static_cast<size_t>(src.id)] = z; break;
        }
    }
    int off = sf.n_lp;
    for (size_t bi = 0; bi < sf.soc_blocks.size(); ++bi) {
        const int dim = sf.soc_dims[bi];
        const auto& src = sf.soc_blocks[bi];
        if (src.kind == StandardForm::SocSource::ModelSoc) {
            std::vector<double> zb(static_cast<size_t>(dim));
            for (int k = 0; k < dim; ++k) zb[static_cast<size_t>(k)] = ipm.z(off + k);
            sol.soc_dual[static_cast<size_t>(src.con)] = std::move(zb);
        } else if (src.kind == StandardForm::SocSource::Quad) {
            // || (2Fx, u-1) || <= u+1. At an aligned optimum the tail duals are
            // z_k = -mu (Fx)_k with (Fx)_k = s_k / 2, so a least-squares fit on
            // the tail recovers mu at the accuracy of the compiled stationarity
            // residual; z_head + z_last is the fallback when Fx ~ 0.
            double num = 0.0, den = 0.0;
            for (int k = 1; k < dim - 1; ++k) {
                const double fx = 0.5 * ipm.s(off + k);
                num -= ipm.z(off + k) * fx;
                den += fx * fx;
            }
            const double mu = den > 1e-14 ? std::max(0.0, num / den)
                                          : std::max(0.0, ipm.z(off) + ipm.z(off + dim - 1));
            sol.dual[static_cast<size_t>(src.con)] = mu;
        }
        off += dim;
    }
}

void build_certificate(const StandardForm& sf, const detail::IpmResult& ipm,
                       ConicSolution& sol) {
    auto push = [&](ConId con, VarId var, bool upper, double w) {
        if (std::abs(w) > 1e-10) sol.certificate.push_back({con, var, upper, w});
    };
    for (int r = 0; r < static_cast<int>(sf.eq_rows.size()); ++r) {
        const auto& src = sf.eq_rows[static_cast<size_t>(r)];
        if (src.con >= 0)
            push(src.con, -1, false, ipm.y(r));
        else
            push(-1, src.fixed, false, ipm.y(r));
    }
    for (int r = 0; r < sf.n_lp; ++r) {
        const auto& src = sf.lp_rows[static_cast<size_t>(r)];
        switch (src.kind) {
        case StandardForm::LpSource::Ineq: push(src.id, -1, false, ipm.z(r)); break;
        case StandardForm::LpSource::Upper: push(-1, src.id, true, ipm.z(r)); break;
        case StandardForm::LpSource::Lower: push(-1, src.id, false, ipm.z(r)); break;
        }
    }
    int off = sf.n_lp;
    for (size_t bi = 0; bi < sf.soc_blocks.size(); ++bi) {
        const int dim = sf.soc_dims[bi];
        const auto& src = sf.soc_blocks[bi];
        if (src.con >= 0) push(src.con, -1, false, ipm.z(off));
        off += dim;
    }
    std::sort(sol.certificate.begin(), sol.certificate.end(),
              [](const CertificateEntry& a, const CertificateEntry& b) {
                  return std::abs(a.weight) > std::abs(b.weight);
              });
}

// Active-set polish. The embedding returns iterates whose primal error grows
// like sqrt(gap) once a quadratic objective goes through the epigraph cone,
// so both the point and the duals are refined here: a few primal-dual Newton
// steps on the active-set KKT system (stationarity plus active constraints as
// equalities, second-order cones on their boundary manifold). The polished
// pair is kept only when it improves the model residuals.
void polish_solution(const ConicProgram& p, ConicSolution& sol) {
    const int nv = p.num_vars();
    const double act_tol = 1e-6;
    const double dual_tol = 1e-6;

    struct Act {
        enum Kind { Eq, Ineq, Quad, Soc, Ub, Lb, Pin } kind;
        int id;
        double warm;
    };
    std::vector<Act> act;
    for (ConId id = 0; id < p.num_cons(); ++id) {
        const Constraint& con = p.con(id);
        const double mu = sol.dual[static_cast<size_t>(id)];
        switch (con.kind) {
        case ConKind::LinearEq: act.push_back({Act::Eq, id, mu}); break;
        case ConKind::LinearIneq: {
            const double g = p.eval_expr(con.expr, sol.x) - con.rhs;
            if (g > -act_tol * (1.0 + std::abs(con.rhs)) || mu > dual_tol)
                act.push_back({Act::Ineq, id, std::max(0.0, mu)});
            break;
        }
        case ConKind::QuadIneq: {
            double q = 0.0;
            for (const QuadTerm& t : con.quad)
                q += t.coef * sol.x[static_cast<size_t>(t.a)] * sol.x[static_cast<size_t>(t.b)];
            const double g = q + p.eval_expr(con.expr, sol.x) - con.rhs;
            if (g > -act_tol * (1.0 + std::abs(con.rhs)) || mu > dual_tol)
                act.push_back({Act::Quad, id, std::max(0.0, mu)});
            break;
        }
        case ConKind::Soc: {
            const double head = p.eval_expr(con.soc_head, sol.x);
            double t2 = 0.0;
            for (const auto& te : con.soc_tail) {
                const double v = p.eval_expr(te, sol.x);
                t2 += v * v;
            }
            const double tn = std::sqrt(t2);
            if (tn < 1e-10) break;  // cone vertex, leave as is
            const auto& zb = sol.soc_dual[static_cast<size_t>(id)];
            const double z0 = zb.empty() ? 0.0 : zb[0];
            if (head - tn < act_tol * (1.0 + std::abs(head)) || z0 > dual_tol)
                act.push_back({Act::Soc, id, std::max(0.0, z0)});
            break;
        }
        }
    }
    for (VarId v = 0; v < nv; ++v) {
        const Variable& var = p.var(v);
        const double xv = sol.x[static_cast<size_t>(v)];
        if (var.lb == var.ub && std::isfinite(var.lb)) {
            act.push_back({Act::Pin, v,
                           sol.ub_dual[static_cast<size_t>(v)] - sol.lb_dual[static_cast<size_t>(v)]});
            continue;
        }
        if (std::isfinite(var.ub) && (xv > var.ub - act_tol * (1.0 + std::abs(var.ub)) ||
                                      sol.ub_dual[static_cast<size_t>(v)] > dual_tol))
            act.push_back({Act::Ub, v, std::max(0.0, sol.ub_dual[static_cast<size_t>(v)])});
        if (std::isfinite(var.lb) && (xv < var.lb + act_tol * (1.0 + std::abs(var.lb)) ||
                                      sol.lb_dual[static_cast<size_t>(v)] > dual_tol))
            act.push_back({Act::Lb, v, std::max(0.0, sol.lb_dual[static_cast<size_t>(v)])});
    }

    const int K = static_cast<int>(act.size());
    const int dim = nv + K;
    Eigen::VectorXd u(dim);
    for (int v = 0; v < nv; ++v) u(v) = sol.x[static_cast<size_t>(v)];
    for (int k = 0; k < K; ++k) u(nv + k) = act[static_cast<size_t>(k)].warm;

    // residual and Jacobian of the active-set KKT system at (x, w)
    auto assemble = [&](const Eigen::VectorXd& pt, Eigen::VectorXd& resid,
                        std::vector<Eigen::Triplet<double>>* jac) {
        resid = Eigen::VectorXd::Zero(dim);
        std::vector<double> x(static_cast<size_t>(nv));
        for (int v = 0; v < nv; ++v) x[static_cast<size_t>(v)] = pt(v);
        for (const LinTerm& t : p.objective_linear()) resid(t.var) += t.coef;
        for (const QuadTerm& t : p.objective_quad()) {
            resid(t.a) += t.coef * x[static_cast<size_t>(t.b)];
            resid(t.b) += t.coef * x[static_cast<size_t>(t.a)];
            if (jac) {
                jac->emplace_back(t.a, t.b, t.coef);
                jac->emplace_back(t.b, t.a, t.coef);
            }
        }
        for (int k = 0; k < K; ++k) {
            const Act& a = act[static_cast<size_t>(k)];
            const double w = pt(nv + k);
            const int wrow = nv + k;
            // one coefficient of grad g: stationarity coupling plus the two
            // symmetric Jacobian slots; the constraint value itself is added
            // to resid(wrow) by the case below
            auto couple = [&](int var, double g) {
                resid(var) += w * g;
                if (jac) {
                    jac->emplace_back(var, wrow, g);
                    jac->emplace_back(wrow, var, g);
                }
            };
            switch (a.kind) {
            case Act::Eq:
            case Act::Ineq: {
                const Constraint& con = p.con(a.id);
                for (const LinTerm& t : con.expr.terms) couple(t.var, t.coef);
                resid(wrow) += p.eval_expr(con.expr, x) - con.rhs;
                break;
            }
            case Act::Quad: {
                const Constraint& con = p.con(a.id);
                double q = 0.0;
                for (const LinTerm& t : con.expr.terms) couple(t.var, t.coef);
                for (const QuadTerm& t : con.quad) {
                    const double xa = x[static_cast<size_t>(t.a)];
                    const double xb = x[static_cast<size_t>(t.b)];
                    q += t.coef * xa * xb;
                    couple(t.a, t.coef * xb);
                    couple(t.b, t.coef * xa);
                    if (jac) {
                        jac->emplace_back(t.a, t.b, w * t.coef);
                        jac->emplace_back(t.b, t.a, w * t.coef);
                    }
                }
                resid(wrow) += q + p.eval_expr(con.expr, x) - con.rhs;
                break;
            }
            case Act::Soc: {
                const Constraint& con = p.con(a.id);
                const size_t nt = con.soc_tail.size();
                std::vector<double> tv(nt);
                double t2 = 0.0;
                for (size_t t = 0; t < nt; ++t) {
                    tv[t] = p.eval_expr(con.soc_tail[t], x);
                    t2 += tv[t] * tv[t];
                }
                const double tn = std::sqrt(std::max(t2, 1e-300));
                // g = ||T(x)|| - head(x)
                for (const LinTerm& t : con.soc_head.terms) couple(t.var, -t.coef);
                for (size_t t = 0; t < nt; ++t)
                    for (const LinTerm& lt : con.soc_tail[t].terms) couple(lt.var, (tv[t] / tn) * lt.coef);
                resid(wrow) += tn - p.eval_expr(con.soc_head, x);
                if (jac) {
                    // w * Hess(||T||) = w/tn * (J_T' J_T - (J_T' u)(J_T' u)') with u = T/tn
                    std::vector<std::pair<int, double>> jtu;  // J_T' u, sparse
                    for (size_t t = 0; t < nt; ++t)
                        for (const LinTerm& lt : con.soc_tail[t].terms)
                            jtu.emplace_back(lt.var, (tv[t] / tn) * lt.coef);
                    for (size_t t = 0; t < nt; ++t)
                        for (const LinTerm& la : con.soc_tail[t].terms)
                            for (const LinTerm& lb : con.soc_tail[t].terms)
                                jac->emplace_back(la.var, lb.var, w / tn * la.coef * lb.coef);
                    for (const auto& [ra, va] : jtu)
                        for (const auto& [rb, vb] : jtu)
                            jac->emplace_back(ra, rb, -w / tn * va * vb);
                }
                break;
            }
            case Act::Ub: {
                couple(a.id, 1.0);
                resid(wrow) += x[static_cast<size_t>(a.id)] - p.var(a.id).ub;
                break;
            }
            case Act::Lb: {
                couple(a.id, -1.0);
                resid(wrow) += p.var(a.id).lb - x[static_cast<size_t>(a.id)];
                break;
            }
            case Act::Pin: {
                couple(a.id, 1.0);
                resid(wrow) += x[static_cast<size_t>(a.id)] - p.var(a.id).lb;
                break;
            }
            }
        }
    };

    Eigen::VectorXd resid;
    bool solved = true;
    for (int newton = 0; newton < 3 && solved; ++newton) {
        std::vector<Eigen::Triplet<double>> trip;
        assemble(u, resid, &trip);
        const double rnorm = resid.lpNorm<Eigen::Infinity>();
        if (rnorm < 1e-13) break;
        for (int d = 0; d < dim; ++d) trip.emplace_back(d, d, d < nv ? 1e-10 : -1e-10);
        Eigen::SparseMatrix<double> J(dim, dim);
        J.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
        if (lu.info() != Eigen::Success) {
            solved = false;
            break;
        }
        Eigen::VectorXd step = lu.solve(-resid);
        // a local refinement has no business taking large steps; degenerate
        // active sets can make the corrector blow up
        if (!step.allFinite() || step.head(nv).lpNorm<Eigen::Infinity>() > 1e-2 * (1.0 + u.head(nv).lpNorm<Eigen::Infinity>())) {
            solved = newton > 0;
            break;
        }
        double scale = 1.0;
        Eigen::VectorXd cand, cand_resid;
        bool improved = false;
        for (int bt = 0; bt < 5; ++bt) {
            cand = u + scale * step;
            assemble(cand, cand_resid, nullptr);
            if (cand_resid.lpNorm<Eigen::Infinity>() < rnorm) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            solved = newton > 0;
            break;
        }
        u = cand;
    }
    if (!solved) {
        sol.kkt = kkt_residuals(p, sol.x, sol);
        return;
    }

    ConicSolution trial = sol;
    for (int v = 0; v < nv; ++v) trial.x[static_cast<size_t>(v)] = u(v);
    std::fill(trial.dual.begin(), trial.dual.end(), 0.0);
    std::fill(trial.lb_dual.begin(), trial.lb_dual.end(), 0.0);
    std::fill(trial.ub_dual.begin(), trial.ub_dual.end(), 0.0);
    for (auto& zb : trial.soc_dual) std::fill(zb.begin(), zb.end(), 0.0);
    for (int k = 0; k < K; ++k) {
        const Act& a = act[static_cast<size_t>(k)];
        double w = u(nv + k);
        switch (a.kind) {
        case Act::Eq: trial.dual[static_cast<size_t>(a.id)] = w; break;
        case Act::Ineq:
        case Act::Quad: trial.dual[static_cast<size_t>(a.id)] = std::max(0.0, w); break;
        case Act::Soc: {
            w = std::max(0.0, w);
            const Constraint& con = p.con(a.id);
            std::vector<double> tv(con.soc_tail.size());
            double t2 = 0.0;
            for (size_t t = 0; t < tv.size(); ++t) {
                tv[t] = p.eval_expr(con.soc_tail[t], trial.x);
                t2 += tv[t] * tv[t];
            }
            const double tn = std::sqrt(std::max(t2, 1e-300));
            std::vector<double> zb(tv.size() + 1);
            zb[0] = w;
            for (size_t t = 0; t < tv.size(); ++t) zb[t + 1] = -w * tv[t] / tn;
            trial.soc_dual[static_cast<size_t>(a.id)] = std::move(zb);
            break;
        }
        case Act::Ub: trial.ub_dual[static_cast<size_t>(a.id)] = std::max(0.0, w); break;
        case Act::Lb: trial.lb_dual[static_cast<size_t>(a.id)] = std::max(0.0, w); break;
        case Act::Pin:
            if (w >= 0.0)
                trial.ub_dual[static_cast<size_t>(a.id)] = w;
            else
                trial.lb_dual[static_cast<size_t>(a.id)] = -w;
            break;
        }
    }
    trial.objective = p.eval_objective(trial.x);

    const KktResiduals before = kkt_residuals(p, sol.x, sol);
    const KktResiduals after = kkt_residuals(p, trial.x, trial);
    if (after.max() < before.max()) {
        trial.kkt = after;
        sol = std::move(trial);
    } else {
        sol.kkt = before;
    }
}

} // namespace

ConicSolution solve(const ConicProgram& program, const SolveOptions& options) {
    StandardForm sf = compile_standard_form(program);

    // Degenerate conic part: pad with a vacuous LP row so the embedding
    // always has a cone to work with.
    if (sf.G.rows() == 0) {
        sf.G.resize(1, sf.n);
        sf.h = Eigen::VectorXd::Ones(1);
        sf.n_lp = 1;
        sf.lp_rows.push_back({StandardForm::LpSource::Ineq, -1});
    }

    detail::IpmSettings st;
    st.feastol = st.abstol = st.reltol = std::min(options.tol * 0.1, 1e-8);
    st.max_iter = options.max_iter;
    st.verbose = options.verbose;
    detail::IpmResult ipm = detail::ipm_solve(sf, st);

    ConicSolution sol;
    sol.iterations = ipm.iterations;
    sol.message = ipm.message;
    sol.x.assign(static_cast<size_t>(program.num_vars()), 0.0);
    for (int v = 0; v < program.num_vars(); ++v) sol.x[static_cast<size_t>(v)] = ipm.x(v);

    switch (ipm.status) {
    case detail::IpmStatus::Optimal: {
        recover_duals(program, sf, ipm, sol);
        sol.objective = program.eval_objective(sol.x);
        polish_solution(program, sol);
        sol.status =
            sol.kkt.max() <= options.tol ? SolveStatus::Optimal : SolveStatus::IterLimit;
        if (sol.status == SolveStatus::IterLimit)
            sol.message += " (model KKT residuals above tol)";
        break;
    }
    case detail::IpmStatus::PrimalInfeasible:
        sol.status = SolveStatus::Infeasible;
        build_certificate(sf, ipm, sol);
        break;
    case detail::IpmStatus::DualInfeasible:
        sol.status = SolveStatus::Unbounded;
        sol.message += " (x holds an unbounded ray)";
        break;
    case detail::IpmStatus::MaxIter:
    case detail::IpmStatus::Numerics: {
        recover_duals(program, sf, ipm, sol);
        sol.objective = program.eval_objective(sol.x);
        polish_solution(program, sol);
        // a reduced-accuracy iterate can still satisfy the model tolerance
        sol.status =
            sol.kkt.max() <= options.tol ? SolveStatus::Optimal : SolveStatus::IterLimit;
        break;
    }
    }
    return sol;
}

KktResiduals kkt_residuals(const ConicProgram& p, const std::vector<double>& x,
                           const ConicSolution& duals) {
    const int nv = p.num_vars();
    if (static_cast<int>(x.size()) != nv)
        throw Error(ErrorCode::DimensionMismatch, "point size != number of variables");
    if (static_cast<int>(duals.dual.size()) != p.num_cons() ||
        static_cast<int>(duals.lb_dual.size()) != nv)
        throw Error(ErrorCode::DimensionMismatch, "dual vectors do not match program");

    KktResiduals r;
    std::vector<double> grad(static_cast<size_t>(nv), 0.0);
    for (const LinTerm& t : p.objective_linear()) grad[static_cast<size_t>(t.var)] += t.coef;
    for (const QuadTerm& t : p.objective_quad()) {
        grad[static_cast<size_t>(t.a)] += t.coef * x[static_cast<size_t>(t.b)];
        grad[static_cast<size_t>(t.b)] += t.coef * x[static_cast<size_t>(t.a)];
    }

    auto eval = [&](const LinExpr& e) { return p.eval_expr(e, x); };

    for (ConId id = 0; id < p.num_cons(); ++id) {
        const Constraint& con = p.con(id);
        const double mu = duals.dual[static_cast<size_t>(id)];
        switch (con.kind) {
        case ConKind::LinearEq: {
            const double v = eval(con.expr) - con.rhs;
            r.primal = std::max(r.primal, std::abs(v));
            for (const LinTerm& t : con.expr.terms) grad[static_cast<size_t>(t.var)] += mu * t.coef;
            break;
        }
        case ConKind::LinearIneq: {
            const double g = eval(con.expr) - con.rhs;
            r.primal = std::max(r.primal, std::max(0.0, g));
            r.dual = std::max(r.dual, std::max(0.0, -mu));
            r.complementarity = std::max(r.complementarity, std::abs(mu * g));
            for (const LinTerm& t : con.expr.terms) grad[static_cast<size_t>(t.var)] += mu * t.coef;
            break;
        }
        case ConKind::QuadIneq: {
            double q = 0.0;
            for (const QuadTerm& t : con.quad)
                q += t.coef * x[static_cast<size_t>(t.a)] * x[static_cast<size_t>(t.b)];
            const double g = q + eval(con.expr) - con.rhs;
            r.primal = std::max(r.primal, std::max(0.0, g));
            r.dual = std::max(r.dual, std::max(0.0, -mu));
            r.complementarity = std::max(r.complementarity, std::abs(mu * g));
            for (const LinTerm& t : con.expr.terms) grad[static_cast<size_t>(t.var)] += mu * t.coef;
            for (const QuadTerm& t : con.quad) {
                grad[static_cast<size_t>(t.a)] += mu * t.coef * x[static_cast<size_t>(t.b)];
                grad[static_cast<size_t>(t.b)] += mu * t.coef * x[static_cast<size_t>(t.a)];
            }
            break;
        }
        case ConKind::Soc: {
            const double head = eval(con.soc_head);
            double tail2 = 0.0;
            std::vector<double> tails(con.soc_tail.size());
            for (size_t k = 0; k < con.soc_tail.size(); ++k) {
                tails[k] = eval(con.soc_tail[k]);
                tail2 += tails[k] * tails[k];
            }
            r.primal = std::max(r.primal, std::max(0.0, std::sqrt(tail2) - head));
            const auto& zb = duals.soc_dual[static_cast<size_t>(id)];
            if (zb.empty()) break;
            double zt2 = 0.0;
            for (size_t k = 1; k < zb.size(); ++k) zt2 += zb[k] * zb[k];
            r.dual = std::max(r.dual, std::max(0.0, std::sqrt(zt2) - zb[0]));
            double comp = zb[0] * head;
            for (size_t k = 0; k < con.soc_tail.size(); ++k) comp += zb[k + 1] * tails[k];
            r.complementarity = std::max(r.complementarity, std::abs(comp));
            for (const LinTerm& t : con.soc_head.terms)
                grad[static_cast<size_t>(t.var)] -= zb[0] * t.coef;
            for (size_t k = 0; k < con.soc_tail.size(); ++k)
                for (const LinTerm& t : con.soc_tail[k].terms)
                    grad[static_cast<size_t>(t.var)] -= zb[k + 1] * t.coef;
            break;
        }
        }
    }

    for (VarId v = 0; v < nv; ++v) {
        const Variable& var = p.var(v);
        const double xv = x[static_cast<size_t>(v)];
        const double mu_ub = duals.ub_dual[static_cast<size_t>(v)];
        const double mu_lb = duals.lb_dual[static_cast<size_t>(v)];
        if (std::isfinite(var.ub)) {
            r.primal = std::max(r.primal, std::max(0.0, xv - var.ub));
            if (var.lb != var.ub)
                r.complementarity = std::max(r.complementarity, std::abs(mu_ub * (xv - var.ub)));
        }
        if (std::isfinite(var.lb)) {
            r.primal = std::max(r.primal, std::max(0.0, var.lb - xv));
            if (var.lb != var.ub)
                r.complementarity = std::max(r.complementarity, std::abs(mu_lb * (var.lb - xv)));
        }
        r.dual = std::max(r.dual, std::max(0.0, -mu_ub));
        r.dual = std::max(r.dual, std::max(0.0, -mu_lb));
        grad[static_cast<size_t>(v)] += mu_ub - mu_lb;
    }

    for (double g : grad) r.stationarity = std::max(r.stationarity, std::abs(g));
    return r;
}

} // namespace tariffgrid::convex
