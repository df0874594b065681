#include "tariffgrid/convex/program.hpp"

#include <cstring>

namespace tariffgrid::convex {

double ConicProgram::eval_expr(const LinExpr& e, const std::vector<double>& x) const {
    double v = e.constant;
    for (const LinTerm& t : e.terms) v += t.coef * x[static_cast<size_t>(t.var)];
    return v;
}

double ConicProgram::eval_objective(const std::vector<double>& x) const {
    double v = obj_const_;
    for (const LinTerm& t : obj_lin_) v += t.coef * x[static_cast<size_t>(t.var)];
    for (const QuadTerm& t : obj_quad_)
        v += t.coef * x[static_cast<size_t>(t.a)] * x[static_cast<size_t>(t.b)];
    return v;
}

namespace {

void print_expr(std::FILE* out, const ConicProgram& p, const LinExpr& e) {
    bool first = true;
    for (const LinTerm& t : e.terms) {
        std::fprintf(out, "%s%g %s", first ? "" : " + ", t.coef,
                     p.var(t.var).label.str().c_str());
        first = false;
    }
    if (e.constant != 0.0 || first) std::fprintf(out, "%s%g", first ? "" : " + ", e.constant);
}

} // namespace

void ConicProgram::dump(std::FILE* out) const {
    std::fprintf(out, "minimize\n  ");
    bool first = true;
    for (const QuadTerm& t : obj_quad_) {
        std::fprintf(out, "%s%g %s*%s", first ? "" : " + ", t.coef, var(t.a).label.str().c_str(),
                     var(t.b).label.str().c_str());
        first = false;
    }
    for (const LinTerm& t : obj_lin_) {
        std::fprintf(out, "%s%g %s", first ? "" : " + ", t.coef, var(t.var).label.str().c_str());
        first = false;
    }
    if (obj_const_ != 0.0 || first) std::fprintf(out, "%s%g", first ? "" : " + ", obj_const_);
    std::fprintf(out, "\nsubject to\n");
    for (const Constraint& con : cons_) {
        std::fprintf(out, "  %s: ", con.label.str().c_str());
        switch (con.kind) {
        case ConKind::LinearEq:
            print_expr(out, *this, con.expr);
            std::fprintf(out, " == %g\n", con.rhs);
            break;
        case ConKind::LinearIneq:
            print_expr(out, *this, con.expr);
            std::fprintf(out, " <= %g\n", con.rhs);
            break;
        case ConKind::QuadIneq: {
            for (const QuadTerm& t : con.quad)
                std::fprintf(out, "%g %s*%s + ", t.coef, var(t.a).label.str().c_str(),
                             var(t.b).label.str().c_str());
            print_expr(out, *this, con.expr);
            std::fprintf(out, " <= %g\n", con.rhs);
            break;
        }
        case ConKind::Soc: {
            std::fprintf(out, "norm(");
            for (size_t k = 0; k < con.soc_tail.size(); ++k) {
                if (k > 0) std::fprintf(out, "; ");
                print_expr(out, *this, con.soc_tail[k]);
            }
            std::fprintf(out, ") <= ");
            print_expr(out, *this, con.soc_head);
            std::fprintf(out, "\n");
            break;
        }
        }
    }
    std::fprintf(out, "bounds\n");
    for (const Variable& v : vars_) {
        if (v.lb == -kInf && v.ub == kInf) continue;
        std::fprintf(out, "  %g <= %s <= %g\n", v.lb, v.label.str().c_str(), v.ub);
    }
    std::fprintf(out, "end\n");
}

std::string ConicProgram::dump_string() const {
    std::string buf;
    char* data = nullptr;
    size_t len = 0;
    std::FILE* mem = open_memstream(&data, &len);
    if (mem == nullptr) return buf;
    dump(mem);
    std::fclose(mem);
    buf.assign(data, len);
    free(data);
    return buf;
}

} // namespace tariffgrid::convex
