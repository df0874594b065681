#pragma once

#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace tariffgrid::convex {

using VarId = int;
using ConId = int;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Cheap structured name: tag plus up to three integer subscripts. Avoids
// building strings while assembling programs with tens of thousands of rows;
// str() renders "tag[i,j,k]" on demand for reports and LP dumps.
struct Label {
    const char* tag = "";
    int i = -1;
    int j = -1;
    int k = -1;

    std::string str() const {
        std::string out(tag);
        if (i < 0) return out;
        out += '[';
        out += std::to_string(i);
        if (j >= 0) {
            out += ',';
            out += std::to_string(j);
            if (k >= 0) {
                out += ',';
                out += std::to_string(k);
            }
        }
        out += ']';
        return out;
    }
};

struct LinTerm {
    VarId var;
    double coef;
};

// affine expression: sum(coef * x) + constant
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(VarId v, double c) { terms.push_back({v, c}); }

    LinExpr& add(VarId v, double c) {
        if (c != 0.0) terms.push_back({v, c});
        return *this;
    }
    LinExpr& add_const(double c) {
        constant += c;
        return *this;
    }
};

// coef * x_a * x_b (a != b contributes to both symmetric slots)
struct QuadTerm {
    VarId a;
    VarId b;
    double coef;
};

enum class ConKind { LinearEq, LinearIneq, Soc, QuadIneq };

struct Constraint {
    ConKind kind;
    Label label;
    // LinearEq:   expr == rhs
    // LinearIneq: expr <= rhs
    // QuadIneq:   sum(quad) + expr <= rhs
    // Soc:        || tail ||_2 <= head   (expr/rhs/quad unused)
    LinExpr expr;
    double rhs = 0.0;
    std::vector<QuadTerm> quad;
    LinExpr soc_head;
    std::vector<LinExpr> soc_tail;
};

struct Variable {
    Label label;
    double lb = -kInf;
    double ub = kInf;
};

// Convex program over named scalar variables: linear equalities and
// inequalities, second-order cones, convex quadratic inequalities, and a
// convex quadratic objective (minimization). This is the exchange format
// between the model builders and the solver; it stays close to the math so
// emitted constraints can be inspected one to one.
class ConicProgram {
  public:
    VarId add_var(Label label, double lb = -kInf, double ub = kInf) {
        vars_.push_back({label, lb, ub});
        return static_cast<VarId>(vars_.size() - 1);
    }

    // objective: minimize sum(obj_quad) + obj_lin . x + obj_const
    void obj_linear(VarId v, double coef) {
        if (coef != 0.0) obj_lin_.push_back({v, coef});
    }
    void obj_quad(VarId a, VarId b, double coef) {
        if (coef != 0.0) obj_quad_.push_back({a, b, coef});
    }
    void obj_constant(double c) { obj_const_ += c; }

    ConId add_lin_eq(Label label, LinExpr expr, double rhs) {
        Constraint c;
        c.kind = ConKind::LinearEq;
        c.label = label;
        c.expr = std::move(expr);
        c.rhs = rhs;
        cons_.push_back(std::move(c));
        return static_cast<ConId>(cons_.size() - 1);
    }

    ConId add_lin_ineq(Label label, LinExpr expr, double rhs) {
        Constraint c;
        c.kind = ConKind::LinearIneq;
        c.label = label;
        c.expr = std::move(expr);
        c.rhs = rhs;
        cons_.push_back(std::move(c));
        return static_cast<ConId>(cons_.size() - 1);
    }

    // || tail ||_2 <= head
    ConId add_soc(Label label, LinExpr head, std::vector<LinExpr> tail) {
        Constraint c;
        c.kind = ConKind::Soc;
        c.label = label;
        c.soc_head = std::move(head);
        c.soc_tail = std::move(tail);
        cons_.push_back(std::move(c));
        return static_cast<ConId>(cons_.size() - 1);
    }

    // sum(quad) + lin <= rhs, quad must be PSD
    ConId add_quad_ineq(Label label, std::vector<QuadTerm> quad, LinExpr lin, double rhs) {
        Constraint c;
        c.kind = ConKind::QuadIneq;
        c.label = label;
        c.expr = std::move(lin);
        c.rhs = rhs;
        c.quad = std::move(quad);
        cons_.push_back(std::move(c));
        return static_cast<ConId>(cons_.size() - 1);
    }

    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_cons() const { return static_cast<int>(cons_.size()); }
    const Variable& var(VarId v) const { return vars_[static_cast<size_t>(v)]; }
    Variable& var_mut(VarId v) { return vars_[static_cast<size_t>(v)]; }
    const Constraint& con(ConId c) const { return cons_[static_cast<size_t>(c)]; }
    const std::vector<Variable>& vars() const { return vars_; }
    const std::vector<Constraint>& cons() const { return cons_; }
    const std::vector<LinTerm>& objective_linear() const { return obj_lin_; }
    const std::vector<QuadTerm>& objective_quad() const { return obj_quad_; }
    double objective_constant() const { return obj_const_; }

    double eval_objective(const std::vector<double>& x) const;
    double eval_expr(const LinExpr& e, const std::vector<double>& x) const;

    // Plain-text LP-style listing for inspection.
    void dump(std::FILE* out) const;
    std::string dump_string() const;

  private:
    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    std::vector<LinTerm> obj_lin_;
    std::vector<QuadTerm> obj_quad_;
    double obj_const_ = 0.0;
};

} // namespace tariffgrid::convex
