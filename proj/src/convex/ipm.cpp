#include "ipm.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <vector>

namespace tariffgrid::convex::detail {

namespace {

struct SocBlock {
    int start = 0;  // offset into the m-vector
    int dim = 0;
    double eta2 = 1.0;           // eta^2
    Eigen::MatrixXd Wbar;        // normalized NT scaling matrix
    Eigen::MatrixXd W2;          // eta^2 * Wbar * Wbar
};

struct Iterate {
    Eigen::VectorXd x, y, z, s;
    double tau = 1.0, kap = 1.0;
};

struct Stats {
    int iter = 0;
    double gap = 0.0, mu = 0.0, pcost = 0.0, dcost = 0.0;
    std::optional<double> relgap;
    double pres = 0.0, dres = 0.0;
    std::optional<double> pinfres, dinfres;
    double kapovert = 0.0;
    double step = 0.0, sigma = 0.0;

    bool better_than(const Stats& o) const {
        auto pos = [](double v) { return v > 0.0; };
        if (pinfres.has_value() && kapovert > 1.0) {
            return pos(gap) && pos(o.gap) && gap < o.gap && pos(*pinfres) && *pinfres < o.pres &&
                   pos(mu) && mu < o.mu;
        }
        return pos(gap) && pos(o.gap) && gap < o.gap && pos(pres) && pres < o.pres && pos(dres) &&
               dres < o.dres && pos(kapovert) && kapovert < o.kapovert && pos(mu) && mu < o.mu;
    }
};

class Ipm {
  public:
    Ipm(const StandardForm& sf, const IpmSettings& st) : st_(st) {
        n_ = sf.n;
        p_ = static_cast<int>(sf.A.rows());
        m_ = static_cast<int>(sf.G.rows());
        n_lp_ = sf.n_lp;
        A_ = sf.A;
        G_ = sf.G;
        b_ = sf.b;
        h_ = sf.h;
        c_ = sf.c;
        int off = n_lp_;
        for (int d : sf.soc_dims) {
            SocBlock blk;
            blk.start = off;
            blk.dim = d;
            blk.Wbar = Eigen::MatrixXd::Identity(d, d);
            blk.W2 = blk.Wbar;
            socs_.push_back(std::move(blk));
            off += d;
        }
        nu_ = n_lp_ + static_cast<int>(socs_.size());
        w2_lp_ = Eigen::VectorXd::Ones(n_lp_);
        w_lp_ = w2_lp_;
    }

    IpmResult run();

  private:
    void equilibrate();
    void setup_kkt();
    void write_kkt_scalings(bool identity);
    bool factorize();
    int solve_kkt(const Eigen::VectorXd& rhs, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                  Eigen::VectorXd& dz);
    bool update_scalings(const Eigen::VectorXd& s, const Eigen::VectorXd& z);
    void scale(const Eigen::VectorXd& z, Eigen::VectorXd& out) const;  // out = W z
    void cone_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& w) const;
    void cone_divide(const Eigen::VectorXd& u, const Eigen::VectorXd& w, Eigen::VectorXd& v) const;
    void bring_to_cone(const Eigen::VectorXd& r, Eigen::VectorXd& out) const;
    double line_search(const Eigen::VectorXd& ds_by_w, const Eigen::VectorXd& w_dz, double tau,
                       double dtau, double kap, double dkap) const;
    void compute_residuals();
    void update_statistics();
    enum class Exit { NotYet, Optimal, PrimalInf, DualInf };
    Exit check_exit(bool reduced) const;
    IpmResult finish(IpmStatus status, bool reduced, const std::string& msg);

    IpmSettings st_;
    int n_ = 0, p_ = 0, m_ = 0, n_lp_ = 0, nu_ = 1;
    Eigen::SparseMatrix<double> A_, G_, At_, Gt_, K_;
    Eigen::VectorXd b_, h_, c_;
    Eigen::VectorXd e_row_, e_col_;  // equilibration scalings: rows of [A;G], columns
    std::vector<SocBlock> socs_;
    Eigen::VectorXd w2_lp_, w_lp_;   // LP cone NT scaling (squared and plain)
    Eigen::VectorXd lambda_;
    double delta_ = 0.0;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt_;
    std::vector<double*> lp_ptr_;               // KKT slots of the LP scaling diagonal
    std::vector<std::vector<double*>> soc_ptr_; // per block, upper-tri column-major
    bool analyzed_ = false;

    Iterate w_, best_;
    Stats stats_, best_stats_;
    bool have_best_ = false;

    // residuals
    Eigen::VectorXd rx_, ry_, rz_;
    double rt_ = 0.0, hresx_ = 0.0, hresy_ = 0.0, hresz_ = 0.0;
    double cx_ = 0.0, by_ = 0.0, hz_ = 0.0;
    double nx_ = 0.0, ny_ = 0.0, nz_ = 0.0, ns_ = 0.0;
    double resx0_ = 1.0, resy0_ = 1.0, resz0_ = 1.0;
};

// Ruiz equilibration of the stacked constraint matrix [A; G]. Rows belonging
// to one second-order cone share a single scale so the cone geometry is
// preserved.
void Ipm::equilibrate() {
    e_row_ = Eigen::VectorXd::Ones(p_ + m_);
    e_col_ = Eigen::VectorXd::Ones(n_);
    Eigen::VectorXd row_norm(p_ + m_), col_norm(n_);
    for (int it = 0; it < st_.ruiz_iters; ++it) {
        row_norm.setZero();
        col_norm.setZero();
        for (int col = 0; col < n_; ++col) {
            for (Eigen::SparseMatrix<double>::InnerIterator iter(A_, col); iter; ++iter) {
                const double a = std::abs(iter.value());
                row_norm(iter.row()) = std::max(row_norm(iter.row()), a);
                col_norm(col) = std::max(col_norm(col), a);
            }
            for (Eigen::SparseMatrix<double>::InnerIterator iter(G_, col); iter; ++iter) {
                const double a = std::abs(iter.value());
                row_norm(p_ + iter.row()) = std::max(row_norm(p_ + iter.row()), a);
                col_norm(col) = std::max(col_norm(col), a);
            }
        }
        for (const SocBlock& blk : socs_) {
            double mx = 0.0;
            for (int k = 0; k < blk.dim; ++k) mx = std::max(mx, row_norm(p_ + blk.start + k));
            for (int k = 0; k < blk.dim; ++k) row_norm(p_ + blk.start + k) = mx;
        }
        auto factor = [](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; };
        Eigen::VectorXd dr = row_norm.unaryExpr(factor);
        Eigen::VectorXd dc = col_norm.unaryExpr(factor);
        for (int col = 0; col < n_; ++col) {
            for (Eigen::SparseMatrix<double>::InnerIterator iter(A_, col); iter; ++iter)
                iter.valueRef() *= dr(iter.row()) * dc(col);
            for (Eigen::SparseMatrix<double>::InnerIterator iter(G_, col); iter; ++iter)
                iter.valueRef() *= dr(p_ + iter.row()) * dc(col);
        }
        e_row_.array() *= dr.array();
        e_col_.array() *= dc.array();
    }
    b_.array() *= e_row_.head(p_).array();
    h_.array() *= e_row_.tail(m_).array();
    c_.array() *= e_col_.array();
}

void Ipm::setup_kkt() {
    At_ = A_.transpose();
    Gt_ = G_.transpose();
    delta_ = st_.deltastat;

    const int dim = n_ + p_ + m_;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(A_.nonZeros() + G_.nonZeros() + dim + 8 * (m_ - n_lp_) + 4));
    for (int k = 0; k < n_; ++k) trip.emplace_back(k, k, delta_);
    for (int col = 0; col < p_; ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(At_, col); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), n_ + col, it.value());
        trip.emplace_back(n_ + col, n_ + col, -delta_);
    }
    for (int col = 0; col < m_; ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(Gt_, col); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), n_ + p_ + col, it.value());
    }
    for (int i = 0; i < n_lp_; ++i) trip.emplace_back(n_ + p_ + i, n_ + p_ + i, -1.0 - delta_);
    for (const SocBlock& blk : socs_) {
        const int base = n_ + p_ + blk.start;
        for (int jj = 0; jj < blk.dim; ++jj)
            for (int ii = 0; ii <= jj; ++ii)
                trip.emplace_back(base + ii, base + jj, ii == jj ? -1.0 - delta_ : 0.0);
    }
    K_.resize(dim, dim);
    K_.setFromTriplets(trip.begin(), trip.end());
    K_.makeCompressed();

    // Grab slots of the mutable scaling entries. Inner indices are sorted, so
    // within a column the cone rows (>= n+p) come after the G^T rows.
    lp_ptr_.assign(static_cast<size_t>(n_lp_), nullptr);
    for (int i = 0; i < n_lp_; ++i) lp_ptr_[static_cast<size_t>(i)] = &K_.coeffRef(n_ + p_ + i, n_ + p_ + i);
    soc_ptr_.clear();
    for (const SocBlock& blk : socs_) {
        const int base = n_ + p_ + blk.start;
        std::vector<double*> ptrs;
        for (int jj = 0; jj < blk.dim; ++jj)
            for (int ii = 0; ii <= jj; ++ii) ptrs.push_back(&K_.coeffRef(base + ii, base + jj));
        soc_ptr_.push_back(std::move(ptrs));
    }
}

void Ipm::write_kkt_scalings(bool identity) {
    for (int i = 0; i < n_lp_; ++i)
        *lp_ptr_[static_cast<size_t>(i)] = -(identity ? 1.0 : w2_lp_(i)) - delta_;
    for (size_t bi = 0; bi < socs_.size(); ++bi) {
        const SocBlock& blk = socs_[bi];
        size_t slot = 0;
        for (int jj = 0; jj < blk.dim; ++jj) {
            for (int ii = 0; ii <= jj; ++ii) {
                double v = identity ? (ii == jj ? 1.0 : 0.0) : blk.W2(ii, jj);
                *soc_ptr_[bi][slot++] = -v - (ii == jj ? delta_ : 0.0);
            }
        }
    }
}

bool Ipm::factorize() {
    if (!analyzed_) {
        ldlt_.analyzePattern(K_);
        analyzed_ = true;
    }
    ldlt_.factorize(K_);
    return ldlt_.info() == Eigen::Success;
}

// One LDL^T solve plus iterative refinement against the regularized KKT
// matrix itself.
int Ipm::solve_kkt(const Eigen::VectorXd& rhs, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                   Eigen::VectorXd& dz) {
    Eigen::VectorXd u = ldlt_.solve(rhs);
    const double thresh = (1.0 + rhs.lpNorm<Eigen::Infinity>()) * st_.linsysacc;
    double prev_err = std::numeric_limits<double>::max();
    Eigen::VectorXd corr;
    int k = 0;
    for (; k <= st_.nitref; ++k) {
        Eigen::VectorXd resid = rhs - K_.selfadjointView<Eigen::Upper>() * u;
        const double err = resid.lpNorm<Eigen::Infinity>();
        if (k > 0 && err > prev_err) {
            u -= corr;  // refinement made it worse, undo
            break;
        }
        if (err < thresh || k == st_.nitref) break;
        prev_err = err;
        corr = ldlt_.solve(resid);
        u += corr;
    }
    dx = u.head(n_);
    dy = u.segment(n_, p_);
    dz = u.tail(m_);
    return k;
}

bool Ipm::update_scalings(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    for (int i = 0; i < n_lp_; ++i) {
        if (s(i) <= 0.0 || z(i) <= 0.0) return false;
        w2_lp_(i) = s(i) / z(i);
        w_lp_(i) = std::sqrt(w2_lp_(i));
    }
    for (SocBlock& blk : socs_) {
        const auto sb = s.segment(blk.start, blk.dim);
        const auto zb = z.segment(blk.start, blk.dim);
        const double sres = sb(0) * sb(0) - sb.tail(blk.dim - 1).squaredNorm();
        const double zres = zb(0) * zb(0) - zb.tail(blk.dim - 1).squaredNorm();
        if (sres <= 0.0 || zres <= 0.0) return false;
        const double snorm = std::sqrt(sres);
        const double znorm = std::sqrt(zres);
        Eigen::VectorXd sbar = sb / snorm;
        Eigen::VectorXd zbar = zb / znorm;
        blk.eta2 = snorm / znorm;

        const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        const double a = (0.5 / gamma) * (sbar(0) + zbar(0));
        Eigen::VectorXd q = (0.5 / gamma) * (sbar.tail(blk.dim - 1) - zbar.tail(blk.dim - 1));

        // Wbar = [a q'; q I + qq'/(1+a)], unit hyperbolic so inverse is J Wbar J
        blk.Wbar(0, 0) = a;
        for (int i = 1; i < blk.dim; ++i) {
            blk.Wbar(0, i) = q(i - 1);
            blk.Wbar(i, 0) = q(i - 1);
        }
        blk.Wbar.block(1, 1, blk.dim - 1, blk.dim - 1) =
            Eigen::MatrixXd::Identity(blk.dim - 1, blk.dim - 1) + q * q.transpose() / (1.0 + a);
        blk.W2 = blk.eta2 * (blk.Wbar * blk.Wbar);
    }
    scale(z, lambda_);
    return true;
}

void Ipm::scale(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
    out.resize(m_);
    out.head(n_lp_) = w_lp_.cwiseProduct(z.head(n_lp_));
    for (const SocBlock& blk : socs_)
        out.segment(blk.start, blk.dim) =
            std::sqrt(blk.eta2) * (blk.Wbar * z.segment(blk.start, blk.dim));
}

void Ipm::cone_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                       Eigen::VectorXd& w) const {
    w.resize(m_);
    w.head(n_lp_) = u.head(n_lp_).cwiseProduct(v.head(n_lp_));
    for (const SocBlock& blk : socs_) {
        const auto ub = u.segment(blk.start, blk.dim);
        const auto vb = v.segment(blk.start, blk.dim);
        w(blk.start) = ub.dot(vb);
        w.segment(blk.start + 1, blk.dim - 1) =
            ub(0) * vb.tail(blk.dim - 1) + vb(0) * ub.tail(blk.dim - 1);
    }
}

void Ipm::cone_divide(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                      Eigen::VectorXd& v) const {
    v.resize(m_);
    v.head(n_lp_) = w.head(n_lp_).cwiseQuotient(u.head(n_lp_));
    for (const SocBlock& blk : socs_) {
        const auto ub = u.segment(blk.start, blk.dim);
        const auto wb = w.segment(blk.start, blk.dim);
        const double u0 = ub(0);
        const double w0 = wb(0);
        const double rho = u0 * u0 - ub.tail(blk.dim - 1).squaredNorm();
        const double zeta = ub.tail(blk.dim - 1).dot(wb.tail(blk.dim - 1));
        const double factor = (zeta / u0 - w0) / rho;
        v(blk.start) = (u0 * w0 - zeta) / rho;
        v.segment(blk.start + 1, blk.dim - 1) =
            factor * ub.tail(blk.dim - 1) + wb.tail(blk.dim - 1) / u0;
    }
}

void Ipm::bring_to_cone(const Eigen::VectorXd& r, Eigen::VectorXd& out) const {
    double alpha = -0.99;
    for (int i = 0; i < n_lp_; ++i)
        if (r(i) <= 0.0 && -r(i) > alpha) alpha = -r(i);
    for (const SocBlock& blk : socs_) {
        const double cres = r(blk.start) - r.segment(blk.start + 1, blk.dim - 1).norm();
        if (cres <= 0.0 && -cres > alpha) alpha = -cres;
    }
    out = r;
    alpha += 1.0;
    out.head(n_lp_).array() += alpha;
    for (const SocBlock& blk : socs_) out(blk.start) += alpha;
}

double Ipm::line_search(const Eigen::VectorXd& ds_by_w, const Eigen::VectorXd& w_dz, double tau,
                        double dtau, double kap, double dkap) const {
    double alpha = 10.0;
    if (n_lp_ > 0) {
        const double rhomin = (ds_by_w.head(n_lp_).cwiseQuotient(lambda_.head(n_lp_))).minCoeff();
        const double sigmin = (w_dz.head(n_lp_).cwiseQuotient(lambda_.head(n_lp_))).minCoeff();
        const double worst = std::min(rhomin, sigmin);
        alpha = worst < 0.0 ? 1.0 / (-worst) : 1e13;
    }
    if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
    if (dkap < 0.0) alpha = std::min(alpha, -kap / dkap);

    for (const SocBlock& blk : socs_) {
        const int d = blk.dim;
        const auto lk = lambda_.segment(blk.start, d);
        const double lknorm2 = lk(0) * lk(0) - lk.tail(d - 1).squaredNorm();
        if (lknorm2 <= 0.0) continue;
        const double lknorm = std::sqrt(lknorm2);
        Eigen::VectorXd lkbar = lk / lknorm;
        const double inv = 1.0 / lknorm;

        auto step_bound = [&](const Eigen::VectorXd& dvec) {
            const auto db = dvec.segment(blk.start, d);
            const double lkbar_dot = lkbar(0) * db(0) - lkbar.tail(d - 1).dot(db.tail(d - 1));
            Eigen::VectorXd rho(d);
            rho(0) = inv * lkbar_dot;
            const double f = (lkbar_dot + db(0)) / (lkbar(0) + 1.0);
            rho.tail(d - 1) = inv * (db.tail(d - 1) - f * lkbar.tail(d - 1));
            return rho.tail(d - 1).norm() - rho(0);
        };
        const double conic = std::max({0.0, step_bound(ds_by_w), step_bound(w_dz)});
        if (conic > 0.0) alpha = std::min(alpha, 1.0 / conic);
    }
    return std::clamp(alpha, st_.stepmin, st_.stepmax);
}

void Ipm::compute_residuals() {
    rx_ = -(Gt_ * w_.z);
    if (p_ > 0) rx_ -= At_ * w_.y;
    hresx_ = rx_.norm();
    rx_ -= w_.tau * c_;

    if (p_ > 0) {
        ry_ = A_ * w_.x;
        hresy_ = ry_.norm();
        ry_ -= w_.tau * b_;
    } else {
        ry_.resize(0);
        hresy_ = 0.0;
    }

    rz_ = w_.s + G_ * w_.x;
    hresz_ = rz_.norm();
    rz_ -= w_.tau * h_;

    cx_ = c_.dot(w_.x);
    by_ = p_ > 0 ? b_.dot(w_.y) : 0.0;
    hz_ = h_.dot(w_.z);
    rt_ = w_.kap + cx_ + by_ + hz_;

    nx_ = w_.x.norm();
    ny_ = w_.y.norm();
    nz_ = w_.z.norm();
    ns_ = w_.s.norm();
}

void Ipm::update_statistics() {
    stats_.gap = w_.s.dot(w_.z);
    stats_.mu = (stats_.gap + w_.kap * w_.tau) / (nu_ + 1);
    stats_.kapovert = w_.kap / w_.tau;
    stats_.pcost = cx_ / w_.tau;
    stats_.dcost = -(hz_ + by_) / w_.tau;
    if (stats_.pcost < 0.0)
        stats_.relgap = stats_.gap / (-stats_.pcost);
    else if (stats_.dcost > 0.0)
        stats_.relgap = stats_.gap / stats_.dcost;
    else
        stats_.relgap.reset();

    const double nry = p_ > 0 ? ry_.norm() / std::max(resy0_ + nx_, 1.0) : 0.0;
    const double nrz = rz_.norm() / std::max(resz0_ + nx_ + ns_, 1.0);
    stats_.pres = std::max(nry, nrz) / w_.tau;
    stats_.dres = rx_.norm() / std::max(resx0_ + ny_ + nz_, 1.0) / w_.tau;

    stats_.pinfres.reset();
    stats_.dinfres.reset();
    if ((hz_ + by_) / std::max(ny_ + nz_, 1.0) < -st_.reltol)
        stats_.pinfres = hresx_ / std::max(ny_ + nz_, 1.0);
    if (cx_ / std::max(nx_, 1.0) < -st_.reltol)
        stats_.dinfres =
            std::max(hresy_ / std::max(nx_, 1.0), hresz_ / std::max(nx_ + ns_, 1.0));

    if (st_.verbose) {
        std::printf("ipm %3d  pcost %+12.5e dcost %+12.5e gap %9.2e pres %9.2e dres %9.2e "
                    "k/t %8.1e mu %8.1e step %5.3f\n",
                    stats_.iter, stats_.pcost, stats_.dcost, stats_.gap, stats_.pres, stats_.dres,
                    stats_.kapovert, stats_.mu, stats_.step);
    }
}

Ipm::Exit Ipm::check_exit(bool reduced) const {
    const double feastol = reduced ? st_.feastol_inacc : st_.feastol;
    const double abstol = reduced ? st_.abstol_inacc : st_.abstol;
    const double reltol = reduced ? st_.reltol_inacc : st_.reltol;

    if ((-cx_ > 0.0 || -by_ - hz_ >= -abstol) && stats_.pres < feastol && stats_.dres < feastol &&
        (stats_.gap < abstol || (stats_.relgap.has_value() && *stats_.relgap < reltol)))
        return Exit::Optimal;
    if (stats_.dinfres.has_value() && *stats_.dinfres < feastol && w_.tau < w_.kap)
        return Exit::DualInf;
    if ((stats_.pinfres.has_value() && *stats_.pinfres < feastol && w_.tau < w_.kap) ||
        (w_.tau < feastol && w_.kap < feastol && stats_.pinfres.has_value() &&
         *stats_.pinfres < feastol))
        return Exit::PrimalInf;
    return Exit::NotYet;
}

IpmResult Ipm::finish(IpmStatus status, bool reduced, const std::string& msg) {
    IpmResult res;
    res.status = status;
    res.reduced_accuracy = reduced;
    res.iterations = stats_.iter;
    res.pres = stats_.pres;
    res.dres = stats_.dres;
    res.gap = stats_.gap;
    res.pcost = stats_.pcost;
    res.dcost = stats_.dcost;
    res.message = msg;

    // Undo homogenization and equilibration. For infeasibility certificates
    // scale by the certificate normalizer instead of tau.
    double denom = w_.tau;
    if (status == IpmStatus::PrimalInfeasible) {
        const double viol = -(by_ + hz_);
        denom = viol > 0.0 ? viol : 1.0;
    } else if (status == IpmStatus::DualInfeasible) {
        denom = cx_ < 0.0 ? -cx_ : 1.0;
    }
    if (!(denom > 0.0) || !std::isfinite(denom)) denom = 1.0;

    res.x = w_.x.cwiseProduct(e_col_) / denom;
    res.y = w_.y.cwiseProduct(e_row_.head(p_)) / denom;
    res.z = w_.z.cwiseProduct(e_row_.tail(m_)) / denom;
    res.s = w_.s.cwiseQuotient(e_row_.tail(m_)) / denom;
    return res;
}

IpmResult Ipm::run() {
    equilibrate();
    setup_kkt();

    resx0_ = std::max(1.0, c_.norm());
    resy0_ = std::max(1.0, b_.norm());
    resz0_ = std::max(1.0, h_.norm());

    lambda_.resize(m_);

    // Initial point from two solves with identity scalings.
    write_kkt_scalings(true);
    if (!factorize()) return finish(IpmStatus::Numerics, false, "initial factorization failed");

    Eigen::VectorXd rhs1 = Eigen::VectorXd::Zero(n_ + p_ + m_);
    rhs1.segment(n_, p_) = b_;
    rhs1.tail(m_) = h_;
    Eigen::VectorXd dx1(n_), dy1(p_), dz1(m_);
    solve_kkt(rhs1, dx1, dy1, dz1);
    w_.x = dx1;
    bring_to_cone(-dz1, w_.s);

    Eigen::VectorXd rhs2 = Eigen::VectorXd::Zero(n_ + p_ + m_);
    rhs2.head(n_) = -c_;
    Eigen::VectorXd dx2(n_), dy2(p_), dz2(m_);
    solve_kkt(rhs2, dx2, dy2, dz2);
    w_.y = dy2;
    bring_to_cone(dz2, w_.z);

    w_.tau = 1.0;
    w_.kap = 1.0;
    rhs1.head(n_) = -c_;

    double pres_prev = std::numeric_limits<double>::max();
    Eigen::VectorXd w_dz(m_), ds_by_w(m_), ds1(m_), ds2(m_), dsfin(m_);

    for (stats_.iter = 0; stats_.iter <= st_.max_iter; ++stats_.iter) {
        compute_residuals();
        update_statistics();

        if (stats_.iter > 0 && (stats_.pres > st_.safeguard * pres_prev || stats_.gap < 0.0)) {
            if (have_best_) {
                w_ = best_;
                stats_ = best_stats_;
                compute_residuals();
            }
            const Exit e = check_exit(true);
            if (e == Exit::Optimal) return finish(IpmStatus::Optimal, true, "close to optimal");
            if (e == Exit::PrimalInf)
                return finish(IpmStatus::PrimalInfeasible, true, "close to primal infeasible");
            if (e == Exit::DualInf)
                return finish(IpmStatus::DualInfeasible, true, "close to dual infeasible");
            return finish(IpmStatus::Numerics, false, "unreliable search direction");
        }
        pres_prev = stats_.pres;

        Exit e = check_exit(false);
        if (e == Exit::Optimal) return finish(IpmStatus::Optimal, false, "optimal");
        if (e == Exit::PrimalInf)
            return finish(IpmStatus::PrimalInfeasible, false, "primal infeasible");
        if (e == Exit::DualInf) return finish(IpmStatus::DualInfeasible, false, "dual infeasible");

        if (stats_.iter > 0 && stats_.step == st_.stepmin * st_.step_backoff) {
            if (have_best_) {
                w_ = best_;
                stats_ = best_stats_;
                compute_residuals();
            }
            e = check_exit(true);
            if (e == Exit::Optimal) return finish(IpmStatus::Optimal, true, "close to optimal");
            if (e == Exit::PrimalInf)
                return finish(IpmStatus::PrimalInfeasible, true, "close to primal infeasible");
            if (e == Exit::DualInf)
                return finish(IpmStatus::DualInfeasible, true, "close to dual infeasible");
            return finish(IpmStatus::Numerics, false, "no further progress");
        }
        if (stats_.iter == st_.max_iter) {
            if (have_best_ && !stats_.better_than(best_stats_)) {
                w_ = best_;
                stats_ = best_stats_;
                compute_residuals();
            }
            e = check_exit(true);
            if (e == Exit::Optimal) return finish(IpmStatus::Optimal, true, "close to optimal");
            return finish(IpmStatus::MaxIter, false, "iteration limit");
        }
        if (!std::isfinite(stats_.pcost)) {
            if (have_best_) {
                w_ = best_;
                stats_ = best_stats_;
                compute_residuals();
            }
            e = check_exit(true);
            if (e == Exit::Optimal) return finish(IpmStatus::Optimal, true, "close to optimal");
            return finish(IpmStatus::Numerics, false, "NaN encountered");
        }

        if (stats_.iter == 0 || stats_.better_than(best_stats_)) {
            best_ = w_;
            best_stats_ = stats_;
            have_best_ = true;
        }

        if (!update_scalings(w_.s, w_.z)) {
            if (have_best_) {
                w_ = best_;
                stats_ = best_stats_;
                compute_residuals();
            }
            e = check_exit(true);
            if (e == Exit::Optimal) return finish(IpmStatus::Optimal, true, "close to optimal");
            return finish(IpmStatus::Numerics, false, "iterate left the cone");
        }
        write_kkt_scalings(false);
        if (!factorize()) {
            // retry with heavier static regularization
            bool ok = false;
            for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
                delta_ *= 100.0;
                write_kkt_scalings(false);
                for (int k = 0; k < n_; ++k) K_.coeffRef(k, k) = delta_;
                for (int k = 0; k < p_; ++k) K_.coeffRef(n_ + k, n_ + k) = -delta_;
                ok = factorize();
            }
            if (!ok) return finish(IpmStatus::Numerics, false, "KKT factorization failed");
        }

        solve_kkt(rhs1, dx1, dy1, dz1);
        const double dtau_denom = w_.kap / w_.tau - c_.dot(dx1) - b_.dot(dy1) - h_.dot(dz1);

        // affine direction
        rhs2.head(n_) = rx_;
        rhs2.segment(n_, p_) = -ry_;
        rhs2.tail(m_) = w_.s - rz_;
        solve_kkt(rhs2, dx2, dy2, dz2);
        const double dtau_aff =
            (rt_ - w_.kap + c_.dot(dx2) + b_.dot(dy2) + h_.dot(dz2)) / dtau_denom;
        dz2 += dtau_aff * dz1;
        scale(dz2, w_dz);
        ds_by_w = -w_dz - lambda_;
        const double dkap_aff = -w_.kap - w_.kap / w_.tau * dtau_aff;

        const double step_aff = line_search(ds_by_w, w_dz, w_.tau, dtau_aff, w_.kap, dkap_aff);
        const double sigma =
            std::clamp(std::pow(1.0 - step_aff, 3.0), st_.sigmamin, st_.sigmamax);
        stats_.sigma = sigma;
        const double sigmamu = sigma * stats_.mu;

        // combined direction with Mehrotra correction
        cone_product(lambda_, lambda_, ds1);
        cone_product(ds_by_w, w_dz, ds2);
        ds1 += ds2;
        ds1.head(n_lp_).array() -= sigmamu;
        for (const SocBlock& blk : socs_) ds1(blk.start) -= sigmamu;

        cone_divide(lambda_, ds1, ds_by_w);  // ds_by_w = lambda \ dstilde
        scale(ds_by_w, ds1);                 // ds1 = W (lambda \ dstilde)

        const double one_minus_sigma = 1.0 - sigma;
        rhs2.head(n_) = one_minus_sigma * rx_;
        rhs2.segment(n_, p_) = -one_minus_sigma * ry_;
        rhs2.tail(m_) = -one_minus_sigma * rz_ + ds1;
        solve_kkt(rhs2, dx2, dy2, dz2);

        const double bkap = w_.kap * w_.tau + dkap_aff * dtau_aff - sigmamu;
        const double dtau = (one_minus_sigma * rt_ - bkap / w_.tau + c_.dot(dx2) + b_.dot(dy2) +
                             h_.dot(dz2)) /
                            dtau_denom;
        dx2 += dtau * dx1;
        dy2 += dtau * dy1;
        dz2 += dtau * dz1;
        scale(dz2, w_dz);
        ds_by_w = -(ds_by_w + w_dz);
        const double dkap = -(bkap + w_.kap * dtau) / w_.tau;

        stats_.step =
            st_.step_backoff * line_search(ds_by_w, w_dz, w_.tau, dtau, w_.kap, dkap);
        scale(ds_by_w, dsfin);

        w_.x += stats_.step * dx2;
        w_.y += stats_.step * dy2;
        w_.z += stats_.step * dz2;
        w_.s += stats_.step * dsfin;
        w_.kap += stats_.step * dkap;
        w_.tau += stats_.step * dtau;
    }
    return finish(IpmStatus::MaxIter, false, "iteration limit");
}

} // namespace

IpmResult ipm_solve(const StandardForm& sf, const IpmSettings& settings) {
    Ipm ipm(sf, settings);
    return ipm.run();
}

} // namespace tariffgrid::convex::detail
