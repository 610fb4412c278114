#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <iostream>

#include "qres/conic.hpp"

// Dense primal-dual interior-point method with the HKM direction and a
// Mehrotra predictor-corrector, over block-diagonal real symmetric cones.
// Complex Hermitian blocks enter through the standard realification; scalar
// variables are 1x1 blocks. Sizes are desk-scale (blocks <= ~40, a few
// thousand rows), so everything is dense Eigen.

namespace qres {
namespace {

struct StdRow {
    std::vector<std::pair<int, RMatrix>> ent;
    double b = 0.0;
};

struct StdForm {
    std::vector<int> bs;      // block sides
    std::vector<RMatrix> C;   // internal sense: minimise <C, X>/2
    std::vector<StdRow> rows; // independent rows
    std::vector<int> kept;    // original row index per kept row
    int total_rows = 0;
    double obj_const = 0.0;
    double sign = 1.0; // +1 when the original program minimises
};

// svec packing with sqrt(2)-scaled off-diagonals preserves inner products.
Eigen::VectorXd svec(const RMatrix& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd v(n * (n + 1) / 2);
    int k = 0;
    const double s = std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        v(k++) = m(i, i);
        for (int j = i + 1; j < n; ++j) v(k++) = s * m(i, j);
    }
    return v;
}

StdForm build_std_form(const ConicProgram& p) {
    StdForm f;
    f.sign = p.minimizing() ? 1.0 : -1.0;
    const int nv = static_cast<int>(p.vars().size());
    f.bs.resize(nv);
    f.C.resize(nv);
    int svec_total = 0;
    std::vector<int> svec_off(nv);
    for (int v = 0; v < nv; ++v) {
        const auto& vi = p.vars()[v];
        f.bs[v] = vi.kind == VarKind::scalar_nonneg ? 1 : 2 * vi.n;
        f.C[v] = RMatrix::Zero(f.bs[v], f.bs[v]);
        svec_off[v] = svec_total;
        svec_total += f.bs[v] * (f.bs[v] + 1) / 2;
    }
    // Coefficients are doubled uniformly (complex blocks double through
    // realification, scalars explicitly); values are halved on extraction.
    for (const auto& t : p.objective().terms) {
        if (p.vars()[t.var].kind == VarKind::scalar_nonneg)
            f.C[t.var](0, 0) += f.sign * 2.0 * t.coeff(0, 0).real();
        else
            f.C[t.var] += f.sign * realify(t.coeff);
    }
    f.obj_const = p.objective().constant;

    std::vector<StdRow> all;
    all.reserve(p.rows().size());
    for (const auto& r : p.rows()) {
        StdRow row;
        row.b = 2.0 * r.rhs;
        for (const auto& [v, c] : r.entries) {
            if (p.vars()[v].kind == VarKind::scalar_nonneg) {
                RMatrix s(1, 1);
                s(0, 0) = 2.0 * c(0, 0).real();
                row.ent.emplace_back(v, std::move(s));
            } else {
                row.ent.emplace_back(v, realify(c));
            }
        }
        all.push_back(std::move(row));
    }
    f.total_rows = static_cast<int>(all.size());

    // Drop linearly dependent rows (block-equality expansions routinely
    // contain an identically-satisfied trace component).
    const int m = f.total_rows;
    RMatrix rowmat = RMatrix::Zero(svec_total, m);
    for (int i = 0; i < m; ++i)
        for (const auto& [v, c] : all[i].ent)
            rowmat.col(i).segment(svec_off[v], c.rows() * (c.rows() + 1) / 2) = svec(c);
    Eigen::ColPivHouseholderQR<RMatrix> qr(rowmat);
    qr.setThreshold(1e-11);
    const int rank = static_cast<int>(qr.rank());
    std::vector<int> kept(qr.colsPermutation().indices().data(), qr.colsPermutation().indices().data() + m);
    kept.resize(rank);
    std::sort(kept.begin(), kept.end());
    for (int i : kept) {
        f.rows.push_back(all[i]);
        f.kept.push_back(i);
    }
    return f;
}

double max_step(const RMatrix& x, const RMatrix& dx) {
    Eigen::LLT<RMatrix> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    RMatrix l = llt.matrixL();
    RMatrix t = l.triangularView<Eigen::Lower>().solve(dx);
    t = l.triangularView<Eigen::Lower>().solve(RMatrix(t.transpose()));
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return 1.0e30;
    return -1.0 / lmin;
}

} // namespace

ConicSolution IpmBackend::solve(const ConicProgram& p, const SolverSettings& cfg) const {
    StdForm f = build_std_form(p);
    const int nb = static_cast<int>(f.bs.size());
    const int m = static_cast<int>(f.rows.size());
    int ntot = 0;
    for (int n : f.bs) ntot += n;

    double data_scale = 1.0, bmax = 0.0, cmax = 0.0;
    for (const auto& r : f.rows) {
        bmax = std::max(bmax, std::abs(r.b));
        for (const auto& [v, c] : r.ent) data_scale = std::max(data_scale, c.cwiseAbs().maxCoeff());
    }
    for (const auto& c : f.C) cmax = std::max(cmax, c.size() ? c.cwiseAbs().maxCoeff() : 0.0);

    std::vector<RMatrix> X(nb), S(nb);
    const double rho_p = 10.0 * std::max({1.0, bmax, data_scale});
    const double rho_d = 10.0 * std::max({1.0, cmax, data_scale});
    for (int k = 0; k < nb; ++k) {
        X[k] = rho_p * RMatrix::Identity(f.bs[k], f.bs[k]);
        S[k] = rho_d * RMatrix::Identity(f.bs[k], f.bs[k]);
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    auto apply_At = [&](const Eigen::VectorXd& w, std::vector<RMatrix>& out) {
        for (int k = 0; k < nb; ++k) out[k] = RMatrix::Zero(f.bs[k], f.bs[k]);
        for (int i = 0; i < m; ++i)
            for (const auto& [v, c] : f.rows[i].ent) out[v] += w(i) * c;
    };

    // relaxed acceptance thresholds matching the module contract
    const double accept_feas = 1e-8, accept_gap = 5e-8;

    SolveStatus status = SolveStatus::inaccurate;
    std::string message;
    int iter = 0, stall = 0;

    std::vector<RMatrix> Rd(nb), Sinv(nb), Aty(nb), dXa(nb), dSa(nb), dX(nb), dS(nb), Z(nb);
    std::vector<std::vector<int>> rows_in_block(nb);
    for (int i = 0; i < m; ++i)
        for (const auto& [v, c] : f.rows[i].ent) rows_in_block[v].push_back(i);
    auto coeff_of = [&](int row, int blk) -> const RMatrix& {
        for (const auto& [v, c] : f.rows[row].ent)
            if (v == blk) return c;
        throw solver_error("ipm: internal row/block lookup failure");
    };

    Eigen::VectorXd Rp(m);
    double rel_p = 0.0, rel_d = 0.0, rel_gap = 0.0;

    for (iter = 0; iter < cfg.max_iters; ++iter) {
        apply_At(y, Aty);
        double rd_inf = 0.0;
        for (int k = 0; k < nb; ++k) {
            Rd[k] = f.C[k] - S[k] - Aty[k];
            rd_inf = std::max(rd_inf, Rd[k].size() ? Rd[k].cwiseAbs().maxCoeff() : 0.0);
        }
        double rp_inf = 0.0;
        for (int i = 0; i < m; ++i) {
            double ax = 0.0;
            for (const auto& [v, c] : f.rows[i].ent) ax += (c.array() * X[v].array()).sum();
            Rp(i) = f.rows[i].b - ax;
            rp_inf = std::max(rp_inf, std::abs(Rp(i)));
        }
        double gap = 0.0, pobj = 0.0, dobj = 0.0;
        for (int k = 0; k < nb; ++k) {
            gap += (X[k].array() * S[k].array()).sum();
            pobj += 0.5 * (f.C[k].array() * X[k].array()).sum();
        }
        for (int i = 0; i < m; ++i) dobj += 0.5 * f.rows[i].b * y(i);
        const double mu = gap / ntot;
        rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        rel_p = rp_inf / (1.0 + bmax);
        rel_d = rd_inf / (1.0 + cmax);

        if (cfg.verbose)
            std::cerr << "ipm " << iter << " mu=" << mu << " rp=" << rel_p << " rd=" << rel_d
                      << " relgap=" << rel_gap << " pobj=" << pobj << " dobj=" << dobj << "\n";

        if (rel_p <= cfg.feas_tol && rel_d <= cfg.feas_tol && rel_gap <= cfg.gap_tol) {
            status = SolveStatus::optimal;
            break;
        }
        if (std::abs(dobj) > 1e9 * std::max(1.0, bmax) && rel_d < 1e-7 && dobj > 0) {
            status = SolveStatus::infeasible;
            message = "dual objective diverging with small dual residual";
            break;
        }
        if (std::abs(pobj) > 1e9 * std::max(1.0, cmax) && rel_p < 1e-7 && pobj < 0) {
            status = SolveStatus::unbounded;
            message = "primal objective diverging with small primal residual";
            break;
        }

        bool s_ok = true;
        for (int k = 0; k < nb; ++k) {
            Eigen::LLT<RMatrix> llt(S[k]);
            if (llt.info() != Eigen::Success) {
                s_ok = false;
                break;
            }
            Sinv[k] = llt.solve(RMatrix::Identity(f.bs[k], f.bs[k]));
            Sinv[k] = 0.5 * (Sinv[k] + Sinv[k].transpose());
        }
        if (!s_ok) {
            message = "dual block lost definiteness";
            break;
        }

        RMatrix M = RMatrix::Zero(m, m);
        for (int k = 0; k < nb; ++k) {
            for (int jj : rows_in_block[k]) {
                const RMatrix U = X[k] * coeff_of(jj, k) * Sinv[k];
                for (int ii : rows_in_block[k]) {
                    if (ii > jj) continue;
                    M(ii, jj) += (coeff_of(ii, k).array() * U.transpose().array()).sum();
                }
            }
        }
        M = M.selfadjointView<Eigen::Upper>();
        // LU with iterative refinement; the Schur matrix is PD but its
        // conditioning grows like 1/mu towards the end.
        Eigen::PartialPivLU<RMatrix> mf(M);
        bool schur_bad = false;
        auto schur_solve = [&](const Eigen::VectorXd& rhs) {
            Eigen::VectorXd dy = mf.solve(rhs);
            dy += mf.solve(rhs - M * dy);
            const double err = (M * dy - rhs).cwiseAbs().maxCoeff();
            if (!(err < 1e-6 * (1.0 + rhs.cwiseAbs().maxCoeff()))) schur_bad = true;
            return dy;
        };
        auto rhs_for = [&](double sigma_mu, const std::vector<RMatrix>* corr) {
            for (int k = 0; k < nb; ++k) {
                Z[k] = sigma_mu * Sinv[k] - X[k] - X[k] * Rd[k] * Sinv[k];
                if (corr) Z[k] -= (*corr)[k] * Sinv[k];
            }
            Eigen::VectorXd rhs(m);
            for (int i = 0; i < m; ++i) {
                double acc = Rp(i);
                for (const auto& [v, c] : f.rows[i].ent) acc -= (c.array() * Z[v].array()).sum();
                rhs(i) = acc;
            }
            return rhs;
        };

        // predictor
        Eigen::VectorXd dy = schur_solve(rhs_for(0.0, nullptr));
        if (schur_bad) {
            message = "Schur system too ill-conditioned to continue";
            break;
        }
        apply_At(dy, Aty);
        for (int k = 0; k < nb; ++k) {
            dSa[k] = Rd[k] - Aty[k];
            RMatrix t = -X[k] - X[k] * dSa[k] * Sinv[k];
            dXa[k] = 0.5 * (t + t.transpose());
        }
        double ap = 1.0, ad = 1.0;
        for (int k = 0; k < nb; ++k) {
            ap = std::min(ap, 0.99 * max_step(X[k], dXa[k]));
            ad = std::min(ad, 0.99 * max_step(S[k], dSa[k]));
        }
        double gap_aff = 0.0;
        for (int k = 0; k < nb; ++k) gap_aff += ((X[k] + ap * dXa[k]).array() * (S[k] + ad * dSa[k]).array()).sum();
        double sigma = gap > 0 ? std::pow(std::max(0.0, gap_aff) / gap, 3.0) : 0.1;
        sigma = std::min(1.0, std::max(1e-8, sigma));

        // corrector
        std::vector<RMatrix> corr(nb);
        for (int k = 0; k < nb; ++k) corr[k] = dXa[k] * dSa[k];
        dy = schur_solve(rhs_for(sigma * mu, &corr));
        apply_At(dy, Aty);
        for (int k = 0; k < nb; ++k) {
            dS[k] = Rd[k] - Aty[k];
            RMatrix t = sigma * mu * Sinv[k] - corr[k] * Sinv[k] - X[k] - X[k] * dS[k] * Sinv[k];
            dX[k] = 0.5 * (t + t.transpose());
        }
        ap = 1.0;
        ad = 1.0;
        for (int k = 0; k < nb; ++k) {
            ap = std::min(ap, 0.98 * max_step(X[k], dX[k]));
            ad = std::min(ad, 0.98 * max_step(S[k], dS[k]));
        }
        // Backtrack if roundoff pushed a block out of the cone; eigenvalue
        // estimates in max_step are not exact at mu ~ 1e-12.
        auto cone_ok = [&](const std::vector<RMatrix>& base, const std::vector<RMatrix>& dir, double alpha) {
            for (int k = 0; k < nb; ++k) {
                Eigen::LLT<RMatrix> llt(RMatrix(base[k] + alpha * dir[k]));
                if (llt.info() != Eigen::Success) return false;
            }
            return true;
        };
        for (int t = 0; t < 30 && ap > 1e-14 && !cone_ok(X, dX, ap); ++t) ap *= 0.5;
        for (int t = 0; t < 30 && ad > 1e-14 && !cone_ok(S, dS, ad); ++t) ad *= 0.5;

        if (ap < 1e-10 && ad < 1e-10) {
            if (++stall >= 3) {
                message = "no step progress";
                break;
            }
        } else {
            stall = 0;
        }
        for (int k = 0; k < nb; ++k) {
            X[k] += ap * dX[k];
            S[k] += ad * dS[k];
        }
        y += ad * dy;
    }

    if (status == SolveStatus::inaccurate) {
        if (rel_p <= accept_feas && rel_d <= accept_feas && rel_gap <= accept_gap) {
            status = SolveStatus::optimal;
            if (message.empty()) message = "met relaxed tolerance";
        } else if (message.empty()) {
            message = "iteration limit reached";
        }
        if (status != SolveStatus::optimal && rel_p > 1e-5 && stall >= 3)
            status = SolveStatus::infeasible;
    }

    ConicSolution sol;
    sol.status = status;
    sol.message = message;
    sol.diagnostics.iterations = iter;

    const int nv = static_cast<int>(p.vars().size());
    sol.assignments.resize(nv);
    sol.dual_blocks.resize(nv);
    for (int v = 0; v < nv; ++v) {
        if (p.vars()[v].kind == VarKind::scalar_nonneg) {
            sol.assignments[v] = Matrix::Constant(1, 1, X[v](0, 0));
            sol.dual_blocks[v] = Matrix::Constant(1, 1, 0.5 * S[v](0, 0));
        } else {
            sol.assignments[v] = unrealify(X[v]);
            sol.dual_blocks[v] = unrealify(S[v]);
        }
    }
    double pobj = 0.0, dobj = 0.0;
    for (int k = 0; k < nb; ++k) pobj += 0.5 * (f.C[k].array() * X[k].array()).sum();
    for (int i = 0; i < m; ++i) dobj += 0.5 * f.rows[i].b * y(i);
    sol.primal_value = f.sign * pobj + f.obj_const;
    sol.dual_value = f.sign * dobj + f.obj_const;
    sol.gap = std::abs(sol.primal_value - sol.dual_value);
    sol.y.assign(f.total_rows, 0.0);
    for (int i = 0; i < m; ++i) sol.y[f.kept[i]] = y(i);
    return sol;
}

} // namespace qres
