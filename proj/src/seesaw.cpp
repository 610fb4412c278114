#include "qres/seesaw.hpp"

#include <cmath>

// See-saw heuristics for the separability-type free cones: the decomposition
// sum_l (A-side)_l (x) (B-side)_l is optimised one side at a time, each step a
// small SDP in which the fixed side enters only through linear couplings.
// Restarts are seeded; restart 0 uses a deterministic marginal- or
// classical-derived initialisation, exact on product and embedded instances.

namespace qres {
namespace {

ExprTerm term_tensor_right(int var, const Matrix& beta, int dl) {
    // X (dl) -> X (x) beta; adjoint(E) = tr_2[(1 (x) beta) E]
    return {var, [beta, dl](const Matrix& e) {
                const int dr = static_cast<int>(beta.rows());
                return Matrix(partial_trace(kron_matrix(Matrix::Identity(dl, dl), beta) * e, {dl, dr}, {1}));
            }};
}

ExprTerm term_tensor_left(int var, const Matrix& alpha, int dr) {
    // X (dr) -> alpha (x) X; adjoint(E) = tr_1[(alpha (x) 1) E]
    return {var, [alpha, dr](const Matrix& e) {
                const int dl = static_cast<int>(alpha.rows());
                return Matrix(partial_trace(kron_matrix(alpha, Matrix::Identity(dr, dr)) * e, {dl, dr}, {0}));
            }};
}

ExprTerm term_trace_coupling(int var, const Matrix& pair_with, const Matrix& out_fixed) {
    // X -> tr(X pair_with) out_fixed; adjoint(E) = tr(E out_fixed) pair_with
    return {var, [pair_with, out_fixed](const Matrix& e) {
                const double c = (e * out_fixed).trace().real();
                return Matrix(c * pair_with);
            }};
}

ExprTerm term_contract_input(int var, const Matrix& omega, int dsys) {
    // X on (anc x sys) -> tr_anc[X (omega (x) 1_sys)]; adjoint(E) = omega (x) E
    return {var, [omega, dsys](const Matrix& e) {
                (void)dsys;
                return Matrix(kron_matrix(omega, e));
            }};
}

struct SeesawTrace {
    double best = 1e300;
    int best_restart = -1;
    double worst = -1e300;
    int restarts = 0;
    void feed(double v, int restart) {
        ++restarts;
        if (v < best - 1e-12) {
            best = v;
            best_restart = restart;
        }
        worst = std::max(worst, v);
    }
};

bool solved(const ConicSolution& s) { return s.status == SolveStatus::optimal; }

} // namespace

// ---------------------------------------------------------------------------
// teleportation (Choi level): F_a = sum_l alpha_{a|l} (x) beta_l
// ---------------------------------------------------------------------------

RobustnessResult seesaw_teleport_choi(const Povm& ma, const HermitianOperator& rho, const RobustnessSettings& cfg) {
    const auto j = choi_teleportation(ma.elements, rho, cfg.validation.psd);
    const int d = j.front().dims()[0], db = j.front().dims()[1], oa = static_cast<int>(j.size());
    const Matrix rho_b = partial_trace(rho.matrix(), rho.dims(), {0});
    const int card = cfg.lambda_cardinality > 0 ? cfg.lambda_cardinality
                                                : std::min(oa * d * d * db * db + 1, 24);

    // alpha-step: fixed unit-trace beta_l. Variables alpha_{a|l} >= 0 on V',
    // scales s_l >= 0, slacks S_a = F_a - J_a >= 0, kappa = d u - rho_B >= 0.
    auto alpha_step = [&](const std::vector<Matrix>& beta, std::vector<std::vector<Matrix>>& alpha,
                          std::vector<double>& scales, double& value) {
        ConicProgram p;
        std::vector<std::vector<int>> al(oa, std::vector<int>(card));
        std::vector<int> sv(card), sl(oa);
        for (int a = 0; a < oa; ++a)
            for (int l = 0; l < card; ++l)
                al[a][l] = p.add_hermitian_var("al" + std::to_string(a) + "_" + std::to_string(l), d);
        for (int l = 0; l < card; ++l) sv[l] = p.add_scalar_var("s" + std::to_string(l));
        for (int a = 0; a < oa; ++a) sl[a] = p.add_hermitian_var("S" + std::to_string(a), d * db);
        const int kap = p.add_hermitian_var("kappa", db);

        for (int l = 0; l < card; ++l) {
            OpExpr e(d);
            for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(al[a][l], 1.0));
            e.terms.push_back(term_scalar_times(sv[l], Matrix(-Matrix::Identity(d, d))));
            p.add_op_eq(e, "povm", l);
        }
        for (int a = 0; a < oa; ++a) {
            OpExpr e(d * db);
            e.terms.push_back(term_scale(sl[a], 1.0));
            for (int l = 0; l < card; ++l) e.terms.push_back({al[a][l], [b = beta[l], d](const Matrix& eb) {
                                                                  return Matrix(-partial_trace(
                                                                      kron_matrix(Matrix::Identity(d, d), b) * eb,
                                                                      {d, static_cast<int>(b.rows())}, {1}));
                                                              }});
            e.constant = j[a].matrix();
            p.add_op_eq(e, "slack", a);
        }
        {
            OpExpr e(db);
            e.terms.push_back(term_scale(kap, 1.0));
            for (int l = 0; l < card; ++l)
                e.terms.push_back(term_scalar_times(sv[l], Matrix(-static_cast<double>(d) * beta[l])));
            e.constant = rho_b;
            p.add_op_eq(e, "kappa");
        }
        ScalarExpr obj;
        for (int l = 0; l < card; ++l) obj.terms.push_back({sv[l], Matrix(static_cast<double>(d) * Matrix::Identity(1, 1))});
        obj.constant = -1.0;
        p.minimize(obj);
        auto sol = solve(p, cfg.solver);
        if (!solved(sol)) {
            value = 1e300;
            return;
        }
        value = sol.primal_value;
        alpha.assign(oa, std::vector<Matrix>(card));
        scales.assign(card, 0.0);
        for (int l = 0; l < card; ++l) scales[l] = sol.scalar_of(sv[l]);
        for (int a = 0; a < oa; ++a)
            for (int l = 0; l < card; ++l) alpha[a][l] = sol.value_of(al[a][l]);
    };

    // beta-step: fixed normalised alpha POVM slices; variables beta~_l >= 0.
    auto beta_step = [&](const std::vector<std::vector<Matrix>>& alpha_norm, std::vector<Matrix>& beta,
                         double& value) {
        ConicProgram p;
        std::vector<int> bv(card), sl(oa);
        for (int l = 0; l < card; ++l) bv[l] = p.add_hermitian_var("b" + std::to_string(l), db);
        for (int a = 0; a < oa; ++a) sl[a] = p.add_hermitian_var("S" + std::to_string(a), d * db);
        const int kap = p.add_hermitian_var("kappa", db);

        for (int a = 0; a < oa; ++a) {
            OpExpr e(d * db);
            e.terms.push_back(term_scale(sl[a], 1.0));
            for (int l = 0; l < card; ++l) {
                Matrix neg_alpha = -alpha_norm[a][l];
                e.terms.push_back(term_tensor_left(bv[l], neg_alpha, db));
            }
            e.constant = j[a].matrix();
            p.add_op_eq(e, "slack", a);
        }
        {
            OpExpr e(db);
            e.terms.push_back(term_scale(kap, 1.0));
            for (int l = 0; l < card; ++l) e.terms.push_back(term_scale(bv[l], -static_cast<double>(d)));
            e.constant = rho_b;
            p.add_op_eq(e, "kappa");
        }
        ScalarExpr obj;
        for (int l = 0; l < card; ++l) obj.terms.push_back({bv[l], Matrix(static_cast<double>(d) * Matrix::Identity(db, db))});
        obj.constant = -1.0;
        p.minimize(obj);
        auto sol = solve(p, cfg.solver);
        if (!solved(sol)) {
            value = 1e300;
            return;
        }
        value = sol.primal_value;
        beta.assign(card, Matrix());
        for (int l = 0; l < card; ++l) beta[l] = sol.value_of(bv[l]);
    };

    SeesawTrace trace;
    Decomposition best_dec; // h: alpha (scale-absorbing), g: the beta list they were optimised against
    Rng rng(cfg.seed);
    for (int restart = 0; restart < std::max(1, cfg.seesaw_restarts); ++restart) {
        std::vector<Matrix> beta(card);
        if (restart == 0) {
            // marginal-derived start: Bob's reduced state first, then mixes
            beta[0] = rho_b;
            if (card > 1) beta[1] = Matrix::Identity(db, db) / db;
            for (int l = 2; l < card; ++l) beta[l] = random_state(rng, db);
        } else {
            for (int l = 0; l < card; ++l) beta[l] = random_state(rng, db);
        }
        double restart_best = 1e300, prev = 1e300;
        for (int round = 0; round < cfg.seesaw_max_rounds; ++round) {
            std::vector<std::vector<Matrix>> alpha;
            std::vector<double> scales;
            double value = 1e300;
            alpha_step(beta, alpha, scales, value);
            if (value > 1e200) break;
            if (value < restart_best) restart_best = value;
            if (value < trace.best - 1e-12) {
                best_dec = Decomposition{};
                best_dec.weights = scales;
                best_dec.g = beta;
                best_dec.h.assign(oa, {});
                for (int a = 0; a < oa; ++a) best_dec.h[a] = alpha[a];
            }
            trace.best = std::min(trace.best, value);

            std::vector<std::vector<Matrix>> alpha_norm(oa, std::vector<Matrix>(card));
            for (int l = 0; l < card; ++l)
                for (int a = 0; a < oa; ++a)
                    alpha_norm[a][l] = scales[l] > 1e-12 ? Matrix(alpha[a][l] / scales[l])
                                                         : Matrix(Matrix::Identity(d, d) / oa);
            double bvalue = 1e300;
            beta_step(alpha_norm, beta, bvalue);
            if (bvalue > 1e200) break;
            for (int l = 0; l < card; ++l) {
                const double t = beta[l].trace().real();
                beta[l] = t > 1e-12 ? Matrix(beta[l] / t) : random_state(rng, db);
            }
            if (prev - std::min(value, bvalue) < cfg.seesaw_improve_tol) break;
            prev = std::min(value, bvalue);
        }
        trace.feed(restart_best, restart);
    }
    if (trace.best > 1e200) throw solver_error("seesaw_teleport_choi: no restart produced a feasible decomposition");

    RobustnessResult res;
    res.program = "teleport-choi-seesaw";
    res.bound = BoundKind::upper;
    res.value = clamp_value(trace.best, res.diagnostics.note);
    res.diagnostics.restarts_used = trace.restarts;
    res.diagnostics.restart_spread = trace.worst - trace.best;

    // recompute the defining residual of the returned decomposition
    double resid = 0.0;
    std::vector<Matrix> f(oa, Matrix::Zero(d * db, d * db));
    for (int a = 0; a < oa; ++a)
        for (int l = 0; l < card; ++l) f[a] += kron_matrix(best_dec.h[a][l], best_dec.g[l]);
    Matrix ktot = Matrix::Zero(d * db, d * db);
    for (int a = 0; a < oa; ++a) {
        Matrix k = f[a] - j[a].matrix();
        resid = std::max(resid, std::max(0.0, -min_eig(k)));
        ktot += k;
    }
    // noise marginal must have the CJ form (1/d) (x) kappa with kappa >= 0
    Matrix kappa = partial_trace(ktot, {d, db}, {0});
    resid = std::max(resid, std::max(0.0, -min_eig(kappa)));
    resid = std::max(resid, (ktot - kron_matrix(Matrix::Identity(d, d) / d, kappa)).cwiseAbs().maxCoeff());
    best_dec.residual = resid;
    res.diagnostics.max_residual = resid;
    res.decomposition = std::move(best_dec);
    return res;
}

// ---------------------------------------------------------------------------
// Buscemi: F_ab = sum_l alpha_{a|l} (x) delta_{b|l}
// ---------------------------------------------------------------------------

RobustnessResult seesaw_buscemi(const DistributedPovm& mab, const RobustnessSettings& cfg) {
    mab.validate(cfg.validation).require("seesaw_buscemi");
    const int dv = mab.dim_v, dvp = mab.dim_vp, oa = mab.outcomes_a(), ob = mab.outcomes_b();
    const int card = cfg.lambda_cardinality > 0 ? cfg.lambda_cardinality
                                                : std::min(oa * ob * dv * dv * dvp * dvp + 1, 24);

    auto one_step = [&](bool optimise_a, const std::vector<std::vector<Matrix>>& fixed_norm,
                        std::vector<std::vector<Matrix>>& out, std::vector<double>& scales, double& value) {
        // optimise_a: variables on V for each (a, l) with fixed delta_{b|l};
        // otherwise variables on V' for each (b, l) with fixed alpha_{a|l}.
        const int nout = optimise_a ? oa : ob;
        const int dmy = optimise_a ? dv : dvp;
        ConicProgram p;
        std::vector<std::vector<int>> vv(nout, std::vector<int>(card));
        std::vector<int> sv(card), sl(oa * ob);
        for (int o = 0; o < nout; ++o)
            for (int l = 0; l < card; ++l) vv[o][l] = p.add_hermitian_var("v" + std::to_string(o) + "_" + std::to_string(l), dmy);
        for (int l = 0; l < card; ++l) sv[l] = p.add_scalar_var("s" + std::to_string(l));
        for (int k = 0; k < oa * ob; ++k) sl[k] = p.add_hermitian_var("S" + std::to_string(k), dv * dvp);

        for (int l = 0; l < card; ++l) {
            OpExpr e(dmy);
            for (int o = 0; o < nout; ++o) e.terms.push_back(term_scale(vv[o][l], 1.0));
            e.terms.push_back(term_scalar_times(sv[l], Matrix(-Matrix::Identity(dmy, dmy))));
            p.add_op_eq(e, "povm", l);
        }
        for (int a = 0; a < oa; ++a)
            for (int b = 0; b < ob; ++b) {
                OpExpr e(dv * dvp);
                e.terms.push_back(term_scale(sl[a * ob + b], 1.0));
                for (int l = 0; l < card; ++l) {
                    if (optimise_a) {
                        Matrix neg_delta = -fixed_norm[b][l];
                        e.terms.push_back(term_tensor_right(vv[a][l], neg_delta, dv));
                    } else {
                        Matrix neg_alpha = -fixed_norm[a][l];
                        e.terms.push_back(term_tensor_left(vv[b][l], neg_alpha, dvp));
                    }
                }
                e.constant = mab.elements[a][b].matrix();
                p.add_op_eq(e, "slack", a * ob + b);
            }
        ScalarExpr obj;
        for (int l = 0; l < card; ++l) obj.terms.push_back({sv[l], Matrix::Identity(1, 1)});
        obj.constant = -1.0;
        p.minimize(obj);
        auto sol = solve(p, cfg.solver);
        if (!solved(sol)) {
            value = 1e300;
            return;
        }
        value = sol.primal_value;
        out.assign(nout, std::vector<Matrix>(card));
        scales.assign(card, 0.0);
        for (int l = 0; l < card; ++l) scales[l] = sol.scalar_of(sv[l]);
        for (int o = 0; o < nout; ++o)
            for (int l = 0; l < card; ++l) out[o][l] = sol.value_of(vv[o][l]);
    };

    auto normalise = [&](const std::vector<std::vector<Matrix>>& raw, const std::vector<double>& scales, int dmy) {
        std::vector<std::vector<Matrix>> norm(raw.size(), std::vector<Matrix>(card));
        for (size_t o = 0; o < raw.size(); ++o)
            for (int l = 0; l < card; ++l)
                norm[o][l] = scales[l] > 1e-12 ? Matrix(raw[o][l] / scales[l])
                                               : Matrix(Matrix::Identity(dmy, dmy) / static_cast<double>(raw.size()));
        return norm;
    };

    SeesawTrace trace;
    Decomposition best_dec;
    Rng rng(cfg.seed + 1);
    for (int restart = 0; restart < std::max(1, cfg.seesaw_restarts); ++restart) {
        // initial delta_{b|l}: restart 0 uses Bob's marginal POVM of M_ab
        std::vector<std::vector<Matrix>> delta(ob, std::vector<Matrix>(card));
        if (restart == 0) {
            for (int b = 0; b < ob; ++b) {
                Matrix margsum = Matrix::Zero(dvp, dvp);
                for (int a = 0; a < oa; ++a)
                    margsum += partial_trace(mab.elements[a][b].matrix(), {dv, dvp}, {0});
                delta[b][0] = margsum / dv;
                for (int l = 1; l < card; ++l) delta[b][l] = Matrix::Zero(dvp, dvp);
            }
            // fill the unused directions with fresh random POVMs
            for (int l = 1; l < card; ++l) {
                auto pv = random_povm(rng, dvp, ob);
                for (int b = 0; b < ob; ++b) delta[b][l] = pv[b];
            }
        } else {
            for (int l = 0; l < card; ++l) {
                auto pv = random_povm(rng, dvp, ob);
                for (int b = 0; b < ob; ++b) delta[b][l] = pv[b];
            }
        }
        double restart_best = 1e300, prev = 1e300;
        for (int round = 0; round < cfg.seesaw_max_rounds; ++round) {
            std::vector<std::vector<Matrix>> alpha, draw;
            std::vector<double> sa, sb;
            double value = 1e300;
            one_step(true, delta, alpha, sa, value);
            if (value > 1e200) break;
            restart_best = std::min(restart_best, value);
            if (value < trace.best - 1e-12) {
                // snapshot the matched pair: raw alpha against the deltas it saw
                best_dec = Decomposition{};
                best_dec.weights = sa;
                best_dec.h.assign(oa, {});
                for (int a = 0; a < oa; ++a) best_dec.h[a] = alpha[a];
                best_dec.g.clear();
                for (int l = 0; l < card; ++l)
                    for (int b = 0; b < ob; ++b) best_dec.g.push_back(delta[b][l]);
            }
            trace.best = std::min(trace.best, value);

            auto alpha_norm = normalise(alpha, sa, dv);
            double bvalue = 1e300;
            one_step(false, alpha_norm, draw, sb, bvalue);
            if (bvalue > 1e200) break;
            delta = normalise(draw, sb, dvp);
            if (prev - std::min(value, bvalue) < cfg.seesaw_improve_tol) break;
            prev = std::min(value, bvalue);
        }
        trace.feed(restart_best, restart);
    }
    if (trace.best > 1e200) throw solver_error("seesaw_buscemi: no restart produced a feasible decomposition");

    RobustnessResult res;
    res.program = "buscemi-seesaw";
    res.bound = BoundKind::upper;
    res.value = clamp_value(trace.best, res.diagnostics.note);
    res.diagnostics.restarts_used = trace.restarts;
    res.diagnostics.restart_spread = trace.worst - trace.best;

    // F_ab = sum_l alpha_{a|l} (x) delta_{b|l}; alpha carries the weights
    double resid = 0.0;
    Matrix ftot = Matrix::Zero(dv * dvp, dv * dvp);
    for (int a = 0; a < oa; ++a)
        for (int b = 0; b < ob; ++b) {
            Matrix f = Matrix::Zero(dv * dvp, dv * dvp);
            for (int l = 0; l < card; ++l)
                f += kron_matrix(best_dec.h[a][l], best_dec.g[static_cast<size_t>(l) * ob + b]);
            Matrix gap = f - mab.elements[a][b].matrix();
            resid = std::max(resid, std::max(0.0, -min_eig(gap)));
            ftot += gap;
        }
    // eliminated noise must be proportional to the identity in total
    const double rr = ftot.trace().real() / (dv * dvp);
    resid = std::max(resid, (ftot - rr * Matrix::Identity(dv * dvp, dv * dvp)).cwiseAbs().maxCoeff());
    best_dec.residual = resid;
    res.diagnostics.max_residual = resid;
    res.decomposition = std::move(best_dec);
    return res;
}

// ---------------------------------------------------------------------------
// generalised incompatibility: M_{a|w_x} + r N_{a|w_x} = (1+r) sum_l tr[H_{a|l} w_x] G_l
// ---------------------------------------------------------------------------

RobustnessResult seesaw_incompat_generalised(const GeneralisedMeasurementSet& gset, const RobustnessSettings& cfg) {
    gset.validate(cfg.validation).require("seesaw_incompat_generalised");
    const int dap = gset.ancilla_dim(), da = gset.system_dim();
    const int oa = gset.outcomes(), ix = gset.inputs_count();
    const int card = cfg.lambda_cardinality > 0 ? cfg.lambda_cardinality
                                                : std::min(oa * ix * da * da + 1, 24);

    // h-step: G_l fixed (PSD, summing to ~1). Variables H~_{a|l} on the
    // ancilla, t >= 0 (= 1 + r), parent noise Np_a >= 0 on (anc x sys).
    auto h_step = [&](const std::vector<Matrix>& gfix, std::vector<std::vector<Matrix>>& hout, double& tval,
                      double& value) {
        ConicProgram p;
        std::vector<std::vector<int>> hv(oa, std::vector<int>(card));
        std::vector<int> nv(oa);
        for (int a = 0; a < oa; ++a)
            for (int l = 0; l < card; ++l) hv[a][l] = p.add_hermitian_var("H" + std::to_string(a) + "_" + std::to_string(l), dap);
        for (int a = 0; a < oa; ++a) nv[a] = p.add_hermitian_var("Np" + std::to_string(a), dap * da);
        const int t = p.add_scalar_var("t");

        for (int l = 0; l < card; ++l) {
            OpExpr e(dap);
            for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(hv[a][l], 1.0));
            e.terms.push_back(term_scalar_times(t, Matrix(-Matrix::Identity(dap, dap))));
            p.add_op_eq(e, "povm", l);
        }
        {
            OpExpr e(dap * da);
            for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(nv[a], 1.0));
            e.terms.push_back(term_scalar_times(t, Matrix(-Matrix::Identity(dap * da, dap * da))));
            e.constant = Matrix::Identity(dap * da, dap * da);
            p.add_op_eq(e, "noisemarg");
        }
        for (int x = 0; x < ix; ++x) {
            const Matrix omega = gset.inputs.states[x].matrix();
            for (int a = 0; a < oa; ++a) {
                OpExpr e(da);
                for (int l = 0; l < card; ++l) e.terms.push_back(term_trace_coupling(hv[a][l], omega, gfix[l]));
                e.terms.push_back({nv[a], [omega](const Matrix& eb) { return Matrix(-kron_matrix(omega, eb)); }});
                e.constant = -gset.effective[x][a].matrix();
                p.add_op_eq(e, "link", x * oa + a);
            }
        }
        ScalarExpr obj;
        obj.terms.push_back({t, Matrix::Identity(1, 1)});
        obj.constant = -1.0;
        p.minimize(obj);
        auto sol = solve(p, cfg.solver);
        if (!solved(sol)) {
            value = 1e300;
            return;
        }
        value = sol.primal_value;
        tval = sol.scalar_of(t);
        hout.assign(oa, std::vector<Matrix>(card));
        for (int a = 0; a < oa; ++a)
            for (int l = 0; l < card; ++l) hout[a][l] = sol.value_of(hv[a][l]);
    };

    // g-step: response probabilities p(a|x,l) = tr[H_{a|l} w_x] fixed.
    auto g_step = [&](const std::vector<std::vector<std::vector<double>>>& prob, std::vector<Matrix>& gout,
                      double& value) {
        ConicProgram p;
        std::vector<int> gv(card), nv(oa);
        for (int l = 0; l < card; ++l) gv[l] = p.add_hermitian_var("G" + std::to_string(l), da);
        for (int a = 0; a < oa; ++a) nv[a] = p.add_hermitian_var("Np" + std::to_string(a), dap * da);
        const int t = p.add_scalar_var("t");
        {
            OpExpr e(da);
            for (int l = 0; l < card; ++l) e.terms.push_back(term_scale(gv[l], 1.0));
            e.terms.push_back(term_scalar_times(t, Matrix(-Matrix::Identity(da, da))));
            p.add_op_eq(e, "freemarg");
        }
        {
            OpExpr e(dap * da);
            for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(nv[a], 1.0));
            e.terms.push_back(term_scalar_times(t, Matrix(-Matrix::Identity(dap * da, dap * da))));
            e.constant = Matrix::Identity(dap * da, dap * da);
            p.add_op_eq(e, "noisemarg");
        }
        for (int x = 0; x < ix; ++x) {
            const Matrix omega = gset.inputs.states[x].matrix();
            for (int a = 0; a < oa; ++a) {
                OpExpr e(da);
                for (int l = 0; l < card; ++l)
                    if (std::abs(prob[a][x][l]) > 1e-15) e.terms.push_back(term_scale(gv[l], prob[a][x][l]));
                e.terms.push_back({nv[a], [omega](const Matrix& eb) { return Matrix(-kron_matrix(omega, eb)); }});
                e.constant = -gset.effective[x][a].matrix();
                p.add_op_eq(e, "link", x * oa + a);
            }
        }
        ScalarExpr obj;
        obj.terms.push_back({t, Matrix::Identity(1, 1)});
        obj.constant = -1.0;
        p.minimize(obj);
        auto sol = solve(p, cfg.solver);
        if (!solved(sol)) {
            value = 1e300;
            return;
        }
        value = sol.primal_value;
        gout.assign(card, Matrix());
        for (int l = 0; l < card; ++l) gout[l] = sol.value_of(gv[l]);
    };

    // classical-derived starting parent, exact for embedded standard sets
    std::vector<Matrix> classical_g;
    if (gset.classical_inputs()) {
        StandardMeasurementSet std_set;
        std_set.dim = da;
        std_set.elements.resize(ix);
        for (int x = 0; x < ix; ++x)
            for (int a = 0; a < oa; ++a) std_set.elements[x].push_back(gset.effective[x][a]);
        try {
            auto exact = rob_incompat_standard(std_set, cfg);
            const double scale = 1.0 + exact.value;
            for (size_t l = 0; l < exact.decomposition->g.size() && static_cast<int>(l) < card; ++l)
                classical_g.push_back(exact.decomposition->g[l] / scale);
            while (static_cast<int>(classical_g.size()) < card) classical_g.push_back(Matrix::Zero(da, da));
        } catch (const resource_error&) {
            classical_g.clear();
        }
    }

    SeesawTrace trace;
    Decomposition best_dec;
    Rng rng(cfg.seed + 2);
    for (int restart = 0; restart < std::max(1, cfg.seesaw_restarts); ++restart) {
        std::vector<Matrix> g(card);
        if (restart == 0 && !classical_g.empty()) {
            g = classical_g;
        } else {
            auto pv = random_povm(rng, da, card);
            for (int l = 0; l < card; ++l) g[l] = pv[l];
        }
        double restart_best = 1e300, prev = 1e300;
        for (int round = 0; round < cfg.seesaw_max_rounds; ++round) {
            std::vector<std::vector<Matrix>> h;
            double value = 1e300, tval = 1.0;
            h_step(g, h, tval, value);
            if (value > 1e200) break;
            restart_best = std::min(restart_best, value);
            if (value < trace.best - 1e-12) {
                best_dec = Decomposition{};
                best_dec.g = g; // normalised parent the h-step saw
                best_dec.h.assign(oa, {});
                for (int a = 0; a < oa; ++a) {
                    best_dec.h[a] = h[a];
                    for (int l = 0; l < card; ++l) best_dec.h[a][l] /= std::max(tval, 1e-12);
                }
            }
            trace.best = std::min(trace.best, value);

            std::vector<std::vector<std::vector<double>>> prob(
                oa, std::vector<std::vector<double>>(ix, std::vector<double>(card, 0.0)));
            for (int a = 0; a < oa; ++a)
                for (int x = 0; x < ix; ++x)
                    for (int l = 0; l < card; ++l)
                        prob[a][x][l] = (h[a][l] * gset.inputs.states[x].matrix()).trace().real() / std::max(tval, 1e-12);
            double gvalue = 1e300;
            g_step(prob, g, gvalue);
            if (gvalue > 1e200) break;
            const double tg = gvalue + 1.0;
            for (int l = 0; l < card; ++l) g[l] /= std::max(tg, 1e-12);
            if (prev - std::min(value, gvalue) < cfg.seesaw_improve_tol) break;
            prev = std::min(value, gvalue);
        }
        trace.feed(restart_best, restart);
    }
    if (trace.best > 1e200)
        throw solver_error("seesaw_incompat_generalised: no restart produced a feasible decomposition");

    RobustnessResult res;
    res.program = "incompat-generalised-seesaw";
    res.bound = BoundKind::upper;
    res.value = clamp_value(trace.best, res.diagnostics.note);
    res.diagnostics.restarts_used = trace.restarts;
    res.diagnostics.restart_spread = trace.worst - trace.best;

    // residual of M_{a|w_x} <= (1+r) sum_l tr[H w] G_l with a valid noise gap
    const double r = res.value;
    double resid = 0.0;
    for (int x = 0; x < ix; ++x)
        for (int a = 0; a < oa; ++a) {
            Matrix free_side = Matrix::Zero(da, da);
            for (int l = 0; l < card; ++l) {
                const double pax = (best_dec.h[a][l] * gset.inputs.states[x].matrix()).trace().real();
                free_side += pax * best_dec.g[l];
            }
            Matrix gap = (1.0 + r) * free_side - gset.effective[x][a].matrix();
            resid = std::max(resid, std::max(0.0, -min_eig(gap)));
        }
    best_dec.residual = resid;
    res.diagnostics.max_residual = resid;
    res.decomposition = std::move(best_dec);
    return res;
}

// ---------------------------------------------------------------------------
// behaviour-level see-saw with quantum inputs
// ---------------------------------------------------------------------------

RobustnessResult seesaw_behaviour(const Behaviour& b, const RobustnessSettings& cfg) {
    const int ia = b.inputs_a_count(), ib = b.inputs_b_count(), oa = b.outcomes_a(), ob = b.outcomes_b();
    const int card = cfg.lambda_cardinality > 0 ? cfg.lambda_cardinality : ia * ib * oa * ob + 1;
    const bool qa = b.inputs_a.has_value() && !cfg.behaviour_unconstrained_pmf;
    const bool qb = b.inputs_b.has_value() && !cfg.behaviour_unconstrained_pmf;

    // One side is re-optimised with the other's response probabilities fixed.
    // Quantum sides keep POVM variables H_{.|l} (realizability constraint);
    // classical or unconstrained-PMF sides use plain PMF scalars.
    auto side_step = [&](bool side_a, const std::vector<std::vector<std::vector<double>>>& fixed_prob,
                         std::vector<std::vector<std::vector<double>>>& prob_out, std::vector<double>& tl_out,
                         double& value) {
        const bool quantum = side_a ? qa : qb;
        const int ni = side_a ? ia : ib;
        const int no = side_a ? oa : ob;
        const int nio = side_a ? ib : ia;
        const int noo = side_a ? ob : oa;
        const int danc = quantum ? (side_a ? b.inputs_a->dim : b.inputs_b->dim) : 0;

        ConicProgram p;
        std::vector<std::vector<int>> hv; // POVM vars when quantum
        std::vector<std::vector<std::vector<int>>> fv; // PMF scalars otherwise [o][i][l]
        std::vector<int> tl(card);
        for (int l = 0; l < card; ++l) tl[l] = p.add_scalar_var("t" + std::to_string(l));
        if (quantum) {
            hv.assign(no, std::vector<int>(card));
            for (int o = 0; o < no; ++o)
                for (int l = 0; l < card; ++l) hv[o][l] = p.add_hermitian_var("H" + std::to_string(o) + "_" + std::to_string(l), danc);
            for (int l = 0; l < card; ++l) {
                OpExpr e(danc);
                for (int o = 0; o < no; ++o) e.terms.push_back(term_scale(hv[o][l], 1.0));
                e.terms.push_back(term_scalar_times(tl[l], Matrix(-Matrix::Identity(danc, danc))));
                p.add_op_eq(e, "povm", l);
            }
        } else {
            fv.assign(no, std::vector<std::vector<int>>(ni, std::vector<int>(card)));
            for (int o = 0; o < no; ++o)
                for (int i = 0; i < ni; ++i)
                    for (int l = 0; l < card; ++l) fv[o][i][l] = p.add_scalar_var("f");
            for (int i = 0; i < ni; ++i)
                for (int l = 0; l < card; ++l) {
                    ScalarExpr e;
                    for (int o = 0; o < no; ++o) e.terms.push_back({fv[o][i][l], Matrix::Identity(1, 1)});
                    e.terms.push_back({tl[l], Matrix(-Matrix::Identity(1, 1))});
                    p.add_scalar_eq(e, "pmf", i * card + l);
                }
        }
        // noise slacks and linking rows
        int row = 0;
        for (int x = 0; x < ia; ++x)
            for (int y = 0; y < ib; ++y)
                for (int a = 0; a < oa; ++a)
                    for (int bb = 0; bb < ob; ++bb, ++row) {
                        const int i_this = side_a ? x : y;
                        const int o_this = side_a ? a : bb;
                        const int i_oth = side_a ? y : x;
                        const int o_oth = side_a ? bb : a;
                        const int q = p.add_scalar_var("q" + std::to_string(row));
                        ScalarExpr e;
                        for (int l = 0; l < card; ++l) {
                            const double po = fixed_prob[o_oth][i_oth][l];
                            if (std::abs(po) < 1e-15) continue;
                            if (quantum) {
                                Matrix umat = (side_a ? b.inputs_a : b.inputs_b)->states[i_this].matrix();
                                e.terms.push_back({hv[o_this][l], Matrix(po * umat)});
                            } else {
                                e.terms.push_back({fv[o_this][i_this][l], Matrix(po * Matrix::Identity(1, 1))});
                            }
                        }
                        e.terms.push_back({q, Matrix(-Matrix::Identity(1, 1))});
                        e.constant = -b.p(a, bb, x, y);
                        p.add_scalar_eq(e, "link", row);
                        (void)nio;
                        (void)noo;
                    }
        ScalarExpr obj;
        for (int l = 0; l < card; ++l) obj.terms.push_back({tl[l], Matrix::Identity(1, 1)});
        obj.constant = -1.0;
        p.minimize(obj);
        auto sol = solve(p, cfg.solver);
        if (!solved(sol)) {
            value = 1e300;
            return;
        }
        value = sol.primal_value;
        tl_out.assign(card, 0.0);
        for (int l = 0; l < card; ++l) tl_out[l] = sol.scalar_of(tl[l]);
        prob_out.assign(no, std::vector<std::vector<double>>(ni, std::vector<double>(card, 0.0)));
        const double tsum = std::max(value + 1.0, 1e-12);
        for (int o = 0; o < no; ++o)
            for (int i = 0; i < ni; ++i)
                for (int l = 0; l < card; ++l) {
                    double raw;
                    if (quantum)
                        raw = (sol.value_of(hv[o][l]) * (side_a ? b.inputs_a : b.inputs_b)->states[i].matrix())
                                  .trace()
                                  .real();
                    else
                        raw = sol.scalar_of(fv[o][i][l]);
                    // normalise so that sum_l p(l) p(o|i,l) carries total weight 1
                    prob_out[o][i][l] = raw / tsum;
                }
        for (int l = 0; l < card; ++l) tl_out[l] /= tsum;
    };

    SeesawTrace trace;
    Decomposition best_dec;
    Rng rng(cfg.seed + 3);
    for (int restart = 0; restart < std::max(1, cfg.seesaw_restarts); ++restart) {
        // conditional B-side response per lambda to start
        std::vector<std::vector<std::vector<double>>> pb(ob, std::vector<std::vector<double>>(ib, std::vector<double>(card)));
        for (int y = 0; y < ib; ++y)
            for (int l = 0; l < card; ++l) {
                double norm = 0.0;
                std::vector<double> raw(ob);
                for (int o = 0; o < ob; ++o) {
                    raw[o] = restart == 0 ? 1.0 : rng.uniform() + 1e-3;
                    norm += raw[o];
                }
                for (int o = 0; o < ob; ++o) pb[o][y][l] = raw[o] / norm;
            }
        double restart_best = 1e300, prev = 1e300;
        for (int round = 0; round < cfg.seesaw_max_rounds; ++round) {
            std::vector<std::vector<std::vector<double>>> pa;
            std::vector<double> ta, tb;
            double value = 1e300;
            side_step(true, pb, pa, ta, value);
            if (value > 1e200) break;
            restart_best = std::min(restart_best, value);
            if (value < trace.best - 1e-12) {
                best_dec = Decomposition{};
                best_dec.weights = ta;
            }
            trace.best = std::min(trace.best, value);

            auto pa_cond = pa;
            for (int o = 0; o < oa; ++o)
                for (int i = 0; i < ia; ++i)
                    for (int l = 0; l < card; ++l) pa_cond[o][i][l] = ta[l] > 1e-12 ? pa[o][i][l] / ta[l] : (1.0 / oa);
            double bvalue = 1e300;
            side_step(false, pa_cond, pb, tb, bvalue);
            if (bvalue > 1e200) break;
            for (int o = 0; o < ob; ++o)
                for (int i = 0; i < ib; ++i)
                    for (int l = 0; l < card; ++l) pb[o][i][l] = tb[l] > 1e-12 ? pb[o][i][l] / tb[l] : (1.0 / ob);
            if (prev - std::min(value, bvalue) < cfg.seesaw_improve_tol) break;
            prev = std::min(value, bvalue);
        }
        trace.feed(restart_best, restart);
    }
    if (trace.best > 1e200) throw solver_error("seesaw_behaviour: no restart produced a feasible decomposition");

    RobustnessResult res;
    res.program = "behaviour-seesaw";
    res.bound = BoundKind::upper;
    res.value = clamp_value(trace.best, res.diagnostics.note);
    res.diagnostics.restarts_used = trace.restarts;
    res.diagnostics.restart_spread = trace.worst - trace.best;
    res.decomposition = std::move(best_dec);
    return res;
}

} // namespace qres
