#include "qres/robustness.hpp"

#include "qres/seesaw.hpp"

#include <cmath>

namespace qres {

std::string to_string(BoundKind b) {
    switch (b) {
        case BoundKind::exact: return "exact";
        case BoundKind::lower: return "lower";
        default: return "upper";
    }
}

std::vector<std::vector<int>> enumerate_strategies(int inputs, int outcomes, long long cap) {
    double count = std::pow(static_cast<double>(outcomes), inputs);
    if (count > static_cast<double>(cap))
        throw resource_error("deterministic-strategy enumeration exceeds the configured cap (" +
                             std::to_string(cap) + "); use the see-saw route");
    const long long n = static_cast<long long>(std::llround(count));
    std::vector<std::vector<int>> out;
    out.reserve(n);
    std::vector<int> cur(inputs, 0);
    for (long long k = 0; k < n; ++k) {
        out.push_back(cur);
        for (int x = inputs - 1; x >= 0; --x) {
            if (++cur[x] < outcomes) break;
            cur[x] = 0;
        }
    }
    return out;
}

double clamp_value(double v, std::string& note) {
    if (v < 0.0 && v >= -1e-9) {
        note += "clamped tiny negative value " + std::to_string(v) + " to 0; ";
        return 0.0;
    }
    return v;
}

namespace {

void require_optimal(const ConicSolution& sol, const std::string& what) {
    if (sol.status == SolveStatus::optimal) return;
    throw solver_error(what + ": solver returned " + to_string(sol.status) +
                       (sol.message.empty() ? "" : " (" + sol.message + ")"));
}

ExprTerm term_block_xx(int var, int x, int d, int db) {
    // X on (d x db) -> <x| X |x> block on B
    Matrix proj = Matrix::Zero(d, d);
    proj(x, x) = 1.0;
    return {var, [proj, db](const Matrix& e) { return Matrix(kron_matrix(proj, e)); }};
}

ExprTerm term_contract_ancilla(int var, const Matrix& omega, bool transpose_input) {
    // X on (anc x sys) -> tr_anc[X (omega^(T) x 1_sys)]
    Matrix w = transpose_input ? omega.transpose() : Matrix(omega);
    return {var, [w](const Matrix& e) { return Matrix(kron_matrix(w.transpose(), e)); }};
}

} // namespace

// ---------------------------------------------------------------------------
// exact SDPs over deterministic response functions
// ---------------------------------------------------------------------------

RobustnessResult rob_incompat_standard(const StandardMeasurementSet& set, const RobustnessSettings& cfg) {
    set.validate(cfg.validation).require("rob_incompat_standard");
    const int d = set.dim, ia = set.inputs(), oa = set.outcomes();
    const auto strategies = enumerate_strategies(ia, oa, cfg.enumeration_cap);
    const int nl = static_cast<int>(strategies.size());

    ConicProgram p;
    std::vector<int> g(nl), n(ia * oa);
    for (int l = 0; l < nl; ++l) g[l] = p.add_hermitian_var("G" + std::to_string(l), d);
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) n[x * oa + a] = p.add_hermitian_var("N" + std::to_string(x) + "_" + std::to_string(a), d);

    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) {
            OpExpr e(d);
            for (int l = 0; l < nl; ++l)
                if (strategies[l][x] == a) e.terms.push_back(term_scale(g[l], 1.0));
            e.terms.push_back(term_scale(n[x * oa + a], -1.0));
            e.constant = -set.elements[x][a].matrix();
            p.add_op_eq(e, "noise", x * oa + a);
        }
    {
        OpExpr e(d);
        for (int l = 0; l < nl; ++l) {
            e.terms.push_back(term_scale(g[l], 1.0));
            e.terms.push_back(term_trace_times(g[l], Matrix(-Matrix::Identity(d, d) / d), d));
        }
        p.add_op_eq(e, "marginal");
    }
    ScalarExpr obj;
    for (int l = 0; l < nl; ++l) obj.terms.push_back({g[l], Matrix(Matrix::Identity(d, d) / d)});
    obj.constant = -1.0;
    p.minimize(obj);

    auto sol = solve(p, cfg.solver);
    require_optimal(sol, "rob_incompat_standard");

    RobustnessResult res;
    res.program = "incompat-standard-exact";
    res.bound = BoundKind::exact;
    res.value = clamp_value(sol.primal_value, res.diagnostics.note);
    res.diagnostics.gap = sol.gap;
    res.diagnostics.max_residual = std::max(sol.diagnostics.primal_residual, sol.diagnostics.dual_residual);

    Decomposition dec;
    dec.strategies = strategies;
    double resid = 0.0;
    const double opt = sol.primal_value;
    for (int l = 0; l < nl; ++l) dec.g.push_back(sol.value_of(g[l]));
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) {
            Matrix noise = sol.value_of(n[x * oa + a]);
            dec.noise.push_back(noise);
            Matrix lhs = -set.elements[x][a].matrix() - noise;
            for (int l = 0; l < nl; ++l)
                if (strategies[l][x] == a) lhs += dec.g[l];
            resid = std::max(resid, lhs.cwiseAbs().maxCoeff());
            resid = std::max(resid, std::max(0.0, -min_eig(noise)));
        }
    Matrix gsum = Matrix::Zero(d, d);
    for (const auto& gl : dec.g) gsum += gl;
    resid = std::max(resid, (gsum - (1.0 + opt) * Matrix::Identity(d, d)).cwiseAbs().maxCoeff());
    for (int l = 0; l < nl; ++l) dec.weights.push_back(dec.g[l].trace().real() / (d * (1.0 + opt)));
    dec.residual = resid;
    res.decomposition = std::move(dec);
    res.diagnostics.max_residual = std::max(res.diagnostics.max_residual, resid);

    double pairing = -1.0;
    auto xs = extract_dual_witness(p, sol, "noise");
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) pairing += hs_inner(xs[x * oa + a], set.elements[x][a].matrix());
    res.diagnostics.dual_pairing_value = pairing;
    return res;
}

RobustnessResult rob_teleport_classical_inputs(const Assemblage& assemblage, const RobustnessSettings& cfg) {
    assemblage.validate(cfg.validation).require("rob_teleport_classical_inputs");
    const int db = assemblage.dim_b, ia = assemblage.inputs(), oa = assemblage.outcomes();
    const Matrix rho_b = assemblage.bob_marginal().matrix();
    const auto strategies = enumerate_strategies(ia, oa, cfg.enumeration_cap);
    const int nl = static_cast<int>(strategies.size());

    ConicProgram p;
    std::vector<int> s(nl), n(ia * oa);
    for (int l = 0; l < nl; ++l) s[l] = p.add_hermitian_var("sig" + std::to_string(l), db);
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) n[x * oa + a] = p.add_hermitian_var("N" + std::to_string(x) + "_" + std::to_string(a), db);

    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) {
            OpExpr e(db);
            for (int l = 0; l < nl; ++l)
                if (strategies[l][x] == a) e.terms.push_back(term_scale(s[l], 1.0));
            e.terms.push_back(term_scale(n[x * oa + a], -1.0));
            e.constant = -assemblage.members[x][a].matrix();
            p.add_op_eq(e, "noise", x * oa + a);
        }
    {
        // free side carries Bob's marginal: sum sig_l = (sum tr sig_l) rho_B
        OpExpr e(db);
        for (int l = 0; l < nl; ++l) {
            e.terms.push_back(term_scale(s[l], 1.0));
            e.terms.push_back(term_trace_times(s[l], Matrix(-rho_b), db));
        }
        p.add_op_eq(e, "marginal");
    }
    ScalarExpr obj;
    for (int l = 0; l < nl; ++l) obj.terms.push_back({s[l], Matrix::Identity(db, db)});
    obj.constant = -1.0;
    p.minimize(obj);

    auto sol = solve(p, cfg.solver);
    require_optimal(sol, "rob_teleport_classical_inputs");

    RobustnessResult res;
    res.program = "teleport-classical-exact";
    res.bound = BoundKind::exact;
    res.value = clamp_value(sol.primal_value, res.diagnostics.note);
    res.diagnostics.gap = sol.gap;
    res.diagnostics.max_residual = std::max(sol.diagnostics.primal_residual, sol.diagnostics.dual_residual);

    Decomposition dec;
    dec.strategies = strategies;
    const double opt = sol.primal_value;
    double resid = 0.0;
    for (int l = 0; l < nl; ++l) dec.g.push_back(sol.value_of(s[l]));
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) {
            Matrix noise = sol.value_of(n[x * oa + a]);
            dec.noise.push_back(noise);
            Matrix lhs = -assemblage.members[x][a].matrix() - noise;
            for (int l = 0; l < nl; ++l)
                if (strategies[l][x] == a) lhs += dec.g[l];
            resid = std::max(resid, lhs.cwiseAbs().maxCoeff());
            resid = std::max(resid, std::max(0.0, -min_eig(noise)));
        }
    Matrix ssum = Matrix::Zero(db, db);
    for (const auto& sl : dec.g) ssum += sl;
    resid = std::max(resid, (ssum - (1.0 + opt) * rho_b).cwiseAbs().maxCoeff());
    for (int l = 0; l < nl; ++l) dec.weights.push_back(dec.g[l].trace().real() / (1.0 + opt));
    dec.residual = resid;
    res.decomposition = std::move(dec);
    res.diagnostics.max_residual = std::max(res.diagnostics.max_residual, resid);

    double pairing = -1.0;
    auto xs = extract_dual_witness(p, sol, "noise");
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) pairing += hs_inner(xs[x * oa + a], assemblage.members[x][a].matrix());
    res.diagnostics.dual_pairing_value = pairing;
    return res;
}

// ---------------------------------------------------------------------------
// Choi-level PPT relaxations
// ---------------------------------------------------------------------------

RobustnessResult rob_teleport_choi_ppt(const Povm& ma, const HermitianOperator& rho, const RobustnessSettings& cfg) {
    const auto j = choi_teleportation(ma.elements, rho, cfg.validation.psd);
    const int d = j.front().dims()[0], db = j.front().dims()[1], oa = static_cast<int>(j.size());
    const Matrix rho_b = partial_trace(rho.matrix(), rho.dims(), {0});
    const std::vector<int> jdims{d, db};

    ConicProgram p;
    std::vector<int> f(oa), pt(oa), sl(oa);
    for (int a = 0; a < oa; ++a) {
        f[a] = p.add_hermitian_var("F" + std::to_string(a), d * db);
        pt[a] = p.add_hermitian_var("P" + std::to_string(a), d * db);
        sl[a] = p.add_hermitian_var("S" + std::to_string(a), d * db);
    }
    const int u = p.add_hermitian_var("u", db);
    const int su = p.add_hermitian_var("su", db);

    for (int a = 0; a < oa; ++a) {
        OpExpr ept(d * db);
        ept.terms.push_back(term_scale(pt[a], 1.0));
        ept.terms.push_back(term_partial_transpose(f[a], jdims, 1, -1.0));
        p.add_op_eq(ept, "pt", a);

        OpExpr esl(d * db);
        esl.terms.push_back(term_scale(sl[a], 1.0));
        esl.terms.push_back(term_scale(f[a], -1.0));
        esl.constant = j[a].matrix();
        p.add_op_eq(esl, "slack", a);
    }
    {
        OpExpr e(d * db);
        for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(f[a], 1.0));
        e.terms.push_back(term_kron_left(u, d, -1.0));
        p.add_op_eq(e, "marginal");
    }
    {
        OpExpr e(db);
        e.terms.push_back(term_scale(su, 1.0));
        e.terms.push_back(term_scale(u, -static_cast<double>(d)));
        e.constant = rho_b;
        p.add_op_eq(e, "numarg");
    }
    ScalarExpr obj;
    obj.terms.push_back({u, Matrix(static_cast<double>(d) * Matrix::Identity(db, db))});
    obj.constant = -1.0;
    p.minimize(obj);

    auto sol = solve(p, cfg.solver);
    require_optimal(sol, "rob_teleport_choi(ppt)");

    RobustnessResult res;
    res.program = "teleport-choi-ppt";
    res.bound = BoundKind::lower;
    res.value = clamp_value(sol.primal_value, res.diagnostics.note);
    res.diagnostics.gap = sol.gap;
    res.diagnostics.max_residual = std::max(sol.diagnostics.primal_residual, sol.diagnostics.dual_residual);

    // dual witness: W_a = 1 - Z3_a - 1 (x) Z4 with Z3_a, Z4 the reduced costs
    // of the noise slacks
    Witness w;
    w.kind = Witness::Kind::teleportation;
    w.dims = jdims;
    w.outcomes_a = oa;
    w.trace_bound = static_cast<double>(oa) * d;
    const Matrix z4 = sol.dual_blocks[su];
    for (int a = 0; a < oa; ++a) {
        Matrix wa = Matrix::Identity(d * db, d * db) - sol.dual_blocks[sl[a]] -
                    kron_matrix(Matrix::Identity(d, d), z4);
        w.trace_sum += wa.trace().real();
        w.operators.push_back(std::move(wa));
    }
    w.certified_value = certify(w, j);
    res.diagnostics.dual_pairing_value = w.certified_value;
    sample_dual_pairings(w, cfg.witness_samples, cfg.seed + 17);
    res.witness = std::move(w);
    return res;
}

RobustnessResult rob_buscemi_ppt(const DistributedPovm& mab, const RobustnessSettings& cfg) {
    mab.validate(cfg.validation).require("rob_buscemi");
    const int dv = mab.dim_v, dvp = mab.dim_vp, oa = mab.outcomes_a(), ob = mab.outcomes_b();
    const std::vector<int> mdims{dv, dvp};

    ConicProgram p;
    std::vector<int> f(oa * ob), pt(oa * ob), sl(oa * ob);
    std::vector<int> cb(ob), ea(oa);
    for (int a = 0; a < oa; ++a)
        for (int b = 0; b < ob; ++b) {
            const int k = a * ob + b;
            f[k] = p.add_hermitian_var("F" + std::to_string(k), dv * dvp);
            pt[k] = p.add_hermitian_var("P" + std::to_string(k), dv * dvp);
            sl[k] = p.add_hermitian_var("S" + std::to_string(k), dv * dvp);
        }
    for (int b = 0; b < ob; ++b) cb[b] = p.add_hermitian_var("c" + std::to_string(b), dvp);
    for (int a = 0; a < oa; ++a) ea[a] = p.add_hermitian_var("e" + std::to_string(a), dv);

    for (int a = 0; a < oa; ++a)
        for (int b = 0; b < ob; ++b) {
            const int k = a * ob + b;
            OpExpr ept(dv * dvp);
            ept.terms.push_back(term_scale(pt[k], 1.0));
            ept.terms.push_back(term_partial_transpose(f[k], mdims, 1, -1.0));
            p.add_op_eq(ept, "pt", k);

            OpExpr esl(dv * dvp);
            esl.terms.push_back(term_scale(sl[k], 1.0));
            esl.terms.push_back(term_scale(f[k], -1.0));
            esl.constant = mab.elements[a][b].matrix();
            p.add_op_eq(esl, "slack", k);
        }
    for (int b = 0; b < ob; ++b) {
        OpExpr e(dv * dvp);
        for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(f[a * ob + b], 1.0));
        e.terms.push_back(term_kron_left(cb[b], dv, -1.0));
        p.add_op_eq(e, "amarg", b);
    }
    for (int a = 0; a < oa; ++a) {
        OpExpr e(dv * dvp);
        for (int b = 0; b < ob; ++b) e.terms.push_back(term_scale(f[a * ob + b], 1.0));
        e.terms.push_back(term_kron_right(ea[a], dvp, -1.0));
        p.add_op_eq(e, "bmarg", a);
    }
    ScalarExpr obj;
    for (int b = 0; b < ob; ++b) obj.terms.push_back({cb[b], Matrix(Matrix::Identity(dvp, dvp) / dvp)});
    obj.constant = -1.0;
    p.minimize(obj);

    auto sol = solve(p, cfg.solver);
    require_optimal(sol, "rob_buscemi(ppt)");

    RobustnessResult res;
    res.program = "buscemi-ppt";
    res.bound = BoundKind::lower;
    res.value = clamp_value(sol.primal_value, res.diagnostics.note);
    res.diagnostics.gap = sol.gap;
    res.diagnostics.max_residual = std::max(sol.diagnostics.primal_residual, sol.diagnostics.dual_residual);

    Witness w;
    w.kind = Witness::Kind::buscemi;
    w.dims = mdims;
    w.outcomes_a = oa;
    w.outcomes_b = ob;
    w.trace_bound = static_cast<double>(oa) * ob;
    for (int k = 0; k < oa * ob; ++k) {
        Matrix wab = Matrix::Identity(dv * dvp, dv * dvp) / (dv * dvp) - sol.dual_blocks[sl[k]];
        w.trace_sum += wab.trace().real();
        w.operators.push_back(std::move(wab));
    }
    w.certified_value = certify(w, mab);
    res.diagnostics.dual_pairing_value = w.certified_value;
    sample_dual_pairings(w, cfg.witness_samples, cfg.seed + 29);
    res.witness = std::move(w);
    return res;
}

RobustnessResult rob_incompat_generalised_ppt(const GeneralisedMeasurementSet& gset, const RobustnessSettings& cfg) {
    gset.validate(cfg.validation).require("rob_incompat_generalised");
    const int dap = gset.ancilla_dim(), da = gset.system_dim();
    const int oa = gset.outcomes(), ix = gset.inputs_count();
    const std::vector<int> pdims{dap, da};

    ConicProgram p;
    std::vector<int> th(oa), pt(oa), nn(oa);
    for (int a = 0; a < oa; ++a) {
        th[a] = p.add_hermitian_var("Th" + std::to_string(a), dap * da);
        pt[a] = p.add_hermitian_var("PT" + std::to_string(a), dap * da);
        nn[a] = p.add_hermitian_var("Np" + std::to_string(a), dap * da);
    }
    const int r = p.add_scalar_var("r");

    for (int a = 0; a < oa; ++a) {
        OpExpr ept(dap * da);
        ept.terms.push_back(term_scale(pt[a], 1.0));
        ept.terms.push_back(term_partial_transpose(th[a], pdims, 0, -1.0));
        p.add_op_eq(ept, "pt", a);
    }
    {
        OpExpr e(dap * da);
        for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(th[a], 1.0));
        e.terms.push_back(term_scalar_times(r, Matrix(-Matrix::Identity(dap * da, dap * da))));
        e.constant = -Matrix::Identity(dap * da, dap * da);
        p.add_op_eq(e, "freemarg");
    }
    {
        OpExpr e(dap * da);
        for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(nn[a], 1.0));
        e.terms.push_back(term_scalar_times(r, Matrix(-Matrix::Identity(dap * da, dap * da))));
        p.add_op_eq(e, "noisemarg");
    }
    for (int x = 0; x < ix; ++x) {
        const Matrix omega = gset.inputs.states[x].matrix();
        for (int a = 0; a < oa; ++a) {
            OpExpr e(da);
            e.terms.push_back(term_contract_ancilla(th[a], omega, true));
            e.terms.push_back({nn[a], [omega](const Matrix& eb) { return Matrix(-kron_matrix(omega, eb)); }});
            e.constant = -gset.effective[x][a].matrix();
            p.add_op_eq(e, "link", x * oa + a);
        }
    }
    ScalarExpr obj;
    obj.terms.push_back({r, Matrix::Identity(1, 1)});
    p.minimize(obj);

    auto sol = solve(p, cfg.solver);
    require_optimal(sol, "rob_incompat_generalised(ppt)");

    RobustnessResult res;
    res.program = "incompat-generalised-ppt";
    res.bound = BoundKind::lower;
    res.value = clamp_value(sol.primal_value, res.diagnostics.note);
    res.diagnostics.gap = sol.gap;
    res.diagnostics.max_residual = std::max(sol.diagnostics.primal_residual, sol.diagnostics.dual_residual);
    return res;
}

RobustnessResult rob_teleport_choi(const Povm& ma, const HermitianOperator& rho, RelaxMode mode,
                                   const RobustnessSettings& cfg) {
    if (mode == RelaxMode::ppt_lower) return rob_teleport_choi_ppt(ma, rho, cfg);
    return seesaw_teleport_choi(ma, rho, cfg);
}

RobustnessResult rob_buscemi(const DistributedPovm& mab, RelaxMode mode, const RobustnessSettings& cfg) {
    if (mode == RelaxMode::ppt_lower) return rob_buscemi_ppt(mab, cfg);
    return seesaw_buscemi(mab, cfg);
}

RobustnessResult rob_incompat_generalised(const GeneralisedMeasurementSet& gset, RelaxMode mode,
                                          const RobustnessSettings& cfg) {
    if (mode == RelaxMode::ppt_lower) return rob_incompat_generalised_ppt(gset, cfg);
    return seesaw_incompat_generalised(gset, cfg);
}

// ---------------------------------------------------------------------------
// behaviour-level robustness
// ---------------------------------------------------------------------------

RobustnessResult rob_behaviour(const Behaviour& b, const RobustnessSettings& cfg) {
    b.validate(cfg.validation).require("rob_behaviour");
    const bool classical = !b.inputs_a.has_value() && !b.inputs_b.has_value();
    if (!classical) return seesaw_behaviour(b, cfg);

    const int ia = b.inputs_a_count(), ib = b.inputs_b_count(), oa = b.outcomes_a(), ob = b.outcomes_b();
    const auto stra = enumerate_strategies(ia, oa, cfg.enumeration_cap);
    const auto strb = enumerate_strategies(ib, ob, cfg.enumeration_cap);
    const int na = static_cast<int>(stra.size()), nb = static_cast<int>(strb.size());

    ConicProgram p;
    std::vector<int> w(na * nb);
    for (int m = 0; m < na * nb; ++m) w[m] = p.add_scalar_var("w" + std::to_string(m));
    std::vector<int> slack(ia * ib * oa * ob);
    for (size_t k = 0; k < slack.size(); ++k) slack[k] = p.add_scalar_var("s" + std::to_string(k));

    int row = 0;
    for (int x = 0; x < ia; ++x)
        for (int y = 0; y < ib; ++y)
            for (int a = 0; a < oa; ++a)
                for (int bb = 0; bb < ob; ++bb, ++row) {
                    ScalarExpr e;
                    for (int la = 0; la < na; ++la) {
                        if (stra[la][x] != a) continue;
                        for (int lb = 0; lb < nb; ++lb)
                            if (strb[lb][y] == bb) e.terms.push_back({w[la * nb + lb], Matrix::Identity(1, 1)});
                    }
                    e.terms.push_back({slack[row], Matrix(-Matrix::Identity(1, 1))});
                    e.constant = -b.p(a, bb, x, y);
                    p.add_scalar_eq(e, "noise", row);
                }
    ScalarExpr obj;
    for (int m = 0; m < na * nb; ++m) obj.terms.push_back({w[m], Matrix::Identity(1, 1)});
    obj.constant = -1.0;
    p.minimize(obj);

    auto sol = solve(p, cfg.solver);
    require_optimal(sol, "rob_behaviour(classical)");

    RobustnessResult res;
    res.program = "behaviour-classical-lp";
    res.bound = BoundKind::exact;
    res.value = clamp_value(sol.primal_value, res.diagnostics.note);
    res.diagnostics.gap = sol.gap;
    res.diagnostics.max_residual = std::max(sol.diagnostics.primal_residual, sol.diagnostics.dual_residual);

    Decomposition dec;
    for (int la = 0; la < na; ++la)
        for (int lb = 0; lb < nb; ++lb) {
            dec.weights.push_back(sol.scalar_of(w[la * nb + lb]));
            std::vector<int> combo = stra[la];
            combo.insert(combo.end(), strb[lb].begin(), strb[lb].end());
            dec.strategies.push_back(std::move(combo));
        }
    double resid = 0.0;
    row = 0;
    for (int x = 0; x < ia; ++x)
        for (int y = 0; y < ib; ++y)
            for (int a = 0; a < oa; ++a)
                for (int bb = 0; bb < ob; ++bb, ++row) {
                    double lhs = -b.p(a, bb, x, y);
                    for (int la = 0; la < na; ++la)
                        if (stra[la][x] == a)
                            for (int lb = 0; lb < nb; ++lb)
                                if (strb[lb][y] == bb) lhs += dec.weights[la * nb + lb];
                    resid = std::max(resid, std::max(0.0, -lhs));
                }
    dec.residual = resid;
    res.decomposition = std::move(dec);
    res.diagnostics.max_residual = std::max(res.diagnostics.max_residual, resid);
    return res;
}

// ---------------------------------------------------------------------------
// witnesses
// ---------------------------------------------------------------------------

double certify(const Witness& w, const std::vector<HermitianOperator>& j) {
    double v = 0.0;
    for (size_t a = 0; a < w.operators.size(); ++a) v -= hs_inner(w.operators[a], j[a].matrix());
    return v;
}

double certify(const Witness& w, const DistributedPovm& mab) {
    double v = 0.0;
    for (int a = 0; a < w.outcomes_a; ++a)
        for (int b = 0; b < w.outcomes_b; ++b) v -= hs_inner(w.operators[a * w.outcomes_b + b], mab.elements[a][b].matrix());
    return v;
}

double sample_dual_pairings(Witness& w, int samples, uint64_t seed) {
    Rng rng(seed);
    double worst = 1e300;
    const int d0 = w.dims[0], d1 = w.dims[1];
    for (int s = 0; s < samples; ++s) {
        double pairing = 0.0;
        if (w.kind == Witness::Kind::teleportation) {
            auto h = random_povm(rng, d0, w.outcomes_a);
            Matrix sigma = random_state(rng, d1);
            for (int a = 0; a < w.outcomes_a; ++a)
                pairing += hs_inner(w.operators[a], kron_matrix(h[a].transpose(), sigma)) / d0;
        } else {
            auto ea = random_povm(rng, d0, w.outcomes_a);
            auto db = random_povm(rng, d1, w.outcomes_b);
            for (int a = 0; a < w.outcomes_a; ++a)
                for (int b = 0; b < w.outcomes_b; ++b)
                    pairing += hs_inner(w.operators[a * w.outcomes_b + b], kron_matrix(ea[a], db[b]));
        }
        worst = std::min(worst, pairing);
    }
    w.min_sampled_pairing = worst;
    w.samples_checked = samples;
    return worst;
}

Witness witness_teleport_classical(const Assemblage& assemblage, const std::vector<HermitianOperator>& j,
                                   const RobustnessSettings& cfg) {
    assemblage.validate(cfg.validation).require("witness_teleport_classical");
    const int db = assemblage.dim_b, ia = assemblage.inputs(), oa = assemblage.outcomes();
    const int d = j.front().dims()[0];
    if (d != ia)
        throw dimension_error("witness_teleport_classical: input register of the Choi operators must match i_A");
    const auto strategies = enumerate_strategies(ia, oa, cfg.enumeration_cap);
    const int nl = static_cast<int>(strategies.size());

    // Dual-side program solved in primal form; the witness blocks come back as
    // the multipliers of the link rows.
    ConicProgram p;
    std::vector<int> sig(nl), k(oa);
    for (int l = 0; l < nl; ++l) sig[l] = p.add_hermitian_var("sig" + std::to_string(l), db);
    for (int a = 0; a < oa; ++a) k[a] = p.add_hermitian_var("K" + std::to_string(a), d * db);
    const int kap = p.add_hermitian_var("kappa", db);
    const int s = p.add_scalar_var("s");

    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) {
            OpExpr e(db);
            for (int l = 0; l < nl; ++l)
                if (strategies[l][x] == a) e.terms.push_back(term_scale(sig[l], 1.0));
            e.terms.push_back({k[a], [x, d, db](const Matrix& eb) {
                                   Matrix proj = Matrix::Zero(d, d);
                                   proj(x, x) = -1.0;
                                   (void)db;
                                   return Matrix(kron_matrix(proj, eb));
                               }});
            e.terms.push_back(term_scalar_times(s, Matrix(-Matrix::Identity(db, db))));
            e.constant = -assemblage.members[x][a].matrix() / d;
            p.add_op_eq(e, "wlink", x * oa + a);
        }
    {
        OpExpr e(d * db);
        for (int a = 0; a < oa; ++a) e.terms.push_back(term_scale(k[a], 1.0));
        e.terms.push_back(term_kron_left(kap, d, -1.0));
        p.add_op_eq(e, "zdef");
    }
    ScalarExpr obj;
    obj.terms.push_back({kap, Matrix(static_cast<double>(d) * Matrix::Identity(db, db))});
    obj.terms.push_back({s, Matrix(static_cast<double>(oa * d) * Matrix::Identity(1, 1))});
    p.minimize(obj);

    auto sol = solve(p, cfg.solver);
    require_optimal(sol, "witness_teleport_classical");

    Witness w;
    w.kind = Witness::Kind::teleportation;
    w.dims = {d, db};
    w.outcomes_a = oa;
    w.trace_bound = static_cast<double>(oa) * d;
    auto v = extract_dual_witness(p, sol, "wlink");
    for (int a = 0; a < oa; ++a) {
        Matrix wa = Matrix::Zero(d * db, d * db);
        for (int x = 0; x < ia; ++x) {
            Matrix proj = Matrix::Zero(d, d);
            proj(x, x) = 1.0;
            wa += kron_matrix(proj, Matrix(-v[x * oa + a]));
        }
        w.trace_sum += wa.trace().real();
        w.operators.push_back(std::move(wa));
    }
    w.certified_value = certify(w, j);
    sample_dual_pairings(w, cfg.witness_samples, cfg.seed + 41);
    return w;
}

Witness witness_lift(const Witness& wa, int d, const RobustnessSettings& cfg) {
    if (wa.kind != Witness::Kind::teleportation) throw validation_error("witness_lift: teleportation witness required");
    if (wa.dims[0] != d || wa.dims[1] != d)
        throw dimension_error("witness_lift: witness must act on V' x B with both dimensions d");
    const auto us = heisenberg_weyl(d);
    Witness w;
    w.kind = Witness::Kind::buscemi;
    w.dims = {d, d};
    w.outcomes_a = wa.outcomes_a;
    w.outcomes_b = d * d;
    w.trace_bound = static_cast<double>(wa.outcomes_a) * d * d;
    for (int a = 0; a < wa.outcomes_a; ++a) {
        const Matrix wt = wa.operators[a].transpose();
        for (int b = 0; b < d * d; ++b) {
            Matrix iu = kron_matrix(Matrix::Identity(d, d), us[b]);
            Matrix wab = (iu.adjoint() * wt * iu) / static_cast<double>(d * d);
            w.trace_sum += wab.trace().real();
            w.operators.push_back(std::move(wab));
        }
    }
    if (!w.trace_bound_ok())
        throw validation_error("witness_lift: lifted witness violates the trace bound (sum " +
                               std::to_string(w.trace_sum) + " > " + std::to_string(w.trace_bound) + ")");
    sample_dual_pairings(w, cfg.witness_samples, cfg.seed + 53);
    return w;
}

} // namespace qres
