#include "qres/theorems.hpp"

#include <cmath>
#include <sstream>

#include "qres/seesaw.hpp"

namespace qres {

bool VerificationReport::all_pass() const {
    for (const auto& i : instances)
        if (!i.pass) return false;
    return true;
}

std::string VerificationReport::text() const {
    std::ostringstream os;
    os << "== " << result_id << " (tolerance " << tolerance << ") ==\n";
    for (const auto& i : instances) {
        os << (i.pass ? "[pass] " : "[FAIL] ") << i.description;
        if (!i.applicable) os << " [not applicable]";
        os << ": lhs=" << i.lhs << " (" << i.lhs_bound << ") rhs=" << i.rhs << " (" << i.rhs_bound
           << ") deviation=" << i.deviation << "\n";
        for (const auto& [k, v] : i.details) os << "         " << k << " = " << v << "\n";
    }
    return os.str();
}

namespace {

bool controlled_in_input(const Povm& ma, double tol = 1e-12) {
    const int dv = ma.elements.front().dims()[0];
    const int da = ma.elements.front().dims()[1];
    for (const auto& el : ma.elements)
        for (int i = 0; i < dv; ++i)
            for (int j = 0; j < dv; ++j) {
                if (i == j) continue;
                for (int r = 0; r < da; ++r)
                    for (int c = 0; c < da; ++c)
                        if (std::abs(el.matrix()(i * da + r, j * da + c)) > tol) return false;
            }
    return true;
}

StandardMeasurementSet slices_of_controlled(const Povm& ma) {
    const int dv = ma.elements.front().dims()[0];
    const int da = ma.elements.front().dims()[1];
    StandardMeasurementSet s;
    s.dim = da;
    s.elements.resize(dv);
    for (int x = 0; x < dv; ++x)
        for (const auto& el : ma.elements) {
            Matrix block(da, da);
            for (int r = 0; r < da; ++r)
                for (int c = 0; c < da; ++c) block(r, c) = el.matrix()(x * da + r, x * da + c);
            s.elements[x].emplace_back(std::vector<int>{da}, std::move(block));
        }
    return s;
}

} // namespace

Povm bell_povm(int d) {
    const auto us = heisenberg_weyl(d);
    Povm p;
    p.dim = d * d;
    const Matrix phi = max_entangled(d).matrix();
    for (const auto& u : us) {
        Matrix iu = kron_matrix(Matrix::Identity(d, d), u);
        p.elements.emplace_back(std::vector<int>{d, d}, Matrix(iu * phi * iu.adjoint()));
    }
    return p;
}

VerificationReport verify_result1(const StandardMeasurementSet& set, const RobustnessSettings& cfg) {
    VerificationReport rep;
    rep.result_id = "result1";
    rep.seed = cfg.seed;
    const int d = set.dim;

    auto ri = rob_incompat_standard(set, cfg);
    auto gset = embed_standard(set);
    auto tau = teleportation_assemblage(gset, max_entangled(d));
    auto rt = rob_teleport_classical_inputs(tau, cfg);

    VerificationInstance eq;
    eq.description = "R_I == max_rho R_T (attained at phi_+), independent exact SDPs";
    eq.lhs = ri.value;
    eq.rhs = rt.value;
    eq.deviation = std::abs(ri.value - rt.value);
    eq.pass = eq.deviation <= rep.tolerance;
    eq.details["incompat_gap"] = ri.diagnostics.gap;
    eq.details["teleport_gap"] = rt.diagnostics.gap;
    rep.instances.push_back(std::move(eq));

    // map the optimal incompatibility decomposition through the phi_+ guess:
    // sigma~_l = tr_A[(G~_l (x) 1) phi_+] = G~_l^T / d, and the eliminated
    // noise maps the same way.
    const auto& dec = *ri.decomposition;
    const double r = ri.value;
    const int ia = set.inputs(), oa = set.outcomes();
    double resid = 0.0;
    std::vector<Matrix> sig;
    for (const auto& g : dec.g) {
        sig.push_back(g.transpose() / d);
        resid = std::max(resid, std::max(0.0, -min_eig(sig.back())));
    }
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) {
            Matrix lhs = Matrix::Zero(d, d);
            for (size_t l = 0; l < sig.size(); ++l)
                if (dec.strategies[l][x] == a) lhs += sig[l];
            Matrix mapped_noise = dec.noise[x * oa + a].transpose() / d;
            resid = std::max(resid,
                             (lhs - tau.members[x][a].matrix() - mapped_noise).cwiseAbs().maxCoeff());
        }
    Matrix total = Matrix::Zero(d, d);
    for (const auto& s : sig) total += s;
    resid = std::max(resid, (total - (1.0 + r) * Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff());

    VerificationInstance map;
    map.description = "optimal R_I decomposition maps to an R_T-feasible point with the same r";
    map.lhs = map.rhs = r;
    map.deviation = resid;
    map.pass = resid <= 1e-7;
    map.details["map_residual"] = resid;
    rep.instances.push_back(std::move(map));
    return rep;
}

VerificationReport verify_result2(const Povm& ma, const HermitianOperator& rho, const RobustnessSettings& cfg) {
    VerificationReport rep;
    rep.result_id = "result2";
    rep.seed = cfg.seed;

    ma.validate(cfg.validation).require("verify_result2: Alice POVM");
    if (ma.elements.front().num_systems() != 2 || rho.num_systems() != 2)
        throw validation_error("verify_result2: bipartite POVM and state required");
    const int dv = ma.elements.front().dims()[0];
    const int db = rho.dims()[1];
    if (ma.elements.front().dims()[1] != rho.dims()[0])
        throw validation_error("verify_result2: POVM system dimension does not match the state");
    if (dv != db)
        throw validation_error("verify_result2: Bob's Heisenberg-Weyl Bell POVM needs dim(B) = d = dim(V), "
                               "so that o_B = d^2");
    const int d = dv;

    const auto jops = choi_teleportation(ma.elements, rho, cfg.validation.psd);
    const auto bell = bell_povm(d);
    const auto mab = distributed_povm(ma, bell, rho);
    const bool classical = controlled_in_input(ma);

    // --- obtain an R_T decomposition at the Choi level --------------------
    double r = 0.0;
    std::string r_bound = "exact";
    std::vector<Matrix> f(ma.outcomes(), Matrix::Zero(d * db, d * db));
    Assemblage tau;
    if (classical) {
        auto std_set = slices_of_controlled(ma);
        tau = assemblage_of_standard(std_set, rho);
        auto rt = rob_teleport_classical_inputs(tau, cfg);
        r = rt.value;
        const auto& dec = *rt.decomposition;
        const int ia = std_set.inputs(), oa = std_set.outcomes();
        for (int a = 0; a < oa; ++a) {
            Matrix fa = Matrix::Zero(d * db, d * db);
            for (int x = 0; x < ia; ++x) {
                Matrix proj = Matrix::Zero(d, d);
                proj(x, x) = 1.0;
                Matrix blk = Matrix::Zero(db, db);
                for (size_t l = 0; l < dec.g.size(); ++l)
                    if (dec.strategies[l][x] == a) blk += dec.g[l];
                fa += kron_matrix(proj, blk) / d;
            }
            f[a] = fa;
        }
    } else {
        auto up = seesaw_teleport_choi(ma, rho, cfg);
        r = up.value;
        r_bound = "upper";
        const auto& dec = *up.decomposition;
        for (size_t a = 0; a < f.size(); ++a)
            for (size_t l = 0; l < dec.g.size(); ++l) f[a] += kron_matrix(dec.h[a][l], dec.g[l]);
    }

    // --- forward map: the contraction identity turns the teleportation
    // decomposition into a Buscemi-feasible one with the same r -------------
    double map_resid = 0.0;
    Matrix noise_total = Matrix::Zero(d * d, d * d);
    for (int a = 0; a < ma.outcomes(); ++a) {
        HermitianOperator ja = jops[a];
        HermitianOperator ka({d, db}, Matrix(f[a] - ja.matrix()));
        map_resid = std::max(map_resid, std::max(0.0, -min_eig(ka.matrix())));
        for (int b = 0; b < d * d; ++b) {
            Matrix mapped_m =
                static_cast<double>(d) * partial_transpose(linear_map_apply(ja, bell.elements[b]).matrix(), {d, d}, 0);
            map_resid = std::max(map_resid, (mapped_m - mab.elements[a][b].matrix()).cwiseAbs().maxCoeff());
            Matrix mapped_n =
                static_cast<double>(d) * partial_transpose(linear_map_apply(ka, bell.elements[b]).matrix(), {d, d}, 0);
            map_resid = std::max(map_resid, std::max(0.0, -min_eig(mapped_n)));
            noise_total += mapped_n;
        }
    }
    map_resid = std::max(
        map_resid, (noise_total - r * Matrix::Identity(d * d, d * d)).cwiseAbs().maxCoeff() / std::max(1.0, r));

    VerificationInstance fwd;
    fwd.description = "R_T decomposition maps to an R_BN-feasible decomposition with the same r";
    fwd.lhs = fwd.rhs = r;
    fwd.lhs_bound = fwd.rhs_bound = r_bound;
    fwd.deviation = map_resid;
    fwd.pass = map_resid <= 1e-7;
    fwd.details["map_residual"] = map_resid;
    rep.instances.push_back(std::move(fwd));

    // --- witness lift: certified R_BN value equals R_T ---------------------
    VerificationInstance lift;
    lift.description = "lifted Heisenberg-Weyl witness certifies R_BN = R_T";
    if (classical) {
        auto w = witness_teleport_classical(tau, jops, cfg);
        auto lifted = witness_lift(w, d, cfg);
        const double certified = certify(lifted, mab);
        lift.lhs = certified;
        lift.lhs_bound = "certified-lower";
        lift.rhs = r;
        lift.rhs_bound = "exact";
        lift.deviation = std::abs(certified - r);
        lift.pass = lift.deviation <= rep.tolerance && lifted.trace_bound_ok() &&
                    lifted.min_sampled_pairing >= -1e-9 && w.trace_bound_ok() && w.min_sampled_pairing >= -1e-9;
        lift.details["witness_value"] = w.certified_value;
        lift.details["witness_trace_sum"] = w.trace_sum;
        lift.details["lifted_trace_sum"] = lifted.trace_sum;
        lift.details["lifted_trace_bound"] = lifted.trace_bound;
        lift.details["min_sampled_pairing"] = std::min(w.min_sampled_pairing, lifted.min_sampled_pairing);
    } else {
        auto ppt = rob_teleport_choi(ma, rho, RelaxMode::ppt_lower, cfg);
        auto lifted = witness_lift(*ppt.witness, d, cfg);
        const double certified = certify(lifted, mab);
        lift.lhs = certified;
        lift.lhs_bound = "certified-lower";
        lift.rhs = r;
        lift.rhs_bound = r_bound;
        lift.deviation = std::max(0.0, certified - r); // lower bound must not exceed the upper bound
        lift.pass = lift.deviation <= rep.tolerance && lifted.trace_bound_ok() &&
                    lifted.min_sampled_pairing >= -1e-9;
        lift.details["ppt_lower"] = ppt.value;
        lift.details["lifted_trace_sum"] = lifted.trace_sum;
        lift.details["min_sampled_pairing"] = lifted.min_sampled_pairing;
    }
    rep.instances.push_back(std::move(lift));
    return rep;
}

VerificationReport verify_result3(const StandardMeasurementSet& set, const RobustnessSettings& cfg) {
    // composition of Result 1 and Result 2, as in the proof
    auto r1 = verify_result1(set, cfg);
    auto gset = embed_standard(set);
    auto r2 = verify_result2(gset.parent, max_entangled(set.dim), cfg);
    VerificationReport rep;
    rep.result_id = "result3";
    rep.seed = cfg.seed;
    rep.instances = r1.instances;
    rep.instances.insert(rep.instances.end(), r2.instances.begin(), r2.instances.end());

    VerificationInstance chain;
    chain.description = "chain: max_rho max_Mb R_BN = R_I";
    chain.lhs = r1.instances.front().lhs;           // R_I
    chain.rhs = r2.instances.back().lhs;            // certified R_BN
    chain.lhs_bound = "exact";
    chain.rhs_bound = "certified-lower";
    chain.deviation = std::abs(chain.lhs - chain.rhs);
    chain.pass = chain.deviation <= rep.tolerance;
    rep.instances.push_back(std::move(chain));
    return rep;
}

VerificationReport verify_result4(const StandardMeasurementSet& set, const RobustnessSettings& cfg) {
    VerificationReport rep;
    rep.result_id = "result4";
    rep.seed = cfg.seed;
    const int d = set.dim;

    auto ri = rob_incompat_standard(set, cfg);
    if (ri.value <= 1e-6) {
        VerificationInstance na;
        na.description = "set is compatible (R_I <= 1e-6); Buscemi activation not applicable";
        na.lhs = ri.value;
        na.rhs = 0.0;
        na.applicable = false;
        na.pass = true;
        rep.instances.push_back(std::move(na));
        return rep;
    }

    auto gset = embed_standard(set);
    const HermitianOperator phi = max_entangled(d);
    auto tau = teleportation_assemblage(gset, phi);
    auto jops = choi_teleportation(gset.parent.elements, phi, cfg.validation.psd);
    auto w = witness_teleport_classical(tau, jops, cfg);
    auto lifted = witness_lift(w, d, cfg);
    auto mab = distributed_povm(gset.parent, bell_povm(d), phi);
    const double certified = certify(lifted, mab);

    VerificationInstance inst;
    inst.description = "incompatible set generates certified Buscemi nonlocality equal to R_I";
    inst.lhs = certified;
    inst.lhs_bound = "certified-lower";
    inst.rhs = ri.value;
    inst.rhs_bound = "exact";
    inst.deviation = std::abs(certified - ri.value);
    inst.pass = certified > 1e-6 && inst.deviation <= rep.tolerance && lifted.trace_bound_ok() &&
                lifted.min_sampled_pairing >= -1e-9;
    inst.details["R_I"] = ri.value;
    inst.details["certified_value"] = certified;
    inst.details["lifted_trace_sum"] = lifted.trace_sum;
    inst.details["min_sampled_pairing"] = lifted.min_sampled_pairing;
    rep.instances.push_back(std::move(inst));
    return rep;
}

double compatibility_threshold(const std::function<StandardMeasurementSet(double)>& family, double lo, double hi,
                               const RobustnessSettings& cfg) {
    auto value_at = [&](double t) { return rob_incompat_standard(family(t), cfg).value; };
    if (value_at(lo) > 1e-8) throw domain_error("compatibility_threshold: family is incompatible at the lower bracket");
    if (value_at(hi) <= 1e-6) throw domain_error("compatibility_threshold: family is compatible at the upper bracket");
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (value_at(mid) > 1e-7)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

StandardMeasurementSet xz_pair() {
    StandardMeasurementSet s;
    s.dim = 2;
    Matrix z0 = Matrix::Zero(2, 2), z1 = Matrix::Zero(2, 2), xp(2, 2), xm(2, 2);
    z0(0, 0) = 1;
    z1(1, 1) = 1;
    xp << 0.5, 0.5, 0.5, 0.5;
    xm << 0.5, -0.5, -0.5, 0.5;
    s.elements = {{HermitianOperator({2}, z0), HermitianOperator({2}, z1)},
                  {HermitianOperator({2}, xp), HermitianOperator({2}, xm)}};
    return s;
}

StandardMeasurementSet trine_set() {
    StandardMeasurementSet s;
    s.dim = 2;
    for (int k = 0; k < 3; ++k) {
        const double th = 2.0 * M_PI * k / 3.0;
        Matrix n(2, 2);
        // n . sigma with Bloch vector (sin th, 0, cos th)
        n << std::cos(th), std::sin(th), std::sin(th), -std::cos(th);
        std::vector<HermitianOperator> row;
        row.emplace_back(std::vector<int>{2}, Matrix(0.5 * (Matrix::Identity(2, 2) + n)));
        row.emplace_back(std::vector<int>{2}, Matrix(0.5 * (Matrix::Identity(2, 2) - n)));
        s.elements.push_back(std::move(row));
    }
    return s;
}

StandardMeasurementSet noisy_set(const StandardMeasurementSet& set, double visibility) {
    StandardMeasurementSet s;
    s.dim = set.dim;
    s.elements.resize(set.inputs());
    for (int x = 0; x < set.inputs(); ++x)
        for (int a = 0; a < set.outcomes(); ++a) {
            Matrix m = visibility * set.elements[x][a].matrix() +
                       (1.0 - visibility) * Matrix::Identity(set.dim, set.dim) / set.outcomes();
            s.elements[x].emplace_back(std::vector<int>{set.dim}, std::move(m));
        }
    return s;
}

StandardMeasurementSet random_qubit_set(Rng& rng, int inputs, int outcomes) {
    StandardMeasurementSet s;
    s.dim = 2;
    for (int x = 0; x < inputs; ++x) {
        std::vector<HermitianOperator> row;
        for (auto& e : random_povm(rng, 2, outcomes)) row.emplace_back(std::vector<int>{2}, e);
        s.elements.push_back(std::move(row));
    }
    return s;
}

} // namespace qres
