#include "qres/models.hpp"

#include <Eigen/QR>

#include <sstream>

namespace qres {

std::string Validation::summary() const {
    std::ostringstream os;
    for (const auto& f : findings) os << f.what << " (" << f.magnitude << "); ";
    return os.str();
}

void Validation::require(const std::string& context) const {
    if (!ok()) throw validation_error(context + ": " + summary());
}

namespace {

void check_psd(Validation& v, const HermitianOperator& op, double tol, const std::string& what) {
    const double me = op.min_eigenvalue();
    if (me < -tol) v.findings.push_back({what + " not PSD", -me});
}

void check_identity_sum(Validation& v, const Matrix& sum, double tol, const std::string& what) {
    const double dev = (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
    if (dev > tol) v.findings.push_back({what + " does not sum to identity", dev});
}

} // namespace

Validation Povm::validate(const ValidationTolerances& tol) const {
    Validation v;
    if (elements.empty()) {
        v.findings.push_back({"POVM has no elements", 0});
        return v;
    }
    Matrix sum = Matrix::Zero(dim, dim);
    for (size_t a = 0; a < elements.size(); ++a) {
        if (elements[a].side() != dim) {
            v.findings.push_back({"element " + std::to_string(a) + " has wrong dimension", 0});
            return v;
        }
        check_psd(v, elements[a], tol.psd, "element " + std::to_string(a));
        sum += elements[a].matrix();
    }
    check_identity_sum(v, sum, tol.completeness, "POVM");
    return v;
}

Validation StandardMeasurementSet::validate(const ValidationTolerances& tol) const {
    Validation v;
    if (elements.empty()) {
        v.findings.push_back({"measurement set has no inputs", 0});
        return v;
    }
    const size_t oa = elements.front().size();
    for (size_t x = 0; x < elements.size(); ++x) {
        if (elements[x].size() != oa) {
            v.findings.push_back({"input " + std::to_string(x) + " has a different outcome count", 0});
            continue;
        }
        Povm row{dim, elements[x]};
        for (auto& f : row.validate(tol).findings)
            v.findings.push_back({"input " + std::to_string(x) + ": " + f.what, f.magnitude});
    }
    return v;
}

Validation QuantumInputSet::validate(const ValidationTolerances& tol) const {
    Validation v;
    for (size_t x = 0; x < states.size(); ++x) {
        if (states[x].side() != dim) {
            v.findings.push_back({"state " + std::to_string(x) + " has wrong dimension", 0});
            continue;
        }
        check_psd(v, states[x], tol.psd, "state " + std::to_string(x));
        const double tdev = std::abs(states[x].trace() - 1.0);
        if (tdev > tol.completeness) v.findings.push_back({"state " + std::to_string(x) + " not normalised", tdev});
    }
    return v;
}

QuantumInputSet QuantumInputSet::make(int dim, std::vector<HermitianOperator> states, const ValidationTolerances& tol) {
    QuantumInputSet s;
    s.dim = dim;
    s.states = std::move(states);
    s.validate(tol).require("QuantumInputSet");
    // numerical rank of the states inside Hermitian space
    const auto basis = hermitian_basis(dim);
    RMatrix coords(basis.size(), s.states.size());
    for (size_t x = 0; x < s.states.size(); ++x)
        for (size_t k = 0; k < basis.size(); ++k) coords(k, x) = hs_inner(basis[k], s.states[x].matrix());
    Eigen::ColPivHouseholderQR<RMatrix> qr(coords);
    qr.setThreshold(tol.rank);
    s.tomographically_complete = static_cast<int>(qr.rank()) == dim * dim;
    return s;
}

Validation GeneralisedMeasurementSet::validate(const ValidationTolerances& tol) const {
    Validation v;
    for (auto& f : parent.validate(tol).findings) v.findings.push_back({"parent: " + f.what, f.magnitude});
    for (auto& f : inputs.validate(tol).findings) v.findings.push_back({"inputs: " + f.what, f.magnitude});
    const int da = system_dim();
    for (size_t x = 0; x < effective.size(); ++x) {
        Matrix sum = Matrix::Zero(da, da);
        for (size_t a = 0; a < effective[x].size(); ++a) {
            check_psd(v, effective[x][a], tol.psd, "M(a=" + std::to_string(a) + "|x=" + std::to_string(x) + ")");
            sum += effective[x][a].matrix();
        }
        check_identity_sum(v, sum, tol.completeness, "effective set at x=" + std::to_string(x));
    }
    return v;
}

GeneralisedMeasurementSet GeneralisedMeasurementSet::make(Povm parent, QuantumInputSet inputs,
                                                          const ValidationTolerances& tol) {
    GeneralisedMeasurementSet g;
    if (parent.elements.empty() || parent.elements.front().num_systems() != 2)
        throw dimension_error("GeneralisedMeasurementSet: parent must be bipartite (ancilla x system)");
    if (parent.elements.front().dims()[0] != inputs.dim)
        throw dimension_error("GeneralisedMeasurementSet: ancilla dimension does not match input states");
    g.parent = std::move(parent);
    g.inputs = std::move(inputs);
    const int da = g.parent.elements.front().dims()[1];
    g.effective.resize(g.inputs.count());
    for (int x = 0; x < g.inputs.count(); ++x) {
        g.effective[x].reserve(g.parent.outcomes());
        for (int a = 0; a < g.parent.outcomes(); ++a) {
            Matrix big = g.parent.elements[a].matrix() *
                         kron_matrix(g.inputs.states[x].matrix(), Matrix::Identity(da, da));
            g.effective[x].emplace_back(std::vector<int>{da},
                                        partial_trace(big, g.parent.elements[a].dims(), {0}));
        }
    }
    g.validate(tol).require("GeneralisedMeasurementSet");
    return g;
}

bool GeneralisedMeasurementSet::classical_inputs(double tol) const {
    if (inputs.count() != inputs.dim) return false;
    for (int x = 0; x < inputs.count(); ++x) {
        Matrix expect = Matrix::Zero(inputs.dim, inputs.dim);
        expect(x, x) = 1.0;
        if ((inputs.states[x].matrix() - expect).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

HermitianOperator Assemblage::bob_marginal() const {
    Matrix avg = Matrix::Zero(dim_b, dim_b);
    for (const auto& row : members) {
        for (const auto& t : row) avg += t.matrix();
    }
    return HermitianOperator({dim_b}, avg / static_cast<double>(members.size()));
}

Validation Assemblage::validate(const ValidationTolerances& tol) const {
    Validation v;
    if (members.empty()) {
        v.findings.push_back({"assemblage has no inputs", 0});
        return v;
    }
    Matrix first_sum;
    for (size_t x = 0; x < members.size(); ++x) {
        Matrix sum = Matrix::Zero(dim_b, dim_b);
        for (size_t a = 0; a < members[x].size(); ++a) {
            check_psd(v, members[x][a], tol.psd, "tau(a=" + std::to_string(a) + "|x=" + std::to_string(x) + ")");
            sum += members[x][a].matrix();
        }
        if (x == 0) {
            first_sum = sum;
            const double tdev = std::abs(sum.trace().real() - 1.0);
            if (tdev > tol.completeness) v.findings.push_back({"assemblage not normalised", tdev});
        } else {
            const double dev = (sum - first_sum).cwiseAbs().maxCoeff();
            if (dev > tol.no_signalling)
                v.findings.push_back({"no-signalling violated between x=0 and x=" + std::to_string(x), dev});
        }
    }
    return v;
}

Validation Behaviour::validate(const ValidationTolerances& tol) const {
    Validation v;
    const int ia = inputs_a_count(), ib = inputs_b_count(), oa = outcomes_a(), ob = outcomes_b();
    if (ia == 0 || ib == 0 || oa == 0 || ob == 0) {
        v.findings.push_back({"behaviour table is empty", 0});
        return v;
    }
    for (int x = 0; x < ia; ++x)
        for (int y = 0; y < ib; ++y) {
            double norm = 0.0;
            for (int a = 0; a < oa; ++a)
                for (int b = 0; b < ob; ++b) {
                    const double val = table[x][y][a][b];
                    if (val < -tol.nonneg)
                        v.findings.push_back({"negative probability at (a,b,x,y)=(" + std::to_string(a) + "," +
                                                  std::to_string(b) + "," + std::to_string(x) + "," + std::to_string(y) + ")",
                                              -val});
                    norm += val;
                }
            if (std::abs(norm - 1.0) > tol.completeness)
                v.findings.push_back({"normalisation violated at (x,y)=(" + std::to_string(x) + "," + std::to_string(y) + ")",
                                      std::abs(norm - 1.0)});
        }
    // no-signalling both directions
    for (int x = 0; x < ia; ++x)
        for (int a = 0; a < oa; ++a) {
            double ref = 0.0;
            for (int b = 0; b < ob; ++b) ref += table[x][0][a][b];
            for (int y = 1; y < ib; ++y) {
                double marg = 0.0;
                for (int b = 0; b < ob; ++b) marg += table[x][y][a][b];
                if (std::abs(marg - ref) > tol.no_signalling)
                    v.findings.push_back({"A-marginal signalling at (a,x,y)", std::abs(marg - ref)});
            }
        }
    for (int y = 0; y < ib; ++y)
        for (int b = 0; b < ob; ++b) {
            double ref = 0.0;
            for (int a = 0; a < oa; ++a) ref += table[0][y][a][b];
            for (int x = 1; x < ia; ++x) {
                double marg = 0.0;
                for (int a = 0; a < oa; ++a) marg += table[x][y][a][b];
                if (std::abs(marg - ref) > tol.no_signalling)
                    v.findings.push_back({"B-marginal signalling at (b,x,y)", std::abs(marg - ref)});
            }
        }
    return v;
}

Validation DistributedPovm::validate(const ValidationTolerances& tol) const {
    Validation v;
    Matrix sum = Matrix::Zero(dim_v * dim_vp, dim_v * dim_vp);
    for (size_t a = 0; a < elements.size(); ++a)
        for (size_t b = 0; b < elements[a].size(); ++b) {
            check_psd(v, elements[a][b], tol.psd, "M(" + std::to_string(a) + "," + std::to_string(b) + ")");
            sum += elements[a][b].matrix();
        }
    check_identity_sum(v, sum, tol.completeness, "distributed POVM");
    return v;
}

GeneralisedMeasurementSet embed_standard(const StandardMeasurementSet& set) {
    set.validate().require("embed_standard");
    const int ia = set.inputs(), d = set.dim;
    Povm parent;
    parent.dim = ia * d;
    for (int a = 0; a < set.outcomes(); ++a) {
        Matrix na = Matrix::Zero(ia * d, ia * d);
        for (int x = 0; x < ia; ++x) {
            Matrix proj = Matrix::Zero(ia, ia);
            proj(x, x) = 1.0;
            na += kron_matrix(proj, set.elements[x][a].matrix());
        }
        parent.elements.emplace_back(std::vector<int>{ia, d}, std::move(na));
    }
    std::vector<HermitianOperator> inputs;
    for (int x = 0; x < ia; ++x) {
        Matrix proj = Matrix::Zero(ia, ia);
        proj(x, x) = 1.0;
        inputs.emplace_back(std::vector<int>{ia}, std::move(proj));
    }
    return GeneralisedMeasurementSet::make(std::move(parent), QuantumInputSet::make(ia, std::move(inputs)));
}

Assemblage teleportation_assemblage(const GeneralisedMeasurementSet& gset, const HermitianOperator& rho) {
    if (rho.num_systems() != 2 || rho.dims()[0] != gset.system_dim())
        throw dimension_error("teleportation_assemblage: state A-dimension does not match the measurement set");
    const int da = rho.dims()[0], db = rho.dims()[1];
    Assemblage asm_;
    asm_.dim_b = db;
    asm_.members.resize(gset.inputs_count());
    for (int x = 0; x < gset.inputs_count(); ++x)
        for (int a = 0; a < gset.outcomes(); ++a) {
            Matrix big = kron_matrix(gset.effective[x][a].matrix(), Matrix::Identity(db, db)) * rho.matrix();
            asm_.members[x].emplace_back(std::vector<int>{db}, partial_trace(big, {da, db}, {0}));
        }
    return asm_;
}

Assemblage assemblage_of_standard(const StandardMeasurementSet& set, const HermitianOperator& rho) {
    if (rho.num_systems() != 2 || rho.dims()[0] != set.dim)
        throw dimension_error("assemblage_of_standard: state A-dimension does not match the measurement set");
    const int da = rho.dims()[0], db = rho.dims()[1];
    Assemblage asm_;
    asm_.dim_b = db;
    asm_.members.resize(set.inputs());
    for (int x = 0; x < set.inputs(); ++x)
        for (int a = 0; a < set.outcomes(); ++a) {
            Matrix big = kron_matrix(set.elements[x][a].matrix(), Matrix::Identity(db, db)) * rho.matrix();
            asm_.members[x].emplace_back(std::vector<int>{db}, partial_trace(big, {da, db}, {0}));
        }
    return asm_;
}

Behaviour buscemi_behaviour(const GeneralisedMeasurementSet& gset_a, const GeneralisedMeasurementSet& gset_b,
                            const HermitianOperator& rho) {
    const int da = gset_a.system_dim(), db = gset_b.system_dim();
    if (rho.num_systems() != 2 || rho.dims()[0] != da || rho.dims()[1] != db)
        throw dimension_error("buscemi_behaviour: state dims do not match the measurement sets");
    const int dap = gset_a.ancilla_dim(), dbp = gset_b.ancilla_dim();

    Behaviour beh;
    beh.inputs_a = gset_a.inputs;
    beh.inputs_b = gset_b.inputs;
    beh.table.assign(gset_a.inputs_count(),
                     std::vector<std::vector<std::vector<double>>>(
                         gset_b.inputs_count(), std::vector<std::vector<double>>(
                                                    gset_a.outcomes(), std::vector<double>(gset_b.outcomes(), 0.0))));

    for (int x = 0; x < gset_a.inputs_count(); ++x)
        for (int y = 0; y < gset_b.inputs_count(); ++y) {
            Matrix state = kron_matrix(gset_a.inputs.states[x].matrix(),
                                       kron_matrix(rho.matrix(), gset_b.inputs.states[y].matrix()));
            for (int a = 0; a < gset_a.outcomes(); ++a)
                for (int b = 0; b < gset_b.outcomes(); ++b) {
                    // Bob's parent is stored ancilla-first; the scenario wants it on (B, B').
                    Matrix nb = permute_systems(gset_b.parent.elements[b].matrix(), {dbp, db}, {1, 0});
                    Matrix op = kron_matrix(gset_a.parent.elements[a].matrix(), nb);
                    const double val = (op * state).trace().real();
                    // consistency with the reduced effective-element computation
                    const double reduced = (kron_matrix(gset_a.effective[x][a].matrix(), gset_b.effective[y][b].matrix()) *
                                            rho.matrix())
                                               .trace()
                                               .real();
                    if (std::abs(val - reduced) > 1e-12 * std::max(1.0, std::abs(val)))
                        throw validation_error("buscemi_behaviour: parent-level and effective-level probabilities disagree");
                    beh.table[x][y][a][b] = val;
                }
        }
    return beh;
}

DistributedPovm distributed_povm(const Povm& ma, const Povm& mb, const HermitianOperator& rho) {
    ma.validate().require("distributed_povm: Alice POVM");
    mb.validate().require("distributed_povm: Bob POVM");
    if (ma.elements.front().num_systems() != 2 || mb.elements.front().num_systems() != 2 || rho.num_systems() != 2)
        throw dimension_error("distributed_povm: bipartite operands required");
    const int dv = ma.elements.front().dims()[0], da = ma.elements.front().dims()[1];
    const int db = mb.elements.front().dims()[0], dvp = mb.elements.front().dims()[1];
    if (rho.dims()[0] != da || rho.dims()[1] != db) throw dimension_error("distributed_povm: state dims mismatch");

    DistributedPovm out;
    out.dim_v = dv;
    out.dim_vp = dvp;
    out.elements.resize(ma.outcomes());
    const Matrix mid = kron_matrix(Matrix::Identity(dv, dv), kron_matrix(rho.matrix(), Matrix::Identity(dvp, dvp)));
    for (int a = 0; a < ma.outcomes(); ++a)
        for (int b = 0; b < mb.outcomes(); ++b) {
            Matrix op = kron_matrix(ma.elements[a].matrix(), mb.elements[b].matrix());
            Matrix res = partial_trace(op * mid, {dv, da, db, dvp}, {1, 2});
            out.elements[a].emplace_back(std::vector<int>{dv, dvp}, std::move(res));
        }
    return out;
}

QuantumInputSet default_tomographic_inputs(int d) {
    if (d < 2) throw domain_error("default_tomographic_inputs: d must be >= 2");
    std::vector<HermitianOperator> states;
    auto pure = [&](const Vector& v) {
        Vector n = v.normalized();
        return HermitianOperator({d}, Matrix(n * n.adjoint()));
    };
    if (d == 2) {
        const double s = 1.0 / std::sqrt(2.0);
        Vector zp(2), zm(2), xp(2), xm(2), yp(2), ym(2);
        zp << 1, 0;
        zm << 0, 1;
        xp << s, s;
        xm << s, -s;
        yp << s, cxd(0, s);
        ym << s, cxd(0, -s);
        for (const auto& v : {zp, zm, xp, xm, yp, ym}) states.push_back(pure(v));
    } else {
        for (int i = 0; i < d; ++i) {
            Vector v = Vector::Zero(d);
            v(i) = 1.0;
            states.push_back(pure(v));
        }
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                Vector vr = Vector::Zero(d), vi = Vector::Zero(d);
                vr(i) = 1.0;
                vr(j) = 1.0;
                vi(i) = 1.0;
                vi(j) = cxd(0, 1);
                states.push_back(pure(vr));
                states.push_back(pure(vi));
            }
    }
    return QuantumInputSet::make(d, std::move(states));
}

} // namespace qres
