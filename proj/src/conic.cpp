#include "qres/conic.hpp"

#include <iostream>
#include <nlohmann/json.hpp>

namespace qres {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        default: return "inaccurate";
    }
}

int ConicProgram::add_hermitian_var(const std::string& name, int n) {
    vars_.push_back({name, n, VarKind::hermitian_psd});
    return static_cast<int>(vars_.size()) - 1;
}

int ConicProgram::add_scalar_var(const std::string& name) {
    vars_.push_back({name, 1, VarKind::scalar_nonneg});
    return static_cast<int>(vars_.size()) - 1;
}

ExprTerm term_scale(int var, double c) {
    return {var, [c](const Matrix& e) { return Matrix(c * e); }};
}

ExprTerm term_conj(int var, const Matrix& l) {
    return {var, [l](const Matrix& e) { return Matrix(l.adjoint() * e * l); }};
}

ExprTerm term_partial_transpose(int var, const std::vector<int>& dims, int on, double c) {
    return {var, [dims, on, c](const Matrix& e) { return Matrix(c * partial_transpose(e, dims, on)); }};
}

ExprTerm term_kron_left(int var, int id_dim, double c) {
    return {var, [id_dim, c](const Matrix& e) {
                const int m = static_cast<int>(e.rows()) / id_dim;
                return Matrix(c * partial_trace(e, {id_dim, m}, {0}));
            }};
}

ExprTerm term_kron_right(int var, int id_dim, double c) {
    return {var, [id_dim, c](const Matrix& e) {
                const int m = static_cast<int>(e.rows()) / id_dim;
                return Matrix(c * partial_trace(e, {m, id_dim}, {1}));
            }};
}

ExprTerm term_trace_times(int var, const Matrix& k, int var_dim) {
    return {var, [k, var_dim](const Matrix& e) {
                const double v = (k * e).trace().real();
                return Matrix(v * Matrix::Identity(var_dim, var_dim));
            }};
}

ExprTerm term_scalar_times(int var, const Matrix& k) {
    return {var, [k](const Matrix& e) {
                const double v = (k * e).trace().real();
                Matrix c(1, 1);
                c(0, 0) = v;
                return c;
            }};
}

void ConicProgram::add_op_eq(const OpExpr& expr, const std::string& group, int item) {
    const auto basis = hermitian_basis(expr.dim);
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
        Row row;
        row.ref = {group, item, k};
        row.rhs = -hs_inner(basis[k], expr.constant);
        for (const auto& t : expr.terms) {
            Matrix coeff = t.adjoint(basis[k]);
            bool merged = false;
            for (auto& [v, c] : row.entries)
                if (v == t.var) {
                    c += coeff;
                    merged = true;
                    break;
                }
            if (!merged) row.entries.emplace_back(t.var, std::move(coeff));
        }
        rows_.push_back(std::move(row));
    }
}

void ConicProgram::add_scalar_eq(const ScalarExpr& expr, const std::string& group, int item) {
    Row row;
    row.ref = {group, item, 0};
    row.rhs = -expr.constant;
    for (const auto& t : expr.terms) {
        bool merged = false;
        for (auto& [v, c] : row.entries)
            if (v == t.var) {
                c += t.coeff;
                merged = true;
                break;
            }
        if (!merged) row.entries.emplace_back(t.var, t.coeff);
    }
    rows_.push_back(std::move(row));
}

void ConicProgram::minimize(const ScalarExpr& objective) {
    objective_ = objective;
    minimize_ = true;
}

void ConicProgram::maximize(const ScalarExpr& objective) {
    objective_ = objective;
    minimize_ = false;
}

void ConicProgram::dump_json(std::ostream& os) const {
    nlohmann::json j;
    j["schema"] = "qres-conic/1";
    j["sense"] = minimize_ ? "min" : "max";
    for (const auto& v : vars_) j["variables"].push_back({{"name", v.name}, {"n", v.n}, {"kind", v.kind == VarKind::hermitian_psd ? "psd" : "scalar"}});
    auto triplets = [](const Matrix& m) {
        nlohmann::json t = nlohmann::json::array();
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c)
                if (std::abs(m(r, c)) > 0) t.push_back({r, c, m(r, c).real(), m(r, c).imag()});
        return t;
    };
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows_) {
        nlohmann::json row;
        row["group"] = r.ref.group;
        row["item"] = r.ref.item;
        row["basis"] = r.ref.basis;
        row["rhs"] = r.rhs;
        for (const auto& [v, c] : r.entries) row["entries"].push_back({{"var", v}, {"coeff", triplets(c)}});
        j["rows"].push_back(std::move(row));
    }
    nlohmann::json obj;
    obj["constant"] = objective_.constant;
    for (const auto& t : objective_.terms) obj["terms"].push_back({{"var", t.var}, {"coeff", triplets(t.coeff)}});
    j["objective"] = std::move(obj);
    os << j.dump(2) << "\n";
}

RMatrix realify(const Matrix& h) {
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + h.cwiseAbs().maxCoeff()))
        throw validation_error("realify: expression is not Hermitian");
    const Eigen::Index n = h.rows();
    RMatrix out(2 * n, 2 * n);
    const RMatrix a = h.real();
    const RMatrix b = h.imag();
    out.topLeftCorner(n, n) = a;
    out.topRightCorner(n, n) = -b;
    out.bottomLeftCorner(n, n) = b;
    out.bottomRightCorner(n, n) = a;
    return out;
}

Matrix unrealify(const RMatrix& r) {
    const Eigen::Index n = r.rows() / 2;
    RMatrix a = 0.5 * (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n));
    RMatrix b = 0.5 * (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n));
    Matrix out = a.cast<cxd>() + cxd(0, 1) * b.cast<cxd>();
    return 0.5 * (out + out.adjoint());
}

std::vector<SolveAuditRecord>& solve_audit() {
    static std::vector<SolveAuditRecord> audit;
    return audit;
}

namespace {
std::string& audit_tag() {
    static std::string tag = "";
    return tag;
}
} // namespace

void set_solve_audit_tag(const std::string& tag) { audit_tag() = tag; }

ConicSolution solve(const ConicProgram& p, const SolverBackend& backend, const SolverSettings& settings) {
    ConicSolution sol = backend.solve(p, settings);

    // Recompute residuals here rather than trusting the backend.
    double prim = 0.0, mineig = 0.0;
    for (const auto& row : p.rows()) {
        double lhs = 0.0;
        for (const auto& [v, c] : row.entries) lhs += hs_inner(c, sol.assignments[v]);
        prim = std::max(prim, std::abs(lhs - row.rhs));
    }
    for (size_t v = 0; v < p.vars().size(); ++v) mineig = std::min(mineig, min_eig(sol.assignments[v]));
    double dual = 0.0;
    if (!sol.y.empty()) {
        const double sgn = p.minimizing() ? 1.0 : -1.0;
        std::vector<Matrix> lhs(p.vars().size());
        for (size_t v = 0; v < p.vars().size(); ++v) lhs[v] = Matrix::Zero(p.var_dim(v), p.var_dim(v));
        for (const auto& t : p.objective().terms) lhs[t.var] += sgn * t.coeff;
        for (int i = 0; i < p.num_rows(); ++i)
            for (const auto& [v, c] : p.rows()[i].entries) lhs[v] -= sol.y[i] * c;
        for (size_t v = 0; v < p.vars().size(); ++v) dual = std::max(dual, (lhs[v] - sol.dual_blocks[v]).cwiseAbs().maxCoeff());
    }
    sol.diagnostics.primal_residual = prim;
    sol.diagnostics.dual_residual = dual;
    sol.diagnostics.min_block_eig = mineig;
    sol.diagnostics.gap = std::abs(sol.primal_value - sol.dual_value);
    sol.gap = sol.diagnostics.gap;

    solve_audit().push_back({audit_tag(), sol.status, prim, dual, sol.gap, mineig});
    return sol;
}

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings) {
    IpmBackend backend;
    return solve(p, backend, settings);
}

std::vector<Matrix> extract_dual_witness(const ConicProgram& p, const ConicSolution& sol, const std::string& group) {
    if (sol.status != SolveStatus::optimal) throw solver_error("extract_dual_witness: solution is not optimal");
    std::map<int, Matrix> items;
    std::map<int, int> dims;
    bool found = false;
    for (int i = 0; i < p.num_rows(); ++i) {
        const auto& ref = p.rows()[i].ref;
        if (ref.group != group) continue;
        found = true;
        // infer the equality's side from the basis count lazily
        dims[ref.item] = std::max(dims[ref.item], ref.basis + 1);
    }
    if (!found) throw solver_error("extract_dual_witness: no rows in group '" + group + "'");
    for (auto& [item, nb] : dims) {
        const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(nb))));
        if (n * n != nb) throw solver_error("extract_dual_witness: group is not an operator equality");
        items[item] = Matrix::Zero(n, n);
    }
    for (int i = 0; i < p.num_rows(); ++i) {
        const auto& ref = p.rows()[i].ref;
        if (ref.group != group) continue;
        const int n = static_cast<int>(items[ref.item].rows());
        items[ref.item] += sol.y[i] * hermitian_basis(n)[ref.basis];
    }
    std::vector<Matrix> out;
    out.reserve(items.size());
    for (auto& [item, m] : items) out.push_back(std::move(m));
    return out;
}

} // namespace qres
