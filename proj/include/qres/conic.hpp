#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qres/operators.hpp"

namespace qres {

// ---------------------------------------------------------------------------
// Solver-agnostic conic program: named Hermitian blocks (PSD cone) and
// nonnegative scalars, affine equality rows over them, a real linear
// objective. PSD requirements on affine expressions are modelled by
// introducing an explicit slack block linked through an equality.
// ---------------------------------------------------------------------------

struct SolverSettings {
    double feas_tol = 1e-10; // IPM residual target (relative)
    double gap_tol = 1e-9;   // IPM relative gap target
    int max_iters = 200;
    bool verbose = false;
};

enum class SolveStatus { optimal, infeasible, unbounded, inaccurate };

std::string to_string(SolveStatus s);

enum class VarKind { hermitian_psd, scalar_nonneg };

struct VarInfo {
    std::string name;
    int n = 1; // matrix side; 1 for scalars
    VarKind kind = VarKind::hermitian_psd;
};

// One linear term of an operator-valued expression. Only the adjoint of the
// map is needed to expand equality rows: row coefficient of basis element E
// on variable v is adjoint(E).
struct ExprTerm {
    int var = -1;
    std::function<Matrix(const Matrix&)> adjoint;
};

struct OpExpr {
    int dim = 0;
    std::vector<ExprTerm> terms;
    Matrix constant; // added to the expression; dim x dim

    OpExpr() = default;
    explicit OpExpr(int d) : dim(d), constant(Matrix::Zero(d, d)) {}
};

// expression helpers ---------------------------------------------------------
ExprTerm term_scale(int var, double c);
ExprTerm term_conj(int var, const Matrix& l);           // X -> L X L^dag
ExprTerm term_partial_transpose(int var, const std::vector<int>& dims, int on, double c = 1.0);
ExprTerm term_kron_left(int var, int id_dim, double c = 1.0);  // X -> c (1_m x X)
ExprTerm term_kron_right(int var, int id_dim, double c = 1.0); // X -> c (X x 1_m)
ExprTerm term_trace_times(int var, const Matrix& k, int var_dim); // X -> tr(X) K
ExprTerm term_scalar_times(int var, const Matrix& k);   // scalar x -> x K

struct ScalarTerm {
    int var = -1;
    Matrix coeff; // <coeff, X>; 1x1 for scalars
};

struct ScalarExpr {
    std::vector<ScalarTerm> terms;
    double constant = 0.0;
};

struct EqRowRef {
    std::string group;
    int item = 0;  // which operator equality inside the group
    int basis = 0; // Hermitian basis index inside the equality
};

class ConicProgram {
  public:
    int add_hermitian_var(const std::string& name, int n);
    int add_scalar_var(const std::string& name);

    // expr == 0 (operator equality, expanded over a Hermitian basis)
    void add_op_eq(const OpExpr& expr, const std::string& group, int item = 0);
    // scalar equality expr == 0
    void add_scalar_eq(const ScalarExpr& expr, const std::string& group, int item = 0);

    void minimize(const ScalarExpr& objective);
    void maximize(const ScalarExpr& objective);

    const std::vector<VarInfo>& vars() const { return vars_; }
    int var_dim(int v) const { return vars_[v].n; }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    void dump_json(std::ostream& os) const; // documented triplet form, for cross-validation

    struct Row {
        std::vector<std::pair<int, Matrix>> entries; // (var, Hermitian coefficient)
        double rhs = 0.0;
        EqRowRef ref;
    };
    const std::vector<Row>& rows() const { return rows_; }
    const ScalarExpr& objective() const { return objective_; }
    bool minimizing() const { return minimize_; }

  private:
    std::vector<VarInfo> vars_;
    std::vector<Row> rows_;
    ScalarExpr objective_;
    bool minimize_ = true;
};

struct SolveDiagnostics {
    double primal_residual = 0.0; // recomputed ||A(X)-b||_inf at the complex level
    double dual_residual = 0.0;   // recomputed ||C - A*(y) - S||_inf
    double min_block_eig = 0.0;   // most negative variable eigenvalue
    double gap = 0.0;             // |primal - dual|
    int iterations = 0;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::inaccurate;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;
    std::vector<Matrix> assignments;      // per variable (1x1 for scalars)
    std::vector<Matrix> dual_blocks;      // S per variable
    std::vector<double> y;                // per row, aligned with program rows
    SolveDiagnostics diagnostics;
    std::string message;

    Matrix value_of(int var) const { return assignments.at(var); }
    double scalar_of(int var) const { return assignments.at(var)(0, 0).real(); }
};

struct BackendCaps {
    bool psd_cones = true;
    int max_block_side = 4096;
    bool deterministic = true;
};

class SolverBackend {
  public:
    virtual ~SolverBackend() = default;
    virtual BackendCaps capabilities() const = 0;
    virtual ConicSolution solve(const ConicProgram& p, const SolverSettings& s) const = 0;
    virtual std::string name() const = 0;
};

// The canonical backend: a dense primal-dual interior-point method (HKM
// direction with Mehrotra predictor-corrector) over realified blocks.
class IpmBackend final : public SolverBackend {
  public:
    BackendCaps capabilities() const override { return BackendCaps{}; }
    ConicSolution solve(const ConicProgram& p, const SolverSettings& s) const override;
    std::string name() const override { return "qres-ipm"; }
};

// Solve and recompute feasibility residuals internally (never trusting the
// backend's own report). Infeasible/unbounded are statuses, not errors.
ConicSolution solve(const ConicProgram& p, const SolverBackend& backend, const SolverSettings& settings = {});
ConicSolution solve(const ConicProgram& p, const SolverSettings& settings = {});

// Dual multipliers of an operator-equality group, reassembled as complex
// Hermitian operators (one per item index). Requires status == optimal.
std::vector<Matrix> extract_dual_witness(const ConicProgram& p, const ConicSolution& sol, const std::string& group);

// Standard complex->real doubling H = A + iB |-> [[A, -B], [B, A]].
RMatrix realify(const Matrix& h);
Matrix unrealify(const RMatrix& r);

// Global audit trail of solve diagnostics (used by the acceptance suite to
// check SDP hygiene across a whole run).
struct SolveAuditRecord {
    std::string tag;
    SolveStatus status;
    double primal_residual, dual_residual, gap, min_block_eig;
};
std::vector<SolveAuditRecord>& solve_audit();
void set_solve_audit_tag(const std::string& tag);

} // namespace qres
