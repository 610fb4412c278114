#include "qres/operators.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

namespace qres {

int product_dim(const std::vector<int>& dims) {
    int p = 1;
    for (int d : dims) {
        if (d < 1) throw dimension_error("subsystem dimension must be >= 1");
        p *= d;
    }
    return p;
}

HermitianOperator::HermitianOperator(std::vector<int> dims, Matrix entries, double warn_defect)
    : dims_(std::move(dims)) {
    const int side = product_dim(dims_);
    if (entries.rows() != side || entries.cols() != side)
        throw dimension_error("matrix side does not match product of dims");
    Matrix sym = 0.5 * (entries + entries.adjoint());
    defect_ = (entries - sym).cwiseAbs().maxCoeff();
    if (defect_ > warn_defect)
        std::cerr << "[qres] warning: hermitian symmetrisation corrected " << defect_ << "\n";
    mat_ = std::move(sym);
}

HermitianOperator HermitianOperator::zero(std::vector<int> dims) {
    const int side = product_dim(dims);
    return HermitianOperator(std::move(dims), Matrix::Zero(side, side));
}

HermitianOperator HermitianOperator::identity(std::vector<int> dims) {
    const int side = product_dim(dims);
    return HermitianOperator(std::move(dims), Matrix::Identity(side, side));
}

double HermitianOperator::min_eigenvalue() const { return min_eig(mat_); }

double HermitianOperator::max_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

HermitianOperator HermitianOperator::with_dims(std::vector<int> dims) const {
    if (product_dim(dims) != side()) throw dimension_error("relabeled dims do not match matrix side");
    return HermitianOperator(std::move(dims), mat_);
}

double hs_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); }

Matrix kron_matrix(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return HermitianOperator(std::move(dims), kron_matrix(a.matrix(), b.matrix()));
}

namespace {

// Decode flat index into per-factor digits (row-major: first factor most significant).
inline void unflatten(int idx, const std::vector<int>& dims, std::vector<int>& digits) {
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        digits[k] = idx % dims[k];
        idx /= dims[k];
    }
}

inline int flatten(const std::vector<int>& digits, const std::vector<int>& dims) {
    int idx = 0;
    for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
    return idx;
}

} // namespace

Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, const std::set<int>& over) {
    if (over.empty()) throw dimension_error("partial_trace: empty subsystem set");
    for (int k : over)
        if (k < 0 || k >= static_cast<int>(dims.size())) throw dimension_error("partial_trace: invalid subsystem index");
    std::vector<int> keep, kdims, tdims;
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
        if (over.count(k)) tdims.push_back(dims[k]);
        else {
            keep.push_back(k);
            kdims.push_back(dims[k]);
        }
    }
    const int nk = kdims.empty() ? 1 : product_dim(kdims);
    const int nt = product_dim(tdims);
    Matrix out = Matrix::Zero(nk, nk);
    const int n = static_cast<int>(dims.size());
    std::vector<int> row(n), col(n), krow(keep.size()), kcol(keep.size()), tdig(tdims.size());
    for (int i = 0; i < nk; ++i) {
        if (!kdims.empty()) unflatten(i, kdims, krow);
        for (int j = 0; j < nk; ++j) {
            if (!kdims.empty()) unflatten(j, kdims, kcol);
            cxd acc = 0.0;
            for (int t = 0; t < nt; ++t) {
                unflatten(t, tdims, tdig);
                for (size_t k = 0; k < keep.size(); ++k) {
                    row[keep[k]] = krow[k];
                    col[keep[k]] = kcol[k];
                }
                int ti = 0;
                for (int k = 0; k < n; ++k)
                    if (over.count(k)) {
                        row[k] = col[k] = tdig[ti];
                        ++ti;
                    }
                acc += m(flatten(row, dims), flatten(col, dims));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

HermitianOperator partial_trace(const HermitianOperator& op, const std::set<int>& over) {
    std::vector<int> kdims;
    for (int k = 0; k < op.num_systems(); ++k)
        if (!over.count(k)) kdims.push_back(op.dims()[k]);
    if (kdims.empty()) kdims.push_back(1);
    return HermitianOperator(kdims, partial_trace(op.matrix(), op.dims(), over));
}

Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims, int on) {
    if (on < 0 || on >= static_cast<int>(dims.size())) throw dimension_error("partial_transpose: invalid subsystem index");
    const int n = product_dim(dims);
    Matrix out(n, n);
    const int ns = static_cast<int>(dims.size());
    std::vector<int> row(ns), col(ns);
    for (int i = 0; i < n; ++i) {
        unflatten(i, dims, row);
        for (int j = 0; j < n; ++j) {
            unflatten(j, dims, col);
            std::vector<int> r2 = row, c2 = col;
            std::swap(r2[on], c2[on]);
            out(flatten(r2, dims), flatten(c2, dims)) = m(i, j);
        }
    }
    return out;
}

HermitianOperator partial_transpose(const HermitianOperator& op, int on) {
    return HermitianOperator(op.dims(), partial_transpose(op.matrix(), op.dims(), on));
}

Matrix permute_systems(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& perm) {
    if (perm.size() != dims.size()) throw dimension_error("permute_systems: permutation length mismatch");
    std::vector<int> ndims(perm.size());
    for (size_t k = 0; k < perm.size(); ++k) ndims[k] = dims[perm[k]];
    const int n = product_dim(dims);
    Matrix out(n, n);
    const int ns = static_cast<int>(dims.size());
    std::vector<int> row(ns), col(ns), nrow(ns), ncol(ns);
    for (int i = 0; i < n; ++i) {
        unflatten(i, dims, row);
        for (int j = 0; j < n; ++j) {
            unflatten(j, dims, col);
            for (int k = 0; k < ns; ++k) {
                nrow[k] = row[perm[k]];
                ncol[k] = col[perm[k]];
            }
            out(flatten(nrow, ndims), flatten(ncol, ndims)) = m(i, j);
        }
    }
    return out;
}

HermitianOperator permute_systems(const HermitianOperator& op, const std::vector<int>& perm) {
    std::vector<int> ndims(perm.size());
    for (size_t k = 0; k < perm.size(); ++k) ndims[k] = op.dims()[perm[k]];
    return HermitianOperator(ndims, permute_systems(op.matrix(), op.dims(), perm));
}

HermitianOperator max_entangled(int d) {
    if (d < 2) throw domain_error("max_entangled: d must be >= 2");
    Matrix m = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0 / d;
    return HermitianOperator({d, d}, std::move(m));
}

HermitianOperator transpose_trick(const HermitianOperator& o, int d) {
    if (o.num_systems() != 1 || o.dims()[0] != d) throw dimension_error("transpose_trick: operator must have dims [d]");
    return HermitianOperator({d}, o.matrix().transpose() / static_cast<double>(d));
}

std::vector<Matrix> heisenberg_weyl(int d) {
    if (d < 2) throw domain_error("heisenberg_weyl: d must be >= 2");
    Matrix x = Matrix::Zero(d, d), z = Matrix::Zero(d, d);
    const double tau = 2.0 * M_PI;
    for (int i = 0; i < d; ++i) {
        x((i + 1) % d, i) = 1.0;
        z(i, i) = std::polar(1.0, tau * i / d);
    }
    std::vector<Matrix> us;
    us.reserve(d * d);
    Matrix xm = Matrix::Identity(d, d);
    for (int m = 0; m < d; ++m) {
        Matrix zn = Matrix::Identity(d, d);
        for (int n = 0; n < d; ++n) {
            us.push_back(xm * zn);
            zn = zn * z;
        }
        xm = xm * x;
    }
    return us;
}

std::vector<HermitianOperator> choi_teleportation(const std::vector<HermitianOperator>& ma,
                                                  const HermitianOperator& rho, double tol) {
    if (ma.empty()) throw validation_error("choi_teleportation: empty POVM");
    if (ma.front().num_systems() != 2) throw dimension_error("choi_teleportation: POVM must be bipartite on V x A");
    if (rho.num_systems() != 2) throw dimension_error("choi_teleportation: state must be bipartite on A x B");
    const int dv = ma.front().dims()[0];
    const int da = ma.front().dims()[1];
    const int db = rho.dims()[1];
    if (rho.dims()[0] != da) throw dimension_error("choi_teleportation: POVM A-dim and state A-dim differ");
    Matrix sum = Matrix::Zero(dv * da, dv * da);
    for (const auto& m : ma) {
        if (m.dims() != ma.front().dims()) throw dimension_error("choi_teleportation: inconsistent POVM element dims");
        if (min_eig(m.matrix()) < -tol) throw validation_error("choi_teleportation: POVM element not PSD");
        sum += m.matrix();
    }
    if ((sum - Matrix::Identity(dv * da, dv * da)).cwiseAbs().maxCoeff() > tol)
        throw validation_error("choi_teleportation: POVM does not sum to identity");

    // Assemble phi_+^{V'V} x rho^{AB} on systems (V', V, A, B) and contract.
    const HermitianOperator big = kron(max_entangled(dv), rho); // dims [dv, dv, da, db]
    std::vector<HermitianOperator> out;
    out.reserve(ma.size());
    const Matrix idv = Matrix::Identity(dv, dv);
    const Matrix idb = Matrix::Identity(db, db);
    for (const auto& m : ma) {
        Matrix proj = kron_matrix(idv, kron_matrix(m.matrix(), idb));
        Matrix ja = partial_trace(proj * big.matrix(), {dv, dv, da, db}, {1, 2});
        out.emplace_back(std::vector<int>{dv, db}, std::move(ja));
    }
    return out;
}

HermitianOperator linear_map_apply(const HermitianOperator& j, const HermitianOperator& mb) {
    if (j.num_systems() != 2 || mb.num_systems() != 2) throw dimension_error("linear_map_apply: bipartite operands required");
    const int dvp = j.dims()[0], db = j.dims()[1];
    if (mb.dims()[0] != db) throw dimension_error("linear_map_apply: B dimensions differ");
    const int dvt = mb.dims()[1];
    const Matrix lhs = kron_matrix(j.matrix(), Matrix::Identity(dvt, dvt));
    const Matrix rhs = kron_matrix(Matrix::Identity(dvp, dvp), mb.matrix());
    Matrix res = partial_trace(lhs * rhs, {dvp, db, dvt}, {1});
    return HermitianOperator({dvp, dvt}, std::move(res));
}

bool is_psd(const Matrix& m, double tol) { return min_eig(m) >= -tol; }

double min_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

std::vector<Matrix> hermitian_basis(int n) {
    std::vector<Matrix> basis;
    basis.reserve(n * n);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        Matrix e = Matrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Matrix ep = Matrix::Zero(n, n), em = Matrix::Zero(n, n);
            ep(i, j) = ep(j, i) = s;
            em(i, j) = cxd(0, -s);
            em(j, i) = cxd(0, s);
            basis.push_back(ep);
            basis.push_back(em);
        }
    return basis;
}

} // namespace qres
