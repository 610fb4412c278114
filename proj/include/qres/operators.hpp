#pragma once

#include <Eigen/Dense>

#include <complex>
#include <set>
#include <vector>

#include "qres/errors.hpp"

namespace qres {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

// Index of one tensor factor inside an operator's dims list.
struct SubsystemIndex {
    int position = 0;
};

/// Finite-dimensional Hermitian operator together with its tensor-factor
/// structure. Entries are stored dense, row-major over the tensor-product
/// basis in dims order. Hermiticity is enforced at construction by
/// symmetrisation (M + M^dag)/2; a correction larger than `warn_defect`
/// is reported on stderr but not rejected.
class HermitianOperator {
  public:
    HermitianOperator() = default;
    HermitianOperator(std::vector<int> dims, Matrix entries, double warn_defect = 1e-10);

    static HermitianOperator zero(std::vector<int> dims);
    static HermitianOperator identity(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    const Matrix& matrix() const { return mat_; }
    int side() const { return static_cast<int>(mat_.rows()); }
    int num_systems() const { return static_cast<int>(dims_.size()); }

    // Largest entry of (M - M^dag)/2 removed during symmetrisation.
    double symmetrization_defect() const { return defect_; }

    double trace() const { return mat_.trace().real(); }
    double min_eigenvalue() const;
    double max_eigenvalue() const;

    HermitianOperator with_dims(std::vector<int> dims) const;

  private:
    std::vector<int> dims_;
    Matrix mat_;
    double defect_ = 0.0;
};

int product_dim(const std::vector<int>& dims);

// Real Hilbert-Schmidt inner product tr(A B) of two Hermitian operators.
double hs_inner(const Matrix& a, const Matrix& b);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
Matrix kron_matrix(const Matrix& a, const Matrix& b);

// Trace out the listed subsystems; remaining factors keep their order.
HermitianOperator partial_trace(const HermitianOperator& op, const std::set<int>& over);
Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, const std::set<int>& over);

// Transpose a single tensor factor.
HermitianOperator partial_transpose(const HermitianOperator& op, int on);
Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims, int on);

// Reorder tensor factors: perm[k] is the old position of the new k-th factor.
HermitianOperator permute_systems(const HermitianOperator& op, const std::vector<int>& perm);
Matrix permute_systems(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& perm);

// Maximally entangled state phi_+ = d^-1 sum_ij |ii><jj| with dims [d, d].
HermitianOperator max_entangled(int d);

// tr_A[(O x 1) phi_+] = O^T / d, evaluated via the closed form.
HermitianOperator transpose_trick(const HermitianOperator& o, int d);

// Heisenberg-Weyl unitaries {X^m Z^n}, m,n = 0..d-1, in row-major (m,n) order.
std::vector<Matrix> heisenberg_weyl(int d);

// Choi-Jamiolkowski operators of the teleportation experiment:
// J_a = tr_VA[(1_V' x M_a x 1_B)(phi_+^{V'V} x rho^{AB})], on V' x B.
// `ma` is a POVM on V x A with dim(V) = d; rho lives on A x B.
std::vector<HermitianOperator> choi_teleportation(const std::vector<HermitianOperator>& ma,
                                                  const HermitianOperator& rho, double tol = 1e-8);

// (.) -> tr_B[((.) x 1_Vt)(1_V' x M_b^{B Vt})] applied to J on V' x B.
HermitianOperator linear_map_apply(const HermitianOperator& j, const HermitianOperator& mb);

bool is_psd(const Matrix& m, double tol);
double min_eig(const Matrix& m);

// Orthonormal Hermitian basis of the n x n Hermitian matrices under tr(AB).
std::vector<Matrix> hermitian_basis(int n);

} // namespace qres
