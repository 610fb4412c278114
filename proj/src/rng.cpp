#include "qres/rng.hpp"

namespace qres {

Matrix random_ginibre(Rng& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cxd(rng.gaussian(), rng.gaussian()) / std::sqrt(2.0);
    return m;
}

Matrix random_hermitian(Rng& rng, int n) {
    Matrix g = random_ginibre(rng, n, n);
    return 0.5 * (g + g.adjoint());
}

Matrix random_unitary(Rng& rng, int n) {
    Matrix z = random_ginibre(rng, n, n);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        cxd d = r(k, k);
        q.col(k) *= (std::abs(d) > 0 ? d / std::abs(d) : 1.0);
    }
    return q;
}

Matrix random_state(Rng& rng, int n, int rank) {
    if (rank <= 0 || rank > n) rank = n;
    Matrix g = random_ginibre(rng, n, rank);
    Matrix w = g * g.adjoint();
    return w / w.trace().real();
}

std::vector<Matrix> random_povm(Rng& rng, int n, int outcomes) {
    std::vector<Matrix> gs;
    Matrix sum = Matrix::Zero(n, n);
    for (int a = 0; a < outcomes; ++a) {
        Matrix g = random_ginibre(rng, n, n);
        gs.push_back(g * g.adjoint());
        sum += gs.back();
    }
    // Whiten so the elements sum to the identity exactly (up to roundoff).
    Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
    Matrix isqrt = es.operatorInverseSqrt();
    for (auto& g : gs) g = isqrt * g * isqrt;
    return gs;
}

Matrix random_pure_state(Rng& rng, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = cxd(rng.gaussian(), rng.gaussian());
    v.normalize();
    return v * v.adjoint();
}

} // namespace qres
