#include <doctest.h>

#include "qres/operators.hpp"
#include "qres/rng.hpp"

using namespace qres;

namespace {

Matrix pauli(char which) {
    Matrix m(2, 2);
    switch (which) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0); break;
        case 'z': m << 1, 0, 0, -1; break;
        default: m.setIdentity();
    }
    return m;
}

Matrix ket_proj(int i, int d) {
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = 1.0;
    return m;
}

} // namespace

TEST_CASE("kron basics") {
    HermitianOperator i2 = HermitianOperator::identity({2});
    auto i4 = kron(i2, i2);
    CHECK(i4.side() == 4);
    CHECK((i4.matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    HermitianOperator z({2}, pauli('z'));
    auto zi = kron(z, i2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(zi.matrix());
    Eigen::VectorXd ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(1.0));

    HermitianOperator p0({2}, ket_proj(0, 2)), p1({2}, ket_proj(1, 2));
    auto p01 = kron(p0, p1);
    CHECK(p01.matrix()(1, 1).real() == doctest::Approx(1.0)); // |01> is index 1
    CHECK(p01.matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("partial trace") {
    Rng rng(7);
    Matrix rho = random_state(rng, 2), sigma = random_state(rng, 3);
    HermitianOperator prod = kron(HermitianOperator({2}, rho), HermitianOperator({3}, sigma));
    auto back = partial_trace(prod, {1});
    CHECK((back.matrix() - rho).cwiseAbs().maxCoeff() < 1e-12);

    auto marg = partial_trace(max_entangled(2), {0});
    CHECK((marg.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    auto full = partial_trace(prod, {0, 1});
    CHECK(full.side() == 1);
    CHECK(full.matrix()(0, 0).real() == doctest::Approx(1.0));

    CHECK_THROWS_AS(partial_trace(prod, {2}), dimension_error);
}

TEST_CASE("partial transpose") {
    Rng rng(11);
    Matrix rho = random_state(rng, 2), sigma = random_state(rng, 2);
    HermitianOperator prod = kron(HermitianOperator({2}, rho), HermitianOperator({2}, sigma));
    auto pt = partial_transpose(prod, 1);
    Matrix expect = kron_matrix(rho, sigma.transpose());
    CHECK((pt.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);

    // phi_+ PT has minimum eigenvalue -1/2 (direct eigensolve oracle)
    auto phi = max_entangled(2);
    CHECK(partial_transpose(phi, 1).min_eigenvalue() == doctest::Approx(-0.5));

    // involution
    Matrix h = random_hermitian(rng, 6);
    HermitianOperator op({2, 3}, h);
    auto twice = partial_transpose(partial_transpose(op, 1), 1);
    CHECK((twice.matrix() - op.matrix()).cwiseAbs().maxCoeff() == 0.0);

    // full transpose equals composition over all subsystems
    auto both = partial_transpose(partial_transpose(op, 0), 1);
    CHECK((both.matrix() - op.matrix().transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial trace commutes with partial transpose on disjoint subsystems") {
    Rng rng(13);
    Matrix h = random_hermitian(rng, 8);
    HermitianOperator op({2, 2, 2}, h);
    auto a = partial_trace(partial_transpose(op, 2), {0});
    auto b = partial_transpose(partial_trace(op, {0}), 1);
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("max entangled state") {
    auto phi = max_entangled(2);
    CHECK(phi.matrix()(0, 0).real() == doctest::Approx(0.5));
    CHECK(phi.matrix()(0, 3).real() == doctest::Approx(0.5));
    CHECK(phi.matrix()(3, 0).real() == doctest::Approx(0.5));
    CHECK(phi.matrix()(3, 3).real() == doctest::Approx(0.5));
    CHECK(phi.matrix().cwiseAbs().sum() == doctest::Approx(2.0)); // nothing else
    CHECK((phi.matrix() * phi.matrix()).trace().real() == doctest::Approx(1.0));
    CHECK_THROWS_AS(max_entangled(1), domain_error);

    for (int d : {2, 3, 4}) {
        auto marg = partial_trace(max_entangled(d), {1});
        CHECK((marg.matrix() - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("transpose trick") {
    // |0><1| -> (1/2)|1><0|
    Matrix o01 = Matrix::Zero(2, 2);
    o01(0, 1) = 1.0;
    Matrix sym = 0.5 * (o01 + o01.adjoint()); // HermitianOperator symmetrises anyway
    HermitianOperator o({2}, sym);
    auto t = transpose_trick(o, 2);
    CHECK((t.matrix() - sym.transpose() / 2.0).cwiseAbs().maxCoeff() < 1e-15);

    auto id = transpose_trick(HermitianOperator::identity({3}), 3);
    CHECK((id.matrix() - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(transpose_trick(HermitianOperator::identity({3}), 2), dimension_error);

    // identity against the explicit partial-trace computation, 100 seeded cases
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + trial % 3;
        Matrix o_rand = random_hermitian(rng, d);
        HermitianOperator op({d}, o_rand);
        Matrix big = kron_matrix(op.matrix(), Matrix::Identity(d, d)) * max_entangled(d).matrix();
        Matrix direct = partial_trace(big, {d, d}, {0});
        CHECK((transpose_trick(op, d).matrix() - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("heisenberg-weyl operators") {
    auto u2 = heisenberg_weyl(2);
    REQUIRE(u2.size() == 4);
    CHECK((u2[0] - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((u2[1] - pauli('z')).cwiseAbs().maxCoeff() < 1e-12); // order: X^m Z^n, (0,1) = Z
    CHECK((u2[2] - pauli('x')).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u2[3] - pauli('x') * pauli('z')).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(heisenberg_weyl(1), domain_error);

    for (int d : {2, 3}) {
        auto us = heisenberg_weyl(d);
        // unitarity and orthogonality tr(U_b^dag U_c) = d delta_bc
        for (size_t b = 0; b < us.size(); ++b) {
            CHECK((us[b].adjoint() * us[b] - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
            for (size_t c = 0; c < us.size(); ++c) {
                const cxd ip = (us[b].adjoint() * us[c]).trace();
                CHECK(std::abs(ip - (b == c ? cxd(d, 0) : cxd(0, 0))) < 1e-10);
            }
        }
        // twirl: sum_b U_b rho U_b^dag = d tr(rho) I
        Rng rng(5 + d);
        Matrix rho = random_hermitian(rng, d);
        Matrix twirl = Matrix::Zero(d, d);
        for (const auto& u : us) twirl += u * rho * u.adjoint();
        CHECK((twirl - static_cast<double>(d) * rho.trace() * Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("choi teleportation operators") {
    Rng rng(31);

    // trivial single-outcome POVM: J_1 = (I/d) x rho_B
    Matrix rho_ab = random_state(rng, 4);
    HermitianOperator rho({2, 2}, rho_ab);
    std::vector<HermitianOperator> trivial{HermitianOperator::identity({2, 2})};
    auto j = choi_teleportation(trivial, rho);
    REQUIRE(j.size() == 1);
    Matrix rho_b = partial_trace(rho_ab, {2, 2}, {0});
    CHECK((j[0].matrix() - 0.5 * kron_matrix(Matrix::Identity(2, 2), rho_b)).cwiseAbs().maxCoeff() < 1e-12);

    // product state: each J_a factorises as X_a x rho_B
    Matrix ra = random_state(rng, 2), rb = random_state(rng, 2);
    HermitianOperator rho_prod({2, 2}, kron_matrix(ra, rb));
    auto els = random_povm(rng, 4, 3);
    std::vector<HermitianOperator> ma;
    for (auto& e : els) ma.emplace_back(std::vector<int>{2, 2}, e);
    auto jp = choi_teleportation(ma, rho_prod);

    // Independent oracle: J_a = (1/d) sum_ij |i><j|_{V'} x tr_A[(<j|M_a|i>_V x 1_B) rho^{AB}],
    // built by slicing the V index of M_a by hand.
    auto oracle = [&](const Matrix& m_a, const Matrix& rho_full, int d, int da, int db) {
        Matrix out = Matrix::Zero(d * db, d * db);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Matrix block(da, da); // <j| M_a |i> on A
                for (int r = 0; r < da; ++r)
                    for (int c = 0; c < da; ++c) block(r, c) = m_a(j * da + r, i * da + c);
                Matrix tau = partial_trace(kron_matrix(block, Matrix::Identity(db, db)) * rho_full, {da, db}, {0});
                for (int r = 0; r < db; ++r)
                    for (int c = 0; c < db; ++c) out(i * db + r, j * db + c) += tau(r, c) / static_cast<double>(d);
            }
        return out;
    };

    Matrix sum = Matrix::Zero(4, 4);
    for (size_t a = 0; a < jp.size(); ++a) {
        Matrix expect = oracle(ma[a].matrix(), rho_prod.matrix(), 2, 2, 2);
        CHECK((jp[a].matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
        Matrix xa = partial_trace(jp[a].matrix(), {2, 2}, {1});
        CHECK((jp[a].matrix() - kron_matrix(xa, rb)).cwiseAbs().maxCoeff() < 1e-10);
        sum += jp[a].matrix();
    }
    CHECK((sum - 0.5 * kron_matrix(Matrix::Identity(2, 2), rb)).cwiseAbs().maxCoeff() < 1e-10);

    // Bell measurement on phi_+: J_a = (1/4) (I x U_a) phi_+ (I x U_a)^dag
    auto us = heisenberg_weyl(2);
    std::vector<HermitianOperator> bell;
    for (const auto& u : us) {
        Matrix iu = kron_matrix(Matrix::Identity(2, 2), u);
        bell.emplace_back(std::vector<int>{2, 2}, Matrix(iu * max_entangled(2).matrix() * iu.adjoint()));
    }
    auto jb = choi_teleportation(bell, max_entangled(2));
    for (size_t a = 0; a < 4; ++a) {
        Matrix iu = kron_matrix(Matrix::Identity(2, 2), us[a]);
        Matrix pattern = 0.25 * iu * max_entangled(2).matrix() * iu.adjoint();
        CHECK((jb[a].matrix() - oracle(bell[a].matrix(), max_entangled(2).matrix(), 2, 2, 2)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((jb[a].matrix() - pattern).cwiseAbs().maxCoeff() < 1e-10);
    }

    // CJ marginal identity, 100 seeded cases
    Rng rng2(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2, da = 2, db = 2;
        auto els2 = random_povm(rng2, d * da, 2 + trial % 3);
        std::vector<HermitianOperator> m2;
        for (auto& e : els2) m2.emplace_back(std::vector<int>{d, da}, e);
        HermitianOperator r2({da, db}, random_state(rng2, da * db));
        auto j2 = choi_teleportation(m2, r2);
        Matrix total = Matrix::Zero(d * db, d * db);
        double most_negative = 0.0;
        for (auto& jj : j2) {
            total += jj.matrix();
            most_negative = std::min(most_negative, jj.min_eigenvalue());
        }
        Matrix rb2 = partial_trace(r2.matrix(), {da, db}, {0});
        CHECK((total - kron_matrix(Matrix::Identity(d, d) / d, rb2)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(most_negative > -1e-10);
    }
}

TEST_CASE("linear map apply") {
    Rng rng(41);
    // Mb = I x I: result = tr_B(J) x I
    Matrix jm = random_hermitian(rng, 4);
    HermitianOperator j({2, 2}, jm);
    auto out = linear_map_apply(j, HermitianOperator::identity({2, 3}));
    Matrix trb = partial_trace(jm, {2, 2}, {1});
    CHECK((out.matrix() - kron_matrix(trb, Matrix::Identity(3, 3))).cwiseAbs().maxCoeff() < 1e-12);

    // product J = sigma x rho: factorisation sigma x tr_B[Mb (rho x I)]
    Matrix sig = random_hermitian(rng, 2), rho = random_state(rng, 2);
    HermitianOperator jprod({2, 2}, kron_matrix(sig, rho));
    Matrix mbm = random_povm(rng, 6, 2)[0];
    HermitianOperator mb({2, 3}, mbm);
    auto out2 = linear_map_apply(jprod, mb);
    Matrix fact = partial_trace(mbm * kron_matrix(rho, Matrix::Identity(3, 3)), {2, 3}, {0});
    CHECK((out2.matrix() - kron_matrix(sig, fact)).cwiseAbs().maxCoeff() < 1e-12);

    // linearity
    Matrix j1 = random_hermitian(rng, 4), j2 = random_hermitian(rng, 4);
    auto lhs = linear_map_apply(HermitianOperator({2, 2}, j1 + j2), mb);
    Matrix rhs = linear_map_apply(HermitianOperator({2, 2}, j1), mb).matrix() +
                 linear_map_apply(HermitianOperator({2, 2}, j2), mb).matrix();
    CHECK((lhs.matrix() - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

// tr_V[(phi_+^{V'V} x 1_Vt)(1_V' x O^{V Vt})] = (1/d) (O^{V' Vt})^{T_V'} for every
// linear bipartite O: the contraction that turns teleportation operators into
// distributed-POVM blocks.
TEST_CASE("phi_+ contraction identity at d=2,3") {
    for (int d : {2, 3}) {
        Rng rng(100 + d);
        for (int dt : {2, 3}) {
            for (int trial = 0; trial < 50; ++trial) {
                Matrix o = random_hermitian(rng, d * dt);
                Matrix lhs_full = kron_matrix(max_entangled(d).matrix(), Matrix::Identity(dt, dt)) *
                                  kron_matrix(Matrix::Identity(d, d), o);
                Matrix lhs = partial_trace(lhs_full, {d, d, dt}, {1});
                Matrix rhs = partial_transpose(o, {d, dt}, 0) / static_cast<double>(d);
                CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
    }
}

// Trace pairing of a teleportation operator against a bipartite witness:
// tr[(M^{VA} x phi_+^{BV'})((W^{VV'})^T x P^{AB})] equals the same pairing with
// W moved onto (B, V') and phi_+ onto (V, V'). Systems are matched by label;
// written in one fixed order (V, A, B, V') the two sides coincide.
TEST_CASE("bipartite transpose identity at d=2,3") {
    for (int d : {2, 3}) {
        Rng rng(200 + d);
        const int da = 2, db = d; // W reappears on B x V', so dim(B) = d
        for (int trial = 0; trial < 100; ++trial) {
            Matrix m = random_hermitian(rng, d * da);
            Matrix w = random_hermitian(rng, d * d);
            Matrix p = random_hermitian(rng, da * db);
            Matrix phi = max_entangled(d).matrix();

            // left: systems (V, A, B, V'); M on (V,A), phi_+ on (B,V'), W^T on (V,V'), P on (A,B)
            Matrix left_op = kron_matrix(m, phi);
            Matrix wt_p = kron_matrix(w.transpose(), p); // on (V, V', A, B)
            Matrix wt_p_perm = permute_systems(wt_p, {d, d, da, db}, {0, 2, 3, 1}); // -> (V, A, B, V')
            const cxd lhs = (left_op * wt_p_perm).trace();

            // W's V-factor lands on the B slot on the right.
            Matrix w_bv = permute_systems(w, {d, d}, {1, 0});
            Matrix right_op = kron_matrix(m, w_bv);       // on (V, A, B, V')
            Matrix phi_p = kron_matrix(phi, p);           // on (V, V', A, B)
            Matrix phi_p_perm = permute_systems(phi_p, {d, d, da, db}, {0, 2, 3, 1});
            const cxd rhs = (right_op * phi_p_perm).trace();

            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("hermitian basis is orthonormal") {
    auto basis = hermitian_basis(3);
    REQUIRE(basis.size() == 9);
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j)
            CHECK(hs_inner(basis[i], basis[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("hermiticity enforcement") {
    Matrix skew(2, 2);
    skew << 1.0, cxd(0, 1), cxd(0, 1), 1.0; // not Hermitian
    HermitianOperator h({2}, skew);
    CHECK(h.symmetrization_defect() > 0.5);
    CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(HermitianOperator({3}, Matrix::Identity(2, 2)), dimension_error);
}
