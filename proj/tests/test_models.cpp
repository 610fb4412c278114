#include <doctest.h>

#include "qres/models.hpp"
#include "qres/rng.hpp"

using namespace qres;

namespace {

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

StandardMeasurementSet random_set(Rng& rng, int d, int ia, int oa) {
    StandardMeasurementSet s;
    s.dim = d;
    for (int x = 0; x < ia; ++x) {
        std::vector<HermitianOperator> row;
        for (auto& e : random_povm(rng, d, oa)) row.emplace_back(std::vector<int>{d}, e);
        s.elements.push_back(std::move(row));
    }
    return s;
}

} // namespace

TEST_CASE("povm validation is total") {
    Povm good{2, {HermitianOperator({2}, 0.3 * Matrix::Identity(2, 2)), HermitianOperator({2}, 0.7 * Matrix::Identity(2, 2))}};
    CHECK(good.validate().ok());

    Povm bad{2, {HermitianOperator({2}, Matrix::Identity(2, 2)), HermitianOperator({2}, 0.5 * Matrix::Identity(2, 2))}};
    auto v = bad.validate();
    CHECK(!v.ok());
    CHECK_THROWS_AS(v.require("bad povm"), validation_error);

    Matrix neg = -0.1 * Matrix::Identity(2, 2);
    Povm negp{2, {HermitianOperator({2}, neg), HermitianOperator({2}, Matrix::Identity(2, 2) - neg)}};
    CHECK(!negp.validate().ok()); // structured findings, no crash
}

TEST_CASE("embed_standard reproduces the elements exactly") {
    // single Z-basis measurement
    StandardMeasurementSet zonly;
    zonly.dim = 2;
    Matrix z0 = Matrix::Zero(2, 2), z1 = Matrix::Zero(2, 2);
    z0(0, 0) = 1;
    z1(1, 1) = 1;
    zonly.elements = {{HermitianOperator({2}, z0), HermitianOperator({2}, z1)}};
    auto g1 = embed_standard(zonly);
    CHECK((g1.effective[0][0].matrix() - z0).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((g1.effective[0][1].matrix() - z1).cwiseAbs().maxCoeff() < 1e-14);

    // X/Z pair: two classical inputs on a 2-dim ancilla
    auto g = embed_standard(xz_pair());
    CHECK(g.ancilla_dim() == 2);
    CHECK(g.classical_inputs());
    CHECK_FALSE(g.inputs.tomographically_complete); // i_A < d^2
    auto set = xz_pair();
    double dev = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            dev = std::max(dev, (g.effective[x][a].matrix() - set.elements[x][a].matrix()).cwiseAbs().maxCoeff());
    CHECK(dev == 0.0); // round-trip equality max-deviation report = 0

    // arbitrary seeded sets
    Rng rng(99);
    for (int t = 0; t < 10; ++t) {
        auto s = random_set(rng, 2 + t % 2, 2 + t % 3, 2);
        auto gg = embed_standard(s);
        for (int x = 0; x < s.inputs(); ++x)
            for (int a = 0; a < s.outcomes(); ++a)
                CHECK((gg.effective[x][a].matrix() - s.elements[x][a].matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("teleportation assemblage") {
    Rng rng(123);

    // product state: tau_{a|x} = p(a|x) rho_B
    auto set = random_set(rng, 2, 2, 2);
    auto g = embed_standard(set);
    Matrix ra = random_state(rng, 2), rb = random_state(rng, 2);
    HermitianOperator rho({2, 2}, kron_matrix(ra, rb));
    auto asm_ = teleportation_assemblage(g, rho);
    CHECK(asm_.validate().ok());
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
            const double pax = (set.elements[x][a].matrix() * ra).trace().real();
            CHECK((asm_.members[x][a].matrix() - pax * rb).cwiseAbs().maxCoeff() < 1e-12);
        }

    // phi_+ with classical inputs: tau_{a|x} = (1/d) M_{a|x}^T
    auto gxz = embed_standard(xz_pair());
    auto asm2 = teleportation_assemblage(gxz, max_entangled(2));
    auto xz = xz_pair();
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            CHECK((asm2.members[x][a].matrix() - 0.5 * xz.elements[x][a].matrix().transpose()).cwiseAbs().maxCoeff() <
                  1e-12);

    // seeded random generalised set + state: no-signalling within 1e-10
    for (int t = 0; t < 5; ++t) {
        std::vector<HermitianOperator> parent_els;
        for (auto& e : random_povm(rng, 6, 3)) parent_els.emplace_back(std::vector<int>{3, 2}, e);
        Povm parent{6, parent_els};
        std::vector<HermitianOperator> ins;
        for (int k = 0; k < 4; ++k) ins.emplace_back(std::vector<int>{3}, random_state(rng, 3));
        auto gg = GeneralisedMeasurementSet::make(parent, QuantumInputSet::make(3, ins));
        HermitianOperator rr({2, 2}, random_state(rng, 4));
        auto aa = teleportation_assemblage(gg, rr);
        CHECK(aa.validate().ok());
    }
}

TEST_CASE("buscemi behaviour") {
    Rng rng(321);

    // separable state, trivial single-outcome POVMs on both sides: p = 1
    Povm trivial_a{4, {HermitianOperator::identity({2, 2})}};
    Povm trivial_b{4, {HermitianOperator::identity({2, 2})}};
    auto ins = default_tomographic_inputs(2);
    auto ga = GeneralisedMeasurementSet::make(trivial_a, ins);
    auto gb = GeneralisedMeasurementSet::make(trivial_b, ins);
    Matrix ra = random_state(rng, 2), rb = random_state(rng, 2);
    HermitianOperator rho({2, 2}, kron_matrix(ra, rb));
    auto beh = buscemi_behaviour(ga, gb, rho);
    CHECK(beh.validate().ok());
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y) CHECK(beh.p(0, 0, x, y) == doctest::Approx(1.0));

    // phi_+ with Bell measurements both sides, Pauli-eigenstate inputs;
    // cross-checked against an independent full 16-dim tensor contraction.
    auto us = heisenberg_weyl(2);
    std::vector<HermitianOperator> bell;
    for (const auto& u : us) {
        Matrix iu = kron_matrix(Matrix::Identity(2, 2), u);
        bell.emplace_back(std::vector<int>{2, 2}, Matrix(iu * max_entangled(2).matrix() * iu.adjoint()));
    }
    Povm bell_povm{4, bell};
    auto gba = GeneralisedMeasurementSet::make(bell_povm, ins);
    auto gbb = GeneralisedMeasurementSet::make(bell_povm, ins);
    auto beh2 = buscemi_behaviour(gba, gbb, max_entangled(2));
    CHECK(beh2.validate().ok());
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    // independent contraction on (A', A, B, B') with Bob's parent reordered by hand
                    Matrix nb = permute_systems(bell[b].matrix(), {2, 2}, {1, 0});
                    Matrix op = kron_matrix(bell[a].matrix(), nb);
                    Matrix st = kron_matrix(ins.states[x].matrix(),
                                            kron_matrix(max_entangled(2).matrix(), ins.states[y].matrix()));
                    CHECK(beh2.p(a, b, x, y) == doctest::Approx((op * st).trace().real()).epsilon(1e-12));
                }

    // Bob's marginal independent of x on seeded instances
    for (int t = 0; t < 3; ++t) {
        std::vector<HermitianOperator> pa, pb;
        for (auto& e : random_povm(rng, 4, 3)) pa.emplace_back(std::vector<int>{2, 2}, e);
        for (auto& e : random_povm(rng, 4, 2)) pb.emplace_back(std::vector<int>{2, 2}, e);
        auto gga = GeneralisedMeasurementSet::make(Povm{4, pa}, ins);
        auto ggb = GeneralisedMeasurementSet::make(Povm{4, pb}, ins);
        HermitianOperator rr({2, 2}, random_state(rng, 4));
        auto bb = buscemi_behaviour(gga, ggb, rr);
        CHECK(bb.validate().ok());
    }
}

TEST_CASE("distributed povm") {
    Rng rng(55);

    // trivial POVMs: M_11 = I
    Povm ta{4, {HermitianOperator::identity({2, 2})}};
    Povm tb{4, {HermitianOperator::identity({2, 2})}};
    HermitianOperator rho({2, 2}, random_state(rng, 4));
    auto dp = distributed_povm(ta, tb, rho);
    CHECK((dp.elements[0][0].matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

    // seeded random triple: positivity and completeness
    for (int t = 0; t < 5; ++t) {
        std::vector<HermitianOperator> pa, pb;
        for (auto& e : random_povm(rng, 4, 2 + t % 3)) pa.emplace_back(std::vector<int>{2, 2}, e);
        for (auto& e : random_povm(rng, 4, 2)) pb.emplace_back(std::vector<int>{2, 2}, e);
        HermitianOperator rr({2, 2}, random_state(rng, 4));
        auto d2 = distributed_povm(Povm{4, pa}, Povm{4, pb}, rr);
        auto v = d2.validate();
        CHECK(v.ok());
    }

    // composition against the Choi route: M_ab matches
    // d * (linear_map_apply(J_a, M_b))^{T_V'} after the V' relabeling.
    std::vector<HermitianOperator> pa;
    for (auto& e : random_povm(rng, 4, 2)) pa.emplace_back(std::vector<int>{2, 2}, e);
    Povm ma{4, pa};
    auto us = heisenberg_weyl(2);
    std::vector<HermitianOperator> bell;
    for (const auto& u : us) {
        Matrix iu = kron_matrix(Matrix::Identity(2, 2), u);
        bell.emplace_back(std::vector<int>{2, 2}, Matrix(iu * max_entangled(2).matrix() * iu.adjoint()));
    }
    Povm mb{4, bell};
    HermitianOperator rho2({2, 2}, random_state(rng, 4));
    auto dp2 = distributed_povm(ma, mb, rho2);
    auto js = choi_teleportation(pa, rho2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 4; ++b) {
            auto mapped = linear_map_apply(js[a], bell[b]);
            Matrix expect = 2.0 * partial_transpose(mapped.matrix(), {2, 2}, 0);
            CHECK((dp2.elements[a][b].matrix() - expect).cwiseAbs().maxCoeff() < 1e-10);
        }
}

TEST_CASE("default tomographic inputs") {
    auto s2 = default_tomographic_inputs(2);
    CHECK(s2.count() == 6);
    CHECK(s2.tomographically_complete);

    auto s3 = default_tomographic_inputs(3);
    CHECK(s3.count() == 9);
    CHECK(s3.tomographically_complete);

    CHECK_THROWS_AS(default_tomographic_inputs(1), domain_error);

    // dropping one of four linearly independent qubit states loses completeness
    std::vector<HermitianOperator> three(s2.states.begin(), s2.states.begin() + 3);
    auto partial = QuantumInputSet::make(2, three);
    CHECK_FALSE(partial.tomographically_complete);
}

TEST_CASE("behaviour validation flags signalling") {
    Behaviour beh;
    beh.table = {{{{0.5, 0.0}, {0.0, 0.5}}, {{0.5, 0.0}, {0.0, 0.5}}},
                 {{{0.5, 0.0}, {0.0, 0.5}}, {{0.9, 0.0}, {0.0, 0.1}}}};
    auto v = beh.validate();
    CHECK(!v.ok()); // B-marginal depends on x at y=1
}
