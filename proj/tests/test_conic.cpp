#include <doctest.h>

#include "qres/conic.hpp"
#include "qres/rng.hpp"

using namespace qres;

TEST_CASE("realify examples") {
    CHECK((realify(Matrix::Identity(2, 2)) - RMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

    Matrix y(2, 2);
    y << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(realify(y));
    Eigen::VectorXd ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(1.0));

    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        Matrix h = random_hermitian(rng, 4);
        Eigen::SelfAdjointEigenSolver<RMatrix> er(realify(h));
        CHECK(std::abs(er.eigenvalues().minCoeff() - min_eig(h)) < 1e-12);
        // involution through unrealify
        CHECK((unrealify(realify(h)) - h).cwiseAbs().maxCoeff() < 1e-14);
        // linearity
        Matrix g = random_hermitian(rng, 4);
        CHECK((realify(h) + realify(g) - realify(h + g)).cwiseAbs().maxCoeff() < 1e-13);
        // trace doubles
        CHECK(realify(h).trace() == doctest::Approx(2.0 * h.trace().real()));
    }
    Matrix notherm(2, 2);
    notherm << 1, 2, 3, 4;
    CHECK_THROWS_AS(realify(notherm), validation_error);
}

TEST_CASE("solve: min trace on the simplex") {
    ConicProgram p;
    const int x = p.add_hermitian_var("X", 3);
    ScalarExpr norm;
    norm.terms.push_back({x, Matrix::Identity(3, 3)});
    norm.constant = -1.0;
    p.add_scalar_eq(norm, "norm");
    ScalarExpr obj;
    obj.terms.push_back({x, Matrix::Identity(3, 3)});
    p.minimize(obj);

    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.primal_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.diagnostics.gap < 1e-7);
    CHECK(sol.diagnostics.primal_residual < 1e-8);
    CHECK(sol.diagnostics.dual_residual < 1e-8);

    // dual multiplier of the trace constraint is 1
    auto w = extract_dual_witness(p, sol, "norm");
    REQUIRE(w.size() == 1);
    CHECK(w[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solve: max <C, X> over the density matrices is the top eigenvalue") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 2 + trial % 3;
        Matrix c = random_hermitian(rng, n);
        ConicProgram p;
        const int x = p.add_hermitian_var("X", n);
        ScalarExpr norm;
        norm.terms.push_back({x, Matrix::Identity(n, n)});
        norm.constant = -1.0;
        p.add_scalar_eq(norm, "norm");
        ScalarExpr obj;
        obj.terms.push_back({x, c});
        p.maximize(obj);
        auto sol = solve(p);
        REQUIRE(sol.status == SolveStatus::optimal);
        Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
        CHECK(sol.primal_value == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-7));
    }
}

TEST_CASE("solve: X psd with X = -I is infeasible") {
    ConicProgram p;
    const int x = p.add_hermitian_var("X", 2);
    OpExpr e(2);
    e.terms.push_back(term_scale(x, 1.0));
    e.constant = Matrix::Identity(2, 2); // X + I == 0
    p.add_op_eq(e, "pin");
    ScalarExpr obj;
    obj.terms.push_back({x, Matrix::Identity(2, 2)});
    p.minimize(obj);
    auto sol = solve(p);
    CHECK(sol.status == SolveStatus::infeasible);
    CHECK_THROWS_AS(extract_dual_witness(p, sol, "pin"), solver_error);
}

TEST_CASE("solve: smallest eigenvalue via scalar coupling") {
    Rng rng(23);
    Matrix c = random_hermitian(rng, 4);
    ConicProgram p;
    const int s = p.add_hermitian_var("S", 4);
    const int t = p.add_scalar_var("t"); // t >= 0; shift C so the optimum is interior
    const double shift = 10.0;
    // S + t I - (C + shift I) == 0  =>  t = lambda_min(C) + shift at optimum
    OpExpr e(4);
    e.terms.push_back(term_scale(s, 1.0));
    e.terms.push_back(term_scalar_times(t, Matrix::Identity(4, 4)));
    e.constant = -(c + shift * Matrix::Identity(4, 4));
    p.add_op_eq(e, "link");
    ScalarExpr obj;
    obj.terms.push_back({t, Matrix::Identity(1, 1)});
    p.maximize(obj);
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.primal_value == doctest::Approx(min_eig(c) + shift).epsilon(1e-7));
}

TEST_CASE("solve determinism") {
    Rng rng(29);
    Matrix c = random_hermitian(rng, 3);
    auto run = [&] {
        ConicProgram p;
        const int x = p.add_hermitian_var("X", 3);
        ScalarExpr norm;
        norm.terms.push_back({x, Matrix::Identity(3, 3)});
        norm.constant = -1.0;
        p.add_scalar_eq(norm, "norm");
        ScalarExpr obj;
        obj.terms.push_back({x, c});
        p.maximize(obj);
        return solve(p).primal_value;
    };
    CHECK(std::abs(run() - run()) < 1e-12);
}

TEST_CASE("program dump is valid json") {
    ConicProgram p;
    const int x = p.add_hermitian_var("X", 2);
    ScalarExpr norm;
    norm.terms.push_back({x, Matrix::Identity(2, 2)});
    norm.constant = -1.0;
    p.add_scalar_eq(norm, "norm");
    ScalarExpr obj;
    obj.terms.push_back({x, Matrix::Identity(2, 2)});
    p.minimize(obj);
    std::ostringstream os;
    p.dump_json(os);
    CHECK(os.str().find("qres-conic/1") != std::string::npos);
}
