#include <doctest.h>

#include <cmath>

#include "ando/bounds.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace ando;

namespace {

Matrix jordan(int k) {
    Matrix m = Matrix::Zero(k, k);
    for (int i = 0; i + 1 < k; ++i) m(i, i + 1) = 1.0;
    return m;
}

Matrix diag(std::initializer_list<Complex> values) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (Complex v : values) m(i, i) = v, ++i;
    return m;
}

BivariatePolyMatrix example2_poly(double a, double b, int k, int l) {
    BivariatePoly p = BivariatePoly::monomial(1, 0, a);
    p.add_term(k, l, b);
    return BivariatePolyMatrix::scalar(p);
}

BivariatePolyMatrix zw() { return BivariatePolyMatrix::scalar(BivariatePoly::monomial(1, 1)); }

double direct(const CommutingPair& pair, const BivariatePolyMatrix& p) {
    return operator_norm(eval_bivariate(p, pair.t1[0], pair.t2[0]));
}

std::size_t failures(const BoundReport& r) {
    std::size_t n = 0;
    for (const auto& v : r.verdicts) n += v.status == VerdictStatus::Fail;
    return n;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("nilpotent example: the model bound sees only the linear term") {
    for (int k = 2; k <= 4; ++k) {
        const auto pair = CommutingPair::single(jordan(k), jordan(k));
        for (auto [a, b, l] : {std::tuple{1.0, 1.0, 1}, std::tuple{0.3, 0.7, 2}}) {
            const auto bound = bound_am3(pair, example2_poly(a, b, k, l), 6, 11);
            CHECK(bound.extensions.size() == 7);
            for (const auto& e : bound.extensions) CHECK(std::abs(e.value - a) <= 1e-9);
            CHECK(std::abs(bound.value - a) <= 1e-9);
        }
    }
}

TEST_CASE("nilpotent geometric sum is bounded by the order") {
    for (int k = 2; k <= 4; ++k) {
        const auto pair = CommutingPair::single(jordan(k), jordan(k));
        for (int n : {k, k + 2, 2 * k}) {
            BivariatePoly p;
            for (int j = 0; j <= n; ++j) p.add_term(j, 1, 1.0);
            const auto bound = bound_am3(pair, BivariatePolyMatrix::scalar(p), 4, 5);
            CHECK(bound.value <= k + 1e-9);
        }
    }
}

TEST_CASE("constant polynomials") {
    gen::Rng rng(81);
    const auto pair = gen::commuting_pair(rng, 3);
    const Complex c(0.6, -0.8);
    const auto bound = bound_am3(pair, BivariatePolyMatrix::scalar(BivariatePoly::constant(3.0 * c)), 3, 0);
    CHECK(bound.value == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("both orders") {
    gen::Rng rng(82);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix t = gen::cnu_contraction(rng, rng.integer(1, 4), 0.9);
        const auto pair = CommutingPair::single(t, t);
        BivariatePoly p;
        for (int i = 0; i <= 3; ++i)
            for (int j = i; j <= 3 - i; ++j) {
                const Complex c = rng.cnormal();
                p.add_term(i, j, c);
                if (i != j) p.add_term(j, i, c);
            }
        const auto both = bound_min_both_orders(pair, BivariatePolyMatrix::scalar(p), 4, 3);
        CHECK(std::abs(both.order12.value - both.order21.value) <= 1e-9 * (1.0 + both.value));
    }
    for (int trial = 0; trial < 100; ++trial) {
        const auto pair = gen::commuting_pair(rng, rng.integer(1, 5));
        const auto p = gen::bivariate(rng, 5, 2);
        const auto both = bound_min_both_orders(pair, p, 2, static_cast<std::uint64_t>(trial));
        CHECK(both.value == std::min(both.order12.value, both.order21.value));
        CHECK(both.value >= direct(pair, p) - 1e-7);
    }
}

TEST_CASE("unitary times pure") {
    const auto pair = CommutingPair::single(diag({1.0, -1.0}), diag({0.5, 1.0 / 3.0}));
    const auto b = bound_unitary_pure(pair, zw());
    CHECK(std::abs(b.fine - 0.5) <= 1e-12);
    CHECK(b.coarse >= b.fine - 1e-12);

    gen::Rng rng(83);
    const Matrix t2 = gen::cnu_contraction(rng, 3, 0.8);
    const auto p = gen::bivariate(rng, 4, 2);
    const auto ident = bound_unitary_pure(CommutingPair::single(identity(3), t2), p);
    const auto model = build_model_space(minimal_polynomial(t2).blaschke);
    CHECK(std::abs(ident.fine - operator_norm(eval_bivariate(p, identity(model.shift.rows()), model.shift))) <= 1e-10);

    for (int trial = 0; trial < 20; ++trial) {
        const Matrix c = gen::fit_into(gen::gaussian(rng, 2, 2), 0.8);
        // T2 commutes with T1 = diag(u1, u1) block by block.
        const Matrix q = gen::unitary(rng, 4);
        Matrix t1 = Matrix::Zero(4, 4), t2b = Matrix::Zero(4, 4);
        const Complex l1 = rng.unimodular(), l2 = rng.unimodular();
        t1.topLeftCorner(2, 2) = l1 * identity(2);
        t1.bottomRightCorner(2, 2) = l2 * identity(2);
        t2b.topLeftCorner(2, 2) = c;
        t2b.bottomRightCorner(2, 2) = gen::fit_into(gen::gaussian(rng, 2, 2), 0.7);
        const auto rot = CommutingPair::single(q * t1 * q.adjoint(), q * t2b * q.adjoint());
        const auto poly = gen::bivariate(rng, 4, 2);
        const auto r = bound_unitary_pure(rot, poly);
        CHECK(r.coarse >= r.fine - 1e-9);
        CHECK(r.fine >= direct(rot, poly) - 1e-7);
    }

    Matrix noncomm = Matrix::Zero(2, 2);
    noncomm(0, 1) = 0.5;
    try {
        bound_unitary_pure(CommutingPair{RowContraction::single(diag({1.0, -1.0})), RowContraction::single(noncomm)}, zw());
        FAIL("expected NotCommuting");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotCommuting);
    }
}

TEST_CASE("two unitaries: equality with the direct norm") {
    gen::Rng rng(84);
    const auto p = gen::scalar_poly(rng, 4);
    const auto one = bound_two_unitary_exact(CommutingPair::single(identity(3), identity(3)), BivariatePolyMatrix::scalar(p));
    CHECK(std::abs(one.value - std::abs(p(1.0, 1.0))) <= 1e-12);

    BivariatePoly sum = BivariatePoly::monomial(1, 0);
    sum.add_term(0, 1, 1.0);
    const auto two = bound_two_unitary_exact(CommutingPair::single(diag({1.0, -1.0}), identity(2)), BivariatePolyMatrix::scalar(sum));
    CHECK(std::abs(two.value - 2.0) <= 1e-12);
    CHECK(two.omega.size() == 2);

    for (int trial = 0; trial < 50; ++trial) {
        const auto pair = gen::commuting_unitaries(rng, rng.integer(1, 6));
        const auto poly = BivariatePolyMatrix::scalar(gen::scalar_poly(rng, 5));
        CHECK(std::abs(bound_two_unitary_exact(pair, poly).value - direct(pair, poly)) <= 1e-10);
    }

    Matrix bad = identity(2);
    bad(0, 0) = 0.5;
    CHECK_THROWS_AS(bound_two_unitary_exact(CommutingPair::single(bad, identity(2)), zw()), Error);
}

TEST_CASE("general composite bound") {
    gen::Rng rng(85);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pair = gen::commuting_unitaries(rng, 3);
        const auto p = BivariatePolyMatrix::scalar(gen::scalar_poly(rng, 4));
        const auto g = bound_general(pair, p);
        CHECK(g.blocks[0].has_value());
        CHECK_FALSE(g.blocks[3].has_value());
        CHECK(std::abs(g.value - bound_two_unitary_exact(pair, p).value) <= 1e-10);
    }
    for (int trial = 0; trial < 10; ++trial) {
        const auto pair = gen::commuting_pair(rng, 3, 0.9);
        const auto p = gen::bivariate(rng, 4, 1);
        const auto g = bound_general(pair, p, 3, 4);
        CHECK(g.blocks[3].has_value());
        CHECK(std::abs(g.value - bound_min_both_orders(pair, p, 3, 4).value) <= 1e-12);
    }
    const auto pair = CommutingPair::single(diag({1.0, 0.5}), diag({1.0 / 3.0, Complex(0.0, 0.5)}));
    const auto g = bound_general(pair, zw(), 3, 0);
    CHECK(g.blocks[1].has_value());
    CHECK(g.blocks[3].has_value());
    CHECK(std::abs(*g.blocks[1] - 1.0 / 3.0) <= 1e-10);
    CHECK(*g.blocks[3] >= 0.25 - 1e-7);
    CHECK(g.value >= direct(pair, zw()) - 1e-7);
    CHECK(g.value == std::max(*g.blocks[1], *g.blocks[3]));
}

TEST_CASE("chain report on small fixtures") {
    BoundConfig config;
    config.grid = 512;
    config.extensions = 4;
    {
        const auto zero = CommutingPair::single(Matrix::Zero(1, 1), Matrix::Zero(1, 1));
        const auto r = verify_chain(zero, zw(), config);
        CHECK(r.direct_norm == 0.0);
        REQUIRE(r.am3_order12.has_value());
        CHECK(r.am3_order12->value == 0.0);
        CHECK(r.torus.lo == doctest::Approx(1.0));
        CHECK(r.torus.hi >= 1.0);
        CHECK(r.passed());
    }
    {
        const auto pair = CommutingPair::single(jordan(2), jordan(2));
        const auto r = verify_chain(pair, example2_poly(1.0, 1.0, 2, 1), config);
        REQUIRE(r.am3_order12.has_value());
        CHECK(std::abs(r.am3_order12->value - 1.0) <= 1e-9);
        CHECK(r.direct_norm <= 1.0 + 1e-9);
        CHECK(r.torus.hi >= 2.0);
        CHECK(failures(r) == 0);
        CHECK(r.seeds.size() == static_cast<std::size_t>(config.extensions));
    }
}

TEST_CASE("chain soundness on random pairs") {
    gen::Rng rng(86);
    BoundConfig config;
    config.grid = 256;
    config.extensions = 3;
    for (int trial = 0; trial < 30; ++trial) {
        const auto pair = gen::commuting_pair(rng, rng.integer(1, 5));
        const PairAnalysis analysis(pair, config);
        for (int s = 0; s < 4; ++s) {
            const auto p = gen::bivariate(rng, 5, 2);
            const auto r = analysis.report(p);
            CHECK(failures(r) == 0);
            const auto replay = chain_verdicts(r, config.chain_tol);
            REQUIRE(replay.size() == r.verdicts.size());
            for (std::size_t i = 0; i < replay.size(); ++i) CHECK(replay[i].margin == r.verdicts[i].margin);
        }
    }
}

TEST_CASE("sampling monotonicity and scale covariance") {
    gen::Rng rng(87);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pair = gen::commuting_pair(rng, rng.integer(1, 4));
        const auto p = gen::bivariate(rng, 4, 2);
        const double few = bound_am3(pair, p, 2, 9).value;
        const double many = bound_am3(pair, p, 6, 9).value;
        CHECK(many <= few);
        const Complex c = 2.5 * rng.unimodular();
        const double scaled = bound_am3(pair, p.scaled(c), 2, 9).value;
        CHECK(std::abs(scaled - std::abs(c) * few) <= 1e-10 * (1.0 + scaled));
    }
}

TEST_CASE("parallel and serial sampling agree exactly") {
    gen::Rng rng(88);
    for (int trial = 0; trial < 5; ++trial) {
        const auto pair = gen::commuting_pair(rng, rng.integer(2, 5));
        const auto p = gen::bivariate(rng, 4, 2);
        const auto par = bound_am3(pair, p, 5, 17);
        const auto ser = bound_am3_serial(pair, p, 5, 17);
        REQUIRE(par.extensions.size() == ser.extensions.size());
        for (std::size_t i = 0; i < par.extensions.size(); ++i) CHECK(par.extensions[i].value == ser.extensions[i].value);
        CHECK(par.value == ser.value);
    }
}

TEST_CASE("ill-conditioned bounds are advisory") {
    BoundReport r;
    r.direct_norm = 2.0;
    Am3Bound am3;
    am3.value = 1.0;
    am3.ill_conditioned = true;
    r.am3_order12 = am3;
    r.torus = {3.0, 3.1, 64};
    const auto verdicts = chain_verdicts(r, 1e-7);
    bool saw = false;
    for (const auto& v : verdicts)
        if (v.margin < 0) {
            CHECK(v.status == VerdictStatus::Advisory);
            saw = true;
        }
    CHECK(saw);
    am3.ill_conditioned = false;
    r.am3_order12 = am3;
    bool failed = false;
    for (const auto& v : chain_verdicts(r, 1e-7)) failed = failed || v.status == VerdictStatus::Fail;
    CHECK(failed);
}

}
