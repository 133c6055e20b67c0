#include <doctest.h>

#include <cmath>

#include "ando/polynomial.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace ando;

namespace {

Matrix scalar(Complex c) {
    Matrix m(1, 1);
    m(0, 0) = c;
    return m;
}

BivariatePoly geometric_z(int n) {
    BivariatePoly p;
    for (int k = 0; k <= n; ++k) p.add_term(k, 0, 1.0);
    return p;
}

}  // namespace

TEST_SUITE("polynomial") {

TEST_CASE("terms merge and reject negative exponents") {
    BivariatePoly p;
    p.add_term(1, 2, 1.0);
    p.add_term(1, 2, Complex(0.0, 1.0));
    CHECK(p.terms().size() == 1);
    CHECK(p.terms().at({1, 2}) == Complex(1.0, 1.0));
    CHECK_THROWS_AS(p.add_term(-1, 0, 1.0), Error);
    CHECK(p.total_degree() == 3);
}

TEST_CASE("evaluation examples") {
    gen::Rng rng(31);
    const auto pair = gen::commuting_pair(rng, 3);
    const Matrix z = eval_bivariate(BivariatePolyMatrix::scalar(BivariatePoly::monomial(1, 0)), pair.t1[0], pair.t2[0]);
    CHECK((z - pair.t1[0]).norm() < 1e-15);
    const Matrix zw = eval_bivariate(BivariatePolyMatrix::scalar(BivariatePoly::monomial(1, 1)), scalar(0.5), scalar(0.4));
    CHECK(std::abs(zw(0, 0) - 0.2) < 1e-15);
}

TEST_CASE("evaluation rejects non-commuting arguments") {
    Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    b(1, 0) = 1.0;
    try {
        eval_bivariate(BivariatePolyMatrix::scalar(BivariatePoly::monomial(1, 1)), a, b);
        FAIL("expected NotCommuting");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotCommuting);
    }
}

TEST_CASE("Horner evaluation agrees with the monomial-sum oracle") {
    gen::Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pair = gen::commuting_pair(rng, 4);
        const auto p = gen::bivariate(rng, 5, 2);
        const Matrix got = eval_bivariate(p, pair.t1[0], pair.t2[0]);
        const Matrix want = oracle::monomial_sum(p, pair.t1[0], pair.t2[0]);
        CHECK((got - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }
}

TEST_CASE("evaluation is a unital homomorphism") {
    gen::Rng rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pair = gen::commuting_pair(rng, rng.integer(1, 5));
        const Matrix& a = pair.t1[0];
        const Matrix& b = pair.t2[0];
        const auto p = gen::scalar_poly(rng, 4), q = gen::scalar_poly(rng, 4);
        auto ev = [&](const BivariatePoly& x) { return eval_bivariate(BivariatePolyMatrix::scalar(x), a, b); };
        CHECK((ev(p * q) - ev(p) * ev(q)).norm() <= 1e-9 * (1.0 + ev(p).norm() * ev(q).norm()));
        CHECK((ev(p + q) - ev(p) - ev(q)).norm() <= 1e-9 * (1.0 + ev(p).norm() + ev(q).norm()));
        CHECK((ev(BivariatePoly::constant(1.0)) - identity(a.rows())).norm() == 0.0);
    }
}

TEST_CASE("free polynomial evaluation") {
    gen::Rng rng(34);
    const auto t1 = RowContraction::make({0.7 * gen::fit_into(gen::gaussian(rng, 3, 3), 0.5), 0.7 * gen::fit_into(gen::gaussian(rng, 3, 3), 0.5)});
    const auto t2 = RowContraction::make({0.3 * identity(3), 0.4 * identity(3)});
    FreePoly p;
    p.terms.push_back({{1}, {2}, 1.0});
    CHECK((eval_free(p, t1, t2) - t1[0] * t2[1]).norm() < 1e-15);
    FreePoly bad;
    bad.terms.push_back({{3}, {}, 1.0});
    try {
        eval_free(bad, t1, t2);
        FAIL("expected InvalidInput");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidInput);
    }
}

TEST_CASE("free and hereditary evaluation agree with term-by-term oracles") {
    gen::Rng rng(35);
    for (int trial = 0; trial < 50; ++trial) {
        const int n1 = rng.integer(1, 3), n2 = rng.integer(1, 2);
        const auto dim = rng.integer(1, 4);
        const auto t1 = gen::row_tuple(rng, n1, dim, 0.9);
        const auto t2 = gen::row_tuple(rng, n2, dim, 0.9);
        auto word = [&](int n) {
            Word w;
            for (int k = rng.integer(0, 3); k > 0; --k) w.push_back(rng.integer(1, n));
            return w;
        };
        FreePoly f;
        HereditaryPoly h;
        Matrix want_f = Matrix::Zero(dim, dim), want_h = Matrix::Zero(dim, dim);
        for (int t = 0; t < 4; ++t) {
            const Word a = word(n1), b = word(n2), s = word(n2), g = word(n1);
            const Complex c = rng.cnormal();
            f.terms.push_back({a, b, c});
            h.terms.push_back({a, b, s, g, c});
            const Matrix ta = oracle::word_product(t1.entries(), a, dim), tb = oracle::word_product(t2.entries(), b, dim);
            want_f += c * ta * tb;
            want_h += c * ta * tb * oracle::word_product(t2.entries(), s, dim).adjoint() *
                      oracle::word_product(t1.entries(), g, dim).adjoint();
        }
        CHECK((eval_free(f, t1, t2) - want_f).norm() <= 1e-10 * (1.0 + want_f.norm()));
        CHECK((eval_hereditary(h, t1, t2) - want_h).norm() <= 1e-10 * (1.0 + want_h.norm()));
    }
}

TEST_CASE("single-variable free polynomials reduce to bivariate evaluation") {
    gen::Rng rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pair = gen::commuting_pair(rng, 3);
        const auto p = gen::scalar_poly(rng, 4);
        const Matrix a = eval_free(FreePoly::from_bivariate(p), pair.t1, pair.t2);
        const Matrix b = eval_bivariate(BivariatePolyMatrix::scalar(p), pair.t1[0], pair.t2[0]);
        CHECK((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
    }
}

TEST_CASE("hereditary examples") {
    const auto t = RowContraction::single(scalar(Complex(0.3, 0.4)));
    HereditaryPoly q;
    q.terms.push_back({{1}, {}, {}, {1}, 1.0});
    CHECK(std::abs(eval_hereditary(q, t, t)(0, 0) - 0.25) < 1e-15);
    HereditaryPoly only_free;
    only_free.terms.push_back({{1}, {1}, {}, {}, 2.0});
    FreePoly f;
    f.terms.push_back({{1}, {1}, 2.0});
    CHECK((eval_hereditary(only_free, t, t) - eval_free(f, t, t)).norm() == 0.0);
}

TEST_CASE("torus bracket examples") {
    for (int n : {1, 3, 6}) {
        const auto b = torus_sup_norm(BivariatePolyMatrix::scalar(geometric_z(n)), 512);
        CHECK(b.lo <= n + 1 + 1e-12);
        CHECK(b.hi >= n + 1);
        CHECK(std::abs(b.lo - (n + 1)) < 1e-9);  // z = 1 is a grid point
    }
    const auto c = torus_sup_norm(BivariatePolyMatrix::scalar(BivariatePoly::constant(Complex(0.0, -2.5))), 16);
    CHECK(c.lo == 2.5);
    CHECK(c.hi == 2.5);
    CHECK_THROWS_AS(torus_sup_norm(BivariatePolyMatrix::scalar(geometric_z(10)), 16), Error);
}

TEST_CASE("torus bracket contains analytically known sups") {
    gen::Rng rng(37);
    for (int trial = 0; trial < 30; ++trial) {
        // |c z^a w^b| = |c| everywhere; (z - w)/2 has sup 1 at z = -w, off-grid for odd grids.
        const int a = rng.integer(0, 6), b = rng.integer(0, 6);
        const Complex c = rng.cnormal();
        const auto mono = torus_sup_norm(BivariatePolyMatrix::scalar(BivariatePoly::monomial(a, b, c)), 4 * (a + b + 1) + rng.integer(0, 9));
        CHECK(mono.lo <= std::abs(c) * (1 + 1e-12));
        CHECK(mono.hi >= std::abs(c) * (1 - 1e-12));
    }
    BivariatePoly diff;
    diff.add_term(1, 0, 0.5);
    diff.add_term(0, 1, -0.5);
    for (int grid : {9, 15, 33}) {
        const auto b = torus_sup_norm(BivariatePolyMatrix::scalar(diff), grid);
        CHECK(b.lo <= 1.0 + 1e-12);
        CHECK(b.hi >= 1.0);
    }
}

TEST_CASE("grid refinement tightens the bracket") {
    gen::Rng rng(38);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = gen::bivariate(rng, 5, 2);
        const auto coarse = torus_sup_norm(p, 256);
        const auto fine = torus_sup_norm(p, 4096);
        CHECK(fine.lo >= coarse.lo - 1e-12 * (1.0 + coarse.lo));  // 256 divides 4096
        CHECK(fine.hi <= coarse.hi + 1e-12 * (1.0 + coarse.hi));
        CHECK(fine.lo <= coarse.hi + 1e-12);
    }
}

TEST_CASE("parallel and serial torus kernels agree exactly") {
    gen::Rng rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = gen::bivariate(rng, 4, 2);
        const auto par = torus_sup_norm(p, 64);
        const auto ser = torus_sup_norm_serial(p, 64);
        CHECK(std::abs(par.lo - ser.lo) <= 1e-13 * (1.0 + ser.lo));
        CHECK(par.grid == ser.grid);
    }
}

TEST_CASE("Fejer smoothing") {
    BivariatePoly p;
    p.add_term(0, 0, 3.0);
    p.add_term(1, 0, 1.0);
    const auto k = fejer_smooth(BivariatePolyMatrix::scalar(p), 9);
    CHECK(k.at(0, 0).terms().at({0, 0}) == Complex(3.0));
    CHECK(std::abs(k.at(0, 0).terms().at({1, 0}) - 0.9) < 1e-15);
    CHECK_THROWS_AS(fejer_smooth(BivariatePolyMatrix::scalar(BivariatePoly::monomial(3, 2)), 4), Error);
}

TEST_CASE("Fejer deviation is bounded by the coefficient sum and decays like 1/m") {
    gen::Rng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        const BivariatePoly p = gen::scalar_poly(rng, 5);
        const int d = std::max(1, p.total_degree());
        double weighted = 0.0;
        for (const auto& [key, c] : p.terms()) weighted += (key.first + key.second) * std::abs(c);
        double previous = std::numeric_limits<double>::infinity();
        for (int m : {d, 4 * d, 16 * d, 64 * d}) {
            const BivariatePoly k = fejer_smooth(BivariatePolyMatrix::scalar(p), m).at(0, 0);
            const BivariatePoly diff = k + p.scaled(-1.0);
            const double dev = oracle::max_torus_abs([&](Complex z, Complex w) { return diff(z, w); }, 64);
            CHECK(dev <= weighted / (m + 1) + 1e-9);
            const double hi = torus_sup_norm(BivariatePolyMatrix::scalar(diff), 64).hi;
            CHECK(hi <= previous + 1e-12);
            previous = hi;
        }
    }
}

}
