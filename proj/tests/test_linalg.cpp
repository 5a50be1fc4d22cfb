#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "trspec/linalg.hpp"

using namespace trspec;

namespace {

ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    ComplexMatrix m(static_cast<int>(rows.size()),
                    static_cast<int>(rows.begin()->size()));
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (const auto& e : row) m.at(i, j++) = e;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("eigenvalues: closed-form inputs") {
    auto id3 = eigenvalues(ComplexMatrix::identity(3));
    for (const auto& v : id3.values) CHECK(std::abs(v - cplx(1.0)) < 1e-14);
    for (double r : id3.residuals) CHECK(r < 1e-12);

    auto nilp = eigenvalues(from_rows({{0.0, 1.0}, {0.0, 0.0}}));
    for (const auto& v : nilp.values) CHECK(std::abs(v) < 1e-12);

    ComplexMatrix d(3, 3);
    d.at(0, 0) = 1.0;
    d.at(1, 1) = 2.0;
    d.at(2, 2) = 3.0;
    auto dv = eigenvalues(d);
    CHECK(oracle::multiset_distance(dv.values, {1.0, 2.0, 3.0}) < 1e-13);

    auto rot = eigenvalues(from_rows({{0.0, 1.0}, {-1.0, 0.0}}));
    CHECK(oracle::multiset_distance(rot.values, {cplx(0, 1), cplx(0, -1)}) < 1e-14);
}

TEST_CASE("eigenvalues: random matrices against root-finder oracle") {
    auto g = oracle::rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        ComplexMatrix m = oracle::random_complex_matrix(g, 4, 5.0);
        EigenSet es = eigenvalues(m);

        auto roots = oracle::durand_kerner(char_poly(m));
        CHECK(oracle::multiset_distance(es.values, roots) < 1e-8);

        const double scale = frobenius_norm(m);
        for (double r : es.residuals) CHECK(r <= 1e-10 * scale);

        cplx sum = 0.0, prod = 1.0;
        for (const auto& v : es.values) {
            sum += v;
            prod *= v;
        }
        const cplx tr = trace(m);
        CHECK(std::abs(sum - tr) <= 1e-10 * (1.0 + std::abs(tr)));
        const cplx dt = det(m);
        CHECK(std::abs(prod - dt) <= 1e-10 * (1.0 + std::abs(dt)));
    }
}

TEST_CASE("eigenvalues: Hermitian inputs give real values") {
    auto g = oracle::rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m = oracle::random_complex_matrix(g, 5, 3.0);
        for (int i = 0; i < 5; ++i) {
            m.at(i, i) = cplx(m.at(i, i).real(), 0.0);
            for (int j = i + 1; j < 5; ++j) m.at(j, i) = std::conj(m.at(i, j));
        }
        EigenSet es = eigenvalues(m);
        for (const auto& v : es.values)
            CHECK(std::abs(v.imag()) <= 1e-9 * (1.0 + frobenius_norm(m)));
    }
}

TEST_CASE("eigenvalues: input checking") {
    CHECK_THROWS_AS(eigenvalues(ComplexMatrix(2, 3)), NonSquare);
    ComplexMatrix bad = ComplexMatrix::identity(2);
    bad.at(0, 1) = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(eigenvalues(bad), NonFinite);
}

TEST_CASE("expm: closed-form inputs") {
    ComplexMatrix z(3, 3);
    ComplexMatrix ez = expm(z, 1.7);
    CHECK(frobenius_norm(ez - ComplexMatrix::identity(3)) == 0.0);

    ComplexMatrix d(2, 2);
    d.at(0, 0) = cplx(-1.0, 2.0);
    d.at(1, 1) = cplx(0.5, -0.3);
    const double t = 1.3;
    ComplexMatrix ed = expm(d, t);
    CHECK(std::abs(ed.at(0, 0) - std::exp(t * d.at(0, 0))) < 1e-14 * std::abs(ed.at(0, 0)));
    CHECK(std::abs(ed.at(1, 1) - std::exp(t * d.at(1, 1))) < 1e-14 * std::abs(ed.at(1, 1)));
    CHECK(std::abs(ed.at(0, 1)) == 0.0);

    ComplexMatrix nilp = from_rows({{0.0, 1.0}, {0.0, 0.0}});
    ComplexMatrix en = expm(nilp, 1.0);
    CHECK(std::abs(en.at(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(en.at(0, 1) - 1.0) < 1e-15);
    CHECK(std::abs(en.at(1, 0)) < 1e-15);
    CHECK(std::abs(en.at(1, 1) - 1.0) < 1e-15);

    ComplexMatrix rot = from_rows({{0.0, 1.0}, {-1.0, 0.0}});
    ComplexMatrix er = expm(rot, std::acos(-1.0) / 2.0);
    CHECK(std::abs(er.at(0, 0)) < 1e-14);
    CHECK(std::abs(er.at(0, 1) - 1.0) < 1e-14);
    CHECK(std::abs(er.at(1, 0) + 1.0) < 1e-14);
    CHECK(std::abs(er.at(1, 1)) < 1e-14);
}

TEST_CASE("expm: agrees with step-doubled series oracle") {
    auto g = oracle::rng(303);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(oracle::uniform(g, 0.0, 3.99));
        ComplexMatrix m = oracle::random_complex_matrix(g, n, 2.0);
        const double t = oracle::uniform(g, 0.1, 20.0 / (inf_norm(m) + 1e-12));
        ComplexMatrix mine = expm(m, t);
        ComplexMatrix ref = oracle::expm_series(m, t);
        CHECK(frobenius_norm(mine - ref) <= 1e-10 * frobenius_norm(ref));
    }
}

TEST_CASE("expm: group law") {
    auto g = oracle::rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m = oracle::random_complex_matrix(g, 4, 1.5);
        const double s = oracle::uniform(g, 0.0, 2.0);
        const double t = oracle::uniform(g, 0.0, 2.0);
        ComplexMatrix whole = expm(m, s + t);
        ComplexMatrix split = expm(m, s) * expm(m, t);
        CHECK(frobenius_norm(whole - split) <= 1e-9 * frobenius_norm(whole));
    }
}

TEST_CASE("expm: spectral mapping") {
    auto g = oracle::rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m = oracle::random_complex_matrix(g, 4, 1.0);
        const double t = oracle::uniform(g, 0.2, 2.0);
        auto lam = eigenvalues(m).values;
        std::vector<cplx> mapped;
        for (const auto& v : lam) mapped.push_back(std::exp(t * v));
        auto direct = eigenvalues(expm(m, t)).values;
        CHECK(oracle::multiset_distance(mapped, direct) < 1e-8);
    }
}

TEST_CASE("char_poly: closed forms and errors") {
    auto c1 = char_poly(ComplexMatrix::identity(2));
    REQUIRE(c1.size() == 3);
    CHECK(c1[0] == cplx(1.0));
    CHECK(c1[1] == cplx(-2.0));
    CHECK(c1[2] == cplx(1.0));

    auto c2 = char_poly(from_rows({{0.0, 1.0}, {-1.0, 0.0}}));
    CHECK(c2[1] == cplx(0.0));
    CHECK(c2[2] == cplx(1.0));

    auto c3 = char_poly(from_rows({{-1.0, 1.0}, {1.0, -1.0}}));
    CHECK(c3[1] == cplx(2.0));
    CHECK(c3[2] == cplx(0.0));

    CHECK_THROWS_AS(char_poly(ComplexMatrix::identity(9)), OrderTooLarge);
    CHECK_THROWS_AS(char_poly(ComplexMatrix(2, 3)), NonSquare);
}

TEST_CASE("char_poly: roots reproduce the spectrum") {
    auto g = oracle::rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m = oracle::random_complex_matrix(g, 5, 2.0);
        auto roots = oracle::durand_kerner(char_poly(m));
        auto vals = eigenvalues(m).values;
        CHECK(oracle::multiset_distance(roots, vals) < 1e-8);
    }
}
