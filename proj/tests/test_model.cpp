#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "trspec/model.hpp"

using namespace trspec;

namespace {

ModelSpec two_species(double b11, double b12, double b21, double b22, double v1, double v2) {
    ModelSpec s;
    s.d = 1;
    s.N = 2;
    s.velocities = {{v1}, {v2}};
    s.B = {{b11, b12}, {b21, b22}};
    return validate(std::move(s));
}

ModelSpec goldstein_kac(double lambda, double v) {
    return two_species(-lambda, lambda, lambda, -lambda, v, -v);
}

} // namespace

TEST_CASE("validate: derived quantities and shape checks") {
    ModelSpec s = two_species(-2.0, 3.0, -1.0, -1.0, 0.5, -0.1);
    CHECK(s.norm_B_inf == doctest::Approx(5.0));
    CHECK(s.velocity_gap == doctest::Approx(0.6));

    ModelSpec bad = s;
    bad.B.pop_back();
    CHECK_THROWS_AS(validate(bad), DimensionMismatch);

    bad = s;
    bad.velocities[0] = {0.5, 0.1};
    CHECK_THROWS_AS(validate(bad), DimensionMismatch);

    bad = s;
    bad.L = 0.0;
    CHECK_THROWS_AS(validate(bad), NonPositiveLength);

    bad = s;
    bad.B[1][0] = std::nan("");
    CHECK_THROWS_AS(validate(bad), NonFinite);
}

TEST_CASE("rescale_to_unit_torus: scales velocities and is idempotent") {
    ModelSpec s = two_species(-2.0, 3.0, -1.0, -1.0, 0.5, -0.1);
    s.L = 4.0;
    s = validate(std::move(s));
    ModelSpec r = rescale_to_unit_torus(s);
    CHECK(r.L == 1.0);
    CHECK(r.velocities[0][0] == doctest::Approx(0.125));
    CHECK(r.velocities[1][0] == doctest::Approx(-0.025));
    ModelSpec rr = rescale_to_unit_torus(r);
    CHECK(rr.velocities[0][0] == r.velocities[0][0]);
    CHECK(rr.velocities[1][0] == r.velocities[1][0]);
    CHECK(rr.L == 1.0);
}

TEST_CASE("apply_killing: shifts the diagonal") {
    ModelSpec s = two_species(-2.0, 3.0, -1.0, -1.0, 0.5, -0.1);
    ModelSpec k = apply_killing(s, 0.75);
    CHECK(k.B[0][0] == doctest::Approx(-2.75));
    CHECK(k.B[1][1] == doctest::Approx(-1.75));
    CHECK(k.B[0][1] == s.B[0][1]);
    CHECK_THROWS_AS(apply_killing(s, 0.0), NonPositiveDelta);
    CHECK_THROWS_AS(apply_killing(s, -1.0), NonPositiveDelta);
}

TEST_CASE("positivity_check: reports offending entries 1-based") {
    ModelSpec s = two_species(-2.0, 3.0, -1.0, -1.0, 0.5, -0.1);
    auto rep = positivity_check(s);
    CHECK(!rep.positive);
    REQUIRE(rep.offending.size() == 1);
    CHECK(rep.offending[0] == std::make_pair(2, 1));

    auto ok = positivity_check(goldstein_kac(2.0, 1.0));
    CHECK(ok.positive);
    CHECK(ok.offending.empty());
}

TEST_CASE("conservation_basis: Goldstein-Kac conserves mass") {
    auto rep = conservation_basis(goldstein_kac(2.0, 1.0));
    REQUIRE(rep.basis.size() == 1);
    CHECK(rep.mass_conserving);
    CHECK(std::abs(rep.basis[0][0] - rep.basis[0][1]) < 1e-14);
    CHECK(std::abs(std::abs(rep.basis[0][0]) - 1.0 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("conservation_basis: kernel property on random singular reactions") {
    auto g = oracle::rng(707);
    for (int trial = 0; trial < 30; ++trial) {
        // Rank-one B = x y^T has an (N-1)-dimensional kernel of B^T.
        const int n = 3 + static_cast<int>(oracle::uniform(g, 0.0, 2.99));
        std::vector<double> x(n), y(n);
        for (auto& e : x) e = oracle::uniform(g, -3.0, 3.0);
        for (auto& e : y) e = oracle::uniform(g, -3.0, 3.0);
        ModelSpec s;
        s.d = 1;
        s.N = n;
        s.velocities.assign(n, {0.0});
        for (int i = 0; i < n; ++i) s.velocities[i][0] = 0.1 * (i + 1);
        s.B.assign(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s.B[i][j] = x[i] * y[j];
        s = validate(std::move(s));

        auto rep = conservation_basis(s);
        CHECK(static_cast<int>(rep.basis.size()) == n - 1);
        for (const auto& vec : rep.basis) {
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
                double dot = 0.0;
                for (int j = 0; j < n; ++j) dot += s.B[j][i] * vec[j];
                worst = std::max(worst, std::abs(dot));
            }
            CHECK(worst <= 1e-10 * std::max(1.0, s.norm_B_inf));
        }
    }
}

TEST_CASE("conservation_basis: mass conservation tracks zero column sums") {
    auto g = oracle::rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3;
        ModelSpec s;
        s.d = 1;
        s.N = n;
        s.velocities = {{0.1}, {0.2}, {0.3}};
        s.B.assign(n, std::vector<double>(n));
        for (auto& row : s.B)
            for (auto& e : row) e = oracle::uniform(g, -2.0, 2.0);
        for (int j = 0; j < n; ++j) {
            double colsum = 0.0;
            for (int i = 0; i < n; ++i) colsum += s.B[i][j];
            s.B[j][j] -= colsum;
        }
        s = validate(std::move(s));
        CHECK(conservation_basis(s).mass_conserving);

        s.B[0][0] += 0.5;
        s = validate(std::move(s));
        CHECK(!conservation_basis(s).mass_conserving);
    }
}

TEST_CASE("transport_periodicity: closed forms") {
    ModelSpec s;
    s.d = 1;
    s.N = 1;
    s.velocities = {{3.0}};
    s.B = {{0.0}};
    s.velocities_exact = {{Rational::parse("3")}};
    auto rep = transport_periodicity(validate(s));
    CHECK(rep.component_periodic[0]);
    CHECK(rep.component_period[0] == Rational::make(1, 3));
    CHECK(rep.jointly_periodic);
    CHECK(rep.joint_period == Rational::make(1, 3));

    ModelSpec t;
    t.d = 2;
    t.N = 1;
    t.velocities = {{0.25, 0.125}};
    t.B = {{0.0}};
    t.velocities_exact = {{Rational::parse("1/4"), Rational::parse("1/8")}};
    auto rep2 = transport_periodicity(validate(t));
    CHECK(rep2.component_period[0] == Rational::make(8, 1));

    // Two components: periods 1/3 and 2, jointly 2.
    ModelSpec u;
    u.d = 1;
    u.N = 2;
    u.velocities = {{3.0}, {0.5}};
    u.B = {{0.0, 0.0}, {0.0, 0.0}};
    u.velocities_exact = {{Rational::parse("3")}, {Rational::parse("1/2")}};
    auto rep3 = transport_periodicity(validate(u));
    CHECK(rep3.component_period[0] == Rational::make(1, 3));
    CHECK(rep3.component_period[1] == Rational::make(2, 1));
    CHECK(rep3.joint_period == Rational::make(2, 1));
}

TEST_CASE("transport_periodicity: error paths") {
    ModelSpec s = two_species(-1.0, 1.0, 1.0, -1.0, 0.5, -0.5);
    CHECK_THROWS_AS(transport_periodicity(s), IrrationalInputUnsupported);

    s.velocities_exact = {{Rational::parse("1/2")}, {Rational::parse("-1/2")}};
    CHECK_NOTHROW(transport_periodicity(s));

    ModelSpec z;
    z.d = 1;
    z.N = 1;
    z.velocities = {{0.0}};
    z.B = {{0.0}};
    z.velocities_exact = {{Rational::parse("0")}};
    CHECK_THROWS_AS(transport_periodicity(validate(z)), Error);

    CHECK_THROWS_AS(Rational::parse("sqrt2"), IrrationalInputUnsupported);
    CHECK_THROWS_AS(Rational::parse("1/0"), IrrationalInputUnsupported);
}

TEST_CASE("neumann_extend: index-exact reflection") {
    SymmetricBlockModel block;
    block.species = 1;
    block.L = 1.0;
    block.speeds = {1.0};
    block.B1 = {{0.0}};
    block.B2 = {{0.0}};

    const int n = 8;
    GridPair state;
    state.alpha.assign(1, std::vector<double>(n));
    state.beta.assign(1, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) state.alpha[0][i] = (i + 0.5) / n;

    GridPair ext = neumann_extend(block, state);
    REQUIRE(ext.alpha[0].size() == 2 * n);
    for (int i = 0; i < n; ++i) {
        CHECK(ext.alpha[0][i] == state.alpha[0][i]);
        CHECK(ext.alpha[0][n + i] == 0.0);
        CHECK(ext.beta[0][n + i] == state.alpha[0][n - 1 - i]);
    }

    GridPair odd;
    odd.alpha.assign(1, std::vector<double>(7, 0.0));
    odd.beta.assign(1, std::vector<double>(7, 0.0));
    CHECK_THROWS_AS(neumann_extend(block, odd), OddGrid);
}

TEST_CASE("to_periodic_model: block embedding") {
    SymmetricBlockModel block;
    block.species = 2;
    block.L = 0.5;
    block.speeds = {1.0, 2.0};
    block.B1 = {{-1.0, 0.5}, {0.25, -2.0}};
    block.B2 = {{3.0, 4.0}, {5.0, 6.0}};

    ModelSpec s = to_periodic_model(block);
    CHECK(s.N == 4);
    CHECK(s.L == 1.0);
    CHECK(s.velocities[0][0] == 1.0);
    CHECK(s.velocities[1][0] == 2.0);
    CHECK(s.velocities[2][0] == -1.0);
    CHECK(s.velocities[3][0] == -2.0);
    CHECK(s.B[0][0] == -1.0);
    CHECK(s.B[0][2] == 3.0);
    CHECK(s.B[2][0] == 3.0);
    CHECK(s.B[2][2] == -1.0);
    CHECK(s.B[1][3] == 6.0);

    block.speeds[1] = 0.0;
    CHECK_THROWS_AS(to_periodic_model(block), Error);
}

TEST_CASE("model JSON: round trip and schema errors") {
    ModelSpec s = two_species(-2.0, 3.0, -1.0, -1.0, 0.5, -0.1);
    s.velocities_exact = {{Rational::parse("1/2")}, {Rational::parse("-1/10")}};
    s = validate(std::move(s));

    const std::string text = model_to_json_text(s);
    ModelSpec back = model_from_json_text(text);
    CHECK(model_to_json_text(back) == text);
    CHECK(back.N == 2);
    CHECK(back.velocities[1][0] == -0.1);
    CHECK(back.velocities_exact[1][0] == Rational::make(-1, 10));

    CHECK_THROWS_AS(model_from_json_text("{\"d\": 1}"), Error);
    CHECK_THROWS_AS(model_from_json_text("not json"), Error);

    // Flat velocities for d = 1.
    ModelSpec flat = model_from_json_text(
        "{\"d\":1,\"N\":2,\"L\":1.0,\"velocities\":[0.5,-0.1],"
        "\"B\":[[-2.0,3.0],[-1.0,-1.0]]}");
    CHECK(flat.velocities[0][0] == 0.5);
    CHECK(flat.velocity_gap == doctest::Approx(0.6));
}
