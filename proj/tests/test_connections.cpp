#include <catch_amalgamated.hpp>

#include <cmath>

#include "thermogeo/heisenberg.hpp"
#include "thermogeo/tps.hpp"

using namespace thermogeo;

namespace {

Vector point(int n, std::uint64_t seed = 9) { return sample_chart_points(n, 1, seed).front().coords(); }

Vector reeb_dual(int n) {
    Vector e = Vector::Zero(2 * n + 1);
    e[0] = 1.0;
    return e;
}

} // namespace

TEST_CASE("Koszul Levi-Civita symbols match the closed-form table", "[connections]") {
    for (int n = 1; n <= 3; ++n) {
        const auto s = tps::structure(n);
        for (std::uint64_t seed : {1u, 2u}) {
            const Vector x = point(n, seed);
            const Tensor3 numeric = levi_civita_symbols(s.metric, s.frame, x, s.inner);
            CHECK(numeric.max_abs_diff(tps::levi_civita_closed_form(x)) < 1e-8);
        }
    }
}

TEST_CASE("canonical connection matches the closed-form table", "[connections]") {
    for (int n = 1; n <= 2; ++n) {
        const auto s = tps::structure(n);
        const Vector x = point(n);
        CHECK(canonical_symbols(s, x).max_abs_diff(tps::canonical_closed_form(x)) < 1e-8);
        CHECK(association_fit(s, x).sign == 1);
    }
}

TEST_CASE("Levi-Civita connection is torsion free and metric", "[connections]") {
    const int n = 2;
    const auto s = tps::structure(n);
    const Vector x = point(n);
    const Connection lc = tps::levi_civita_table_connection(n);
    CHECK(torsion_at(lc, x).max_abs() < 1e-8);
    CHECK(parallelism_residuals(s, lc.symbols(x), x).metric < 1e-8);
}

TEST_CASE("canonical connection is flat and parallelizes the structure", "[connections]") {
    for (int n = 1; n <= 2; ++n) {
        const auto s = tps::structure(n);
        const Vector x = point(n, 4);
        const Connection c = tps::canonical_table_connection(n);
        CHECK(riemann_at(c, x).max_abs() < 1e-6);
        const auto par = parallelism_residuals(s, c.symbols(x), x);
        CHECK(par.eta < 1e-6);
        CHECK(par.xi < 1e-6);
        CHECK(par.phi < 1e-6);
        CHECK(par.metric < 1e-6);
    }
}

TEST_CASE("Levi-Civita curvature is eta-Einstein", "[connections]") {
    for (int n = 1; n <= 3; ++n) {
        const auto s = tps::structure(n);
        const Vector x = point(n, 6);
        const Tensor4 r = riemann_at(tps::levi_civita_table_connection(n), x);
        const Matrix ric = ricci_from(r);
        const Matrix g = metric_components(s.metric, s.frame, x).m;
        const auto fit = eta_einstein_fit(ric, g, reeb_dual(n));
        CHECK(std::abs(fit.lambda + (2.0 * n + 2.0)) < 1e-6);
        CHECK(std::abs(fit.nu - 2.0) < 1e-6);
        CHECK(fit.residual < 1e-6);
        CHECK(std::abs(scalar_curvature(ric, g) - 2.0 * n) < 1e-6);
        CHECK(riemann_antisymmetry_residual(r) < 1e-8);
        CHECK(first_bianchi_residual(r) < 1e-6);
    }
}

TEST_CASE("frame Nijenhuis tensor agrees with coordinate brackets", "[connections]") {
    const int n = 1;
    const auto s = tps::structure(n);
    const Vector x = point(n, 12);
    const Tensor3 nf = nijenhuis_at(s, x);
    const Matrix e = s.frame.matrix(x);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Vector coord = nijenhuis_from_brackets(s, s.frame.field(i), s.frame.field(j), x);
            Vector frame_comp(3);
            for (int k = 0; k < 3; ++k) frame_comp[k] = nf(k, i, j);
            CHECK((e * frame_comp - coord).cwiseAbs().maxCoeff() < 1e-6);
        }
}

TEST_CASE("normality: N_Phi has only the d eta (x) xi part", "[connections]") {
    for (int n = 1; n <= 2; ++n) {
        const auto s = tps::structure(n);
        const auto r = normality_residual(s, point(n));
        CHECK(r.vertical_law < 1e-7);
        CHECK(r.horizontal < 1e-8);
    }
}

TEST_CASE("Reeb field is Killing", "[connections]") {
    const auto s = tps::structure(2);
    const auto k = killing_and_h_check(s, point(2));
    CHECK(k.lie_metric < 1e-7);
    CHECK(k.h < 1e-7);
    CHECK(k.grad_reeb_vs_phi < 1e-7);
}

TEST_CASE("Heisenberg group structure has the opposite association sign", "[connections]") {
    const auto s = heisenberg::structure(1);
    Vector x(3);
    x << 0.3, -0.7, 1.1;
    CHECK(association_fit(s, x).sign == -1);
    CHECK(association_fit(s, x).residual < 1e-9);
    const Tensor3 c = canonical_symbols(s, x);
    CHECK(torsion_from(c, structure_functions_at(s.frame, x, s.inner)).frame() == s.frame.tag);
}

TEST_CASE("frame tags must agree", "[connections]") {
    const Vector x = point(1);
    const Tensor3 a = tps::levi_civita_closed_form(x);
    const Tensor3 b(3, Valence{1, 2}, "coordinate");
    CHECK_THROWS_AS(a.max_abs_diff(b), ContractViolation);
    CHECK_THROWS_AS(Tensor3(3, Valence{2, 2}, "x"), ContractViolation);
}
