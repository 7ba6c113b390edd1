#include <catch_amalgamated.hpp>

#include <cmath>

#include "thermogeo/tps.hpp"

using namespace thermogeo;

namespace {

Vector point(int n, std::uint64_t seed = 3) { return sample_chart_points(n, 1, seed).front().coords(); }

Matrix split_signature(int n) {
    Vector d = Vector::Ones(2 * n + 1);
    d.segment(n + 1, n).setConstant(-1.0);
    return d.asDiagonal();
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

} // namespace

TEST_CASE("canonical frame and coframe are dual", "[tps]") {
    for (int n = 1; n <= 3; ++n) {
        const Vector x = point(n);
        const Matrix pairing = tps::orthonormal_coframe(n).matrix(x) * tps::canonical_frame(n).matrix(x);
        CHECK((pairing - Matrix::Identity(2 * n + 1, 2 * n + 1)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("canonical frame is orthonormal of split signature", "[tps]") {
    for (int n = 1; n <= 3; ++n) {
        const Vector x = point(n, 11);
        const Matrix g = metric_components(tps::metric_at, tps::canonical_frame(n), x).m;
        CHECK((g - split_signature(n)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(matrix_signature(tps::metric_at(x)) == SignatureCount{n + 1, n, 0});
    }
}

TEST_CASE("contact form, Reeb field and d eta", "[tps]") {
    const int n = 2;
    const Vector x = point(n);
    CHECK(tps::contact_form_at(x).dot(tps::reeb_at(x)) == 1.0);

    // d eta = dq^a ^ dp_a
    const Matrix d = exterior_derivative_coordinates(tps::contact_form_at, x);
    Matrix expected = Matrix::Zero(5, 5);
    for (int a = 0; a < n; ++a) {
        expected(1 + a, n + 1 + a) = 1.0;
        expected(n + 1 + a, 1 + a) = -1.0;
    }
    CHECK((d - expected).cwiseAbs().maxCoeff() < 1e-9);

    // on the canonical frame: d eta(e+_a, e-_a) = -2
    const Matrix df = exterior_derivative_at(tps::contact_form_at, tps::canonical_frame(n), x).m;
    for (int a = 1; a <= n; ++a) CHECK(std::abs(df(a, n + a) + 2.0) < 1e-8);
}

TEST_CASE("Heisenberg frame brackets", "[tps]") {
    const int n = 2;
    const Tensor3 sf = structure_functions_at(tps::heisenberg_frame(n), point(n));
    Tensor3 expected(5, Valence{1, 2}, "heisenberg");
    for (int a = 1; a <= n; ++a) {
        expected(0, n + a, a) = 1.0;
        expected(0, a, n + a) = -1.0;
    }
    CHECK(sf.max_abs_diff(expected) < 1e-9);
}

TEST_CASE("Phi from the Reeb field matches the closed form", "[tps]") {
    for (int n = 1; n <= 2; ++n) {
        const auto s = tps::structure(n);
        const Vector x = point(n, 5);
        const Matrix phi = phi_components(s.phi, s.frame, x).m;
        CHECK((phi - tps::phi_canonical_closed_form(n)).cwiseAbs().maxCoeff() < 1e-8);
        const Matrix p2 = phi * phi;
        Matrix expected = Matrix::Identity(2 * n + 1, 2 * n + 1);
        expected(0, 0) = 0.0;
        CHECK((p2 - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("contact volume form", "[tps]") {
    for (int n = 1; n <= 3; ++n) CHECK(std::abs(tps::volume_coefficient_at(point(n)) - factorial(n)) < 1e-9);
}

TEST_CASE("canonical frame needs positive momenta", "[tps]") {
    Vector x = point(1);
    x[2] = -0.5;
    CHECK_THROWS_AS(tps::canonical_frame(1).matrix(x), DomainError);
    CHECK_THROWS_AS(tps::levi_civita_closed_form(x), DomainError);
    x[2] = 0.0;
    CHECK_THROWS_AS(tps::orthonormal_coframe(1).matrix(x), DomainError);
    CHECK_THROWS_AS(tps::structure(0), ContractViolation);
}
