#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "thermogeo/numerics.hpp"

using namespace thermogeo;
using Catch::Approx;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (const double d : v) x[k++] = d;
    return x;
}

} // namespace

TEST_CASE("partial derivatives of smooth functions", "[numerics]") {
    const auto f = [](const Vector& x) { return std::sin(x[0]) * std::exp(x[1]); };
    const Vector x = vec({0.7, -0.4});
    const Vector g = gradient(f, x);
    CHECK(std::abs(g[0] - std::cos(0.7) * std::exp(-0.4)) < 1e-10);
    CHECK(std::abs(g[1] - std::sin(0.7) * std::exp(-0.4)) < 1e-10);

    const Matrix h = hessian(f, x);
    CHECK(std::abs(h(0, 0) + std::sin(0.7) * std::exp(-0.4)) < 1e-8);
    CHECK(std::abs(h(0, 1) - std::cos(0.7) * std::exp(-0.4)) < 1e-8);
    CHECK(std::abs(h(0, 1) - h(1, 0)) == 0.0);
}

TEST_CASE("jacobian of a vector field", "[numerics]") {
    const auto f = [](const Vector& x) -> Vector { return vec({x[0] * x[1], x[1] * x[1], std::log(x[0])}); };
    const Matrix j = jacobian(f, vec({2.0, 3.0}));
    REQUIRE(j.rows() == 3);
    REQUIRE(j.cols() == 2);
    Matrix expected(3, 2);
    expected << 3.0, 2.0, 0.0, 6.0, 0.5, 0.0;
    CHECK((j - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Richardson levels raise the convergence order", "[numerics]") {
    const auto f = [](const Vector& x) { return std::exp(x[0]); };
    const Vector x = vec({0.3});
    const double exact = std::exp(0.3);
    const auto err = [&](double h, int levels) {
        return std::abs(directional_derivative(f, x, 0, StepScheme(h, levels)) - exact);
    };
    // error ratio under step halving is 2^order
    const double order1 = std::log2(err(0.1, 1) / err(0.05, 1));
    const double order2 = std::log2(err(0.1, 2) / err(0.05, 2));
    CHECK(order1 == Approx(2.0).margin(0.1));
    CHECK(order2 == Approx(4.0).margin(0.1));
}

TEST_CASE("non-finite evaluations are reported", "[numerics]") {
    const auto f = [](const Vector& x) { return std::log(x[0]); };
    CHECK_THROWS_AS(directional_derivative(f, vec({0.0}), 0), EvaluationError);
    CHECK_THROWS_AS(directional_derivative(f, vec({1.0}), 3), ContractViolation);
    CHECK_THROWS_AS(StepScheme(0.0, 2).validate(), ContractViolation);
}

TEST_CASE("signature counts eigenvalue signs", "[numerics]") {
    const Matrix d = vec({1.0, 2.0, -1.0, -3.0, 0.0}).asDiagonal();
    CHECK(matrix_signature(d) == SignatureCount{2, 2, 1});

    SECTION("invariant under congruence") {
        Matrix p(5, 5);
        p << 1, 2, 0, 0, 1, 0, 1, 3, 0, 0, 0, 0, 1, 4, 0, 1, 0, 0, 1, 2, 0, 0, 1, 0, 1;
        REQUIRE(std::abs(p.determinant()) > 1e-6);
        const Matrix c = p.transpose() * d * p;
        CHECK(matrix_signature(c) == SignatureCount{2, 2, 1});
    }

    CHECK_THROWS_AS(matrix_signature(Matrix::Zero(2, 3)), ContractViolation);
    Matrix skew(2, 2);
    skew << 0, 1, -1, 0;
    CHECK_THROWS_AS(matrix_signature(skew), ContractViolation);
}

TEST_CASE("quadrature over sample spaces", "[numerics]") {
    QuadratureSpec spec;

    SECTION("Gaussian integral on the real line") {
        const double v = integrate(IntervalSpace{}, spec, [](double x) { return std::exp(-x * x); }, {0.0, 1.0});
        CHECK(std::abs(v - std::sqrt(std::numbers::pi)) < 1e-12);
    }

    SECTION("shifted window") {
        const double v = integrate(IntervalSpace{}, spec,
                                   [](double x) { return std::exp(-(x - 5.0) * (x - 5.0) / 2.0); }, {5.0, 1.0});
        CHECK(std::abs(v - std::sqrt(2.0 * std::numbers::pi)) < 1e-12);
    }

    SECTION("finite interval") {
        const double v = integrate(IntervalSpace{0.0, std::numbers::pi}, spec, [](double x) { return std::sin(x); });
        CHECK(std::abs(v - 2.0) < 1e-13);
    }

    SECTION("discrete sum") {
        QuadratureSpec d;
        d.kind = QuadratureKind::discrete_sum;
        const double v = integrate(DiscreteSpace{{-1.0, 1.0, 2.0}, {1.0, 2.0, 0.5}}, d, [](double x) { return x * x; });
        CHECK(v == 5.0);
    }

    SECTION("slow tails are rejected") {
        CHECK_THROWS_AS(integrate(IntervalSpace{}, spec, [](double x) { return 1.0 / (1.0 + x * x); }), TruncationError);
    }

    SECTION("closed form has no integrand rule") {
        QuadratureSpec c;
        c.kind = QuadratureKind::closed_form;
        CHECK_THROWS_AS(integrate(IntervalSpace{}, c, [](double) { return 0.0; }), ContractViolation);
    }
}

TEST_CASE("chart sampling is reproducible", "[numerics]") {
    const auto a = sample_chart_points(2, 50, 7);
    const auto b = sample_chart_points(2, 50, 7);
    const auto c = sample_chart_points(2, 50, 8);
    REQUIRE(a.size() == 50);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].coords() == b[k].coords());
        differs = differs || a[k].coords() != c[k].coords();
        CHECK(a[k].in_positive_p_region());
        CHECK((a[k].p.array() >= 0.2).all());
        CHECK((a[k].p.array() <= 5.0).all());
    }
    CHECK(differs);

    ChartSampling bad;
    bad.p_range = {-1.0, 1.0};
    CHECK_THROWS_AS(sample_chart_points(1, 3, 1, bad), DomainError);
    CHECK_THROWS_AS(sample_chart_points(0, 3, 1), ContractViolation);
}

TEST_CASE("uniform sampler is platform independent", "[numerics]") {
    UniformSampler rng(42);
    std::mt19937_64 ref(42);
    for (int k = 0; k < 10; ++k) {
        const double u = rng.unit();
        CHECK(u == static_cast<double>(ref() >> 11) * 0x1.0p-53);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
