#include <catch_amalgamated.hpp>

#include <cmath>

#include "thermogeo/heisenberg.hpp"

using namespace thermogeo;
using namespace thermogeo::heisenberg;

namespace {

GroupElement el(double u, double v, double t) { return {Vector::Constant(1, u), Vector::Constant(1, v), t}; }

} // namespace

TEST_CASE("group axioms hold for both twists", "[heisenberg]") {
    for (int n = 1; n <= 3; ++n) {
        const auto g = sample_elements(n, 60, 17);
        const GroupElement e = GroupElement::identity(n);
        for (const double twist : {kFrameCompatibleTwist, kPrintedTwist})
            for (std::size_t k = 0; k + 2 < g.size(); k += 3) {
                const auto &a = g[k], &b = g[k + 1], &c = g[k + 2];
                CHECK(distance_max(multiply(e, a, twist), a) == 0.0);
                CHECK(distance_max(multiply(a, inverse(a), twist), e) <= 1e-12);
                CHECK(distance_max(multiply(inverse(a), a, twist), e) <= 1e-12);
                CHECK(distance_max(multiply(multiply(a, b, twist), c, twist), multiply(a, multiply(b, c, twist), twist)) <=
                      1e-12);
            }
    }
}

TEST_CASE("worked examples of the twist -1 law", "[heisenberg]") {
    CHECK(distance_max(multiply(el(1, 0, 0), el(0, 1, 0), kPrintedTwist), el(1, 1, -1)) == 0.0);
    CHECK(distance_max(inverse(el(1, 2, 3)), el(-1, -2, -3)) == 0.0);
    // the group is not abelian
    CHECK(distance_max(multiply(el(0, 1, 0), el(1, 0, 0), kPrintedTwist), el(1, 1, 1)) == 0.0);
}

TEST_CASE("the frame is left-invariant only for the compatible twist", "[heisenberg]") {
    for (const auto& g : sample_elements(2, 5, 3)) {
        CHECK(left_invariance_residual(g) < 1e-9);
        CHECK(left_invariance_residual(g, kPrintedTwist) > 1e-3);
    }
}

TEST_CASE("frame brackets and contact form", "[heisenberg]") {
    const int n = 2;
    const auto s = structure(n);
    const Vector x = sample_elements(n, 1, 5).front().coords();
    const Tensor3 sf = structure_functions_at(s.frame, x, s.inner);
    for (int k = 1; k <= n; ++k) CHECK(std::abs(sf(0, k, n + k) - 2.0) < 1e-10);

    Vector dual = Vector::Zero(5);
    dual[0] = 1.0;
    CHECK((form_on_frame(s.eta, s.frame)(x) - dual).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(matrix_signature(s.metric(x)) == SignatureCount{n + 1, n, 0});

    const Matrix p = phi_components(s.phi, s.frame, x).m;
    CHECK((p - phi_frame(n)).cwiseAbs().maxCoeff() < 1e-12);

    const double vol = contact_volume_coefficient(s.eta(x), exterior_derivative_coordinates(s.eta, x, s.inner));
    CHECK(std::abs(vol - 0.5 * 4.0 * 2.0) < 1e-10);
}

TEST_CASE("canonical connection of the group is flat", "[heisenberg]") {
    const auto s = structure(1);
    const Vector x = sample_elements(1, 1, 8).front().coords();
    const Connection c = canonical_connection(s);
    CHECK(riemann_at(c, x).max_abs() < 1e-8);
    CHECK(normality_residual(s, x).vertical_law < 1e-8);
}

TEST_CASE("malformed group elements", "[heisenberg]") {
    CHECK_THROWS_AS(GroupElement(Vector::Zero(1), Vector::Zero(2), 0.0), ContractViolation);
    CHECK_THROWS_AS(GroupElement(Vector::Zero(1), Vector::Zero(1), std::nan("")), DomainError);
    CHECK_THROWS_AS(multiply(GroupElement::identity(1), GroupElement::identity(2)), ContractViolation);
}
