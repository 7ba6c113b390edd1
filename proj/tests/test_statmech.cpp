#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "thermogeo/model_config.hpp"
#include "thermogeo/statmech.hpp"

using namespace thermogeo;
using namespace thermogeo::statmech;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

Vector v2(double a, double b) {
    Vector q(2);
    q << a, b;
    return q;
}

/// The same model with the exact expressions removed, so every moment comes from quadrature.
GibbsModel numeric_only(GibbsModel m) {
    m.exact = {};
    return m;
}

} // namespace

TEST_CASE("two-level model moments", "[statmech]") {
    const auto m = numeric_only(two_level());
    for (const double q : {-2.0, -0.3, 0.0, 0.3, 1.5}) {
        CHECK(std::abs(log_partition(m, v1(q)) - std::log(2.0 * std::cosh(q))) < 1e-12);
        CHECK(std::abs(mean_observables(m, v1(q))[0] - std::tanh(q)) < 1e-12);
        const double sech = 1.0 / std::cosh(q);
        CHECK(std::abs(covariance_matrix(m, v1(q))(0, 0) - sech * sech) < 1e-12);
    }
    // q = 0.3: w = ln(2 cosh 0.3), p = tanh 0.3, Hessian = sech^2 0.3
    CHECK(std::abs(log_partition(m, v1(0.3)) - 0.7374880) < 1e-7);
    CHECK(std::abs(mean_observables(m, v1(0.3))[0] - 0.2913126) < 1e-7);
    CHECK(std::abs(induced_metric(m, v1(0.3)).metric(0, 0) - 0.9151369) < 1e-7);
}

TEST_CASE("Gaussian models by quadrature match the closed forms", "[statmech]") {
    const auto gq = gaussian_quadratic();
    const auto gq_num = numeric_only(gq);
    for (const double q : {-3.0, -1.0, -0.5}) {
        CHECK(std::abs(log_partition(gq_num, v1(q)) - gq.exact.log_partition(v1(q))) < 1e-10);
        CHECK(std::abs(mean_observables(gq_num, v1(q))[0] - gq.exact.mean(v1(q))[0]) < 1e-10);
        CHECK(std::abs(covariance_matrix(gq_num, v1(q))(0, 0) - gq.exact.covariance(v1(q))(0, 0)) < 1e-9);
    }
    // q = -1: w = (1/2) ln pi, p = 1/2
    CHECK(std::abs(log_partition(gq_num, v1(-1.0)) - 0.5 * std::log(std::numbers::pi)) < 1e-12);

    const auto g2 = gaussian_two_param();
    const auto g2_num = numeric_only(g2);
    const Vector q = v2(0.8, -1.3);
    CHECK(std::abs(log_partition(g2_num, q) - g2.exact.log_partition(q)) < 1e-10);
    CHECK((mean_observables(g2_num, q) - g2.exact.mean(q)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((covariance_matrix(g2_num, q) - g2.exact.covariance(q)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gradient and Hessian of w give mean and covariance", "[statmech]") {
    const auto m = gaussian_two_param();
    const Vector q = v2(-0.5, -0.8);
    const auto w = [&](const Vector& y) { return log_partition(m, y); };
    CHECK((gradient(w, q) - mean_observables(m, q)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((induced_metric(m, q).metric - covariance_matrix(m, q)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(induced_metric(m, q).ruppeiner_sign == -1);
    CHECK(invertibility_check(m, q).ok);
}

TEST_CASE("relative entropy", "[statmech]") {
    for (const auto& m : {two_level(), gaussian_quadratic(), gaussian_two_param()}) {
        const auto num = numeric_only(m);
        const auto grid = q_grid(m, 5);
        for (const auto& a : grid)
            for (const auto& b : grid) {
                const double kl = relative_entropy(num, a, b);
                CHECK(kl >= -1e-12);
                CHECK(std::abs(kl - relative_entropy_bregman(m, a, b)) < 1e-8);
            }
        CHECK(std::abs(relative_entropy(num, grid[2], grid[2])) < 1e-12);
    }
}

TEST_CASE("relative entropy is quadratic to third order", "[statmech]") {
    const auto m = two_level();
    const Vector q0 = v1(0.3);
    const double r1 = std::abs(kl_quadratic_residual(m, q0, v1(0.1)).residual);
    const double r2 = std::abs(kl_quadratic_residual(m, q0, v1(0.05)).residual);
    CHECK(std::log2(r1 / r2) == Catch::Approx(3.0).margin(0.3));
}

TEST_CASE("equilibrium embeddings", "[statmech]") {
    for (const auto& m : {two_level(), gaussian_two_param()}) {
        const Vector q = q_grid(m, 3)[1];
        const Matrix c = covariance_matrix(m, q);
        CHECK(legendre_pullback_contact(m, q).cwiseAbs().maxCoeff() < 1e-7);
        CHECK((legendre_pullback_metric(m, q) - c).cwiseAbs().maxCoeff() < 1e-8);

        // on (dw, dq): eta (x) eta + sym(dq (x) c dq)
        const Matrix pm = control_pullback_metric(m, q);
        const int n = m.n();
        Vector eta_wq(n + 1);
        eta_wq[0] = 1.0;
        eta_wq.tail(n) = -mean_observables(m, q);
        Matrix expected = eta_wq * eta_wq.transpose();
        expected.block(1, 1, n, n) += c;
        CHECK((pm - expected).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((control_pullback_contact(m, q) - eta_wq).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("second moment of the entropy differential", "[statmech]") {
    const auto m = gaussian_two_param();
    const auto d = entropy_differential(m, v2(0.2, -1.0));
    CHECK(second_moment_identity_residual(d) < 1e-9);
}

TEST_CASE("q outside the domain is rejected", "[statmech]") {
    CHECK_THROWS_AS(log_partition(gaussian_quadratic(), v1(0.5)), DomainError);
    CHECK_THROWS_AS(log_partition(two_level(), v2(0.0, 0.0)), ContractViolation);
    CHECK_THROWS_AS(builtin_model("ising"), ConfigError);
}

TEST_CASE("model definitions from JSON", "[statmech][config]") {
    const auto coin = nlohmann::json::parse(R"({"models": [{
        "name": "coin",
        "space": {"type": "discrete", "points": [-1, 1], "weights": [1, 1]},
        "quadrature": {"kind": "discrete_sum"},
        "observables": ["x"],
        "q_domain": {"lo": [-3], "hi": [3]}}]})");
    const auto models = models_from_json(coin);
    REQUIRE(models.size() == 1);
    CHECK(models[0].name == "coin");
    CHECK(std::abs(log_partition(models[0], v1(0.3)) - std::log(2.0 * std::cosh(0.3))) < 1e-14);

    const auto half = nlohmann::json::parse(R"({
        "name": "half_gaussian",
        "space": {"type": "interval", "lo": 0, "hi": null},
        "quadrature": {"kind": "adaptive_interval", "truncation": 14, "node_count": 10},
        "observables": ["x2"],
        "q_domain": {"lo": [-2], "hi": [-0.5]}})");
    const auto hg = model_from_json(half);
    CHECK(hg.quadrature.node_count == 10);
    // integral over x > 0 of exp(-x^2) = sqrt(pi) / 2
    CHECK(std::abs(log_partition(hg, v1(-1.0)) - std::log(std::sqrt(std::numbers::pi) / 2.0)) < 1e-12);

    auto broken = coin["models"][0];
    SECTION("unknown observable") {
        broken["observables"] = {"x3"};
        CHECK_THROWS_AS(model_from_json(broken), ConfigError);
    }
    SECTION("quadrature does not fit the space") {
        broken["quadrature"]["kind"] = "adaptive_interval";
        CHECK_THROWS_AS(model_from_json(broken), ConfigError);
    }
    SECTION("closed form without exact expressions") {
        broken["quadrature"]["kind"] = "closed_form";
        CHECK_THROWS_AS(model_from_json(broken), ConfigError);
    }
    SECTION("domain dimension mismatch") {
        broken["q_domain"]["lo"] = {-1, -1};
        CHECK_THROWS_AS(model_from_json(broken), ConfigError);
    }
    SECTION("missing key") {
        broken.erase("space");
        CHECK_THROWS_AS(model_from_json(broken), ConfigError);
    }
    SECTION("no models array") { CHECK_THROWS_AS(models_from_json(nlohmann::json::object()), ConfigError); }
    SECTION("unreadable files") {
        CHECK_THROWS_AS(load_models("/nonexistent/models.json"), ConfigError);
        const std::string path = "thermogeo_bad_models.json";
        std::ofstream(path) << "{ not json";
        CHECK_THROWS_AS(load_models(path), ConfigError);
        std::remove(path.c_str());
    }
}
