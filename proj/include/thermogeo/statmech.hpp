#pragma once

// Gibbs models rho(x; q) = exp(q^a F_a(x) - w(q)) over explicit sample spaces:
// free entropy w, moments, Fisher-Rao metrics, relative entropy, and the
// embeddings of the control and equilibrium manifolds into the phase space.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "thermogeo/chart_point.hpp"
#include "thermogeo/errors.hpp"
#include "thermogeo/numerics.hpp"
#include "thermogeo/tps.hpp"

namespace thermogeo::statmech {

/// Polynomial observable c0 + c1 x + c2 x^2 from a fixed catalog.
struct Observable {
    std::string name;
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    double operator()(double x) const { return c0 + x * (c1 + x * c2); }
};

inline std::vector<std::string> observable_catalog() { return {"x", "x2"}; }

inline Observable observable_from_catalog(const std::string& name) {
    if (name == "x") return {"x", 0.0, 1.0, 0.0};
    if (name == "x2") return {"x2", 0.0, 0.0, 1.0};
    throw ConfigError("unknown observable '" + name + "' (catalog: x, x2)");
}

/// Closed box lo <= q <= hi, componentwise.
struct Box {
    Vector lo;
    Vector hi;

    [[nodiscard]] bool contains(const Vector& q) const {
        return q.size() == lo.size() && (q.array() >= lo.array()).all() && (q.array() <= hi.array()).all();
    }
};

/// Exact expressions for a model, used as oracles and by closed_form quadrature.
struct ClosedForms {
    std::function<double(const Vector&)> log_partition;
    std::function<Vector(const Vector&)> mean;
    std::function<Matrix(const Vector&)> covariance;

    [[nodiscard]] bool complete() const { return log_partition && mean && covariance; }
};

struct GibbsModel {
    std::string name;
    SampleSpace space;
    QuadratureSpec quadrature;
    std::vector<Observable> observables;
    Box q_domain;
    ClosedForms exact;

    [[nodiscard]] int n() const { return static_cast<int>(observables.size()); }

    void validate() const {
        if (observables.empty()) throw ConfigError("model '" + name + "': at least one observable is required");
        if (q_domain.lo.size() != n() || q_domain.hi.size() != n())
            throw ConfigError("model '" + name + "': q_domain must have one interval per observable");
        if (!(q_domain.hi.array() >= q_domain.lo.array()).all())
            throw ConfigError("model '" + name + "': q_domain has an empty interval");
        if (quadrature.kind == QuadratureKind::closed_form && !exact.complete())
            throw ConfigError("model '" + name + "': closed_form quadrature needs exact expressions");
        if (const auto* d = std::get_if<DiscreteSpace>(&space)) {
            if (d->points.empty() || d->points.size() != d->weights.size())
                throw ConfigError("model '" + name + "': discrete space needs matching, non-empty points and weights");
            if (quadrature.kind == QuadratureKind::adaptive_interval)
                throw ConfigError("model '" + name + "': adaptive_interval quadrature on a discrete space");
        } else {
            const auto& iv = std::get<IntervalSpace>(space);
            if (!(iv.hi > iv.lo)) throw ConfigError("model '" + name + "': empty interval");
            if (quadrature.kind == QuadratureKind::discrete_sum)
                throw ConfigError("model '" + name + "': discrete_sum quadrature on an interval space");
        }
        try {
            quadrature.validate();
        } catch (const ContractViolation& e) {
            throw ConfigError("model '" + name + "': " + e.what());
        }
    }
};

namespace detail {

inline void require_in_domain(const GibbsModel& m, const Vector& q) {
    if (q.size() != m.n()) throw ContractViolation("model '" + m.name + "': q has the wrong dimension");
    if (!q.allFinite() || !m.q_domain.contains(q))
        throw DomainError("model '" + m.name + "': q lies outside the admissible q-domain");
}

/// q^a F_a(x) = a x^2 + b x + c.
struct Exponent {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    [[nodiscard]] double operator()(double x) const { return c + x * (b + x * a); }
};

inline Exponent exponent(const GibbsModel& m, const Vector& q) {
    Exponent e;
    for (int k = 0; k < m.n(); ++k) {
        const auto& f = m.observables[static_cast<std::size_t>(k)];
        e.a += q[k] * f.c2;
        e.b += q[k] * f.c1;
        e.c += q[k] * f.c0;
    }
    return e;
}

/// Integration window and the exponent's maximum over the space; the shift
/// keeps the integrand at most 1 so large q cannot overflow.
struct Placement {
    Window window;
    double shift = 0.0;
};

inline Placement placement(const GibbsModel& m, const Exponent& e) {
    Placement pl;
    if (const auto* d = std::get_if<DiscreteSpace>(&m.space)) {
        pl.shift = -std::numeric_limits<double>::infinity();
        for (const double x : d->points) pl.shift = std::max(pl.shift, e(x));
        return pl;
    }
    const auto& iv = std::get<IntervalSpace>(m.space);
    const bool unbounded = !std::isfinite(iv.lo) || !std::isfinite(iv.hi);
    if (e.a < 0.0) {
        const double center = -e.b / (2.0 * e.a);
        pl.window = {std::clamp(center, iv.lo, iv.hi), std::sqrt(-1.0 / (2.0 * e.a))};
    } else if (unbounded) {
        throw DomainError("model '" + m.name + "': partition function diverges (no Gaussian decay at this q)");
    } else {
        pl.window = {0.5 * (iv.lo + iv.hi), 0.5 * (iv.hi - iv.lo)};
    }
    pl.shift = e(pl.window.center);
    if (std::isfinite(iv.lo)) pl.shift = std::max(pl.shift, e(iv.lo));
    if (std::isfinite(iv.hi)) pl.shift = std::max(pl.shift, e(iv.hi));
    return pl;
}

/// Integral of g(x) exp(q.F(x) - shift) over the space.
inline double shifted_integral(const GibbsModel& m, const Exponent& e, const Placement& pl,
                               const std::function<double(double)>& g) {
    return integrate(m.space, m.quadrature, [&](double x) { return g(x) * std::exp(e(x) - pl.shift); }, pl.window);
}

/// <g> under the normalized Gibbs density at q.
inline double expectation(const GibbsModel& m, const Vector& q, const std::function<double(double)>& g) {
    const Exponent e = exponent(m, q);
    const Placement pl = placement(m, e);
    const double z = shifted_integral(m, e, pl, [](double) { return 1.0; });
    return shifted_integral(m, e, pl, g) / z;
}

} // namespace detail

/// w(q) = ln of the integral of exp(q^a F_a) over the sample space.
inline double log_partition(const GibbsModel& m, const Vector& q) {
    detail::require_in_domain(m, q);
    if (m.quadrature.kind == QuadratureKind::closed_form) return m.exact.log_partition(q);
    const auto e = detail::exponent(m, q);
    const auto pl = detail::placement(m, e);
    const double z = detail::shifted_integral(m, e, pl, [](double) { return 1.0; });
    if (!(z > 0.0)) throw EvaluationError("model '" + m.name + "': non-positive partition function");
    return std::log(z) + pl.shift;
}

/// p_a = <F_a>.
inline Vector mean_observables(const GibbsModel& m, const Vector& q) {
    detail::require_in_domain(m, q);
    if (m.quadrature.kind == QuadratureKind::closed_form) return m.exact.mean(q);
    Vector p(m.n());
    for (int a = 0; a < m.n(); ++a) p[a] = detail::expectation(m, q, m.observables[static_cast<std::size_t>(a)]);
    return p;
}

/// <F_a F_b>.
inline Matrix second_moments(const GibbsModel& m, const Vector& q) {
    detail::require_in_domain(m, q);
    if (m.quadrature.kind == QuadratureKind::closed_form) {
        const Vector p = m.exact.mean(q);
        return m.exact.covariance(q) + p * p.transpose();
    }
    Matrix s(m.n(), m.n());
    for (int a = 0; a < m.n(); ++a)
        for (int b = a; b < m.n(); ++b) {
            const auto& fa = m.observables[static_cast<std::size_t>(a)];
            const auto& fb = m.observables[static_cast<std::size_t>(b)];
            s(a, b) = s(b, a) = detail::expectation(m, q, [&](double x) { return fa(x) * fb(x); });
        }
    return s;
}

/// c_ab = <(F_a - p_a)(F_b - p_b)>, integrated directly (not as a difference of moments).
inline Matrix covariance_matrix(const GibbsModel& m, const Vector& q) {
    detail::require_in_domain(m, q);
    if (m.quadrature.kind == QuadratureKind::closed_form) return m.exact.covariance(q);
    const Vector p = mean_observables(m, q);
    Matrix c(m.n(), m.n());
    for (int a = 0; a < m.n(); ++a)
        for (int b = a; b < m.n(); ++b) {
            const auto& fa = m.observables[static_cast<std::size_t>(a)];
            const auto& fb = m.observables[static_cast<std::size_t>(b)];
            c(a, b) = c(b, a) =
                detail::expectation(m, q, [&](double x) { return (fa(x) - p[a]) * (fb(x) - p[b]); });
        }
    return c;
}

/// Second-moment metric on the (w, q) control manifold:
/// G_ww = 1, G_wq = -p_a, G_qq = c_ab + p_a p_b.
inline Matrix fisher_rao_control_metric(const GibbsModel& m, const Vector& q) {
    const int n = m.n();
    const Vector p = mean_observables(m, q);
    const Matrix c = covariance_matrix(m, q);
    Matrix g(n + 1, n + 1);
    g(0, 0) = 1.0;
    g.block(0, 1, 1, n) = -p.transpose();
    g.block(1, 0, n, 1) = -p;
    g.block(1, 1, n, n) = c + p * p.transpose();
    return g;
}

/// Moments of the microscopic entropy change ds = dw - F_a dq^a over (dw, dq^a).
struct EntropyDifferential {
    Vector first_moment;  ///< <ds> = (1, -p_a)
    Matrix variance_form; ///< Var(ds) restricted to dq: c_ab
    Matrix second_moment; ///< <(ds)^2> from <F_a F_b>
};

inline EntropyDifferential entropy_differential(const GibbsModel& m, const Vector& q) {
    const int n = m.n();
    const Vector p = mean_observables(m, q);
    const Matrix ff = second_moments(m, q);
    EntropyDifferential d;
    d.first_moment = Vector(n + 1);
    d.first_moment[0] = 1.0;
    d.first_moment.tail(n) = -p;
    d.variance_form = covariance_matrix(m, q);
    d.second_moment = Matrix(n + 1, n + 1);
    d.second_moment(0, 0) = 1.0;
    d.second_moment.block(0, 1, 1, n) = -p.transpose();
    d.second_moment.block(1, 0, n, 1) = -p;
    d.second_moment.block(1, 1, n, n) = ff;
    return d;
}

/// <(ds)^2> - (Var(ds) + <ds> (x) <ds>), with Var(ds) embedded in the dq block.
inline double second_moment_identity_residual(const EntropyDifferential& d) {
    const int n = static_cast<int>(d.variance_form.rows());
    Matrix var = Matrix::Zero(n + 1, n + 1);
    var.block(1, 1, n, n) = d.variance_form;
    return (d.second_moment - (var + d.first_moment * d.first_moment.transpose())).cwiseAbs().maxCoeff();
}

/// Kullback-Leibler divergence of the member at q_to from the reference member
/// at q_from, integral of rho_from ln(rho_from / rho_to). Non-negative.
inline double relative_entropy(const GibbsModel& m, const Vector& q_from, const Vector& q_to) {
    const double w_from = log_partition(m, q_from);
    const double w_to = log_partition(m, q_to);
    if (m.quadrature.kind == QuadratureKind::closed_form)
        return w_to - w_from - (q_to - q_from).dot(mean_observables(m, q_from));
    const Vector dq = q_from - q_to;
    const double dw = w_to - w_from;
    // ln(rho_from / rho_to) = (q_from - q_to).F(x) - w_from + w_to
    return detail::expectation(m, q_from, [&](double x) {
        double s = dw;
        for (int a = 0; a < m.n(); ++a) s += dq[a] * m.observables[static_cast<std::size_t>(a)](x);
        return s;
    });
}

/// Bregman form of the same divergence: w(q_to) - w(q_from) - (q_to - q_from).p(q_from).
inline double relative_entropy_bregman(const GibbsModel& m, const Vector& q_from, const Vector& q_to) {
    return log_partition(m, q_to) - log_partition(m, q_from) - (q_to - q_from).dot(mean_observables(m, q_from));
}

struct KlQuadratic {
    double kl = 0.0;
    double quadratic = 0.0; ///< (1/2) delta^T c(q0) delta
    double residual = 0.0;  ///< kl - quadratic, O(|delta|^3)
};

inline KlQuadratic kl_quadratic_residual(const GibbsModel& m, const Vector& q0, const Vector& delta) {
    KlQuadratic r;
    r.kl = relative_entropy(m, q0, q0 + delta);
    r.quadratic = 0.5 * delta.dot(covariance_matrix(m, q0) * delta);
    r.residual = r.kl - r.quadratic;
    return r;
}

/// Image (w(q), q, p(q)) of the equilibrium manifold in the phase-space chart.
inline Vector legendre_embed(const GibbsModel& m, const Vector& q) {
    const int n = m.n();
    Vector x(2 * n + 1);
    x[0] = log_partition(m, q);
    x.segment(1, n) = q;
    x.segment(n + 1, n) = mean_observables(m, q);
    return x;
}

/// Control embedding (w, q) -> (w, q, p(q)).
inline Vector control_embed(const GibbsModel& m, const Vector& wq) {
    const int n = m.n();
    Vector x(2 * n + 1);
    x.head(n + 1) = wq;
    x.segment(n + 1, n) = mean_observables(m, wq.tail(n));
    return x;
}

namespace detail {

inline Vector control_point(const GibbsModel& m, const Vector& q) {
    Vector wq(m.n() + 1);
    wq[0] = log_partition(m, q);
    wq.tail(m.n()) = q;
    return wq;
}

} // namespace detail

/// Tangent map of the control embedding by finite differences, (2n+1) x (n+1).
inline Matrix control_embedding_jacobian(const GibbsModel& m, const Vector& q, const StepScheme& scheme = {}) {
    return jacobian([&](const Vector& wq) -> Vector { return control_embed(m, wq); }, detail::control_point(m, q),
                    scheme);
}

/// Tangent map of the Legendre embedding by finite differences, (2n+1) x n.
inline Matrix legendre_embedding_jacobian(const GibbsModel& m, const Vector& q, const StepScheme& scheme = {}) {
    return jacobian([&](const Vector& y) -> Vector { return legendre_embed(m, y); }, q, scheme);
}

/// Pullback of the phase-space metric through the control embedding.
inline Matrix control_pullback_metric(const GibbsModel& m, const Vector& q, const StepScheme& scheme = {}) {
    const Matrix j = control_embedding_jacobian(m, q, scheme);
    return j.transpose() * tps::metric_at(control_embed(m, detail::control_point(m, q))) * j;
}

/// Pullback of eta through the control embedding, over (dw, dq^a).
inline Vector control_pullback_contact(const GibbsModel& m, const Vector& q, const StepScheme& scheme = {}) {
    const Matrix j = control_embedding_jacobian(m, q, scheme);
    return j.transpose() * tps::contact_form_at(control_embed(m, detail::control_point(m, q)));
}

/// Pullback of the phase-space metric through the Legendre embedding.
inline Matrix legendre_pullback_metric(const GibbsModel& m, const Vector& q, const StepScheme& scheme = {}) {
    const Matrix j = legendre_embedding_jacobian(m, q, scheme);
    return j.transpose() * tps::metric_at(legendre_embed(m, q)) * j;
}

/// Pullback of eta through the Legendre embedding (vanishes on equilibrium states).
inline Vector legendre_pullback_contact(const GibbsModel& m, const Vector& q, const StepScheme& scheme = {}) {
    const Matrix j = legendre_embedding_jacobian(m, q, scheme);
    return j.transpose() * tps::contact_form_at(legendre_embed(m, q));
}

struct InducedMetric {
    /// Hessian of w, the Fisher-Rao metric induced on the equilibrium manifold.
    Matrix metric;
    /// Sign relating it to the entropy-Hessian fluctuation metric when w is
    /// entropy-like: g_fluctuation = ruppeiner_sign * metric.
    int ruppeiner_sign = -1;
};

inline InducedMetric induced_metric(const GibbsModel& m, const Vector& q,
                                    const StepScheme& scheme = StepScheme::nested()) {
    detail::require_in_domain(m, q);
    return {hessian([&](const Vector& y) { return log_partition(m, y); }, q, scheme), -1};
}

struct Invertibility {
    double det = 0.0;
    bool ok = false;
};

/// Local-equilibrium condition: the Hessian of w is non-degenerate.
inline Invertibility invertibility_check(const GibbsModel& m, const Vector& q, double tol = 1e-8) {
    const double det = induced_metric(m, q).metric.determinant();
    return {det, std::abs(det) > tol};
}

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------

/// Space {-1, +1}, F = x: w = ln(2 cosh q).
inline GibbsModel two_level() {
    GibbsModel m;
    m.name = "two_level";
    m.space = DiscreteSpace{{-1.0, 1.0}, {1.0, 1.0}};
    m.quadrature.kind = QuadratureKind::discrete_sum;
    m.observables = {observable_from_catalog("x")};
    m.q_domain = {Vector::Constant(1, -3.0), Vector::Constant(1, 3.0)};
    m.exact.log_partition = [](const Vector& q) { return std::log(2.0 * std::cosh(q[0])); };
    m.exact.mean = [](const Vector& q) { return Vector::Constant(1, std::tanh(q[0])); };
    m.exact.covariance = [](const Vector& q) {
        const double s = 1.0 / std::cosh(q[0]);
        return Matrix::Constant(1, 1, s * s);
    };
    return m;
}

/// Space R, F = x^2, q < 0: w = (1/2) ln(pi / -q), p = -1/(2q) > 0.
inline GibbsModel gaussian_quadratic() {
    GibbsModel m;
    m.name = "gaussian_quadratic";
    m.space = IntervalSpace{};
    m.quadrature.kind = QuadratureKind::adaptive_interval;
    m.observables = {observable_from_catalog("x2")};
    m.q_domain = {Vector::Constant(1, -4.0), Vector::Constant(1, -0.25)};
    m.exact.log_partition = [](const Vector& q) { return 0.5 * std::log(std::numbers::pi / -q[0]); };
    m.exact.mean = [](const Vector& q) { return Vector::Constant(1, -0.5 / q[0]); };
    m.exact.covariance = [](const Vector& q) { return Matrix::Constant(1, 1, 0.5 / (q[0] * q[0])); };
    return m;
}

/// Space R, F = (x, x^2), q_2 < 0: w = (1/2) ln(pi / -q_2) + q_1^2 / (-4 q_2).
inline GibbsModel gaussian_two_param() {
    GibbsModel m;
    m.name = "gaussian_two_param";
    m.space = IntervalSpace{};
    m.quadrature.kind = QuadratureKind::adaptive_interval;
    m.observables = {observable_from_catalog("x"), observable_from_catalog("x2")};
    Vector lo(2);
    Vector hi(2);
    lo << -2.0, -3.0;
    hi << 2.0, -0.25;
    m.q_domain = {lo, hi};
    m.exact.log_partition = [](const Vector& q) {
        return 0.5 * std::log(std::numbers::pi / -q[1]) + q[0] * q[0] / (-4.0 * q[1]);
    };
    // Gaussian with mean mu = -q1 / (2 q2) and variance s2 = -1 / (2 q2).
    m.exact.mean = [](const Vector& q) {
        const double mu = -q[0] / (2.0 * q[1]);
        const double s2 = -1.0 / (2.0 * q[1]);
        Vector p(2);
        p << mu, s2 + mu * mu;
        return p;
    };
    m.exact.covariance = [](const Vector& q) {
        const double mu = -q[0] / (2.0 * q[1]);
        const double s2 = -1.0 / (2.0 * q[1]);
        Matrix c(2, 2);
        c(0, 0) = s2;
        c(0, 1) = c(1, 0) = 2.0 * mu * s2;
        c(1, 1) = 2.0 * s2 * s2 + 4.0 * mu * mu * s2;
        return c;
    };
    return m;
}

inline std::vector<std::string> builtin_model_names() { return {"two_level", "gaussian_quadratic", "gaussian_two_param"}; }

inline GibbsModel builtin_model(const std::string& name) {
    if (name == "two_level") return two_level();
    if (name == "gaussian_quadratic") return gaussian_quadratic();
    if (name == "gaussian_two_param") return gaussian_two_param();
    throw ConfigError("unknown built-in model '" + name + "'");
}

/// `count` evenly spaced points on the diagonal of the q-domain shrunk by
/// `margin` (a fraction of each side) so difference stencils stay inside.
inline std::vector<Vector> q_grid(const GibbsModel& m, int count, double margin = 0.1) {
    if (count < 1) throw ContractViolation("q_grid: count must be >= 1");
    const Vector span = m.q_domain.hi - m.q_domain.lo;
    const Vector lo = m.q_domain.lo + margin * span;
    const Vector hi = m.q_domain.hi - margin * span;
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.5 : static_cast<double>(k) / (count - 1);
        out.push_back(lo + t * (hi - lo));
    }
    return out;
}

} // namespace thermogeo::statmech
