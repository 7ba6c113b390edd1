#pragma once

// Shared numerical substrate: Richardson-extrapolated central differences,
// adaptive quadrature over sample spaces, matrix signature counting and
// deterministic chart sampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "thermogeo/chart_point.hpp"
#include "thermogeo/errors.hpp"

namespace thermogeo {

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Step control for central differences. The step along coordinate a is
/// base_step * max(1, |x_a|); each Richardson level halves it.
struct StepScheme {
    double base_step = 1e-5;
    int richardson_levels = 2;

    constexpr StepScheme() = default;
    constexpr StepScheme(double base, int levels) : base_step(base), richardson_levels(levels) {}

    /// Scheme for differentiating quantities that are themselves produced by
    /// finite differences. The larger step keeps the inner round-off from
    /// being amplified past 1e-9.
    static constexpr StepScheme nested() { return {1e-2, 3}; }

    void validate() const {
        if (!(base_step > 0.0) || !std::isfinite(base_step))
            throw ContractViolation("StepScheme: base_step must be positive");
        if (richardson_levels < 1 || richardson_levels > 4)
            throw ContractViolation("StepScheme: richardson_levels must lie in [1, 4]");
    }

    /// Nominal order of the truncation error, O(h^(2*levels)).
    [[nodiscard]] int order() const { return 2 * richardson_levels; }
};

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.allFinite();
}

template <class T>
auto all_finite(const T& t) -> decltype(t.all_finite()) {
    return t.all_finite();
}

template <class T>
T check_finite(T v, const char* what) {
    if (!all_finite(v)) throw EvaluationError(std::string(what) + ": non-finite field evaluation");
    return v;
}

} // namespace detail

/// Partial derivative of f along coordinate `axis` at x.
///
/// f may return a scalar, an Eigen vector/matrix, or any type with vector-space
/// arithmetic and an all_finite() member. The Richardson table removes the
/// h^2, h^4, ... terms so the error is O(h^(2*levels)).
template <class F>
auto partial_derivative(F&& f, const Vector& x, int axis, const StepScheme& scheme = {}) {
    using R = std::decay_t<std::invoke_result_t<F&, const Vector&>>;
    scheme.validate();
    if (axis < 0 || axis >= x.size()) throw ContractViolation("partial_derivative: axis out of range");

    const double h0 = scheme.base_step * std::max(1.0, std::abs(x[axis]));
    const int levels = scheme.richardson_levels;

    std::vector<R> prev;
    std::vector<R> row;
    prev.reserve(levels);
    row.reserve(levels);
    double h = h0;
    for (int k = 0; k < levels; ++k, h *= 0.5) {
        Vector xp = x;
        Vector xm = x;
        xp[axis] += h;
        xm[axis] -= h;
        const double span = xp[axis] - xm[axis];
        R fp = detail::check_finite<R>(f(xp), "partial_derivative");
        R fm = detail::check_finite<R>(f(xm), "partial_derivative");
        row.clear();
        row.push_back(R((fp - fm) / span));
        double factor = 4.0;
        for (int m = 1; m <= k; ++m, factor *= 4.0)
            row.push_back(R(row[m - 1] + (row[m - 1] - prev[m - 1]) * (1.0 / (factor - 1.0))));
        std::swap(prev, row);
    }
    return prev.back();
}

/// Directional derivative of a scalar field along a coordinate direction.
template <class F>
double directional_derivative(F&& f, const Vector& x, int axis, const StepScheme& scheme = {}) {
    return partial_derivative(
        [&](const Vector& y) { return static_cast<double>(f(y)); }, x, axis, scheme);
}

/// Derivative of f along an arbitrary vector v (given in coordinate components),
/// assembled from coordinate partials: v(f) = v^a d_a f. Zero components of v
/// are skipped, so directions along which f is constant cost nothing.
template <class F>
auto derivative_along(F&& f, const Vector& x, const Vector& v, const StepScheme& scheme = {}) {
    using R = std::decay_t<std::invoke_result_t<F&, const Vector&>>;
    R acc = f(x) * 0.0;
    for (int a = 0; a < v.size(); ++a) {
        if (v[a] == 0.0) continue;
        acc = R(acc + partial_derivative(f, x, a, scheme) * v[a]);
    }
    return acc;
}

/// Gradient of a scalar field.
template <class F>
Vector gradient(F&& f, const Vector& x, const StepScheme& scheme = {}) {
    Vector g(x.size());
    for (int a = 0; a < x.size(); ++a) g[a] = directional_derivative(f, x, a, scheme);
    return g;
}

/// Jacobian J(b, a) = d f_b / d x_a of a vector field.
template <class F>
Matrix jacobian(F&& f, const Vector& x, const StepScheme& scheme = {}) {
    const Vector f0 = f(x);
    Matrix j(f0.size(), x.size());
    for (int a = 0; a < x.size(); ++a) {
        j.col(a) = partial_derivative([&](const Vector& y) -> Vector { return f(y); }, x, a, scheme);
    }
    return j;
}

/// Hessian of a scalar field by nested central differences, symmetrized.
template <class F>
Matrix hessian(F&& f, const Vector& x, const StepScheme& scheme = StepScheme::nested()) {
    const auto grad = [&](const Vector& y) -> Vector { return gradient(f, y, scheme); };
    Matrix h = jacobian(grad, x, scheme);
    return 0.5 * (h + h.transpose());
}

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

struct SignatureCount {
    int n_pos = 0;
    int n_neg = 0;
    int n_zero = 0;

    friend bool operator==(const SignatureCount&, const SignatureCount&) = default;
    [[nodiscard]] int total() const { return n_pos + n_neg + n_zero; }
};

/// Counts eigenvalues above zero_tol, below -zero_tol, and in between.
inline SignatureCount matrix_signature(const Matrix& m, double zero_tol = 1e-9) {
    if (m.rows() != m.cols()) throw ContractViolation("matrix_signature: matrix must be square");
    if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > zero_tol)
        throw ContractViolation("matrix_signature: matrix is not symmetric within zero_tol");
    SignatureCount s;
    if (m.size() == 0) return s;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    for (const double ev : eig.eigenvalues()) {
        if (ev > zero_tol)
            ++s.n_pos;
        else if (ev < -zero_tol)
            ++s.n_neg;
        else
            ++s.n_zero;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

enum class QuadratureKind { closed_form, adaptive_interval, discrete_sum };

struct QuadratureSpec {
    QuadratureKind kind = QuadratureKind::adaptive_interval;
    /// Half-width of the integration window for unbounded spaces, in units of
    /// the window scale (standard-deviation equivalents for Gaussian weights).
    double truncation = 12.0;
    /// Number of equal panels of the composite rule; each is refined adaptively.
    int node_count = 8;
    /// Largest admissible |f| at a truncated window edge, relative to max(1, |I|).
    double edge_tolerance = 1e-14;
    double relative_tolerance = 1e-14;
    int max_depth = 12;

    void validate() const {
        if (!(truncation > 0.0)) throw ContractViolation("QuadratureSpec: truncation must be positive");
        if (kind == QuadratureKind::adaptive_interval && node_count < 2)
            throw ContractViolation("QuadratureSpec: node_count must be >= 2 for interval rules");
    }
};

struct DiscreteSpace {
    std::vector<double> points;
    std::vector<double> weights;
};

/// Real interval [lo, hi]; either end may be infinite.
struct IntervalSpace {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

using SampleSpace = std::variant<DiscreteSpace, IntervalSpace>;

/// Centre and scale used to place the truncation window of an unbounded space.
struct Window {
    double center = 0.0;
    double scale = 1.0;
};

namespace detail {

inline double composite_gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                                      const QuadratureSpec& spec) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    const int panels = spec.node_count;
    const double width = (b - a) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * width;
        const double hi = (k + 1 == panels) ? b : a + (k + 1) * width;
        sum += Rule::integrate(f, lo, hi, static_cast<unsigned>(spec.max_depth), spec.relative_tolerance);
    }
    return sum;
}

} // namespace detail

/// Integral of f over a sample space. Discrete spaces give the exact weighted
/// sum; intervals use an adaptive composite Gauss-Kronrod rule, with unbounded
/// ends truncated at window.center +/- spec.truncation * window.scale.
inline double integrate(const SampleSpace& space, const QuadratureSpec& spec,
                        const std::function<double(double)>& f, Window window = {}) {
    spec.validate();
    if (spec.kind == QuadratureKind::closed_form)
        throw ContractViolation("integrate: closed_form quadrature has no generic integrand rule");

    if (const auto* d = std::get_if<DiscreteSpace>(&space)) {
        if (d->points.size() != d->weights.size() || d->points.empty())
            throw ContractViolation("integrate: discrete space needs matching, non-empty points and weights");
        double sum = 0.0;
        for (std::size_t i = 0; i < d->points.size(); ++i) sum += d->weights[i] * f(d->points[i]);
        if (!std::isfinite(sum)) throw EvaluationError("integrate: non-finite discrete sum");
        return sum;
    }

    const auto& iv = std::get<IntervalSpace>(space);
    if (!(window.scale > 0.0)) throw ContractViolation("integrate: window scale must be positive");
    const double half = spec.truncation * window.scale;
    const bool lo_open = !std::isfinite(iv.lo);
    const bool hi_open = !std::isfinite(iv.hi);
    const double a = lo_open ? window.center - half : iv.lo;
    const double b = hi_open ? window.center + half : iv.hi;
    if (!(b > a)) throw ContractViolation("integrate: empty integration interval");

    const double value = detail::composite_gauss_kronrod(f, a, b, spec);
    if (!std::isfinite(value)) throw EvaluationError("integrate: non-finite quadrature result");

    const double ref = std::max(1.0, std::abs(value));
    if (lo_open && !(std::abs(f(a)) <= spec.edge_tolerance * ref))
        throw TruncationError("integrate: integrand has not decayed at the lower window edge");
    if (hi_open && !(std::abs(f(b)) <= spec.edge_tolerance * ref))
        throw TruncationError("integrate: integrand has not decayed at the upper window edge");
    return value;
}

// ---------------------------------------------------------------------------
// Deterministic sampling
// ---------------------------------------------------------------------------

struct Range {
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const Range&, const Range&) = default;
};

/// Uniform doubles in [0, 1) from a 64-bit Mersenne twister, using the top
/// 53 bits so sequences are identical across standard libraries.
class UniformSampler {
public:
    explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double in(const Range& r) { return r.lo + (r.hi - r.lo) * unit(); }

private:
    std::mt19937_64 engine_;
};

struct ChartSampling {
    Range p_range{0.2, 5.0};
    Range q_range{-2.0, 2.0};
    Range w_range{-2.0, 2.0};
    friend bool operator==(const ChartSampling&, const ChartSampling&) = default;
};

/// Reproducible chart points; coordinates are drawn in the order w, q, p.
inline std::vector<ChartPoint> sample_chart_points(int n, int count, std::uint64_t seed,
                                                   const ChartSampling& ranges = {}) {
    if (n < 1) throw ContractViolation("sample_chart_points: n must be >= 1");
    if (count < 0) throw ContractViolation("sample_chart_points: count must be non-negative");
    if (!(ranges.p_range.lo > 0.0))
        throw DomainError("sample_chart_points: p_range lower bound must be positive");
    for (const auto& r : {ranges.p_range, ranges.q_range, ranges.w_range})
        if (!(r.hi >= r.lo)) throw ContractViolation("sample_chart_points: empty range");

    UniformSampler rng(seed);
    std::vector<ChartPoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double w = rng.in(ranges.w_range);
        Vector q(n);
        Vector p(n);
        for (int a = 0; a < n; ++a) q[a] = rng.in(ranges.q_range);
        for (int a = 0; a < n; ++a) p[a] = rng.in(ranges.p_range);
        out.emplace_back(w, std::move(q), std::move(p));
    }
    return out;
}

} // namespace thermogeo
