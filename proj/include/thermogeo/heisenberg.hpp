#pragma once

// The hyperbolic Heisenberg group R^{2n} x R: group law, left-invariant frame
// {xi = 2 d/dt, U_k = d/du_k - 2 v_k d/dt, V_k = d/dv_k + 2 u_k d/dt} and the
// para-contact metric structure carried by that frame.
//
// Chart coordinates reuse the phase-space block layout: index 0 is t,
// indices 1..n are u_k, indices n+1..2n are v_k.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "thermogeo/chart_point.hpp"
#include "thermogeo/connections.hpp"
#include "thermogeo/errors.hpp"
#include "thermogeo/frame.hpp"
#include "thermogeo/numerics.hpp"
#include "thermogeo/structure.hpp"

namespace thermogeo::heisenberg {

/// Coefficient c of the skew term in t'' = t' + t + c * sum_k (u'_k v_k - v'_k u_k).
///
/// The frame above is left-invariant exactly for c = +2, which is the default.
/// The law with c = -1 is kept available; it is also a group law, but its
/// left-invariant fields are U_k = d/du_k + v_k d/dt, V_k = d/dv_k - u_k d/dt.
inline constexpr double kFrameCompatibleTwist = 2.0;
inline constexpr double kPrintedTwist = -1.0;

struct GroupElement {
    Vector u;
    Vector v;
    double t = 0.0;

    GroupElement() = default;
    GroupElement(Vector u_, Vector v_, double t_) : u(std::move(u_)), v(std::move(v_)), t(t_) {
        if (u.size() != v.size() || u.size() < 1)
            throw ContractViolation("GroupElement: u and v must have the same length n >= 1");
        if (!std::isfinite(t) || !u.allFinite() || !v.allFinite())
            throw DomainError("GroupElement: coordinates must be finite");
    }

    [[nodiscard]] int n() const { return static_cast<int>(u.size()); }

    [[nodiscard]] Vector coords() const {
        const int k = n();
        Vector x(2 * k + 1);
        x[0] = t;
        x.segment(1, k) = u;
        x.segment(k + 1, k) = v;
        return x;
    }

    static GroupElement from_coords(const Vector& x) {
        const int k = chart_n(x);
        if (x.size() != 2 * k + 1 || k < 1) throw ContractViolation("GroupElement::from_coords: dimension must be 2n+1");
        return {x.segment(1, k), x.segment(k + 1, k), x[0]};
    }

    static GroupElement identity(int n) {
        if (n < 1) throw ContractViolation("GroupElement::identity: n must be >= 1");
        return {Vector::Zero(n), Vector::Zero(n), 0.0};
    }
};

inline GroupElement multiply(const GroupElement& left, const GroupElement& right,
                             double twist = kFrameCompatibleTwist) {
    if (left.n() != right.n()) throw ContractViolation("multiply: group elements of different dimension");
    const double skew = left.u.dot(right.v) - left.v.dot(right.u);
    return {left.u + right.u, left.v + right.v, left.t + right.t + twist * skew};
}

/// (-u, -v, -t); the skew term of g^{-1} g vanishes for every twist.
inline GroupElement inverse(const GroupElement& g) { return {-g.u, -g.v, -g.t}; }

/// Largest coordinate difference between two elements.
inline double distance_max(const GroupElement& a, const GroupElement& b) {
    return (a.coords() - b.coords()).cwiseAbs().maxCoeff();
}

/// Reproducible elements with every coordinate uniform in `range`, drawn in the order t, u, v.
inline std::vector<GroupElement> sample_elements(int n, int count, std::uint64_t seed, Range range = {-2.0, 2.0}) {
    if (n < 1) throw ContractViolation("sample_elements: n must be >= 1");
    UniformSampler rng(seed);
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        const double t = rng.in(range);
        Vector u(n);
        Vector v(n);
        for (int a = 0; a < n; ++a) u[a] = rng.in(range);
        for (int a = 0; a < n; ++a) v[a] = rng.in(range);
        out.emplace_back(std::move(u), std::move(v), t);
    }
    return out;
}

inline Frame frame(int n) {
    const int dim = 2 * n + 1;
    return {"heisenberg_group", dim, [n, dim](const Vector& x) -> Matrix {
                Matrix e = Matrix::Identity(dim, dim);
                e(0, 0) = 2.0;
                for (int k = 0; k < n; ++k) {
                    e(0, 1 + k) = -2.0 * x[n + 1 + k];
                    e(0, n + 1 + k) = 2.0 * x[1 + k];
                }
                return e;
            }};
}

/// The 1-form dual to the frame's first vector: (1/2) dt + sum_k (v_k du_k - u_k dv_k).
inline Vector contact_form_at(const Vector& x) {
    const int n = chart_n(x);
    Vector th = Vector::Zero(x.size());
    th[0] = 0.5;
    th.segment(1, n) = x.segment(n + 1, n);
    th.segment(n + 1, n) = -x.segment(1, n);
    return th;
}

inline Vector reeb_at(const Vector& x) {
    Vector xi = Vector::Zero(x.size());
    xi[0] = 2.0;
    return xi;
}

/// Metric with the frame orthonormal of signature diag(1, I_n, -I_n).
inline Matrix metric_at(const Vector& x) {
    const int n = chart_n(x);
    const Matrix e_inv = frame_inverse(frame(n), x);
    Vector d = Vector::Ones(x.size());
    d.segment(n + 1, n).setConstant(-1.0);
    return e_inv.transpose() * d.asDiagonal() * e_inv;
}

/// Phi xi = 0, Phi U_k = V_k, Phi V_k = U_k in frame components.
inline Matrix phi_frame(int n) {
    const int dim = 2 * n + 1;
    Matrix p = Matrix::Zero(dim, dim);
    for (int k = 1; k <= n; ++k) {
        p(n + k, k) = 1.0;
        p(k, n + k) = 1.0;
    }
    return p;
}

inline Matrix phi_at(const Vector& x) {
    const int n = chart_n(x);
    const Frame f = frame(n);
    return f.matrix(x) * phi_frame(n) * frame_inverse(f, x);
}

/// Every field is polynomial of degree <= 2, so wide steps lose no accuracy
/// and keep the nested round-off well under the 1e-8 budget.
inline ContactMetricStructure structure(int n) {
    if (n < 1) throw ContractViolation("heisenberg::structure: n must be >= 1");
    ContactMetricStructure s;
    s.name = "hyperbolic_heisenberg";
    s.n = n;
    s.eta = contact_form_at;
    s.reeb = reeb_at;
    s.metric = metric_at;
    s.phi = phi_at;
    s.frame = frame(n);
    s.inner = StepScheme(1e-2, 2);
    s.outer = StepScheme(1e-1, 2);
    return s;
}

/// max |dL_g(E(e)) - E(g)|: the tangent map of left translation by g,
/// applied to the frame at the identity, compared with the frame at g.
inline double left_invariance_residual(const GroupElement& g, double twist = kFrameCompatibleTwist,
                                       const StepScheme& scheme = {1e-2, 2}) {
    const int n = g.n();
    const Frame f = frame(n);
    const auto translate = [&](const Vector& y) -> Vector {
        return multiply(g, GroupElement::from_coords(y), twist).coords();
    };
    const Vector origin = GroupElement::identity(n).coords();
    const Matrix tangent = jacobian(translate, origin, scheme);
    return (tangent * f.matrix(origin) - f.matrix(g.coords())).cwiseAbs().maxCoeff();
}

} // namespace thermogeo::heisenberg
