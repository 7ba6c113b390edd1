#pragma once

// The thermodynamic phase space in Darboux coordinates (w, q^a, p_a):
// contact form eta = dw - p_a dq^a, metric G = eta (x) eta + (1/2)(dq^a (x) dp_a + dp_a (x) dq^a),
// and its coordinate, Heisenberg and canonical frames.

#include <cmath>
#include <string>

#include "thermogeo/chart_point.hpp"
#include "thermogeo/connections.hpp"
#include "thermogeo/errors.hpp"
#include "thermogeo/frame.hpp"
#include "thermogeo/structure.hpp"
#include "thermogeo/tensor.hpp"

namespace thermogeo::tps {

inline void require_positive_p(const Vector& x) {
    const int n = chart_n(x);
    for (int a = 0; a < n; ++a)
        if (!(x[n + 1 + a] > 0.0))
            throw DomainError("canonical frame requires p_a > 0 for every a");
}

/// Coordinate components of eta over (dw, dq^a, dp_a).
inline Vector contact_form_at(const Vector& x) {
    const int n = chart_n(x);
    Vector eta = Vector::Zero(x.size());
    eta[0] = 1.0;
    eta.segment(1, n) = -x.segment(n + 1, n);
    return eta;
}

/// Reeb field d/dw.
inline Vector reeb_at(const Vector& x) {
    Vector xi = Vector::Zero(x.size());
    xi[0] = 1.0;
    return xi;
}

/// Coordinate components of G.
inline Matrix metric_at(const Vector& x) {
    const int n = chart_n(x);
    const Vector eta = contact_form_at(x);
    Matrix g = eta * eta.transpose();
    for (int a = 0; a < n; ++a) {
        g(1 + a, n + 1 + a) += 0.5;
        g(n + 1 + a, 1 + a) += 0.5;
    }
    return g;
}

inline Frame coordinate_frame(int n) {
    const int dim = 2 * n + 1;
    return {"coordinate", dim, [dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); }};
}

/// {xi, Q_a = d/dq^a + p_a d/dw, P^a = d/dp_a}.
inline Frame heisenberg_frame(int n) {
    const int dim = 2 * n + 1;
    return {"heisenberg", dim, [n, dim](const Vector& x) -> Matrix {
                Matrix e = Matrix::Identity(dim, dim);
                for (int a = 0; a < n; ++a) e(0, 1 + a) = x[n + 1 + a];
                return e;
            }};
}

/// {xi, e+_a, e-_a} with e+-_a = sqrt(p_a) (Q_a / p_a +- P^a); defined for p_a > 0.
inline Frame canonical_frame(int n) {
    const int dim = 2 * n + 1;
    return {"canonical", dim, [n, dim](const Vector& x) -> Matrix {
                require_positive_p(x);
                Matrix e = Matrix::Zero(dim, dim);
                e(0, 0) = 1.0;
                for (int a = 0; a < n; ++a) {
                    const double p = x[n + 1 + a];
                    const double r = std::sqrt(p);
                    // Q_a / sqrt(p_a) = (d/dq^a + p_a d/dw) / sqrt(p_a)
                    e(0, 1 + a) = r;
                    e(1 + a, 1 + a) = 1.0 / r;
                    e(n + 1 + a, 1 + a) = r;
                    e(0, n + 1 + a) = r;
                    e(1 + a, n + 1 + a) = 1.0 / r;
                    e(n + 1 + a, n + 1 + a) = -r;
                }
                return e;
            }};
}

/// {eta, theta+_a, theta-_a} with theta+-_a = (sqrt(p_a) / (2 p_a)) (p_a dq^a +- dp_a).
inline Coframe orthonormal_coframe(int n) {
    const int dim = 2 * n + 1;
    return {"canonical", dim, [n, dim](const Vector& x) -> Matrix {
                require_positive_p(x);
                Matrix th = Matrix::Zero(dim, dim);
                th.row(0) = contact_form_at(x).transpose();
                for (int a = 0; a < n; ++a) {
                    const double p = x[n + 1 + a];
                    const double c = std::sqrt(p) / (2.0 * p);
                    th(1 + a, 1 + a) = c * p;
                    th(1 + a, n + 1 + a) = c;
                    th(n + 1 + a, 1 + a) = c * p;
                    th(n + 1 + a, n + 1 + a) = -c;
                }
                return th;
            }};
}

/// The phase-space structure in the canonical frame, with Phi obtained as
/// -nabla xi from the Koszul-evaluated Levi-Civita connection.
inline ContactMetricStructure structure(int n) {
    if (n < 1) throw ContractViolation("tps::structure: n must be >= 1");
    ContactMetricStructure s;
    s.name = "tps";
    s.n = n;
    s.eta = contact_form_at;
    s.reeb = reeb_at;
    s.metric = metric_at;
    s.frame = canonical_frame(n);
    s.phi = phi_from_reeb(s.metric, s.frame, s.reeb, s.inner);
    s.require_admissible = require_positive_p;
    return s;
}

/// Phi in the canonical frame in closed form: Phi e+_a = -e-_a, Phi e-_a = -e+_a.
inline Matrix phi_canonical_closed_form(int n) {
    const int dim = 2 * n + 1;
    Matrix p = Matrix::Zero(dim, dim);
    for (int a = 1; a <= n; ++a) {
        p(n + a, a) = -1.0;
        p(a, n + a) = -1.0;
    }
    return p;
}

/// Closed-form Levi-Civita symbols in the canonical frame.
inline Tensor3 levi_civita_closed_form(const Vector& x) {
    require_positive_p(x);
    const int n = chart_n(x);
    Tensor3 g(2 * n + 1, Valence{1, 2}, "canonical");
    for (int a = 1; a <= n; ++a) {
        const int b = n + a;
        const double c = 1.0 / (2.0 * std::sqrt(x[b]));
        g(0, b, a) = 1.0;
        g(0, a, b) = -1.0;
        g(a, 0, b) = 1.0;
        g(a, b, 0) = 1.0;
        g(b, 0, a) = 1.0;
        g(b, a, 0) = 1.0;
        g(a, b, b) = c;
        g(b, a, b) = c;
        g(a, b, a) = -c;
        g(b, a, a) = -c;
    }
    return g;
}

/// Closed-form canonical-connection symbols in the canonical frame.
inline Tensor3 canonical_closed_form(const Vector& x) {
    require_positive_p(x);
    const int n = chart_n(x);
    Tensor3 g(2 * n + 1, Valence{1, 2}, "canonical");
    for (int a = 1; a <= n; ++a) {
        const int b = n + a;
        const double c = 1.0 / (2.0 * std::sqrt(x[b]));
        g(a, b, a) = -c;
        g(a, b, b) = c;
        g(b, a, a) = -c;
        g(b, a, b) = c;
    }
    return g;
}

inline Connection levi_civita_table_connection(int n) {
    return {"tps:levi_civita_table", ConnectionSource::closed_form_levi_civita, canonical_frame(n), levi_civita_closed_form};
}

inline Connection canonical_table_connection(int n) {
    return {"tps:canonical_table", ConnectionSource::closed_form_canonical, canonical_frame(n), canonical_closed_form};
}

/// Coefficient of eta ^ (d eta)^n against dw ^ dq^1 ^ dp_1 ^ ... ^ dq^n ^ dp_n.
inline double volume_coefficient_at(const Vector& x, const StepScheme& scheme = {}) {
    return contact_volume_coefficient(contact_form_at(x), exterior_derivative_coordinates(contact_form_at, x, scheme));
}

} // namespace thermogeo::tps
