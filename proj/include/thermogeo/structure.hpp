#pragma once

// A (para-)contact metric structure (eta, xi, Phi, G) on a chart, together
// with the frame-level evaluations every identity check is built on.

#include <functional>
#include <string>
#include <vector>

#include "thermogeo/frame.hpp"
#include "thermogeo/numerics.hpp"
#include "thermogeo/tensor.hpp"

namespace thermogeo {

/// Coordinate-level description of a contact metric structure.
///
/// `phi(x)(a, b)` is Phi^a_b. `frame` is an adapted frame whose e_0 is the
/// Reeb field. The association sign s in G(X, Phi Y) = (s/2) d eta(X, Y) is
/// not declared here; it is fitted from the fields (see association_fit).
struct ContactMetricStructure {
    std::string name;
    int n = 1;
    CovectorField eta;
    VectorField reeb;
    MatrixField metric;
    MatrixField phi;
    Frame frame;
    /// Throws DomainError when x lies outside the structure's chart domain.
    std::function<void(const Vector&)> require_admissible = [](const Vector&) {};
    /// Scheme for first derivatives of the fields (brackets, Koszul terms).
    StepScheme inner{1e-3, 3};
    /// Scheme for derivatives of quantities that are themselves difference
    /// quotients (curvature, Nijenhuis, parallelism of Phi).
    StepScheme outer = StepScheme::nested();

    [[nodiscard]] int dim() const { return 2 * n + 1; }
};

/// G(e_i, e_j) in the given frame.
inline Tensor2 metric_components(const MatrixField& metric, const Frame& frame, const Vector& x) {
    const Matrix e = frame.matrix(x);
    return {Valence{0, 2}, frame.tag, e.transpose() * metric(x) * e};
}

/// Phi^i_j in the given frame: E^{-1} Phi E.
inline Tensor2 phi_components(const MatrixField& phi, const Frame& frame, const Vector& x) {
    return {Valence{1, 1}, frame.tag, frame_inverse(frame, x) * phi(x) * frame.matrix(x)};
}

/// alpha(e_i) as a vector field over the chart.
inline VectorField form_on_frame(const CovectorField& alpha, const Frame& frame) {
    return [alpha, m = frame.matrix](const Vector& x) -> Vector { return m(x).transpose() * alpha(x); };
}

/// Exterior derivative of a 1-form on frame pairs, with the convention
/// d alpha(X, Y) = X alpha(Y) - Y alpha(X) - alpha([X, Y]) (no 1/2 factor).
inline Tensor2 exterior_derivative_at(const CovectorField& alpha, const Frame& frame, const Vector& x,
                                      const StepScheme& scheme = {}) {
    const FrameJet jet = FrameJet::at(frame, x, scheme);
    const VectorField on_frame = form_on_frame(alpha, frame);
    const Vector a = alpha(x);
    const int dim = frame.dim;

    // d_a (alpha(e_j)) for every coordinate a, then contract with e_i.
    Matrix partials(dim, dim); // partials(j, a)
    for (int c = 0; c < dim; ++c) partials.col(c) = partial_derivative(on_frame, x, c, scheme);
    const Matrix e_of = partials * jet.e; // e_of(j, i) = e_i(alpha(e_j))

    Matrix d(dim, dim);
    for (int i = 0; i < dim; ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < dim; ++j) {
            const double v = e_of(j, i) - e_of(i, j) - a.dot(jet.bracket(i, j));
            d(i, j) = v;
            d(j, i) = -v;
        }
    }
    return {Valence{0, 2}, frame.tag, d};
}

/// d alpha(d_a, d_b) = d_a alpha_b - d_b alpha_a in coordinate components.
inline Matrix exterior_derivative_coordinates(const CovectorField& alpha, const Vector& x,
                                              const StepScheme& scheme = {}) {
    const Matrix j = jacobian(alpha, x, scheme); // j(b, a) = d_a alpha_b
    return j.transpose() - j;
}

/// Coefficient of eta ^ (d eta)^n relative to dw ^ dq^1 ^ dp_1 ^ ... ^ dq^n ^ dp_n,
/// with the determinant convention for wedge products.
///
/// `d_eta_coord` holds d eta(d_a, d_b) in coordinate components.
inline double contact_volume_coefficient(const Vector& eta_coord, const Matrix& d_eta_coord) {
    const int dim = static_cast<int>(eta_coord.size());
    const int n = (dim - 1) / 2;
    // Ordered basis dw, dq^1, dp_1, ..., dq^n, dp_n as coordinate indices.
    std::vector<int> order{0};
    for (int a = 0; a < n; ++a) {
        order.push_back(1 + a);
        order.push_back(n + 1 + a);
    }

    // Shuffle expansion: pick the vector fed to eta, then split the rest into
    // ordered pairs for the copies of d eta. Sign tracks the permutation.
    std::function<double(std::vector<int>)> pairs = [&](std::vector<int> rest) -> double {
        if (rest.empty()) return 1.0;
        double sum = 0.0;
        const int first = rest.front();
        for (std::size_t k = 1; k < rest.size(); ++k) {
            std::vector<int> remaining;
            for (std::size_t t = 1; t < rest.size(); ++t)
                if (t != k) remaining.push_back(rest[t]);
            const double sign = ((k - 1) % 2 == 0) ? 1.0 : -1.0;
            sum += sign * d_eta_coord(first, rest[k]) * pairs(remaining);
        }
        return sum;
    };
    // (d eta)^n evaluated via pairings counts each ordered pairing once;
    // the wedge power contributes n! identical pairings.
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;

    double total = 0.0;
    for (std::size_t s = 0; s < order.size(); ++s) {
        std::vector<int> rest;
        for (std::size_t t = 0; t < order.size(); ++t)
            if (t != s) rest.push_back(order[t]);
        const double sign = (s % 2 == 0) ? 1.0 : -1.0;
        total += sign * eta_coord[order[s]] * factorial * pairs(rest);
    }
    return total;
}

} // namespace thermogeo
