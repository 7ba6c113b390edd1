#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thermogeo/errors.hpp"
#include "thermogeo/numerics.hpp"
#include "thermogeo/tensor.hpp"

namespace thermogeo {

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using CovectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;

/// 2n+1 vector fields given by their coordinate components. Column i of
/// matrix(x) is e_i(x).
struct Frame {
    std::string tag;
    int dim = 0;
    MatrixField matrix;

    [[nodiscard]] Vector vector(int i, const Vector& x) const { return matrix(x).col(i); }

    [[nodiscard]] VectorField field(int i) const {
        return [m = matrix, i](const Vector& x) -> Vector { return m(x).col(i); };
    }
};

/// 2n+1 one-forms given by their coordinate components. Row i of matrix(x)
/// is theta^i(x).
struct Coframe {
    std::string tag;
    int dim = 0;
    MatrixField matrix;
};

/// Smallest |det| accepted for a frame matrix.
inline constexpr double kFrameDeterminantFloor = 1e-12;

/// Inverse of the frame matrix at x; rows of the result are the dual coframe.
inline Matrix frame_inverse(const Frame& frame, const Vector& x) {
    const Matrix e = frame.matrix(x);
    const Eigen::PartialPivLU<Matrix> lu(e);
    if (!(std::abs(lu.determinant()) > kFrameDeterminantFloor))
        throw FrameError("frame '" + frame.tag + "' is singular at the requested point");
    return lu.inverse();
}

/// Numeric Lie bracket [X, Y]^b = X^a d_a Y^b - Y^a d_a X^b.
inline Vector lie_bracket_at(const VectorField& x_field, const VectorField& y_field, const Vector& x,
                             const StepScheme& scheme = {}) {
    const Vector xv = x_field(x);
    const Vector yv = y_field(x);
    const Vector xy = derivative_along(y_field, x, xv, scheme);
    const Vector yx = derivative_along(x_field, x, yv, scheme);
    return xy - yx;
}

/// Frame matrix, its inverse and its coordinate partials at one point.
struct FrameJet {
    Matrix e;
    Matrix e_inv;
    std::vector<Matrix> de; ///< de[a] = d E / d x^a

    static FrameJet at(const Frame& frame, const Vector& x, const StepScheme& scheme = {}) {
        FrameJet jet;
        jet.e = frame.matrix(x);
        jet.e_inv = frame_inverse(frame, x);
        jet.de.reserve(static_cast<std::size_t>(x.size()));
        for (int a = 0; a < x.size(); ++a)
            jet.de.push_back(partial_derivative([&](const Vector& y) -> Matrix { return frame.matrix(y); }, x, a, scheme));
        return jet;
    }

    /// Coordinate components of e_i(V) for a matrix-valued field's partials.
    [[nodiscard]] Matrix along(int i, const std::vector<Matrix>& partials) const {
        Matrix acc = Matrix::Zero(partials.front().rows(), partials.front().cols());
        for (int a = 0; a < e.rows(); ++a)
            if (e(a, i) != 0.0) acc += e(a, i) * partials[static_cast<std::size_t>(a)];
        return acc;
    }

    /// Coordinate components of [e_i, e_j].
    [[nodiscard]] Vector bracket(int i, int j) const {
        Vector b = Vector::Zero(e.rows());
        for (int a = 0; a < e.rows(); ++a) {
            const auto& d = de[static_cast<std::size_t>(a)];
            b += e(a, i) * d.col(j) - e(a, j) * d.col(i);
        }
        return b;
    }
};

/// Structure functions gamma(k, i, j) with [e_i, e_j] = gamma^k_{ij} e_k.
inline Tensor3 structure_functions_at(const Frame& frame, const Vector& x, const StepScheme& scheme = {}) {
    const FrameJet jet = FrameJet::at(frame, x, scheme);
    const int dim = frame.dim;
    Tensor3 g(dim, Valence{1, 2}, frame.tag);
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
            const Vector c = jet.e_inv * jet.bracket(i, j);
            for (int k = 0; k < dim; ++k) {
                g(k, i, j) = c[k];
                g(k, j, i) = -c[k];
            }
        }
    }
    return g;
}

} // namespace thermogeo
