#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "thermogeo/errors.hpp"

namespace thermogeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point (w, q^1..q^n, p_1..p_n) of the (2n+1)-dimensional phase-space chart.
///
/// Flattened coordinates follow the block layout used everywhere in the
/// library: index 0 is w, indices 1..n are q^a, indices n+1..2n are p_a.
struct ChartPoint {
    double w = 0.0;
    Vector q;
    Vector p;

    ChartPoint() = default;
    ChartPoint(double w_, Vector q_, Vector p_) : w(w_), q(std::move(q_)), p(std::move(p_)) {
        if (q.size() != p.size() || q.size() < 1)
            throw ContractViolation("ChartPoint: q and p must have the same length n >= 1");
        if (!std::isfinite(w) || !q.allFinite() || !p.allFinite())
            throw DomainError("ChartPoint: coordinates must be finite");
    }

    [[nodiscard]] int n() const { return static_cast<int>(q.size()); }
    [[nodiscard]] int dim() const { return 2 * n() + 1; }

    [[nodiscard]] Vector coords() const {
        Vector x(dim());
        x[0] = w;
        x.segment(1, n()) = q;
        x.segment(n() + 1, n()) = p;
        return x;
    }

    static ChartPoint from_coords(const Vector& x) {
        if (x.size() < 3 || x.size() % 2 == 0)
            throw ContractViolation("ChartPoint::from_coords: dimension must be 2n+1 with n >= 1");
        const auto n = (x.size() - 1) / 2;
        return ChartPoint(x[0], x.segment(1, n), x.segment(n + 1, n));
    }

    /// True when every p_a > 0, the region where the canonical frame exists.
    [[nodiscard]] bool in_positive_p_region() const { return (p.array() > 0.0).all(); }
};

/// Dimension parameter n recovered from a flattened coordinate vector.
inline int chart_n(const Vector& x) { return static_cast<int>((x.size() - 1) / 2); }

} // namespace thermogeo
