#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thermogeo/errors.hpp"

namespace thermogeo {

/// (contravariant, covariant) index counts.
struct Valence {
    int upper = 0;
    int lower = 0;
    friend bool operator==(const Valence&, const Valence&) = default;
};

/// Components of a tensor in a named frame, stored densely with extent
/// `dim` per index (row-major in the index order of the accessor).
///
/// Index order conventions used across the library:
///  - connection symbols  Gamma(k, j, i)  <->  nabla_{e_i} e_j = Gamma^k_{ji} e_k
///  - structure functions gamma(k, i, j)  <->  [e_i, e_j] = gamma^k_{ij} e_k
///  - torsion             T(k, i, j)      <->  T(e_i, e_j) = T^k_{ij} e_k
///  - curvature           R(i, j, k, l)   <->  R^i_{jkl} = [R(e_l, e_k) e_j]^i
template <std::size_t Rank>
class TensorComponents {
public:
    TensorComponents() = default;
    TensorComponents(int dim, Valence valence, std::string frame)
        : dim_(dim), valence_(valence), frame_(std::move(frame)), data_(count(dim), 0.0) {
        if (valence.upper + valence.lower != static_cast<int>(Rank))
            throw ContractViolation("TensorComponents: valence does not match rank");
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const Valence& valence() const { return valence_; }
    [[nodiscard]] const std::string& frame() const { return frame_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] const std::vector<double>& data() const { return data_; }

    template <class... I>
    double& operator()(I... idx) {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<int>(idx)...})];
    }
    template <class... I>
    double operator()(I... idx) const {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<int>(idx)...})];
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (const double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    [[nodiscard]] bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    /// Largest componentwise difference; frames and shapes must agree.
    [[nodiscard]] double max_abs_diff(const TensorComponents& other) const {
        require_same_shape(other);
        double m = 0.0;
        for (std::size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - other.data_[k]));
        return m;
    }

    TensorComponents& operator+=(const TensorComponents& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    TensorComponents& operator-=(const TensorComponents& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    TensorComponents& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }
    friend TensorComponents operator+(TensorComponents a, const TensorComponents& b) { return a += b; }
    friend TensorComponents operator-(TensorComponents a, const TensorComponents& b) { return a -= b; }
    TensorComponents& operator/=(double s) {
        for (double& v : data_) v /= s;
        return *this;
    }
    friend TensorComponents operator*(TensorComponents a, double s) { return a *= s; }
    friend TensorComponents operator/(TensorComponents a, double s) { return a /= s; }

private:
    static std::size_t count(int dim) {
        std::size_t c = 1;
        for (std::size_t r = 0; r < Rank; ++r) c *= static_cast<std::size_t>(dim);
        return c;
    }

    [[nodiscard]] std::size_t offset(std::array<int, Rank> idx) const {
        std::size_t off = 0;
        for (std::size_t r = 0; r < Rank; ++r) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[r]);
        return off;
    }

    void require_same_shape(const TensorComponents& o) const {
        if (o.dim_ != dim_ || o.frame_ != frame_)
            throw ContractViolation("TensorComponents: frame tag or extent mismatch (" + frame_ + " vs " + o.frame_ + ")");
    }

    int dim_ = 0;
    Valence valence_{};
    std::string frame_;
    std::vector<double> data_;
};

/// Rank-2 components in a named frame; m(i, j) is the (i, j) component
/// (for valence (1,1): upper index i, lower index j).
struct Tensor2 {
    Valence valence;
    std::string frame;
    Eigen::MatrixXd m;
};

using Tensor3 = TensorComponents<3>;
using Tensor4 = TensorComponents<4>;

} // namespace thermogeo
