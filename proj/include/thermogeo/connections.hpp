#pragma once

// Levi-Civita and canonical connections of a contact metric structure in a
// non-coordinate frame, their torsion and curvature, the Nijenhuis tensor of
// Phi and the covariant-derivative checks built on them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermogeo/errors.hpp"
#include "thermogeo/frame.hpp"
#include "thermogeo/numerics.hpp"
#include "thermogeo/structure.hpp"
#include "thermogeo/tensor.hpp"

namespace thermogeo {

enum class ConnectionSource { koszul_numeric, closed_form_levi_civita, closed_form_canonical, canonical_from_levi_civita };

inline std::string to_string(ConnectionSource s) {
    switch (s) {
    case ConnectionSource::koszul_numeric: return "koszul_numeric";
    case ConnectionSource::closed_form_levi_civita: return "closed_form_levi_civita";
    case ConnectionSource::closed_form_canonical: return "closed_form_canonical";
    case ConnectionSource::canonical_from_levi_civita: return "canonical_from_levi_civita";
    }
    return "unknown";
}

using SymbolField = std::function<Tensor3(const Vector&)>;

/// Connection symbols as a field over the chart, Gamma(k, j, i) with
/// nabla_{e_i} e_j = Gamma^k_{ji} e_k.
struct Connection {
    std::string name;
    ConnectionSource source = ConnectionSource::koszul_numeric;
    Frame frame;
    SymbolField symbols;
    StepScheme inner{1e-3, 3};
    StepScheme outer = StepScheme::nested();
};

namespace detail {

/// e_i(F) for every frame index i, assembled from coordinate partials of F.
template <class F>
auto frame_derivatives(F&& f, const Matrix& e, const Vector& x, const StepScheme& scheme) {
    using R = std::decay_t<std::invoke_result_t<F&, const Vector&>>;
    const int dim = static_cast<int>(e.cols());
    std::vector<R> partials;
    partials.reserve(static_cast<std::size_t>(x.size()));
    for (int a = 0; a < x.size(); ++a) partials.push_back(partial_derivative(f, x, a, scheme));

    std::vector<R> out;
    out.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        R acc = partials.front() * 0.0;
        for (int a = 0; a < x.size(); ++a)
            if (e(a, i) != 0.0) acc = R(acc + partials[static_cast<std::size_t>(a)] * e(a, i));
        out.push_back(std::move(acc));
    }
    return out;
}

inline Matrix checked_inverse(const Matrix& g, const char* what) {
    const Eigen::FullPivLU<Matrix> lu(g);
    if (!lu.isInvertible()) throw EvaluationError(std::string(what) + ": singular metric");
    return lu.inverse();
}

} // namespace detail

/// Levi-Civita symbols from the Koszul formula in the frame:
/// 2 G(nabla_i e_j, e_k) = e_i g_jk + e_j g_ik - e_k g_ij
///                         + G([e_i,e_j], e_k) - G([e_i,e_k], e_j) - G([e_j,e_k], e_i).
inline Tensor3 levi_civita_symbols(const MatrixField& metric, const Frame& frame, const Vector& x,
                                   const StepScheme& scheme = {}) {
    const int dim = frame.dim;
    const Tensor3 gam = structure_functions_at(frame, x, scheme);
    const Matrix e = frame.matrix(x);
    const Matrix g = metric_components(metric, frame, x).m;
    const Matrix g_inv = detail::checked_inverse(g, "levi_civita_symbols");
    const auto dg = detail::frame_derivatives(
        [&](const Vector& y) -> Matrix { return metric_components(metric, frame, y).m; }, e, x, scheme);

    // c(k, i, j) = G([e_i, e_j], e_k)
    Tensor3 c(dim, Valence{0, 3}, frame.tag);
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double v = 0.0;
                for (int m = 0; m < dim; ++m) v += gam(m, i, j) * g(m, k);
                c(k, i, j) = v;
            }

    Tensor3 lowered(dim, Valence{0, 3}, frame.tag);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) {
                const auto ui = static_cast<std::size_t>(i);
                const auto uj = static_cast<std::size_t>(j);
                const auto uk = static_cast<std::size_t>(k);
                lowered(k, j, i) =
                    0.5 * (dg[ui](j, k) + dg[uj](i, k) - dg[uk](i, j) + c(k, i, j) - c(j, i, k) - c(i, j, k));
            }

    Tensor3 out(dim, Valence{1, 2}, frame.tag);
    for (int k = 0; k < dim; ++k)
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i) {
                double v = 0.0;
                for (int l = 0; l < dim; ++l) v += g_inv(k, l) * lowered(l, j, i);
                out(k, j, i) = v;
            }
    return out;
}

/// M(k, i) = (nabla_{e_i} V)^k in frame components.
inline Matrix covariant_derivative_vector(const Tensor3& gamma, const Frame& frame, const VectorField& v,
                                          const Vector& x, const StepScheme& scheme = {}) {
    const int dim = frame.dim;
    const auto comps = [&](const Vector& y) -> Vector { return frame_inverse(frame, y) * v(y); };
    const Vector c = comps(x);
    const auto dc = detail::frame_derivatives(comps, frame.matrix(x), x, scheme);
    Matrix m(dim, dim);
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i) {
            double s = dc[static_cast<std::size_t>(i)][k];
            for (int j = 0; j < dim; ++j) s += gamma(k, j, i) * c[j];
            m(k, i) = s;
        }
    return m;
}

/// M(j, i) = (nabla_{e_i} alpha)(e_j) in frame components.
inline Matrix covariant_derivative_covector(const Tensor3& gamma, const Frame& frame, const CovectorField& alpha,
                                            const Vector& x, const StepScheme& scheme = {}) {
    const int dim = frame.dim;
    const VectorField comps = form_on_frame(alpha, frame);
    const Vector a = comps(x);
    const auto da = detail::frame_derivatives(comps, frame.matrix(x), x, scheme);
    Matrix m(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) {
            double s = da[static_cast<std::size_t>(i)][j];
            for (int k = 0; k < dim; ++k) s -= gamma(k, j, i) * a[k];
            m(j, i) = s;
        }
    return m;
}

/// Phi = -nabla xi under the Levi-Civita connection, as a coordinate (1,1) field.
inline MatrixField phi_from_reeb(MatrixField metric, Frame frame, VectorField reeb, StepScheme scheme = {}) {
    return [metric = std::move(metric), frame = std::move(frame), reeb = std::move(reeb), scheme](const Vector& x) -> Matrix {
        const Tensor3 lc = levi_civita_symbols(metric, frame, x, scheme);
        const Matrix m = covariant_derivative_vector(lc, frame, reeb, x, scheme);
        return -(frame.matrix(x) * m * frame_inverse(frame, x));
    };
}

struct AssociationFit {
    int sign = 1;
    /// Least-squares ratio of G(X, Phi Y) to (1/2) d eta(X, Y).
    double ratio = 0.0;
    /// max |G(e_i, Phi e_j) - (sign/2) d eta(e_i, e_j)|
    double residual = 0.0;
};

/// Fits the global constant s in G(X, Phi Y) = (s/2) d eta(X, Y) over all frame pairs.
inline AssociationFit association_fit(const ContactMetricStructure& s, const Vector& x) {
    const Matrix g = metric_components(s.metric, s.frame, x).m;
    const Matrix phi = phi_components(s.phi, s.frame, x).m;
    const Matrix lhs = g * phi;
    const Matrix half_d_eta = 0.5 * exterior_derivative_at(s.eta, s.frame, x, s.inner).m;

    AssociationFit fit;
    const double denom = half_d_eta.squaredNorm();
    fit.ratio = denom > 0.0 ? (lhs.array() * half_d_eta.array()).sum() / denom : 0.0;
    fit.sign = fit.ratio >= 0.0 ? 1 : -1;
    fit.residual = (lhs - fit.sign * half_d_eta).cwiseAbs().maxCoeff();
    return fit;
}

/// Canonical connection obtained from the Levi-Civita one:
/// nabla~_X Y = nabla_X Y + s eta(X) Phi Y - eta(Y) nabla_X xi + (nabla_X eta)(Y) xi,
/// with s the fitted association sign.
inline Tensor3 canonical_symbols(const ContactMetricStructure& s, const Vector& x) {
    const int dim = s.dim();
    const Frame& frame = s.frame;
    const Tensor3 lc = levi_civita_symbols(s.metric, frame, x, s.inner);
    const Vector eta_f = form_on_frame(s.eta, frame)(x);
    const Vector xi_c = frame_inverse(frame, x) * s.reeb(x);
    const Matrix phi = phi_components(s.phi, frame, x).m;
    const Matrix dxi = covariant_derivative_vector(lc, frame, s.reeb, x, s.inner);
    const Matrix deta = covariant_derivative_covector(lc, frame, s.eta, x, s.inner);
    const double sign = association_fit(s, x).sign;

    Tensor3 out(dim, Valence{1, 2}, frame.tag);
    for (int k = 0; k < dim; ++k)
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i)
                out(k, j, i) = lc(k, j, i) + sign * eta_f[i] * phi(k, j) - eta_f[j] * dxi(k, i) + deta(j, i) * xi_c[k];
    return out;
}

inline Connection levi_civita_connection(const ContactMetricStructure& s) {
    return {s.name + ":levi_civita", ConnectionSource::koszul_numeric, s.frame,
            [metric = s.metric, frame = s.frame, scheme = s.inner](const Vector& x) {
                return levi_civita_symbols(metric, frame, x, scheme);
            },
            s.inner, s.outer};
}

inline Connection canonical_connection(const ContactMetricStructure& s) {
    return {s.name + ":canonical", ConnectionSource::canonical_from_levi_civita, s.frame,
            [s](const Vector& x) { return canonical_symbols(s, x); }, s.inner, s.outer};
}

/// T(k, i, j): T(e_i, e_j) = nabla_i e_j - nabla_j e_i - [e_i, e_j].
inline Tensor3 torsion_from(const Tensor3& gamma, const Tensor3& sf) {
    const int dim = gamma.dim();
    Tensor3 t(dim, Valence{1, 2}, gamma.frame());
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) t(k, i, j) = gamma(k, j, i) - gamma(k, i, j) - sf(k, i, j);
    return t;
}

inline Tensor3 torsion_at(const Connection& c, const Vector& x) {
    return torsion_from(c.symbols(x), structure_functions_at(c.frame, x, c.inner));
}

/// R(i, j, k, l) = [R(e_l, e_k) e_j]^i
///   = e_l(G^i_{jk}) - e_k(G^i_{jl}) + G^m_{jk} G^i_{ml} - G^m_{jl} G^i_{mk} + g^m_{kl} G^i_{jm},
/// with the frame derivatives taken along the frame vectors' coordinate components.
inline Tensor4 riemann_at(const Connection& c, const Vector& x) {
    const int dim = c.frame.dim;
    const Tensor3 gamma = c.symbols(x);
    const Tensor3 sf = structure_functions_at(c.frame, x, c.inner);
    const auto dgamma = detail::frame_derivatives(c.symbols, c.frame.matrix(x), x, c.outer);

    Tensor4 r(dim, Valence{1, 3}, c.frame.tag);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                for (int l = 0; l < dim; ++l) {
                    double v = dgamma[static_cast<std::size_t>(l)](i, j, k) - dgamma[static_cast<std::size_t>(k)](i, j, l);
                    for (int m = 0; m < dim; ++m)
                        v += gamma(m, j, k) * gamma(i, m, l) - gamma(m, j, l) * gamma(i, m, k) + sf(m, k, l) * gamma(i, j, m);
                    r(i, j, k, l) = v;
                }
    return r;
}

/// Ric_{jl} = sum_i R(i, j, l, i), the trace of X -> R(X, e_j) e_l.
inline Matrix ricci_from(const Tensor4& r) {
    const int dim = r.dim();
    Matrix ric = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int l = 0; l < dim; ++l)
            for (int i = 0; i < dim; ++i) ric(j, l) += r(i, j, l, i);
    return ric;
}

inline Matrix ricci_at(const Connection& c, const Vector& x) { return ricci_from(riemann_at(c, x)); }

/// G^{jl} Ric_{jl} with the full (indefinite) inverse metric.
inline double scalar_curvature(const Matrix& ric, const Matrix& g) {
    return (detail::checked_inverse(g, "scalar_curvature").array() * ric.array()).sum();
}

/// Largest |R(i,j,k,l) + R(i,j,l,k)|.
inline double riemann_antisymmetry_residual(const Tensor4& r) {
    double m = 0.0;
    const int dim = r.dim();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                for (int l = 0; l < dim; ++l) m = std::max(m, std::abs(r(i, j, k, l) + r(i, j, l, k)));
    return m;
}

/// Largest |R(i,j,k,l) + R(i,k,l,j) + R(i,l,j,k)|; vanishes for torsion-free connections.
inline double first_bianchi_residual(const Tensor4& r) {
    double m = 0.0;
    const int dim = r.dim();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                for (int l = 0; l < dim; ++l)
                    m = std::max(m, std::abs(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k)));
    return m;
}

struct EtaEinsteinFit {
    double lambda = 0.0;
    double nu = 0.0;
    double residual = 0.0;
};

/// Least-squares fit of Ric = lambda eta (x) eta + nu G over every frame component.
inline EtaEinsteinFit eta_einstein_fit(const Matrix& ric, const Matrix& g, const Vector& eta_frame) {
    const Matrix ee = eta_frame * eta_frame.transpose();
    const auto sz = ric.size();
    Matrix a(sz, 2);
    a.col(0) = ee.reshaped();
    a.col(1) = g.reshaped();
    const Vector b = ric.reshaped();
    const Vector sol = a.colPivHouseholderQr().solve(b);
    EtaEinsteinFit fit{sol[0], sol[1], 0.0};
    fit.residual = (ric - fit.lambda * ee - fit.nu * g).cwiseAbs().maxCoeff();
    return fit;
}

/// N(k, i, j): components of N_Phi(e_i, e_j) =
/// Phi^2[e_i,e_j] + [Phi e_i, Phi e_j] - Phi[Phi e_i, e_j] - Phi[e_i, Phi e_j].
inline Tensor3 nijenhuis_at(const ContactMetricStructure& s, const Vector& x) {
    const int dim = s.dim();
    const Frame& frame = s.frame;
    const Tensor3 sf = structure_functions_at(frame, x, s.inner);
    const Matrix p = phi_components(s.phi, frame, x).m;
    const auto dp = detail::frame_derivatives(
        [&](const Vector& y) -> Matrix { return phi_components(s.phi, frame, y).m; }, frame.matrix(x), x, s.outer);
    const Matrix p2 = p * p;
    const auto ud = [](int i) { return static_cast<std::size_t>(i); };

    Tensor3 n(dim, Valence{1, 2}, frame.tag);
    Vector b(dim), bpp(dim), bpe(dim), bep(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            for (int k = 0; k < dim; ++k) {
                b[k] = sf(k, i, j);
                double pp = 0.0;
                double pe = -dp[ud(j)](k, i);
                double ep = dp[ud(i)](k, j);
                for (int m = 0; m < dim; ++m) {
                    pp += p(m, i) * dp[ud(m)](k, j) - p(m, j) * dp[ud(m)](k, i);
                    pe += p(m, i) * sf(k, m, j);
                    ep += p(m, j) * sf(k, i, m);
                    for (int l = 0; l < dim; ++l) pp += p(m, i) * p(l, j) * sf(k, m, l);
                }
                bpp[k] = pp;
                bpe[k] = pe;
                bep[k] = ep;
            }
            const Vector v = p2 * b + bpp - p * bpe - p * bep;
            for (int k = 0; k < dim; ++k) n(k, i, j) = v[k];
        }
    return n;
}

/// N_Phi(X, Y) from coordinate Lie brackets of the fields X, Y, Phi X, Phi Y.
inline Vector nijenhuis_from_brackets(const ContactMetricStructure& s, const VectorField& xf, const VectorField& yf,
                                      const Vector& x) {
    const MatrixField phi = s.phi;
    const VectorField pxf = [phi, xf](const Vector& y) -> Vector { return phi(y) * xf(y); };
    const VectorField pyf = [phi, yf](const Vector& y) -> Vector { return phi(y) * yf(y); };
    const Matrix p = phi(x);
    const StepScheme& sc = s.outer;
    return p * p * lie_bracket_at(xf, yf, x, sc) + lie_bracket_at(pxf, pyf, x, sc) -
           p * lie_bracket_at(pxf, yf, x, sc) - p * lie_bracket_at(xf, pyf, x, sc);
}

struct NormalityResidual {
    /// max |N(e_i, e_j) - d eta(e_i, e_j) xi|
    double vertical_law = 0.0;
    /// max |N - eta(N) xi|, the horizontal part of N
    double horizontal = 0.0;
};

inline NormalityResidual normality_residual(const ContactMetricStructure& s, const Vector& x) {
    const int dim = s.dim();
    const Tensor3 n = nijenhuis_at(s, x);
    const Matrix d_eta = exterior_derivative_at(s.eta, s.frame, x, s.inner).m;
    const Vector xi_c = frame_inverse(s.frame, x) * s.reeb(x);
    const Vector eta_f = form_on_frame(s.eta, s.frame)(x);
    NormalityResidual r;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double vertical = 0.0;
            for (int k = 0; k < dim; ++k) vertical += eta_f[k] * n(k, i, j);
            for (int k = 0; k < dim; ++k) {
                r.vertical_law = std::max(r.vertical_law, std::abs(n(k, i, j) - d_eta(i, j) * xi_c[k]));
                r.horizontal = std::max(r.horizontal, std::abs(n(k, i, j) - vertical * xi_c[k]));
            }
        }
    return r;
}

struct ParallelismResiduals {
    double eta = 0.0;
    double xi = 0.0;
    double phi = 0.0;
    double metric = 0.0;
};

/// Max-norm frame components of nabla eta, nabla xi, nabla Phi and nabla G
/// for the given connection symbols at x.
inline ParallelismResiduals parallelism_residuals(const ContactMetricStructure& s, const Tensor3& gamma,
                                                  const Vector& x) {
    const int dim = s.dim();
    const Frame& frame = s.frame;
    const Matrix e = frame.matrix(x);
    const auto ud = [](int i) { return static_cast<std::size_t>(i); };
    ParallelismResiduals r;

    r.eta = covariant_derivative_covector(gamma, frame, s.eta, x, s.inner).cwiseAbs().maxCoeff();
    r.xi = covariant_derivative_vector(gamma, frame, s.reeb, x, s.inner).cwiseAbs().maxCoeff();

    const Matrix p = phi_components(s.phi, frame, x).m;
    const auto dp = detail::frame_derivatives(
        [&](const Vector& y) -> Matrix { return phi_components(s.phi, frame, y).m; }, e, x, s.outer);
    const Matrix g = metric_components(s.metric, frame, x).m;
    const auto dg = detail::frame_derivatives(
        [&](const Vector& y) -> Matrix { return metric_components(s.metric, frame, y).m; }, e, x, s.inner);

    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) {
                double vp = dp[ud(i)](k, j);
                double vg = dg[ud(i)](j, k);
                for (int m = 0; m < dim; ++m) {
                    vp += gamma(k, m, i) * p(m, j) - gamma(m, j, i) * p(k, m);
                    vg -= gamma(m, j, i) * g(m, k) + gamma(m, k, i) * g(j, m);
                }
                r.phi = std::max(r.phi, std::abs(vp));
                r.metric = std::max(r.metric, std::abs(vg));
            }
    return r;
}

struct KillingResiduals {
    /// max frame component of L_xi G
    double lie_metric = 0.0;
    /// max frame component of h = (1/2) L_xi Phi
    double h = 0.0;
    /// max frame component of nabla xi + s Phi (s the association sign)
    double grad_reeb_vs_phi = 0.0;
};

inline KillingResiduals killing_and_h_check(const ContactMetricStructure& s, const Vector& x) {
    const Matrix e = s.frame.matrix(x);
    const Matrix e_inv = frame_inverse(s.frame, x);
    const Vector xi = s.reeb(x);
    const Matrix j = jacobian(s.reeb, x, s.inner); // j(c, a) = d_a xi^c
    const Matrix g = s.metric(x);
    const Matrix p = s.phi(x);

    const Matrix lie_g = derivative_along(s.metric, x, xi, s.inner) + j.transpose() * g + g * j;
    const Matrix lie_phi = derivative_along(s.phi, x, xi, s.outer) - j * p + p * j;

    KillingResiduals r;
    r.lie_metric = (e.transpose() * lie_g * e).cwiseAbs().maxCoeff();
    r.h = (0.5 * e_inv * lie_phi * e).cwiseAbs().maxCoeff();

    const Tensor3 lc = levi_civita_symbols(s.metric, s.frame, x, s.inner);
    const Matrix grad_xi = covariant_derivative_vector(lc, s.frame, s.reeb, x, s.inner);
    const double sign = association_fit(s, x).sign;
    r.grad_reeb_vs_phi = (grad_xi + sign * phi_components(s.phi, s.frame, x).m).cwiseAbs().maxCoeff();
    return r;
}

} // namespace thermogeo
