#pragma once

// Verification suites: identity checks evaluated over seeded samples on a
// worker pool and aggregated into a Report.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "thermogeo/connections.hpp"
#include "thermogeo/errors.hpp"
#include "thermogeo/heisenberg.hpp"
#include "thermogeo/report.hpp"
#include "thermogeo/statmech.hpp"
#include "thermogeo/structure.hpp"
#include "thermogeo/tps.hpp"

namespace thermogeo::suites {

inline unsigned default_workers() {
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : h;
}

/// f(0), ..., f(count - 1) on up to `workers` threads. Results are stored by
/// index, so the output never depends on scheduling. The first exception (by
/// index) is rethrown after all workers finish.
template <class F>
auto parallel_map(int count, unsigned workers, F f) {
    using R = std::invoke_result_t<F&, int>;
    const auto size = static_cast<std::size_t>(std::max(count, 0));
    std::vector<std::optional<R>> slots(size);
    std::vector<std::exception_ptr> errors(size);
    std::atomic<int> next{0};
    const auto drain = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                slots[static_cast<std::size_t>(i)].emplace(f(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::min(std::max(workers, 1u), static_cast<unsigned>(std::max(count, 1)));
    if (threads == 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(drain);
    }
    std::vector<R> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

/// How a check's base tolerance follows the configured tolerances:
/// closed-form comparisons scale with tol_closed / 1e-8, finite-difference
/// identities with tol_fd / 1e-6, and fixed ones (exact or structural) never.
enum class TolClass { closed, fd, fixed };

struct CheckDef {
    std::string name;
    std::string anchor;
    double tolerance = 0.0;
    TolClass cls = TolClass::fd;
    /// When set, the point-to-point spread of this reported constant also counts as residual.
    std::string spread_of{};
};

/// Per-point values produced by one evaluation.
struct PointOutcome {
    std::map<std::string, double> residuals;
    std::map<std::string, std::map<std::string, double>> constants;
    std::string error;

    void set(const std::string& check, double residual) { residuals[check] = residual; }
    void constant(const std::string& check, const std::string& key, double value) { constants[check][key] = value; }
};

struct Group {
    std::string suite;
    std::string subject;
    int n = 0;
    bool n_in_id = true;
};

inline double scaled_tolerance(const CheckDef& d, const SuiteConfig& c) {
    switch (d.cls) {
    case TolClass::closed: return d.tolerance * (c.tol_closed / 1e-8);
    case TolClass::fd: return d.tolerance * (c.tol_fd / 1e-6);
    case TolClass::fixed: break;
    }
    return d.tolerance;
}

inline std::string check_id(const Group& g, const std::string& name) {
    std::string id = g.suite + "." + g.subject;
    if (g.n_in_id) id += ".n" + std::to_string(g.n);
    return id + "." + name;
}

class Runner {
public:
    Runner(const SuiteConfig& config, unsigned workers) : config_(config), workers_(std::max(workers, 1u)) {}

    [[nodiscard]] const SuiteConfig& config() const { return config_; }
    [[nodiscard]] unsigned workers() const { return workers_; }

    /// Evaluates `eval` at indices 0..count-1 and reduces to one result per check:
    /// the largest residual over points, with exceptions and non-finite values
    /// mapped to +inf. Constants are reported as a mean and, over several
    /// points, a spread (max - min).
    [[nodiscard]] std::vector<CheckResult> evaluate(const Group& g, const std::vector<CheckDef>& defs, int count,
                                                    const std::function<PointOutcome(int)>& eval) const {
        const auto outcomes = parallel_map(count, workers_, [&](int i) {
            try {
                return eval(i);
            } catch (const std::exception& e) {
                PointOutcome o;
                o.error = e.what();
                return o;
            }
        });

        std::vector<CheckResult> out;
        for (const auto& d : defs) {
            CheckResult c;
            c.id = check_id(g, d.name);
            c.suite = g.suite;
            c.anchor = d.anchor;
            c.subject = g.subject;
            c.n = g.n;
            c.points = count;
            c.tolerance = scaled_tolerance(d, config_);

            constexpr double inf = std::numeric_limits<double>::infinity();
            double worst = 0.0;
            std::map<std::string, std::vector<double>> values;
            for (int i = 0; i < count; ++i) {
                const auto& o = outcomes[static_cast<std::size_t>(i)];
                const auto fail = [&](const std::string& why) {
                    worst = inf;
                    if (c.note.empty()) c.note = "point " + std::to_string(i) + ": " + why;
                };
                if (!o.error.empty()) {
                    fail(o.error);
                    continue;
                }
                const auto it = o.residuals.find(d.name);
                if (it == o.residuals.end()) {
                    fail("not evaluated");
                    continue;
                }
                if (!std::isfinite(it->second)) fail("non-finite residual");
                else worst = std::max(worst, it->second);
                if (const auto ct = o.constants.find(d.name); ct != o.constants.end())
                    for (const auto& [k, v] : ct->second) values[k].push_back(v);
            }
            for (const auto& [k, vs] : values) {
                double sum = 0.0;
                for (const double v : vs) sum += v;
                c.constants[k] = sum / static_cast<double>(vs.size());
                if (count > 1) {
                    const auto [lo, hi] = std::minmax_element(vs.begin(), vs.end());
                    const double spread = *hi - *lo;
                    c.constants[k + "_spread"] = spread;
                    if (k == d.spread_of) worst = std::max(worst, spread);
                }
            }
            c.max_residual = worst;
            c.pass = std::isfinite(worst) && worst <= c.tolerance;
            out.push_back(std::move(c));
        }
        return out;
    }

    void run(Report& report, const Group& g, const std::vector<CheckDef>& defs, int count,
             const std::function<PointOutcome(int)>& eval) const {
        for (auto& c : evaluate(g, defs, count, eval)) report.add(std::move(c));
    }

private:
    SuiteConfig config_;
    unsigned workers_;
};

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// diag(1, I_n, -I_n)
inline Matrix split_signature(int n) {
    Vector d = Vector::Ones(2 * n + 1);
    d.tail(n).setConstant(-1.0);
    return d.asDiagonal();
}

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline std::vector<Vector> chart_sample(const SuiteConfig& c, int n) {
    std::vector<Vector> xs;
    for (const auto& p : sample_chart_points(n, c.points, c.seed, c.sampling)) xs.push_back(p.coords());
    return xs;
}

inline std::vector<Vector> group_sample(const SuiteConfig& c, int n) {
    std::vector<Vector> xs;
    for (const auto& g : heisenberg::sample_elements(n, c.points, c.seed)) xs.push_back(g.coords());
    return xs;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Batteries shared by every contact metric structure
// ---------------------------------------------------------------------------

inline std::vector<CheckDef> axiom_checks() {
    return {
        {"reeb_duality", "eta(xi) = 1 and d eta(xi, X) = 0", 1e-7, TolClass::fd},
        {"phi_squared", "Phi^2 = I - eta (x) xi, Phi xi = 0, eta o Phi = 0", 1e-7, TolClass::fd},
        {"compatibility", "G(Phi X, Phi Y) = -G(X, Y) + eta(X) eta(Y)", 1e-7, TolClass::fd},
        {"association", "G(X, Phi Y) = (s/2) d eta(X, Y), s the fitted global sign", 1e-7, TolClass::fd},
        {"association_sign", "association sign s constant over the sample", 0.0, TolClass::fixed, "sign"},
        {"metric_orthonormal", "G(e_i, e_j) = diag(1, I_n, -I_n) in the adapted frame", 1e-10, TolClass::closed},
        {"metric_signature", "signature of G = (n+1, n, 0)", 0.0, TolClass::fixed},
        {"killing", "L_xi G = 0", 1e-7, TolClass::fd},
        {"h_vanishes", "h = (1/2) L_xi Phi = 0", 1e-7, TolClass::fd},
        {"grad_reeb", "nabla xi = -s Phi for the Levi-Civita connection", 1e-7, TolClass::fd},
    };
}

inline void axiom_values(const ContactMetricStructure& s, const Vector& x, PointOutcome& o) {
    const int dim = s.dim();
    const Matrix e = s.frame.matrix(x);
    const Matrix e_inv = frame_inverse(s.frame, x);
    const Vector eta_c = s.eta(x);
    const Vector xi_c = s.reeb(x);
    const Vector eta_f = e.transpose() * eta_c;
    const Vector xi_f = e_inv * xi_c;
    const Matrix p = phi_components(s.phi, s.frame, x).m;
    const Matrix g = metric_components(s.metric, s.frame, x).m;
    const Matrix d_eta = exterior_derivative_at(s.eta, s.frame, x, s.inner).m;
    const Matrix id = Matrix::Identity(dim, dim);

    o.set("reeb_duality", std::max(std::abs(eta_c.dot(xi_c) - 1.0), detail::max_abs(xi_f.transpose() * d_eta)));
    o.set("phi_squared", std::max({detail::max_abs(p * p - (id - xi_f * eta_f.transpose())), detail::max_abs(p * xi_f),
                                   detail::max_abs(eta_f.transpose() * p)}));
    o.set("compatibility", detail::max_abs(p.transpose() * g * p + g - eta_f * eta_f.transpose()));

    const AssociationFit fit = association_fit(s, x);
    o.set("association", fit.residual);
    o.set("association_sign", 0.0);
    o.constant("association_sign", "sign", fit.sign);

    o.set("metric_orthonormal", detail::max_abs(g - detail::split_signature(s.n)));
    const SignatureCount sig = matrix_signature(s.metric(x));
    o.set("metric_signature", std::abs(sig.n_pos - (s.n + 1)) + std::abs(sig.n_neg - s.n) + sig.n_zero);

    const KillingResiduals k = killing_and_h_check(s, x);
    o.set("killing", k.lie_metric);
    o.set("h_vanishes", k.h);
    o.set("grad_reeb", k.grad_reeb_vs_phi);
}

/// `strict` tightens flatness and normality to the closed-form budget, used
/// for structures whose fields are low-degree polynomials.
inline std::vector<CheckDef> connection_checks(bool strict) {
    const double flat_tol = strict ? 1e-8 : 1e-6;
    const TolClass flat_cls = strict ? TolClass::closed : TolClass::fd;
    const double normal_tol = strict ? 1e-8 : 1e-7;
    return {
        {"lc_torsion_free", "Levi-Civita torsion = 0", 1e-8, TolClass::closed},
        {"lc_metricity", "Levi-Civita nabla G = 0", 1e-8, TolClass::closed},
        {"normality", "N_Phi(X, Y) = d eta(X, Y) xi", normal_tol, flat_cls},
        {"nijenhuis_horizontal", "horizontal part of N_Phi = 0", 1e-8, TolClass::closed},
        {"canonical_flatness", "canonical curvature R~ = 0, every component", flat_tol, flat_cls},
        {"canonical_parallel_eta", "nabla~ eta = 0", 1e-6, TolClass::fd},
        {"canonical_parallel_xi", "nabla~ xi = 0", 1e-6, TolClass::fd},
        {"canonical_parallel_phi", "nabla~ Phi = 0", 1e-6, TolClass::fd},
        {"canonical_parallel_metric", "nabla~ G = 0", 1e-6, TolClass::fd},
        {"canonical_torsion_law", "T~(X, Y) = d eta(X, Y) xi", 1e-7, TolClass::fd},
        {"canonical_torsion_reeb", "T~(xi, X) = 0 (round-off only)", 1e-12, TolClass::fixed},
    };
}

inline void connection_values(const ContactMetricStructure& s, const Vector& x, PointOutcome& o) {
    const int dim = s.dim();
    const Tensor3 sf = structure_functions_at(s.frame, x, s.inner);
    const Tensor3 lc = levi_civita_symbols(s.metric, s.frame, x, s.inner);
    o.set("lc_torsion_free", torsion_from(lc, sf).max_abs());
    o.set("lc_metricity", parallelism_residuals(s, lc, x).metric);

    const NormalityResidual nr = normality_residual(s, x);
    o.set("normality", nr.vertical_law);
    o.set("nijenhuis_horizontal", nr.horizontal);

    const Connection cc = canonical_connection(s);
    const Tensor3 gt = cc.symbols(x);
    o.set("canonical_flatness", riemann_at(cc, x).max_abs());
    const ParallelismResiduals pr = parallelism_residuals(s, gt, x);
    o.set("canonical_parallel_eta", pr.eta);
    o.set("canonical_parallel_xi", pr.xi);
    o.set("canonical_parallel_phi", pr.phi);
    o.set("canonical_parallel_metric", pr.metric);

    const Tensor3 t = torsion_from(gt, sf);
    const Matrix d_eta = exterior_derivative_at(s.eta, s.frame, x, s.inner).m;
    const Vector xi_f = frame_inverse(s.frame, x) * s.reeb(x);
    double law = 0.0;
    double reeb = 0.0;
    for (int k = 0; k < dim; ++k)
        for (int j = 0; j < dim; ++j) {
            double along = 0.0;
            for (int i = 0; i < dim; ++i) {
                law = std::max(law, std::abs(t(k, i, j) - d_eta(i, j) * xi_f[k]));
                along += xi_f[i] * t(k, i, j);
            }
            reeb = std::max(reeb, std::abs(along));
        }
    o.set("canonical_torsion_law", law);
    o.set("canonical_torsion_reeb", reeb);
}

/// Largest component of T~ after removing its vertical part eta(T~) xi.
inline double canonical_torsion_horizontal(const ContactMetricStructure& s, const Vector& x) {
    const int dim = s.dim();
    const Tensor3 t = torsion_from(canonical_symbols(s, x), structure_functions_at(s.frame, x, s.inner));
    const Vector eta_f = form_on_frame(s.eta, s.frame)(x);
    const Vector xi_f = frame_inverse(s.frame, x) * s.reeb(x);
    double m = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double vertical = 0.0;
            for (int k = 0; k < dim; ++k) vertical += eta_f[k] * t(k, i, j);
            for (int k = 0; k < dim; ++k) m = std::max(m, std::abs(t(k, i, j) - vertical * xi_f[k]));
        }
    return m;
}

// ---------------------------------------------------------------------------
// Phase space: geometry
// ---------------------------------------------------------------------------

inline std::vector<CheckDef> tps_geometry_checks() {
    return {
        {"frame_duality", "orthonormal coframe (x) canonical frame = identity", 1e-10, TolClass::closed},
        {"heisenberg_null", "eta(Q_a) = eta(P^a) = 0, eta(xi) = 1, Q_a and P^a null", 1e-10, TolClass::closed},
        {"heisenberg_algebra", "[P^a, Q_b] = delta^a_b xi, all other brackets 0", 1e-7, TolClass::fd},
        {"canonical_brackets", "[e+_a, e-_a] = -(1/(2 sqrt p_a))(e+_a + e-_a) + 2 xi, others 0", 1e-7, TolClass::fd},
        {"phi_closed_form", "Phi e+_a = -e-_a, Phi e-_a = -e+_a, Phi xi = 0", 1e-8, TolClass::closed},
        {"d_eta_canonical", "d eta(e+_a, e-_a) = -2, other frame pairs 0", 1e-8, TolClass::closed},
        {"d_eta_coordinate", "d eta = dq^a ^ dp_a", 1e-8, TolClass::closed},
        {"volume", "eta ^ (d eta)^n = n! dw ^ dq^1 ^ dp_1 ^ ... ^ dq^n ^ dp_n", 1e-8, TolClass::closed, "volume"},
        {"w_translation", "component matrices unchanged under w -> w + c", 0.0, TolClass::fixed},
    };
}

inline void tps_geometry_values(const ContactMetricStructure& s, const Vector& x, PointOutcome& o) {
    const int n = s.n;
    const int dim = s.dim();
    const Matrix e = s.frame.matrix(x);
    const Matrix id = Matrix::Identity(dim, dim);
    o.set("frame_duality", detail::max_abs(tps::orthonormal_coframe(n).matrix(x) * e - id));

    const Frame hf = tps::heisenberg_frame(n);
    const Matrix h = hf.matrix(x);
    const Vector eta_h = h.transpose() * s.eta(x);
    const Matrix g_h = h.transpose() * s.metric(x) * h;
    o.set("heisenberg_null", std::max({std::abs(eta_h[0] - 1.0), detail::max_abs(eta_h.tail(2 * n)),
                                       detail::max_abs(g_h.block(1, 1, n, n)), detail::max_abs(g_h.block(n + 1, n + 1, n, n))}));

    Tensor3 heis(dim, Valence{1, 2}, hf.tag);
    Tensor3 canon(dim, Valence{1, 2}, s.frame.tag);
    for (int a = 1; a <= n; ++a) {
        const int b = n + a;
        heis(0, b, a) = 1.0;
        heis(0, a, b) = -1.0;
        const double c = 1.0 / (2.0 * std::sqrt(x[b]));
        canon(0, a, b) = 2.0;
        canon(0, b, a) = -2.0;
        canon(a, a, b) = -c;
        canon(a, b, a) = c;
        canon(b, a, b) = -c;
        canon(b, b, a) = c;
    }
    o.set("heisenberg_algebra", structure_functions_at(hf, x, s.inner).max_abs_diff(heis));
    o.set("canonical_brackets", structure_functions_at(s.frame, x, s.inner).max_abs_diff(canon));

    o.set("phi_closed_form", detail::max_abs(phi_components(s.phi, s.frame, x).m - tps::phi_canonical_closed_form(n)));

    Matrix d_can = Matrix::Zero(dim, dim);
    Matrix d_coord = Matrix::Zero(dim, dim);
    for (int a = 1; a <= n; ++a) {
        d_can(a, n + a) = -2.0;
        d_can(n + a, a) = 2.0;
        d_coord(a, n + a) = 1.0;
        d_coord(n + a, a) = -1.0;
    }
    o.set("d_eta_canonical", detail::max_abs(exterior_derivative_at(s.eta, s.frame, x, s.inner).m - d_can));
    o.set("d_eta_coordinate", detail::max_abs(exterior_derivative_coordinates(s.eta, x, s.inner) - d_coord));

    const double vol = tps::volume_coefficient_at(x, s.inner);
    o.set("volume", std::abs(vol - detail::factorial(n)));
    o.constant("volume", "volume", vol);

    Vector shifted = x;
    shifted[0] += 1.75;
    const double dg = detail::max_abs(metric_components(s.metric, s.frame, x).m -
                                      metric_components(s.metric, s.frame, shifted).m);
    const double dp = detail::max_abs(phi_components(s.phi, s.frame, x).m - phi_components(s.phi, s.frame, shifted).m);
    const double dl = levi_civita_symbols(s.metric, s.frame, x, s.inner)
                          .max_abs_diff(levi_civita_symbols(s.metric, s.frame, shifted, s.inner));
    o.set("w_translation", std::max({dg, dp, dl}));
}

// ---------------------------------------------------------------------------
// Phase space: connections and curvature
// ---------------------------------------------------------------------------

inline std::vector<CheckDef> tps_connection_checks() {
    return {
        {"lc_golden", "Koszul Levi-Civita symbols = closed-form table", 1e-8, TolClass::closed},
        {"canonical_golden", "canonical symbols from Levi-Civita = closed-form table", 1e-8, TolClass::closed},
        {"riemann_antisymmetry", "R^i_{jkl} = -R^i_{jlk} (Levi-Civita)", 1e-8, TolClass::closed},
        {"first_bianchi", "R^i_{jkl} + R^i_{klj} + R^i_{ljk} = 0 (Levi-Civita)", 1e-6, TolClass::fd},
        {"ricci_pattern", "Ric = diag(-2n, 2 I_n, -2 I_n) in the canonical frame", 1e-6, TolClass::fd},
        {"eta_einstein", "Ric = lambda eta (x) eta + nu G, lambda = -(2n+2), nu = 2", 1e-6, TolClass::fd},
        {"scalar_curvature",
         "Levi-Civita scalar curvature = 2n, constant (value derived from the Ricci pattern by the signature trace)",
         1e-6, TolClass::fd, "scalar"},
    };
}

inline void tps_connection_values(const ContactMetricStructure& s, const Vector& x, PointOutcome& o) {
    const int n = s.n;
    const Connection lc = levi_civita_connection(s);
    o.set("lc_golden", lc.symbols(x).max_abs_diff(tps::levi_civita_closed_form(x)));
    o.set("canonical_golden", canonical_symbols(s, x).max_abs_diff(tps::canonical_closed_form(x)));

    const Tensor4 r = riemann_at(lc, x);
    o.set("riemann_antisymmetry", riemann_antisymmetry_residual(r));
    o.set("first_bianchi", first_bianchi_residual(r));

    const Matrix ric = ricci_from(r);
    const Matrix g = metric_components(s.metric, s.frame, x).m;
    Vector pattern = Vector::Constant(2 * n + 1, 2.0);
    pattern[0] = -2.0 * n;
    pattern.tail(n).setConstant(-2.0);
    o.set("ricci_pattern", detail::max_abs(ric - Matrix(pattern.asDiagonal())));

    const EtaEinsteinFit fit = eta_einstein_fit(ric, g, form_on_frame(s.eta, s.frame)(x));
    o.set("eta_einstein", std::max({fit.residual, std::abs(fit.lambda + (2.0 * n + 2.0)), std::abs(fit.nu - 2.0)}));
    o.constant("eta_einstein", "lambda", fit.lambda);
    o.constant("eta_einstein", "nu", fit.nu);

    const double scalar = scalar_curvature(ric, g);
    o.set("scalar_curvature", std::abs(scalar - 2.0 * n));
    o.constant("scalar_curvature", "scalar", scalar);
}

// ---------------------------------------------------------------------------
// Negative controls
// ---------------------------------------------------------------------------

inline constexpr double kPerturbation = 1e-3;

struct Perturbation {
    std::string name;
    std::string anchor;
    std::function<ContactMetricStructure(const ContactMetricStructure&)> apply;
};

/// One-component perturbations of each structure tensor by kPerturbation.
inline std::vector<Perturbation> structure_perturbations(int n) {
    const int dp1 = n + 1;
    return {
        {"control_eta", "eta + 1e-3 dp_1 is detected",
         [dp1](ContactMetricStructure s) {
             s.eta = [f = s.eta, dp1](const Vector& x) -> Vector {
                 Vector v = f(x);
                 v[dp1] += kPerturbation;
                 return v;
             };
             return s;
         }},
        {"control_reeb", "xi + 1e-3 d/dp_1 is detected",
         [dp1](ContactMetricStructure s) {
             s.reeb = [f = s.reeb, dp1](const Vector& x) -> Vector {
                 Vector v = f(x);
                 v[dp1] += kPerturbation;
                 return v;
             };
             return s;
         }},
        {"control_phi", "Phi^{p_1}_{p_1} + 1e-3 is detected",
         [dp1](ContactMetricStructure s) {
             s.phi = [f = s.phi, dp1](const Vector& x) -> Matrix {
                 Matrix m = f(x);
                 m(dp1, dp1) += kPerturbation;
                 return m;
             };
             return s;
         }},
        {"control_metric", "G_ww + 1e-3 is detected",
         [](ContactMetricStructure s) {
             s.metric = [f = s.metric](const Vector& x) -> Matrix {
                 Matrix m = f(x);
                 m(0, 0) += kPerturbation;
                 return m;
             };
             return s;
         }},
    };
}

/// Detection-power checks: residual = 1 / (largest residual-to-tolerance
/// ratio the perturbation provokes), tolerance 1, so a pass means detection.
inline void tps_controls(const Runner& runner, Report& report, const ContactMetricStructure& s,
                         const std::vector<Vector>& xs) {
    const SuiteConfig& cfg = runner.config();
    const int count = static_cast<int>(std::min<std::size_t>(xs.size(), 5));
    const Group base{"connections", "tps", s.n};
    const auto as_detection = [&](const std::string& name, const std::string& anchor, double ratio,
                                  const std::string& note, std::map<std::string, double> constants) {
        CheckResult c;
        c.id = check_id(base, name);
        c.suite = base.suite;
        c.anchor = anchor;
        c.subject = base.subject;
        c.n = s.n;
        c.points = count;
        c.tolerance = 1.0;
        c.max_residual = ratio > 0.0 ? 1.0 / ratio : std::numeric_limits<double>::infinity();
        c.pass = c.max_residual <= c.tolerance;
        c.constants = std::move(constants);
        c.constants["detection_ratio"] = ratio;
        c.note = note;
        report.add(std::move(c));
    };

    std::vector<CheckDef> battery = axiom_checks();
    for (auto& d : connection_checks(false)) battery.push_back(d);

    for (const auto& pert : structure_perturbations(s.n)) {
        const ContactMetricStructure perturbed = pert.apply(s);
        const auto results = runner.evaluate(Group{"control", pert.name, s.n}, battery, count, [&](int i) {
            PointOutcome o;
            axiom_values(perturbed, xs[static_cast<std::size_t>(i)], o);
            connection_values(perturbed, xs[static_cast<std::size_t>(i)], o);
            return o;
        });
        double ratio = 0.0;
        int detecting = 0;
        std::string strongest;
        for (const auto& r : results) {
            const double q = r.tolerance > 0.0 ? r.max_residual / r.tolerance
                                               : (r.max_residual > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            if (!r.pass) ++detecting;
            if (q > ratio) {
                ratio = q;
                strongest = r.id.substr(r.id.rfind('.') + 1);
            }
        }
        as_detection(pert.name, pert.anchor, ratio, strongest.empty() ? "" : "strongest detector: " + strongest,
                     {{"detecting_checks", detecting}});
    }

    // The Phi perturbation alone must move the normality residual to >= 1e-4.
    {
        const ContactMetricStructure perturbed = structure_perturbations(s.n)[2].apply(s);
        const auto values = parallel_map(count, runner.workers(), [&](int i) {
            return normality_residual(perturbed, xs[static_cast<std::size_t>(i)]).vertical_law;
        });
        const double weakest = *std::min_element(values.begin(), values.end());
        as_detection("control_phi_normality", "Phi perturbed by 1e-3 gives normality residual >= 1e-4",
                     weakest / 1e-4, "", {{"min_normality_residual", weakest}});
    }

    // A w-dependent metric perturbation must break the Killing property of xi.
    {
        ContactMetricStructure perturbed = s;
        perturbed.metric = [f = s.metric](const Vector& x) -> Matrix {
            Matrix m = f(x);
            m(1, 1) += kPerturbation * x[0];
            return m;
        };
        const double tol = scaled_tolerance(axiom_checks()[7], cfg);
        const auto values = parallel_map(count, runner.workers(), [&](int i) {
            return killing_and_h_check(perturbed, xs[static_cast<std::size_t>(i)]).lie_metric;
        });
        const double weakest = *std::min_element(values.begin(), values.end());
        as_detection("control_killing", "G + 1e-3 w dq^1 dq^1 gives L_xi G != 0", weakest / tol, "",
                     {{"min_lie_metric", weakest}});
    }

    // Levi-Civita symbols in place of the canonical ones must fail parallelism.
    {
        const double tol = scaled_tolerance(connection_checks(false)[5], cfg);
        const auto values = parallel_map(count, runner.workers(), [&](int i) {
            const Vector& x = xs[static_cast<std::size_t>(i)];
            const ParallelismResiduals pr = parallelism_residuals(s, levi_civita_symbols(s.metric, s.frame, x, s.inner), x);
            return std::max({pr.eta, pr.xi, pr.phi});
        });
        const double weakest = *std::min_element(values.begin(), values.end());
        as_detection("control_lc_parallelism", "Levi-Civita symbols do not parallelize eta, xi, Phi", weakest / tol, "",
                     {{"min_parallelism_residual", weakest}});
    }
}

// ---------------------------------------------------------------------------
// Hyperbolic Heisenberg group
// ---------------------------------------------------------------------------

inline std::vector<CheckDef> heisenberg_group_checks() {
    return {
        {"group_identity", "e g = g e = g", 1e-12, TolClass::fixed},
        {"group_inverse", "g g^-1 = g^-1 g = e", 1e-12, TolClass::fixed},
        {"group_associativity", "(a b) c = a (b c)", 1e-12, TolClass::fixed},
    };
}

inline std::vector<CheckDef> heisenberg_frame_checks(int n) {
    std::vector<CheckDef> d{
        {"left_invariance", "dL_g maps the frame at e to the frame at g", 1e-9, TolClass::closed},
        {"frame_brackets", "[U_k, V_k] = 2 xi, all other brackets 0", 1e-10, TolClass::closed},
        {"contact_duality", "Theta(xi) = 1, Theta(U_k) = Theta(V_k) = 0", 1e-10, TolClass::closed},
        {"d_theta", "d Theta(U_k, V_k) = -2, other frame pairs 0", 1e-10, TolClass::closed},
        {"contact_volume", "Theta ^ (d Theta)^n = (1/2)(-2)^n n! dt ^ du^1 ^ dv^1 ^ ...", 1e-10, TolClass::closed},
        {"phi_action", "Phi U_k = V_k, Phi V_k = U_k, Phi xi = 0", 1e-10, TolClass::closed},
    };
    if (n == 1)
        d.push_back({"canonical_torsion_horizontal", "n = 1: T~ has no component beyond d Theta (x) xi", 1e-8,
                     TolClass::closed});
    return d;
}

inline void heisenberg_frame_values(const ContactMetricStructure& s, const Vector& x, PointOutcome& o) {
    const int n = s.n;
    const int dim = s.dim();
    o.set("left_invariance", heisenberg::left_invariance_residual(heisenberg::GroupElement::from_coords(x)));

    Tensor3 brackets(dim, Valence{1, 2}, s.frame.tag);
    Matrix d_theta = Matrix::Zero(dim, dim);
    for (int k = 1; k <= n; ++k) {
        brackets(0, k, n + k) = 2.0;
        brackets(0, n + k, k) = -2.0;
        d_theta(k, n + k) = -2.0;
        d_theta(n + k, k) = 2.0;
    }
    o.set("frame_brackets", structure_functions_at(s.frame, x, s.inner).max_abs_diff(brackets));

    Vector dual = Vector::Zero(dim);
    dual[0] = 1.0;
    o.set("contact_duality", detail::max_abs(form_on_frame(s.eta, s.frame)(x) - dual));
    o.set("d_theta", detail::max_abs(exterior_derivative_at(s.eta, s.frame, x, s.inner).m - d_theta));

    const double vol = contact_volume_coefficient(s.eta(x), exterior_derivative_coordinates(s.eta, x, s.inner));
    o.set("contact_volume", std::abs(vol - 0.5 * std::pow(-2.0, n) * detail::factorial(n)));
    o.constant("contact_volume", "volume", vol);

    o.set("phi_action", detail::max_abs(phi_components(s.phi, s.frame, x).m - heisenberg::phi_frame(n)));
    if (n == 1) o.set("canonical_torsion_horizontal", canonical_torsion_horizontal(s, x));
}

inline void heisenberg_suite(const Runner& runner, Report& report, int n) {
    const SuiteConfig& cfg = runner.config();
    const Group g{"heisenberg", "hh", n};

    constexpr int triples = 1000;
    const auto elems = heisenberg::sample_elements(n, 3 * triples, cfg.seed);
    runner.run(report, g, heisenberg_group_checks(), triples, [&](int i) {
        using namespace heisenberg;
        const auto& a = elems[static_cast<std::size_t>(3 * i)];
        const auto& b = elems[static_cast<std::size_t>(3 * i + 1)];
        const auto& c = elems[static_cast<std::size_t>(3 * i + 2)];
        const GroupElement e = GroupElement::identity(n);
        PointOutcome o;
        o.set("group_identity", std::max(distance_max(multiply(e, a), a), distance_max(multiply(a, e), a)));
        o.set("group_inverse",
              std::max(distance_max(multiply(a, inverse(a)), e), distance_max(multiply(inverse(a), a), e)));
        o.set("group_associativity", distance_max(multiply(multiply(a, b), c), multiply(a, multiply(b, c))));
        return o;
    });

    if (n == 1) {
        const CheckDef def{"printed_law_example", "twist -1 law: (1,0,0)(0,1,0) = (1,1,-1), (1,2,3)^-1 = (-1,-2,-3)",
                           0.0, TolClass::fixed};
        runner.run(report, g, {def}, 1, [&](int) {
            using namespace heisenberg;
            const auto el = [](double u, double v, double t) {
                return GroupElement(Vector::Constant(1, u), Vector::Constant(1, v), t);
            };
            PointOutcome o;
            o.set(def.name, std::max({distance_max(multiply(el(1, 0, 0), el(0, 1, 0), kPrintedTwist), el(1, 1, -1)),
                                      distance_max(inverse(el(1, 2, 3)), el(-1, -2, -3)),
                                      distance_max(multiply(el(1, 2, 3), el(-1, -2, -3), kPrintedTwist), el(0, 0, 0))}));
            return o;
        });
    }

    const ContactMetricStructure s = heisenberg::structure(n);
    const auto xs = detail::group_sample(cfg, n);
    std::vector<CheckDef> defs = heisenberg_frame_checks(n);
    for (auto& d : axiom_checks()) defs.push_back(d);
    for (auto& d : connection_checks(true)) defs.push_back(d);
    runner.run(report, g, defs, static_cast<int>(xs.size()), [&](int i) {
        PointOutcome o;
        const Vector& x = xs[static_cast<std::size_t>(i)];
        heisenberg_frame_values(s, x, o);
        axiom_values(s, x, o);
        connection_values(s, x, o);
        return o;
    });
}

// ---------------------------------------------------------------------------
// Statistical layer
// ---------------------------------------------------------------------------

inline constexpr int kModelGridPoints = 21;

/// Base point of the relative-entropy expansion: q = (0.3, ..., 0.3) when the
/// 10%-shrunk q-domain holds it, the domain center otherwise. Symmetric models
/// centered at 0 have w''' = 0 there and would show order 4 instead of 3.
inline Vector expansion_base_point(const statmech::GibbsModel& m) {
    const Vector preferred = Vector::Constant(m.n(), 0.3);
    const Vector margin = 0.1 * (m.q_domain.hi - m.q_domain.lo);
    const statmech::Box inner{m.q_domain.lo + margin, m.q_domain.hi - margin};
    if (inner.contains(preferred)) return preferred;
    return 0.5 * (m.q_domain.lo + m.q_domain.hi);
}

inline std::vector<CheckDef> model_point_checks(bool has_exact) {
    std::vector<CheckDef> d{
        {"gradient", "p = grad w", 1e-6, TolClass::fd},
        {"hessian", "covariance = Hess w", 1e-6, TolClass::fd},
        {"kl_bregman", "KL integral = w(q') - w(q) - (q' - q).p(q)", 1e-8, TolClass::closed},
        {"kl_nonnegative", "KL(q, q') >= 0 with equality only at q' = q", 1e-12, TolClass::fixed},
        {"control_pullback_metric", "control-embedding pullback of G = Fisher-Rao control metric", 1e-8,
         TolClass::closed},
        {"legendre_pullback_metric", "Legendre-embedding pullback of G = Hess w", 1e-8, TolClass::closed},
        {"control_pullback_contact", "control-embedding pullback of eta = <ds> (exact)", 0.0, TolClass::fixed},
        {"legendre_pullback_contact", "Legendre-embedding pullback of eta = 0 (first law)", 1e-7, TolClass::fd},
        {"second_moment_identity", "<ds^2> = Var(ds) + <ds>^2", 1e-9, TolClass::closed},
        {"second_moment_fisher_rao", "<ds^2> = Fisher-Rao control metric", 1e-9, TolClass::closed},
        {"covariance_positive", "covariance positive definite", 0.0, TolClass::fixed},
        {"invertibility", "det Hess w != 0 (local equilibrium)", 0.0, TolClass::fixed},
    };
    if (has_exact) d.insert(d.begin(), {"closed_form", "quadrature w, p, covariance = exact expressions", 1e-8, TolClass::closed});
    return d;
}

inline void model_point_values(const statmech::GibbsModel& m, const Vector& q, const Vector& q_next, PointOutcome& o) {
    using namespace statmech;
    const double w = log_partition(m, q);
    const Vector p = mean_observables(m, q);
    const Matrix c = covariance_matrix(m, q);
    if (m.exact.complete())
        o.set("closed_form", std::max({std::abs(w - m.exact.log_partition(q)), detail::max_abs(p - m.exact.mean(q)),
                                       detail::max_abs(c - m.exact.covariance(q))}));

    o.set("gradient", detail::max_abs(gradient([&](const Vector& y) { return log_partition(m, y); }, q) - p));
    const Matrix hess = induced_metric(m, q).metric;
    o.set("hessian", detail::max_abs(hess - c));

    const double kl = relative_entropy(m, q, q_next);
    o.set("kl_bregman", std::abs(kl - relative_entropy_bregman(m, q, q_next)));
    double neg = std::max(-kl, std::abs(relative_entropy(m, q, q)));
    if (q_next != q && !(kl > 0.0)) neg = std::max(neg, 1.0);
    o.set("kl_nonnegative", std::max(neg, 0.0));

    const Matrix fr = fisher_rao_control_metric(m, q);
    o.set("control_pullback_metric", detail::max_abs(control_pullback_metric(m, q) - fr));
    o.set("legendre_pullback_metric", detail::max_abs(legendre_pullback_metric(m, q) - hess));
    const EntropyDifferential ds = entropy_differential(m, q);
    o.set("control_pullback_contact", detail::max_abs(control_pullback_contact(m, q) - ds.first_moment));
    o.set("legendre_pullback_contact", detail::max_abs(legendre_pullback_contact(m, q)));
    o.set("second_moment_identity", second_moment_identity_residual(ds));
    o.set("second_moment_fisher_rao", detail::max_abs(ds.second_moment - fr));

    const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(c).eigenvalues().minCoeff();
    o.set("covariance_positive", min_eig > 0.0 ? 0.0 : 1.0);
    o.constant("covariance_positive", "min_eigenvalue", min_eig);
    o.set("invertibility", invertibility_check(m, q).ok ? 0.0 : 1.0);
}

/// Observed orders of the quadratic and symmetric-sum remainders of KL at the
/// expansion base point, from steps 0.1, 0.05, 0.025 along (1, ..., 1).
inline void expansion_order_values(const statmech::GibbsModel& m, PointOutcome& o) {
    using namespace statmech;
    const Vector q0 = expansion_base_point(m);
    const Vector dir = Vector::Ones(m.n());
    const Matrix c = covariance_matrix(m, q0);
    std::vector<double> cubic;
    std::vector<double> quartic;
    for (const double h : {0.1, 0.05, 0.025}) {
        const Vector d = h * dir;
        cubic.push_back(std::abs(kl_quadratic_residual(m, q0, d).residual));
        quartic.push_back(std::abs(relative_entropy(m, q0, q0 + d) + relative_entropy(m, q0, q0 - d) - d.dot(c * d)));
    }
    double worst3 = 0.0;
    double worst4 = 0.0;
    for (std::size_t k = 0; k + 1 < cubic.size(); ++k) {
        const double o3 = std::log2(cubic[k] / cubic[k + 1]);
        const double o4 = std::log2(quartic[k] / quartic[k + 1]);
        const std::string tag = "order_" + std::to_string(k + 1);
        o.constant("kl_order", tag, o3);
        o.constant("kl_symmetric_order", tag, o4);
        worst3 = std::max(worst3, std::isfinite(o3) ? std::abs(o3 - 3.0) : std::numeric_limits<double>::infinity());
        worst4 = std::max(worst4, std::isfinite(o4) ? std::abs(o4 - 4.0) : std::numeric_limits<double>::infinity());
    }
    o.set("kl_order", worst3);
    o.set("kl_symmetric_order", worst4);
    for (int a = 0; a < m.n(); ++a) o.constant("kl_order", "q0_" + std::to_string(a + 1), q0[a]);
}

inline double two_level_spot_residual(const statmech::GibbsModel& m) {
    using namespace statmech;
    const Vector zero = Vector::Zero(1);
    const Vector half = Vector::Constant(1, 0.5);
    Vector ds(2);
    ds << 1.0, -std::tanh(0.5);
    Vector embed(3);
    embed << std::log(2.0 * std::cosh(0.5)), 0.5, std::tanh(0.5);
    return std::max({std::abs(log_partition(m, zero) - std::numbers::ln2),
                     std::abs(relative_entropy(m, zero, Vector::Constant(1, 0.1)) - std::log(std::cosh(0.1))),
                     std::abs(mean_observables(m, zero)[0]), std::abs(covariance_matrix(m, zero)(0, 0) - 1.0),
                     detail::max_abs(fisher_rao_control_metric(m, zero) - Matrix::Identity(2, 2)),
                     detail::max_abs(entropy_differential(m, half).first_moment - ds),
                     detail::max_abs(legendre_embed(m, half) - embed)});
}

inline double gaussian_quadratic_spot_residual(const statmech::GibbsModel& m) {
    using namespace statmech;
    const Vector q = Vector::Constant(1, -1.0);
    Matrix fr(2, 2);
    fr << 1.0, -0.5, -0.5, 0.75;
    return std::max({std::abs(log_partition(m, q) - 0.5 * std::log(std::numbers::pi)),
                     std::abs(mean_observables(m, q)[0] - 0.5), std::abs(covariance_matrix(m, q)(0, 0) - 0.5),
                     detail::max_abs(fisher_rao_control_metric(m, q) - fr)});
}

inline void statmech_suite(const Runner& runner, Report& report, const statmech::GibbsModel& m, bool builtin) {
    const Group g{"statmech", m.name, m.n(), false};
    const auto grid = statmech::q_grid(m, kModelGridPoints);
    runner.run(report, g, model_point_checks(m.exact.complete()), kModelGridPoints, [&](int i) {
        PointOutcome o;
        const auto k = static_cast<std::size_t>(i);
        model_point_values(m, grid[k], grid[(k + 1) % grid.size()], o);
        return o;
    });

    runner.run(report, g,
               {{"kl_order", "KL - (1/2) d^T c d = O(|d|^3): observed order 3 +- 0.3", 0.3, TolClass::fixed},
                {"kl_symmetric_order", "KL(q, q+d) + KL(q, q-d) - d^T c d = O(|d|^4): observed order 4 +- 0.3", 0.3,
                 TolClass::fixed}},
               1, [&](int) {
                   PointOutcome o;
                   expansion_order_values(m, o);
                   return o;
               });

    if (builtin && (m.name == "two_level" || m.name == "gaussian_quadratic")) {
        const bool two = m.name == "two_level";
        const CheckDef def{"spot_values",
                           two ? "w(0) = ln 2, KL(0 -> 0.1) = ln cosh 0.1, p(0) = 0, c(0) = 1, <ds>(0.5) = (1, -tanh 0.5)"
                               : "w(-1) = (1/2) ln pi, p(-1) = 0.5, c(-1) = 0.5, Fisher-Rao = [[1, -0.5], [-0.5, 0.75]]",
                           1e-9, TolClass::closed};
        runner.run(report, g, {def}, 1, [&](int) {
            PointOutcome o;
            o.set(def.name, two ? two_level_spot_residual(m) : gaussian_quadratic_spot_residual(m));
            return o;
        });
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline constexpr int kExitPass = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitConfigError = 2;

struct RunOptions {
    unsigned workers = default_workers();
    /// Models available by name in addition to the built-ins; these take precedence.
    std::vector<statmech::GibbsModel> extra_models;
};

inline std::vector<std::pair<statmech::GibbsModel, bool>> resolve_models(const SuiteConfig& config,
                                                                         const RunOptions& options) {
    std::vector<std::pair<statmech::GibbsModel, bool>> out;
    std::set<std::string> seen;
    for (const auto& name : config.models) {
        if (!seen.insert(name).second) throw ConfigError("model '" + name + "' selected twice");
        const auto it = std::find_if(options.extra_models.begin(), options.extra_models.end(),
                                     [&](const statmech::GibbsModel& m) { return m.name == name; });
        if (it != options.extra_models.end()) {
            it->validate();
            out.emplace_back(*it, false);
        } else {
            out.emplace_back(statmech::builtin_model(name), true);
        }
    }
    return out;
}

inline int exit_code(const Report& r) { return r.all_passed() ? kExitPass : kExitChecksFailed; }

/// Runs every check of the selected suites. Invalid configuration throws
/// ConfigError; failing checks are recorded in the report, never thrown.
inline Report run_suite(const SuiteConfig& config, const RunOptions& options = {}) {
    config.validate();
    const auto models = config.runs("statmech") ? resolve_models(config, options)
                                                : std::vector<std::pair<statmech::GibbsModel, bool>>{};
    const auto start = std::chrono::steady_clock::now();
    const Runner runner(config, options.workers);
    Report report;
    report.config = config;

    if (config.runs("geometry"))
        for (const int n : config.n) {
            const ContactMetricStructure s = tps::structure(n);
            const auto xs = detail::chart_sample(config, n);
            std::vector<CheckDef> defs = tps_geometry_checks();
            for (auto& d : axiom_checks()) defs.push_back(d);
            runner.run(report, Group{"geometry", "tps", n}, defs, static_cast<int>(xs.size()), [&](int i) {
                PointOutcome o;
                const Vector& x = xs[static_cast<std::size_t>(i)];
                tps_geometry_values(s, x, o);
                axiom_values(s, x, o);
                return o;
            });
        }

    if (config.runs("connections"))
        for (const int n : config.n) {
            const ContactMetricStructure s = tps::structure(n);
            const auto xs = detail::chart_sample(config, n);
            std::vector<CheckDef> defs = tps_connection_checks();
            for (auto& d : connection_checks(false)) defs.push_back(d);
            runner.run(report, Group{"connections", "tps", n}, defs, static_cast<int>(xs.size()), [&](int i) {
                PointOutcome o;
                const Vector& x = xs[static_cast<std::size_t>(i)];
                tps_connection_values(s, x, o);
                connection_values(s, x, o);
                return o;
            });
            tps_controls(runner, report, s, xs);
        }

    for (const auto& [m, builtin] : models) statmech_suite(runner, report, m, builtin);

    if (config.runs("heisenberg"))
        for (const int n : config.n) heisenberg_suite(runner, report, n);

    report.tally();
    report.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace thermogeo::suites
