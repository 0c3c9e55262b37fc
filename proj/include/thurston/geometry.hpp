#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thurston/expr.hpp"

namespace thurston {

/// Which conformal factor the H^2 and punctured-S^2 charts use.
/// `metric_derived` follows the chart metric 4/(1 -+ |z|^2)^2 (dx^2 + dy^2), giving
/// tau = (1 -+ z zb)^2 d_z d_zb. `paper` uses the printed operator with the extra
/// factor 4. Sol, Nil, SL2~ and the line are identical under both.
enum class Convention { metric_derived, paper };

inline std::string_view to_string(Convention c) { return c == Convention::paper ? "paper" : "metric"; }

inline Convention parse_convention(std::string_view s) {
    if (s == "paper") return Convention::paper;
    if (s == "metric" || s == "metric-derived") return Convention::metric_derived;
    throw UsageError("unknown convention '" + std::string(s) + "' (expected metric or paper)");
}

class Geometry;
using GeometryPtr = std::shared_ptr<const Geometry>;

/// Closed forms for the log atom L = log(w), w = 1 -+ z zb, on a chart whose
/// (z, zb) block of the inverse metric is (c/2) w^2:
///   tau(L) = sign * c,  kappa(P, L) = (sign * c / 2) w (z P_z + zb P_zb),  kappa(L, L) = c z zb.
struct LogCalculus {
    Expr w;
    GaussianRational scale;  // c
    int sign = -1;
    std::size_t z = 0;
    std::size_t zb = 0;
};

struct Factor {
    GeometryPtr geometry;
    std::size_t var_offset = 0;
    std::size_t coord_offset = 0;
};

using MetricFn = std::function<Eigen::MatrixXd(std::span<const double>)>;

/// A coordinate chart of a model geometry: its atoms, the symbolic inverse
/// metric that drives tau and kappa, and a numeric metric evaluator used only
/// by the finite-difference oracle.
class Geometry {
public:
    Geometry(std::string id, Convention convention, AtomSetPtr atoms, std::vector<Expr> inverse_metric,
             MetricFn metric, std::optional<LogCalculus> log = std::nullopt, std::vector<Factor> factors = {},
             bool conformal = false)
        : id_(std::move(id)),
          convention_(convention),
          atoms_(std::move(atoms)),
          inverse_metric_(std::move(inverse_metric)),
          metric_(std::move(metric)),
          log_(std::move(log)),
          factors_(std::move(factors)),
          conformal_(conformal) {
        const std::size_t n = atoms_->variables.size();
        if (inverse_metric_.size() != n * n) throw UsageError("inverse metric has wrong size");
    }

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] Convention convention() const noexcept { return convention_; }
    [[nodiscard]] const AtomSetPtr& atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return atoms_->variables.size(); }
    [[nodiscard]] std::size_t chart_dimension() const noexcept { return atoms_->coordinates.size(); }
    [[nodiscard]] const Expr& inverse_metric(std::size_t i, std::size_t j) const {
        return inverse_metric_[i * dimension() + j];
    }
    [[nodiscard]] const std::optional<LogCalculus>& log_calculus() const noexcept { return log_; }
    [[nodiscard]] const std::vector<Factor>& factors() const noexcept { return factors_; }
    [[nodiscard]] bool is_product() const noexcept { return factors_.size() == 2; }
    /// True when an H^2 or punctured-S^2 chart is involved, i.e. the convention matters.
    [[nodiscard]] bool has_conformal_factor() const noexcept { return conformal_; }

    /// Metric matrix in the real chart coordinates.
    [[nodiscard]] Eigen::MatrixXd metric_at(std::span<const double> p) const {
        if (p.size() != chart_dimension()) throw UsageError("point dimension does not match chart");
        if (!atoms_->admissible(p)) throw DomainError("point outside the domain of " + id_);
        return metric_(p);
    }

    [[nodiscard]] Expr zero() const { return Expr(atoms_); }
    [[nodiscard]] Expr constant(const GaussianRational& c) const { return Expr::constant(atoms_, c); }
    [[nodiscard]] Expr var(std::string_view name, int power = 1) const { return Expr::variable(atoms_, name, power); }

private:
    std::string id_;
    Convention convention_;
    AtomSetPtr atoms_;
    std::vector<Expr> inverse_metric_;
    MetricFn metric_;
    std::optional<LogCalculus> log_;
    std::vector<Factor> factors_;
    bool conformal_;
};

namespace detail {

inline void require_member(const Geometry& g, const Expr& f) {
    if (!same_atoms(g.atoms(), f.atoms()))
        throw UsageError("expression does not belong to geometry " + g.id());
}

/// sum_ij G^ij d_i d_j f for log-free f.
inline Expr second_order(const Geometry& g, const Expr& f) {
    Expr out = g.zero();
    if (f.is_zero()) return out;
    const std::size_t n = g.dimension();
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<Expr> di;
        for (std::size_t j = 0; j < n; ++j) {
            const Expr& gij = g.inverse_metric(i, j);
            if (gij.is_zero()) continue;
            if (!di) di = differentiate(f, i);
            if (di->is_zero()) break;
            out += gij * differentiate(*di, j);
        }
    }
    return out;
}

/// sum_ij G^ij d_i a d_j b for log-free a, b.
inline Expr first_order_pairing(const Geometry& g, const Expr& a, const Expr& b) {
    Expr out = g.zero();
    if (a.is_zero() || b.is_zero()) return out;
    const std::size_t n = g.dimension();
    std::vector<Expr> db;
    db.reserve(n);
    for (std::size_t j = 0; j < n; ++j) db.push_back(differentiate(b, j));
    for (std::size_t i = 0; i < n; ++i) {
        const Expr da = differentiate(a, i);
        if (da.is_zero()) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const Expr& gij = g.inverse_metric(i, j);
            if (gij.is_zero() || db[j].is_zero()) continue;
            out += gij * da * db[j];
        }
    }
    return out;
}

/// kappa(P, L) for log-free P.
inline Expr kappa_with_log(const LogCalculus& lc, const Expr& p) {
    const Expr z = Expr::variable(p.atoms(), lc.z);
    const Expr zb = Expr::variable(p.atoms(), lc.zb);
    const Expr radial = z * differentiate(p, lc.z) + zb * differentiate(p, lc.zb);
    return lc.w * radial * (GaussianRational(lc.sign) * lc.scale / GaussianRational(2));
}

}  // namespace detail

/// Laplace-Beltrami operator tau(f) = sum_ij G^ij d_i d_j f. Every chart in the
/// catalog has divergence-free inverse metric densities, so no first-order term
/// appears. Log terms L*Q use tau(L*Q) = L tau(Q) + tau(L) Q; the cross term
/// 2 kappa(L, Q) vanishes because Q never depends on the log's own z, zb.
inline Expr tension(const Geometry& g, const Expr& f) {
    detail::require_member(g, f);
    if (!f.has_log()) return detail::second_order(g, f);
    const auto& lc = g.log_calculus();
    const auto [p, q] = split_log(f);
    Expr out = detail::second_order(g, p);
    out += times_log(detail::second_order(g, q));
    out += q * (GaussianRational(lc->sign) * lc->scale);
    return out;
}

/// Conformality operator kappa(f, h) = g(grad f, grad h), complex bilinear.
/// Throws ClosureError when the result would contain L^2.
inline Expr conformality(const Geometry& g, const Expr& f, const Expr& h) {
    detail::require_member(g, f);
    detail::require_member(g, h);
    if (!f.has_log() && !h.has_log()) return detail::first_order_pairing(g, f, h);
    const LogCalculus& lc = *g.log_calculus();
    const auto [p, q] = split_log(f);
    const auto [p2, q2] = split_log(h);
    Expr out = detail::first_order_pairing(g, p, p2);
    if (!q2.is_zero()) out += times_log(detail::first_order_pairing(g, p, q2)) + q2 * detail::kappa_with_log(lc, p);
    if (!q.is_zero()) out += times_log(detail::first_order_pairing(g, q, p2)) + q * detail::kappa_with_log(lc, p2);
    if (!q.is_zero() && !q2.is_zero()) {
        if (!detail::first_order_pairing(g, q, q2).is_zero())
            throw ClosureError("conformality would produce a squared log term");
        const Expr zzb = Expr::variable(f.atoms(), lc.z) * Expr::variable(f.atoms(), lc.zb);
        out += q * q2 * zzb * lc.scale;
    }
    return out;
}

/// [f, tau f, ..., tau^r f]
inline std::vector<Expr> iterated_tension(const Geometry& g, const Expr& f, int r) {
    if (r < 1) throw UsageError("iteration count must be positive");
    std::vector<Expr> chain{f};
    chain.reserve(static_cast<std::size_t>(r) + 1);
    for (int k = 0; k < r; ++k) chain.push_back(tension(g, chain.back()));
    return chain;
}

struct Residuals {
    double max_rel = 0.0;
    std::size_t points = 0;
};

/// The chain f, tau f, ... up to the first zero (or the bound), and the
/// properness order read off it.
struct VerificationReport {
    Expr input;
    std::vector<Expr> chain;
    std::optional<int> order;  // nullopt: exceeds bound
    bool zero_function = false;
    std::optional<Residuals> residuals;

    [[nodiscard]] bool exceeds_bound() const { return !order.has_value(); }
};

inline constexpr int default_r_max = 8;

/// Smallest r <= r_max with tau^r f = 0 (then tau^{r-1} f != 0). The zero
/// function is reported as order 0 with the zero marker set.
inline VerificationReport classify(const Geometry& g, const Expr& f, int r_max = default_r_max) {
    if (r_max < 1) throw UsageError("r_max must be positive");
    detail::require_member(g, f);
    VerificationReport report{f, {f}, std::nullopt, false, std::nullopt};
    if (f.is_zero()) {
        report.order = 0;
        report.zero_function = true;
        return report;
    }
    for (int r = 1; r <= r_max; ++r) {
        report.chain.push_back(tension(g, report.chain.back()));
        if (report.chain.back().is_zero()) {
            report.order = r;
            return report;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Expr> zeros(const AtomSetPtr& atoms) {
    const std::size_t n = atoms->variables.size();
    return std::vector<Expr>(n * n, Expr(atoms));
}

inline AtomSetPtr real_chart(std::vector<std::string> names) {
    auto a = std::make_shared<AtomSet>();
    a->variables = names;
    a->coordinates = names;
    for (std::size_t i = 0; i < names.size(); ++i) a->bindings.push_back({VariableBinding::Kind::real, i, 0});
    return a;
}

inline GeometryPtr conformal_disc(std::string id, Convention convention, LogKind kind) {
    auto a = std::make_shared<AtomSet>();
    a->variables = {"z", "zb"};
    a->coordinates = {"x", "y"};
    a->bindings = {{VariableBinding::Kind::holomorphic, 0, 1}, {VariableBinding::Kind::antiholomorphic, 0, 1}};
    a->log = LogAtom{kind, 0, 1};
    if (kind == LogKind::one_minus) a->unit_disks.push_back({0, 1});
    AtomSetPtr atoms = a;

    const int sign = kind == LogKind::one_minus ? -1 : 1;
    const Expr zzb = Expr::variable(atoms, 0) * Expr::variable(atoms, 1);
    const Expr w = Expr::constant(atoms, 1) + zzb * GaussianRational(sign);
    const GaussianRational c = convention == Convention::paper ? 4 : 1;

    auto g = zeros(atoms);
    g[1] = g[2] = w * w * (c / GaussianRational(2));
    MetricFn metric = [sign](std::span<const double> p) {
        const double r2 = p[0] * p[0] + p[1] * p[1];
        const double s = 1.0 + sign * r2;
        return Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2) * (4.0 / (s * s)));
    };
    return std::make_shared<const Geometry>(std::move(id), convention, atoms, std::move(g), std::move(metric),
                                            LogCalculus{w, c, sign, 0, 1}, std::vector<Factor>{}, true);
}

inline std::string fresh_name(const std::string& name, const std::vector<std::string>& taken) {
    auto free = [&](const std::string& s) { return std::find(taken.begin(), taken.end(), s) == taken.end(); };
    if (free(name)) return name;
    if (name == "t" && free("s")) return "s";
    for (int k = 2;; ++k)
        if (free(name + std::to_string(k))) return name + std::to_string(k);
}

}  // namespace detail

/// Flat line R with coordinate t: tau f = f_tt.
inline GeometryPtr make_line(Convention convention = Convention::metric_derived) {
    auto atoms = detail::real_chart({"t"});
    auto g = detail::zeros(atoms);
    g[0] = Expr::constant(atoms, 1);
    return std::make_shared<const Geometry>("line", convention, atoms, std::move(g), [](std::span<const double>) {
        return Eigen::MatrixXd(Eigen::MatrixXd::Identity(1, 1));
    });
}

/// Sol: ds^2 = e^{2t} dx^2 + e^{-2t} dy^2 + dt^2.
inline GeometryPtr make_sol(Convention convention = Convention::metric_derived) {
    auto a = std::make_shared<AtomSet>(*detail::real_chart({"x", "y", "t"}));
    a->exp = ExpAtom{2};
    AtomSetPtr atoms = a;
    auto g = detail::zeros(atoms);
    g[0] = Expr::exponential(atoms, -2);
    g[4] = Expr::exponential(atoms, 2);
    g[8] = Expr::constant(atoms, 1);
    return std::make_shared<const Geometry>("sol", convention, atoms, std::move(g), [](std::span<const double> p) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
        m(0, 0) = std::exp(2 * p[2]);
        m(1, 1) = std::exp(-2 * p[2]);
        m(2, 2) = 1;
        return m;
    });
}

/// Nil: ds^2 = dx^2 + dy^2 + (dt - x dy)^2.
inline GeometryPtr make_nil(Convention convention = Convention::metric_derived) {
    auto atoms = detail::real_chart({"x", "y", "t"});
    const Expr one = Expr::constant(atoms, 1);
    const Expr x = Expr::variable(atoms, 0);
    auto g = detail::zeros(atoms);
    g[0] = one;
    g[4] = one;
    g[5] = g[7] = x;
    g[8] = one + x * x;
    return std::make_shared<const Geometry>("nil", convention, atoms, std::move(g), [](std::span<const double> p) {
        const double x = p[0];
        Eigen::MatrixXd m(3, 3);
        m << 1, 0, 0, 0, 1 + x * x, -x, 0, -x, 1;
        return m;
    });
}

/// Universal cover of SL(2,R): ds^2 = (dx^2 + dy^2) / y^2 + (dt + dx / y)^2 on y > 0.
inline GeometryPtr make_sl2(Convention convention = Convention::metric_derived) {
    auto a = std::make_shared<AtomSet>(*detail::real_chart({"x", "y", "t"}));
    a->positive_coordinates.push_back(1);
    AtomSetPtr atoms = a;
    const Expr y = Expr::variable(atoms, 1);
    auto g = detail::zeros(atoms);
    g[0] = y * y;
    g[2] = g[6] = -y;
    g[4] = y * y;
    g[8] = Expr::constant(atoms, 2);
    return std::make_shared<const Geometry>("sl2", convention, atoms, std::move(g), [](std::span<const double> p) {
        const double y = p[1];
        Eigen::MatrixXd m(3, 3);
        m << 2 / (y * y), 0, 1 / y, 0, 1 / (y * y), 0, 1 / y, 0, 1;
        return m;
    });
}

/// Hyperbolic disc |z| < 1 with ds^2 = 4 / (1 - |z|^2)^2 (dx^2 + dy^2).
inline GeometryPtr make_h2(Convention convention = Convention::metric_derived) {
    return detail::conformal_disc("h2", convention, LogKind::one_minus);
}

/// Punctured sphere as C with ds^2 = 4 / (1 + |z|^2)^2 (dx^2 + dy^2).
inline GeometryPtr make_s2p(Convention convention = Convention::metric_derived) {
    return detail::conformal_disc("s2p", convention, LogKind::one_plus);
}

/// Riemannian product. Colliding names in the second factor are renamed
/// (t becomes s, anything else gets a numeric suffix).
inline GeometryPtr product(const GeometryPtr& first, const GeometryPtr& second, std::string id = {}) {
    if (first->convention() != second->convention()) throw UsageError("product factors use different conventions");
    const AtomSet& a1 = *first->atoms();
    const AtomSet& a2 = *second->atoms();
    if (a1.exp && a2.exp) throw UsageError("product would carry two exponential atoms");
    if (a1.log && a2.log) throw UsageError("product would carry two log atoms");

    const std::size_t n1 = a1.variables.size();
    const std::size_t c1 = a1.coordinates.size();
    auto a = std::make_shared<AtomSet>(a1);
    for (const auto& v : a2.variables) a->variables.push_back(detail::fresh_name(v, a->variables));
    for (const auto& c : a2.coordinates) a->coordinates.push_back(detail::fresh_name(c, a->coordinates));
    for (auto b : a2.bindings) {
        b.re += c1;
        b.im += c1;
        a->bindings.push_back(b);
    }
    if (a2.exp) a->exp = ExpAtom{a2.exp->base + n1};
    if (a2.log) a->log = LogAtom{a2.log->kind, a2.log->z + n1, a2.log->zb + n1};
    for (const auto& [x, y] : a2.unit_disks) a->unit_disks.push_back({x + c1, y + c1});
    for (auto c : a2.positive_coordinates) a->positive_coordinates.push_back(c + c1);
    AtomSetPtr atoms = a;

    auto lift = [&](const Expr& e, std::size_t offset) {
        std::vector<Term> terms;
        for (const auto& t : e.terms()) {
            Term out{Monomial{std::vector<int>(atoms->variables.size(), 0), t.monomial.exp_weight,
                              t.monomial.log_power},
                     t.coefficient};
            std::copy(t.monomial.powers.begin(), t.monomial.powers.end(), out.monomial.powers.begin() + offset);
            terms.push_back(std::move(out));
        }
        return Expr::from_terms(atoms, std::move(terms));
    };

    const std::size_t n = atoms->variables.size();
    std::vector<Expr> g(n * n, Expr(atoms));
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j) g[i * n + j] = lift(first->inverse_metric(i, j), 0);
    for (std::size_t i = n1; i < n; ++i)
        for (std::size_t j = n1; j < n; ++j) g[i * n + j] = lift(second->inverse_metric(i - n1, j - n1), n1);

    std::optional<LogCalculus> lc;
    if (const auto& l = first->log_calculus()) lc = LogCalculus{lift(l->w, 0), l->scale, l->sign, l->z, l->zb};
    if (const auto& l = second->log_calculus())
        lc = LogCalculus{lift(l->w, n1), l->scale, l->sign, l->z + n1, l->zb + n1};

    const std::size_t cdim = atoms->coordinates.size();
    MetricFn metric = [first, second, c1, cdim](std::span<const double> p) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cdim), static_cast<Eigen::Index>(cdim));
        const auto i1 = static_cast<Eigen::Index>(c1);
        const auto i2 = static_cast<Eigen::Index>(cdim - c1);
        m.topLeftCorner(i1, i1) = first->metric_at(p.subspan(0, c1));
        m.bottomRightCorner(i2, i2) = second->metric_at(p.subspan(c1));
        return m;
    };
    if (id.empty()) id = "product:" + first->id() + "x" + second->id();
    return std::make_shared<const Geometry>(std::move(id), first->convention(), atoms, std::move(g),
                                            std::move(metric), std::move(lc),
                                            std::vector<Factor>{{first, 0, 0}, {second, n1, c1}},
                                            first->has_conformal_factor() || second->has_conformal_factor());
}

/// Re-expresses a function of one product factor on the product chart.
inline Expr embed(const Geometry& product_geometry, std::size_t factor, const Expr& f) {
    if (!product_geometry.is_product() || factor > 1) throw UsageError("not a product factor");
    const Factor& fac = product_geometry.factors()[factor];
    if (!same_atoms(fac.geometry->atoms(), f.atoms()))
        throw UsageError("expression does not belong to factor " + fac.geometry->id());
    std::vector<Term> terms;
    for (const auto& t : f.terms()) {
        Term out{Monomial{std::vector<int>(product_geometry.dimension(), 0), t.monomial.exp_weight,
                          t.monomial.log_power},
                 t.coefficient};
        std::copy(t.monomial.powers.begin(), t.monomial.powers.end(),
                  out.monomial.powers.begin() + static_cast<std::ptrdiff_t>(fac.var_offset));
        terms.push_back(std::move(out));
    }
    return Expr::from_terms(product_geometry.atoms(), std::move(terms));
}

/// sum_k C(n,k) tau^{n-k}(f1) tau^k(f2), computed on the factors and lifted.
inline Expr product_tension_binomial(const Geometry& product_geometry, const Expr& f1, const Expr& f2, int n) {
    if (!product_geometry.is_product()) throw UsageError("binomial expansion needs a product geometry");
    const auto c1 = iterated_tension(*product_geometry.factors()[0].geometry, f1, n);
    const auto c2 = iterated_tension(*product_geometry.factors()[1].geometry, f2, n);
    Expr out = product_geometry.zero();
    BigInt binom = 1;
    for (int k = 0; k <= n; ++k) {
        out += embed(product_geometry, 0, c1[static_cast<std::size_t>(n - k)]) *
               embed(product_geometry, 1, c2[static_cast<std::size_t>(k)]) * GaussianRational(Rational(binom));
        binom = binom * (n - k) / (k + 1);
    }
    return out;
}

/// Catalog lookup: sol, nil, sl2, h2, s2p, h2xr, s2pxr, line, product:<id>x<id>.
inline GeometryPtr make_geometry(std::string_view id, Convention convention = Convention::metric_derived) {
    if (id == "sol") return make_sol(convention);
    if (id == "nil") return make_nil(convention);
    if (id == "sl2") return make_sl2(convention);
    if (id == "h2") return make_h2(convention);
    if (id == "s2p") return make_s2p(convention);
    if (id == "line") return make_line(convention);
    if (id == "h2xr") return product(make_h2(convention), make_line(convention), "h2xr");
    if (id == "s2pxr") return product(make_s2p(convention), make_line(convention), "s2pxr");
    constexpr std::string_view prefix = "product:";
    if (id.starts_with(prefix)) {
        const std::string_view body = id.substr(prefix.size());
        for (std::size_t pos = body.find('x'); pos != std::string_view::npos; pos = body.find('x', pos + 1)) {
            const auto lhs = body.substr(0, pos);
            const auto rhs = body.substr(pos + 1);
            if (lhs.empty() || rhs.empty() || lhs.starts_with(prefix) || rhs.starts_with(prefix)) continue;
            try {
                return product(make_geometry(lhs, convention), make_geometry(rhs, convention));
            } catch (const UsageError&) {
                continue;
            }
        }
    }
    throw UsageError("unknown geometry '" + std::string(id) + "'");
}

}  // namespace thurston
