#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "thurston/geometry.hpp"

namespace thurston::oracle {

struct OracleConfig {
    double step = 1e-3;
    int richardson_levels = 2;
    double rel_tol = 1e-6;
    double abs_floor = 1e-9;
    std::size_t samples = 100;
    std::uint64_t seed = 20171212;
    double margin = 0.05;  // keeps samples away from |z| = 1 and y = 0
};

using PointFn = std::function<std::complex<double>(std::span<const double>)>;

inline Eigen::MatrixXd metric_at(const Geometry& g, std::span<const double> p) { return g.metric_at(p); }

/// A finite-difference value of tau together with the size of the operator
/// acting on the derivatives of f (used to normalise the residual when tau
/// itself cancels to zero).
struct FdValue {
    std::complex<double> value;
    double scale = 0.0;
};

namespace detail {

inline void check_stencil(const Geometry& g, std::span<const double> p, double reach) {
    std::vector<double> q(p.begin(), p.end());
    for (std::size_t i = 0; i < q.size(); ++i)
        for (double s : {-reach, reach})
            for (std::size_t j = i; j < q.size(); ++j)
                for (double s2 : {-reach, 0.0, reach}) {
                    q[i] += s;
                    q[j] += s2;
                    const bool ok = g.atoms()->admissible(q);
                    q[i] -= s;
                    q[j] -= s2;
                    if (!ok) throw DomainError("finite-difference stencil leaves the domain of " + g.id());
                }
}

/// g^{ij} sqrt|g| at a point.
inline Eigen::MatrixXd densitized_inverse(const Geometry& g, std::span<const double> p) {
    const Eigen::MatrixXd m = g.metric_at(p);
    return m.inverse() * std::sqrt(std::abs(m.determinant()));
}

}  // namespace detail

/// Second-order central-difference tau at one step size, no extrapolation:
///   tau f = g^ij d_i d_j f + (1/sqrt|g|) d_j (g^ij sqrt|g|) d_i f
/// with the metric-density derivative also taken by central differences.
inline FdValue fd_tension_raw(const Geometry& g, const PointFn& f, std::span<const double> p, double h) {
    const std::size_t n = p.size();
    const Eigen::MatrixXd metric = g.metric_at(p);
    const Eigen::MatrixXd inv = metric.inverse();
    const double sqrt_det = std::sqrt(std::abs(metric.determinant()));

    std::vector<double> q(p.begin(), p.end());
    auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
        q[i] += si;
        q[j] += sj;
        const auto v = f(q);
        q[i] -= si;
        q[j] -= sj;
        return v;
    };
    const std::complex<double> f0 = f(q);

    std::vector<std::complex<double>> d1(n);
    std::vector<std::complex<double>> d2(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto fp = at(i, h, i, 0.0);
        const auto fm = at(i, -h, i, 0.0);
        d1[i] = (fp - fm) / (2 * h);
        d2[i * n + i] = (fp - 2.0 * f0 + fm) / (h * h);
        for (std::size_t j = i + 1; j < n; ++j) {
            d2[i * n + j] = d2[j * n + i] =
                (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
        }
    }

    // b^i = (1/sqrt|g|) sum_j d_j (g^ij sqrt|g|)
    std::vector<double> b(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        q[j] += h;
        const Eigen::MatrixXd plus = detail::densitized_inverse(g, q);
        q[j] -= 2 * h;
        const Eigen::MatrixXd minus = detail::densitized_inverse(g, q);
        q[j] += h;
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            b[i] += (plus(ii, jj) - minus(ii, jj)) / (2 * h);
        }
    }

    // scale: operator coefficients against the largest second and first
    // derivatives, so that identically cancelling terms do not leave a zero
    // denominator behind
    double hess = 0.0, grad = 0.0;
    for (const auto& v : d2) hess = std::max(hess, std::abs(v));
    for (const auto& v : d1) grad = std::max(grad, std::abs(v));
    FdValue out{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double gij = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            out.value += gij * d2[i * n + j];
            out.scale += std::abs(gij) * hess;
        }
        const double bi = b[i] / sqrt_det;
        out.value += bi * d1[i];
        out.scale += std::abs(bi) * grad;
    }
    return out;
}

/// tau f at p from the metric alone, Richardson-extrapolated over cfg.richardson_levels
/// step sizes h, h/2, ... (error order h^2 per level).
inline FdValue fd_tension(const Geometry& g, const PointFn& f, std::span<const double> p, const OracleConfig& cfg) {
    if (!(cfg.step > 0)) throw UsageError("finite-difference step must be positive");
    if (cfg.richardson_levels < 1) throw UsageError("at least one Richardson level is required");
    if (p.size() != g.chart_dimension()) throw UsageError("point dimension does not match chart");
    detail::check_stencil(g, p, 2 * cfg.step);

    const auto levels = static_cast<std::size_t>(cfg.richardson_levels);
    std::vector<std::vector<std::complex<double>>> table(levels);
    double h = cfg.step;
    double scale = 0.0;
    for (std::size_t k = 0; k < levels; ++k, h /= 2) {
        const FdValue raw = fd_tension_raw(g, f, p, h);
        scale = raw.scale;
        table[k].push_back(raw.value);
        double factor = 4.0;
        for (std::size_t m = 1; m <= k; ++m, factor *= 4.0)
            table[k].push_back((factor * table[k][m - 1] - table[k - 1][m - 1]) / (factor - 1.0));
    }
    return {table.back().back(), scale};
}

inline FdValue fd_tension(const Geometry& g, const Expr& f, std::span<const double> p, const OracleConfig& cfg) {
    const CompiledExpr compiled(f);
    return fd_tension(g, PointFn(std::cref(compiled)), p, cfg);
}

/// Uniform sample from the safe box of each factor chart: Sol, Nil and the line
/// use [-1, 1]; SL2~ takes y in [0.5, 2]; H^2 the disc |z| <= 0.9; the punctured
/// sphere [-1, 1]^2.
inline std::vector<double> sample_point(const Geometry& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    if (g.is_product()) {
        auto a = sample_point(*g.factors()[0].geometry, rng);
        const auto b = sample_point(*g.factors()[1].geometry, rng);
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    const std::string& id = g.id();
    if (id == "h2") {
        for (;;) {
            const double x = 0.9 * unit(rng);
            const double y = 0.9 * unit(rng);
            if (x * x + y * y <= 0.81) return {x, y};
        }
    }
    if (id == "sl2") return {unit(rng), std::uniform_real_distribution<double>(0.5, 2.0)(rng), unit(rng)};
    std::vector<double> p(g.chart_dimension());
    for (auto& v : p) v = unit(rng);
    return p;
}

struct PointResidual {
    std::vector<double> point;
    int order = 1;
    std::complex<double> symbolic;
    std::complex<double> numeric;
    double rel_error = 0.0;
};

struct CrossValidation {
    double max_rel = 0.0;
    std::size_t points = 0;
    double median_ratio = 1.0;  // Re(symbolic / numeric) over points where numeric is not tiny
    bool passed = true;
    std::vector<PointResidual> residuals;
};

/// Residual of one comparison: |sym - fd| / max(|sym|, operator scale, abs_floor).
inline double relative_error(std::complex<double> symbolic, const FdValue& numeric, const OracleConfig& cfg) {
    const double denom = std::max({std::abs(symbolic), numeric.scale, cfg.abs_floor});
    return std::abs(symbolic - numeric.value) / denom;
}

/// Compares symbolic tau^k f with one finite-difference layer applied to
/// tau^{k-1} f, for k = 1..orders, at cfg.samples seeded points.
inline CrossValidation cross_validate(const Geometry& g, const Expr& f, const OracleConfig& cfg, int orders = 1) {
    if (orders < 1) throw UsageError("orders must be positive");
    const auto chain = iterated_tension(g, f, orders);
    std::vector<CompiledExpr> compiled;
    compiled.reserve(chain.size());
    for (const auto& e : chain) compiled.emplace_back(e);

    std::mt19937_64 rng(cfg.seed);
    CrossValidation out;
    std::vector<double> ratios;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        std::vector<double> p;
        do {
            p = sample_point(g, rng);
        } while (!g.atoms()->admissible(p, cfg.margin));
        for (int k = 1; k <= orders; ++k) {
            const auto& below = compiled[static_cast<std::size_t>(k - 1)];
            const FdValue fd = fd_tension(g, PointFn(std::cref(below)), p, cfg);
            const auto sym = compiled[static_cast<std::size_t>(k)](p);
            const double err = relative_error(sym, fd, cfg);
            out.max_rel = std::max(out.max_rel, err);
            if (std::abs(fd.value) > std::max(cfg.abs_floor, 1e-8 * fd.scale)) ratios.push_back((sym / fd.value).real());
            out.residuals.push_back({p, k, sym, fd.value, err});
        }
        ++out.points;
    }
    if (!ratios.empty()) {
        std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2), ratios.end());
        out.median_ratio = ratios[ratios.size() / 2];
    }
    out.passed = out.max_rel <= cfg.rel_tol;
    return out;
}

}  // namespace thurston::oracle
