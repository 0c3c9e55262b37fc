#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "thurston/geometry.hpp"

namespace thurston {

struct LemmaOptions {
    int n = 2;
    int trials = 100;
    std::uint64_t seed = 20171212;
    Convention convention = Convention::metric_derived;
};

struct LemmaResult {
    std::string check;     // "binomial" or "biharmonic-pair"
    std::string geometry;  // product id
    int trials = 0;
    bool passed = true;
    std::string witness;  // first failing pair, "f1 | f2"
};

namespace detail {

inline GaussianRational small_rational(std::mt19937_64& rng, bool allow_zero = true) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    int n = num(rng);
    while (!allow_zero && n == 0) n = num(rng);
    return GaussianRational(Rational(n, den(rng)));
}

/// Random polynomial in the chart variables of g (total degree <= degree),
/// plus a multiple of the log atom half the time. Never zero.
inline Expr random_factor_function(const Geometry& g, int degree, std::mt19937_64& rng) {
    const auto& vars = g.atoms()->variables;
    std::bernoulli_distribution coin(0.5);
    for (;;) {
        Expr f = g.zero();
        std::vector<int> powers(vars.size(), 0);
        // enumerate exponent vectors of total degree <= degree
        auto visit = [&](auto&& self, std::size_t i, int left) -> void {
            if (i == vars.size()) {
                if (!coin(rng)) return;
                Expr m = g.constant(small_rational(rng));
                for (std::size_t k = 0; k < vars.size(); ++k)
                    if (powers[k] > 0) m *= g.var(vars[k], powers[k]);
                f += m;
                return;
            }
            for (int p = 0; p <= left; ++p) {
                powers[i] = p;
                self(self, i + 1, left - p);
            }
            powers[i] = 0;
        };
        visit(visit, 0, degree);
        if (g.atoms()->log && coin(rng)) f += Expr::logarithm(g.atoms()) * small_rational(rng, false);
        if (!f.is_zero()) return f;
    }
}

/// A proper biharmonic function on a factor: cubic-or-quadratic in t on the
/// line, a log multiple plus a harmonic polynomial on H^2 / the punctured sphere.
inline Expr random_biharmonic(const Geometry& g, std::mt19937_64& rng) {
    if (g.log_calculus()) {
        const Expr z = g.var("z");
        const Expr zb = g.var("zb");
        Expr f = Expr::logarithm(g.atoms()) * small_rational(rng, false);
        for (unsigned k = 0; k <= 3; ++k) f += z.pow(k) * small_rational(rng) + zb.pow(k) * small_rational(rng);
        return f;
    }
    const Expr t = g.var(g.atoms()->variables.front());
    return t.pow(3) * small_rational(rng, false) + t.pow(2) * small_rational(rng) + t * small_rational(rng) +
           g.constant(small_rational(rng));
}

}  // namespace detail

/// Randomised check of tau^n(f1 f2) = sum_k C(n,k) tau^{n-k} f1 tau^k f2 on
/// H^2 x R and R x R, plus the biharmonic-pair property
/// tau^2(f1 f2) = 2 tau(f1) tau(f2) != 0, tau^3(f1 f2) = 0.
inline std::vector<LemmaResult> lemma_check(const LemmaOptions& opts) {
    if (opts.n < 1 || opts.n > 4) throw UsageError("lemma-check supports 1 <= n <= 4");
    if (opts.trials < 1) throw UsageError("trials must be at least 1");
    std::mt19937_64 rng(opts.seed);
    const std::vector<GeometryPtr> products = {product(make_h2(opts.convention), make_line(opts.convention), "h2xr"),
                                               product(make_line(opts.convention), make_line(opts.convention),
                                                       "product:linexline")};
    std::vector<LemmaResult> out;
    for (const auto& g : products) {
        const Geometry& a = *g->factors()[0].geometry;
        const Geometry& b = *g->factors()[1].geometry;
        LemmaResult res{"binomial", g->id(), 0, true, {}};
        for (int trial = 0; trial < opts.trials; ++trial) {
            const Expr f1 = detail::random_factor_function(a, 3, rng);
            const Expr f2 = detail::random_factor_function(b, 5, rng);
            ++res.trials;
            const Expr direct = iterated_tension(*g, embed(*g, 0, f1) * embed(*g, 1, f2), opts.n).back();
            if (direct != product_tension_binomial(*g, f1, f2, opts.n)) {
                res.passed = false;
                res.witness = to_string(f1) + " | " + to_string(f2);
                break;
            }
        }
        out.push_back(std::move(res));
    }
    for (const auto& g : products) {
        const Geometry& a = *g->factors()[0].geometry;
        const Geometry& b = *g->factors()[1].geometry;
        LemmaResult res{"biharmonic-pair", g->id(), 0, true, {}};
        for (int trial = 0; trial < opts.trials; ++trial) {
            const Expr f1 = detail::random_biharmonic(a, rng);
            const Expr f2 = detail::random_biharmonic(b, rng);
            ++res.trials;
            const auto chain = iterated_tension(*g, embed(*g, 0, f1) * embed(*g, 1, f2), 3);
            const Expr twice = embed(*g, 0, tension(a, f1)) * embed(*g, 1, tension(b, f2)) * GaussianRational(2);
            const bool ok = classify(a, f1).order == 2 && classify(b, f2).order == 2 && chain[2] == twice &&
                            !chain[2].is_zero() && chain[3].is_zero();
            if (!ok) {
                res.passed = false;
                res.witness = to_string(f1) + " | " + to_string(f2);
                break;
            }
        }
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace thurston
