#pragma once

#include <random>
#include <vector>

#include "thurston/thurston.hpp"

namespace testing_support {

using thurston::Expr;
using thurston::GaussianRational;
using thurston::Geometry;
using thurston::Rational;

inline GaussianRational rational(std::mt19937_64& rng, int bound = 9, bool nonzero = false) {
    std::uniform_int_distribution<int> num(-bound, bound);
    std::uniform_int_distribution<int> den(1, 6);
    int n = num(rng);
    while (nonzero && n == 0) n = num(rng);
    return GaussianRational(Rational(n, den(rng)));
}

inline GaussianRational gaussian(std::mt19937_64& rng, int bound = 5) {
    std::uniform_int_distribution<int> num(-bound, bound);
    std::uniform_int_distribution<int> den(1, 4);
    return {Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
}

/// Random element of the geometry's algebra: up to `terms` monomials of
/// degree <= 3 per variable, random exp weights when available.
inline Expr random_expr(const Geometry& g, std::mt19937_64& rng, int terms = 4, bool with_log = false) {
    const auto& vars = g.atoms()->variables;
    std::uniform_int_distribution<int> power(0, 3);
    std::uniform_int_distribution<int> weight(-3, 3);
    Expr f = g.zero();
    for (int k = 0; k < terms; ++k) {
        Expr m = g.constant(gaussian(rng));
        for (const auto& v : vars) {
            const int p = power(rng);
            if (p > 0) m *= g.var(v, p);
        }
        if (g.atoms()->exp) m *= Expr::exponential(g.atoms(), weight(rng));
        f += m;
    }
    if (with_log && g.atoms()->log) {
        Expr q = g.constant(rational(rng, 5, true));
        for (const auto& v : vars) {
            if (g.atoms()->owns_log(*g.atoms()->index_of(v))) continue;
            const int p = power(rng);
            if (p > 0) q *= g.var(v, p);
        }
        f += thurston::times_log(q);
    }
    return f;
}

/// Random point inside the chart's safe sampling box.
inline std::vector<double> random_point(const Geometry& g, std::mt19937_64& rng) {
    std::vector<double> p;
    do {
        p = thurston::oracle::sample_point(g, rng);
    } while (!g.atoms()->admissible(p, 0.05));
    return p;
}

}  // namespace testing_support
