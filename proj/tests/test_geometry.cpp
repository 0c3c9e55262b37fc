#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace thurston;
using testing_support::random_expr;
using testing_support::rational;

namespace {

Expr d(const Expr& f, std::string_view a) { return differentiate(f, a); }
Expr d(const Expr& f, std::string_view a, std::string_view b) { return differentiate(differentiate(f, a), b); }

// Operators written out by hand from the inverse metrics.
Expr sol_operator(const Geometry& g, const Expr& f) {
    const auto E = [&](int m) { return Expr::exponential(g.atoms(), m); };
    return E(-2) * d(f, "x", "x") + E(2) * d(f, "y", "y") + d(f, "t", "t");
}

Expr nil_operator(const Geometry& g, const Expr& f) {
    const Expr x = g.var("x");
    return d(f, "x", "x") + d(f, "y", "y") + x * d(f, "y", "t") * 2 + (g.constant(1) + x * x) * d(f, "t", "t");
}

Expr sl2_operator(const Geometry& g, const Expr& f) {
    const Expr y = g.var("y");
    return y * y * (d(f, "x", "x") + d(f, "y", "y")) - y * d(f, "x", "t") * 2 + d(f, "t", "t") * 2;
}

Expr disc_operator(const Geometry& g, const Expr& f, int sign, int c) {
    const Expr w = g.constant(1) + g.var("z") * g.var("zb") * sign;
    return w * w * d(f, "z", "zb") * c;
}

int binomial(int n, int k) {
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST(Operators, SolMatchesHandOperator) {
    std::mt19937_64 rng(1);
    const auto g = make_sol();
    for (int k = 0; k < 30; ++k) {
        const Expr f = random_expr(*g, rng);
        EXPECT_EQ(tension(*g, f), sol_operator(*g, f));
    }
}

TEST(Operators, NilMatchesHandOperator) {
    std::mt19937_64 rng(2);
    const auto g = make_nil();
    for (int k = 0; k < 30; ++k) {
        const Expr f = random_expr(*g, rng);
        EXPECT_EQ(tension(*g, f), nil_operator(*g, f));
    }
}

TEST(Operators, Sl2MatchesHandOperator) {
    std::mt19937_64 rng(3);
    const auto g = make_sl2();
    for (int k = 0; k < 30; ++k) {
        const Expr f = random_expr(*g, rng);
        EXPECT_EQ(tension(*g, f), sl2_operator(*g, f));
    }
}

TEST(Operators, ConformalDiscsMatchHandOperator) {
    std::mt19937_64 rng(4);
    for (auto conv : {Convention::metric_derived, Convention::paper}) {
        const int c = conv == Convention::paper ? 4 : 1;
        const auto h2 = make_h2(conv);
        const auto s2 = make_s2p(conv);
        for (int k = 0; k < 20; ++k) {
            const Expr f = random_expr(*h2, rng);
            EXPECT_EQ(tension(*h2, f), disc_operator(*h2, f, -1, c));
            const Expr g = random_expr(*s2, rng);
            EXPECT_EQ(tension(*s2, g), disc_operator(*s2, g, 1, c));
        }
    }
}

// d_z d_zb log(1 -+ z zb) = -+ 1/w^2, so the w^2 prefactor cancels.
TEST(Operators, LogAtomsHaveConstantTension) {
    for (auto conv : {Convention::metric_derived, Convention::paper}) {
        const GaussianRational c = conv == Convention::paper ? 4 : 1;
        const auto h2 = make_h2(conv);
        const auto s2 = make_s2p(conv);
        EXPECT_EQ(tension(*h2, parse("-log1m", h2->atoms())), h2->constant(c));
        EXPECT_EQ(tension(*s2, parse("log1p", s2->atoms())), s2->constant(c));
        // kappa(L, L) = c z zb
        const Expr L = Expr::logarithm(h2->atoms());
        EXPECT_EQ(conformality(*h2, L, L), h2->var("z") * h2->var("zb") * c);
    }
}

TEST(Operators, ProductRuleAndSymmetry) {
    std::mt19937_64 rng(5);
    for (const auto& g : {make_sol(), make_nil(), make_sl2(), make_h2(), make_geometry("h2xr"),
                          make_geometry("s2pxr", Convention::paper)}) {
        for (int k = 0; k < 15; ++k) {
            const Expr f = random_expr(*g, rng, 3);
            const Expr h = random_expr(*g, rng, 3);
            const Expr kappa = conformality(*g, f, h);
            EXPECT_EQ(kappa, conformality(*g, h, f));
            EXPECT_EQ(tension(*g, f * h), tension(*g, f) * h + f * tension(*g, h) + kappa * 2) << g->id();
        }
    }
}

TEST(Operators, ProductRuleWithLogFactor) {
    std::mt19937_64 rng(6);
    const auto g = make_geometry("h2xr");
    const Expr L = Expr::logarithm(g->atoms());
    for (int k = 0; k < 20; ++k) {
        const Expr t = g->var("t");
        const Expr q = g->constant(rational(rng)) + t * rational(rng) + t.pow(3) * rational(rng);
        EXPECT_EQ(tension(*g, L * q), tension(*g, L) * q + L * tension(*g, q) + conformality(*g, L, q) * 2);
    }
}

TEST(Operators, Linearity) {
    std::mt19937_64 rng(7);
    for (const auto& g : {make_sol(), make_nil(), make_sl2(), make_s2p(), make_geometry("h2xr")}) {
        for (int k = 0; k < 15; ++k) {
            const Expr f = random_expr(*g, rng, 3, true);
            const Expr h = random_expr(*g, rng, 3, true);
            const auto a = rational(rng), b = rational(rng);
            EXPECT_EQ(tension(*g, f * a + h * b), tension(*g, f) * a + tension(*g, h) * b);
        }
    }
}

TEST(Operators, ConventionCovariance) {
    std::mt19937_64 rng(8);
    for (bool sphere : {false, true}) {
        const auto metric = sphere ? make_s2p() : make_h2();
        const auto paper = sphere ? make_s2p(Convention::paper) : make_h2(Convention::paper);
        for (int k = 0; k < 20; ++k) {
            const Expr f = random_expr(*metric, rng, 4, true);
            const Expr fp = parse(to_string(f), paper->atoms());
            EXPECT_EQ(parse(to_string(tension(*paper, fp)), metric->atoms()), tension(*metric, f) * 4);
        }
    }
    // On H^2 x R only the disc part scales.
    const auto m = make_geometry("h2xr");
    const auto p = make_geometry("h2xr", Convention::paper);
    const auto& disc = *m->factors()[0].geometry;
    for (int k = 0; k < 10; ++k) {
        const Expr f1 = random_expr(disc, rng, 3, true);
        const Expr f2 = m->var("t", 3) + m->var("t") * rational(rng);
        const Expr f = embed(*m, 0, f1) * f2;
        const Expr diff = parse(to_string(tension(*p, parse(to_string(f), p->atoms()))), m->atoms()) - tension(*m, f);
        EXPECT_EQ(diff, embed(*m, 0, tension(disc, f1)) * f2 * 3);
    }
}

TEST(Operators, IteratedTensionChain) {
    const auto sl2 = make_sl2();
    const auto chain = iterated_tension(*sl2, parse("x*t^2", sl2->atoms()), 2);
    ASSERT_EQ(chain.size(), 3u);
    EXPECT_EQ(chain[1], parse("4*(x - y*t)", sl2->atoms()));
    EXPECT_TRUE(chain[2].is_zero());
    EXPECT_THROW((void)iterated_tension(*sl2, chain[0], 0), UsageError);
}

TEST(Classify, ZeroFunctionAndBounds) {
    const auto sol = make_sol();
    const auto zero = classify(*sol, sol->zero());
    EXPECT_TRUE(zero.zero_function);
    EXPECT_EQ(zero.order, 0);
    EXPECT_EQ(classify(*sol, sol->constant(1)).order, 1);
    const Expr t8 = sol->var("t", 8);
    EXPECT_EQ(classify(*sol, t8).order, 5);
    const auto bounded = classify(*sol, t8, 3);
    EXPECT_TRUE(bounded.exceeds_bound());
    EXPECT_EQ(bounded.chain.size(), 4u);
    // e^{t} is never polyharmonic on Sol
    EXPECT_TRUE(classify(*sol, Expr::exponential(sol->atoms(), 1)).exceeds_bound());
}

TEST(Classify, ForeignAtomsAreRejected) {
    const auto sol = make_sol();
    const auto nil = make_nil();
    EXPECT_THROW((void)tension(*sol, nil->var("x")), UsageError);
}

TEST(Products, RenamingAndStructure) {
    const auto g = make_geometry("product:solxline");
    EXPECT_EQ(g->atoms()->variables, (std::vector<std::string>{"x", "y", "t", "s"}));
    const auto ll = make_geometry("product:linexline");
    EXPECT_EQ(ll->atoms()->variables, (std::vector<std::string>{"t", "s"}));
    const auto nn = make_geometry("product:nilxnil");
    EXPECT_EQ(nn->dimension(), 6u);
    EXPECT_EQ(make_geometry("h2xr")->atoms()->variables, (std::vector<std::string>{"z", "zb", "t"}));
    EXPECT_THROW((void)make_geometry("product:solxsol"), UsageError);
    EXPECT_THROW((void)make_geometry("product:h2xs2p"), UsageError);
    EXPECT_THROW((void)make_geometry("product:foo"), UsageError);
    EXPECT_THROW((void)make_geometry("euclid"), UsageError);
}

TEST(Products, BinomialExpansionAgainstDirectIteration) {
    std::mt19937_64 rng(9);
    for (const char* id : {"product:linexline", "h2xr", "product:nilxline"}) {
        const auto g = make_geometry(id);
        const auto& a = *g->factors()[0].geometry;
        const auto& b = *g->factors()[1].geometry;
        for (int trial = 0; trial < 10; ++trial) {
            const Expr f1 = random_expr(a, rng, 3, true);
            const Expr f2 = random_expr(b, rng, 3);
            for (int n = 1; n <= 4; ++n) {
                const auto c1 = iterated_tension(a, f1, n);
                const auto c2 = iterated_tension(b, f2, n);
                Expr sum = g->zero();
                for (int k = 0; k <= n; ++k)
                    sum += embed(*g, 0, c1[static_cast<std::size_t>(n - k)]) *
                           embed(*g, 1, c2[static_cast<std::size_t>(k)]) * binomial(n, k);
                EXPECT_EQ(iterated_tension(*g, embed(*g, 0, f1) * embed(*g, 1, f2), n).back(), sum) << id;
                EXPECT_EQ(product_tension_binomial(*g, f1, f2, n), sum);
            }
        }
    }
}

TEST(Products, BiharmonicPairHasOrderThree) {
    const auto g = make_geometry("h2xr");
    const auto& disc = *g->factors()[0].geometry;
    const auto& line = *g->factors()[1].geometry;
    const Expr f1 = parse("-log1m", disc.atoms());
    const Expr f2 = parse("t^2", line.atoms());
    const Expr f = embed(*g, 0, f1) * embed(*g, 1, f2);
    const auto chain = iterated_tension(*g, f, 3);
    EXPECT_EQ(chain[2], g->constant(4));  // 2 * tau(f1) * tau(f2) = 2 * 1 * 2
    EXPECT_TRUE(chain[3].is_zero());
    EXPECT_EQ(classify(*g, f).order, 3);
}

TEST(Metrics, DomainChecks) {
    const std::vector<double> bad{0.0, 0.0, 0.0};
    EXPECT_THROW((void)make_sl2()->metric_at(bad), DomainError);
    const std::vector<double> short_point{0.0};
    EXPECT_THROW((void)make_sol()->metric_at(short_point), UsageError);
}
