#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace thurston;
using testing_support::gaussian;
using testing_support::rational;

namespace {

std::vector<GaussianRational> draw(std::mt19937_64& rng, std::size_t n) {
    std::vector<GaussianRational> v(n);
    for (auto& x : v) x = rational(rng, 9, true);
    return v;
}

const std::vector<std::string> printed_axis = {
    "2*x^2 - E(-2)",
    "2*x^3 - 3*x*E(-2)",
    "8*x^4 - 24*x^2*E(-2) + 3*E(-4)",
    "8*x^5 - 40*x^3*E(-2) + 15*x*E(-4)",
    "16*x^6 - 120*x^4*E(-2) + 90*x^2*E(-4) - 5*E(-6)",
    "16*x^7 - 168*x^5*E(-2) + 210*x^3*E(-4) - 35*x*E(-6)",
};

}  // namespace

TEST(SolAxis, PrintedFamiliesAreHarmonic) {
    const auto sol = make_sol();
    for (const auto& text : printed_axis) EXPECT_TRUE(tension(*sol, parse(text, sol->atoms())).is_zero()) << text;
}

TEST(SolAxis, GeneratorReproducesPrintedForms) {
    const auto sol = make_sol();
    for (int n = 2; n <= 7; ++n)
        EXPECT_EQ(to_string(sol_harmonic_axis_family(sol, n)), printed_axis[static_cast<std::size_t>(n - 2)]);
}

TEST(SolAxis, HarmonicUpToDegreeTwelve) {
    const auto sol = make_sol();
    for (int n = 2; n <= 12; ++n) {
        for (Axis axis : {Axis::x, Axis::y}) {
            const Expr f = sol_harmonic_axis_family(sol, n, axis);
            EXPECT_TRUE(tension(*sol, f).is_zero()) << n;
            const auto sys = make_ansatz(sol, sol_axis_basis(*sol, n, axis));
            EXPECT_EQ(generate_kernel(sys).size(), 1u) << n;
        }
    }
}

TEST(SolAxis, MirrorSymmetry) {
    std::mt19937_64 rng(1);
    const auto sol = make_sol();
    for (int n = 2; n <= 8; ++n)
        EXPECT_EQ(sol_mirror(sol_harmonic_axis_family(sol, n, Axis::x)), sol_harmonic_axis_family(sol, n, Axis::y));
    for (int k = 0; k < 20; ++k) {
        const Expr f = testing_support::random_expr(*sol, rng);
        EXPECT_EQ(sol_mirror(tension(*sol, f)), tension(*sol, sol_mirror(f)));
        EXPECT_EQ(sol_mirror(sol_mirror(f)), f);
    }
}

// Columns in the order c_{n0}, ..., c_{nn}: x^{n-2k} e^{-2kt} sorted by the
// power of e^{-t}, i.e. E(-n) first.
TEST(Ansatz, DegreeTwoAndThreeMatricesUpToRowOperations) {
    const auto sol = make_sol();
    const auto same_up_to_rows = [](const ExactMatrix& a, const ExactMatrix& b) {
        return a.cols() == b.cols() && rref(a).matrix == rref(b).matrix && rank(a) == a.rows() &&
               rank(b) == b.rows() && a.rows() == b.rows();
    };
    const auto sys2 = make_ansatz(sol, {parse("E(-2)", sol->atoms()), parse("x*E(-1)", sol->atoms()),
                                        parse("x^2", sol->atoms())});
    EXPECT_TRUE(same_up_to_rows(sys2.matrix, ExactMatrix{{2, 0, 1}, {0, 1, 0}})) << sys2.matrix;
    const auto sys3 = make_ansatz(sol, {parse("E(-3)", sol->atoms()), parse("x*E(-2)", sol->atoms()),
                                        parse("x^2*E(-1)", sol->atoms()), parse("x^3", sol->atoms())});
    EXPECT_TRUE(same_up_to_rows(sys3.matrix, ExactMatrix{{9, 0, 2, 0}, {0, 2, 0, 3}, {0, 0, 1, 0}})) << sys3.matrix;
}

TEST(Ansatz, RejectsBadBases) {
    const auto sol = make_sol();
    EXPECT_THROW((void)make_ansatz(sol, {}), UsageError);
    EXPECT_THROW((void)make_ansatz(sol, {sol->var("x"), sol->var("x") * 2}), UsageError);
}

TEST(Ansatz, EmptyKernel) {
    const auto sol = make_sol();
    const auto sys = make_ansatz(sol, {sol->var("x", 2)});
    EXPECT_TRUE(generate_kernel(sys).empty());
}

TEST(Ansatz, BiharmonicOrder) {
    const auto sol = make_sol();
    const auto sys = make_ansatz(sol, {sol->var("t", 3), sol->var("t", 4)}, 2);
    const auto k = generate_kernel(sys);
    ASSERT_EQ(k.size(), 1u);
    EXPECT_EQ(primitive_normalized(k[0]), sol->var("t", 3));
}

TEST(Ansatz, PrimitiveNormalization) {
    const auto sol = make_sol();
    EXPECT_EQ(to_string(primitive_normalized(parse("-1/2*x^2 + 1/4*E(-2)", sol->atoms()))), "2*x^2 - E(-2)");
    EXPECT_EQ(to_string(primitive_normalized(parse("6*x + 9", sol->atoms()))), "2*x + 3");
}

TEST(SolFamilies, TowerOrders) {
    std::mt19937_64 rng(2);
    const auto sol = make_sol();
    for (int trial = 0; trial < 50; ++trial) {
        const int r = 1 + trial % 5;
        const auto a = draw(rng, 4), b = draw(rng, 4);
        EXPECT_EQ(classify(*sol, sol_tower(sol, r, a, b)).order, r);
        if (r <= 4) EXPECT_EQ(classify(*sol, sol_tower_unshifted(sol, r, a, b)).order, r + 1);
    }
    const std::vector<GaussianRational> zero(4);
    EXPECT_THROW((void)sol_tower(sol, 1, zero, zero), UsageError);
}

TEST(SolFamilies, MixedHarmonic) {
    std::mt19937_64 rng(3);
    const auto sol = make_sol();
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = draw(rng, 6);
        EXPECT_TRUE(tension(*sol, sol_mixed_harmonic(sol, 2 + trial % 2, p[0], p[1], p[2], p[3], p[4], p[5])).is_zero());
    }
}

TEST(SolFamilies, H2H3Tension) {
    std::mt19937_64 rng(4);
    const auto sol = make_sol();
    const Expr x = sol->var("x"), y = sol->var("y");
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = draw(rng, 4);
        const Expr f = sol_h2h3(sol, p[0], p[1], p[2], p[3]);
        const Expr want = (sol->constant(p[0]) + x * (p[1] * 3)) * (sol->constant(p[2]) + y * (p[3] * 3)) * -8;
        const auto chain = iterated_tension(*sol, f, 2);
        EXPECT_EQ(chain[1], want);
        EXPECT_TRUE(chain[2].is_zero());
    }
}

TEST(NilFamilies, HarmonicAndBiharmonic) {
    std::mt19937_64 rng(5);
    const auto nil = make_nil();
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GaussianRational> hol(4), antihol(3);
        for (auto& c : hol) c = gaussian(rng);
        for (auto& c : antihol) c = gaussian(rng);
        hol[1] = 1;
        const auto a = draw(rng, 2);
        EXPECT_EQ(classify(*nil, nil_harmonic(nil, a[0], a[1], hol, antihol)).order, 1);
        EXPECT_EQ(classify(*nil, nil_biharmonic12(nil, draw(rng, 12))).order, 2);
    }
}

TEST(NilFamilies, Shapes) {
    const auto nil = make_nil();
    std::vector<GaussianRational> b(12);
    b[11] = 1;
    EXPECT_EQ(to_string(nil_biharmonic12(nil, b)), "x^3*t");
}

TEST(Sl2Families, HarmonicAndBiharmonic) {
    std::mt19937_64 rng(6);
    const auto sl2 = make_sl2();
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GaussianRational> hol(3), antihol(4);
        for (auto& c : hol) c = gaussian(rng);
        for (auto& c : antihol) c = gaussian(rng);
        antihol[2] = 1;
        const auto a = draw(rng, 2);
        EXPECT_EQ(classify(*sl2, sl2_harmonic(sl2, a[0], a[1], hol, antihol)).order, 1);
        EXPECT_EQ(classify(*sl2, sl2_biharmonic6(sl2, draw(rng, 6))).order, 2);
    }
}

TEST(ConformalFamilies, CorollariesOnBothProducts) {
    std::mt19937_64 rng(7);
    for (auto conv : {Convention::metric_derived, Convention::paper})
        for (const char* id : {"h2xr", "s2pxr"}) {
            const auto g = make_geometry(id, conv);
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<GaussianRational> hol(3), antihol(3);
                for (auto& c : hol) c = gaussian(rng);
                for (auto& c : antihol) c = gaussian(rng);
                hol[1] = 1;
                auto p = draw(rng, 4);
                EXPECT_EQ(classify(*g, h2r_separable(g, hol, antihol, p)).order, 2);
                p[2] = p[3] = 0;
                EXPECT_EQ(classify(*g, h2r_separable(g, hol, antihol, p)).order, 1);
                EXPECT_EQ(classify(*g, log_biharmonic(g, draw(rng, 2))).order, 2);
            }
        }
}

TEST(Registry, EveryFamilyMatchesItsClaimedOrder) {
    std::mt19937_64 rng(8);
    for (const auto& family : family_registry()) {
        for (int trial = 0; trial < 50; ++trial) {
            FamilyArgs args;
            args.params = draw(rng, family.parameters.size());
            args.hol = {0, 1, gaussian(rng)};
            args.antihol = {gaussian(rng), 0, 1};
            if (family.id == "sol.tower") args.n = 1 + trial % 5;
            if (family.id == "sol.axis") args.n = 2 + trial % 8;
            if (family.id == "sol.mixed") args.n = 2 + trial % 2;
            if (family.id == "product.generic") {
                args.geometry = trial % 2 ? "product:h2xline" : "product:nilxline";
                args.f1 = trial % 2 ? "z^2 + 3*zb" : "t";
                args.f2 = "t^" + std::to_string(2 * (trial % 3) + 1);
            }
            for (auto conv : {Convention::metric_derived, Convention::paper}) {
                const auto inst = family.build(args, conv);
                EXPECT_FALSE(inst.degenerate);
                EXPECT_EQ(classify(*inst.geometry, inst.function).order, inst.claimed_order) << family.id;
            }
        }
    }
}

TEST(Registry, DegenerateParameterSets) {
    FamilyArgs nil_args;
    nil_args.params = {1, -1};  // b1 x^2 + b2 y^2 with b1 + b2 = 0 is harmonic
    auto inst = find_family("nil.f2").build(nil_args, Convention::metric_derived);
    EXPECT_TRUE(inst.degenerate);
    EXPECT_EQ(classify(*inst.geometry, inst.function).order, 1);

    nil_args.params = {0, 0, 1, 0, 0, 0, -1};  // b3 + 3 b4 + b7 = 0 and every other condition holds
    inst = find_family("nil.f2").build(nil_args, Convention::metric_derived);
    EXPECT_TRUE(inst.degenerate);
    EXPECT_EQ(classify(*inst.geometry, inst.function).order, 1);

    FamilyArgs sl2_args;
    sl2_args.params = {2, 0, 0, 1};
    inst = find_family("sl2.f2").build(sl2_args, Convention::metric_derived);
    EXPECT_TRUE(inst.degenerate);
    EXPECT_EQ(classify(*inst.geometry, inst.function).order, 1);

    EXPECT_THROW((void)find_family("sol.nope"), UsageError);
    FamilyArgs too_many;
    too_many.params = std::vector<GaussianRational>(5, 1);
    EXPECT_THROW((void)find_family("sol.h2h3").build(too_many, Convention::metric_derived), UsageError);
}
