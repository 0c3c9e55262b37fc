#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thurston/families.hpp"
#include "thurston/oracle.hpp"

namespace thurston::identities {

enum class Status { pass, fail, expected_mismatch, exceeds_bound };

inline std::string_view to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::expected_mismatch: return "expected-mismatch";
        case Status::exceeds_bound: return "exceeds-bound";
    }
    return "fail";
}

struct Outcome {
    Status status = Status::pass;
    std::string detail;
};

struct IdentityResult {
    std::string anchor;
    std::string convention;  // "any" when the identity does not depend on it
    std::string description;
    Status status = Status::pass;
    std::string detail;
};

struct SuiteOptions {
    std::vector<Convention> conventions{Convention::metric_derived, Convention::paper};
    int r_max = default_r_max;
    std::uint64_t seed = 20171212;
};

namespace detail {

struct Context {
    const SuiteOptions& opts;
    std::mt19937_64 rng;
};

inline Outcome check(bool ok, std::string detail = {}) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

inline Outcome expect_equal(const Expr& got, const Expr& want) {
    if (got == want) return {Status::pass, to_string(got)};
    return {Status::fail, "got " + to_string(got) + ", expected " + to_string(want)};
}

inline Outcome expect_order(const Context& ctx, const Geometry& g, const Expr& f, int order) {
    const auto report = classify(g, f, ctx.opts.r_max);
    if (!report.order) {
        if (order > ctx.opts.r_max) return {Status::exceeds_bound, "order exceeds r_max = " + std::to_string(ctx.opts.r_max)};
        return {Status::fail, "no vanishing iterate up to r_max"};
    }
    const bool ok = *report.order == order;
    return {ok ? Status::pass : Status::fail,
            "order " + std::to_string(*report.order) + (ok ? "" : ", expected " + std::to_string(order))};
}

/// Nonzero small random rational.
inline GaussianRational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 5);
    int n = 0;
    while (n == 0) n = num(rng);
    return GaussianRational(Rational(n, den(rng)));
}

inline Expr printed(const Geometry& g, std::string_view text) { return parse(text, g.atoms()); }

using Check = std::function<Outcome(Context&)>;

struct Entry {
    std::string anchor;
    std::string description;
    bool convention_sensitive;
    std::function<Outcome(Context&, Convention)> run;
};

inline std::vector<Entry> entries() {
    std::vector<Entry> e;
    auto plain = [&e](std::string anchor, std::string description, Check c) {
        e.push_back({std::move(anchor), std::move(description), false,
                     [c = std::move(c)](Context& ctx, Convention) { return c(ctx); }});
    };
    auto sensitive = [&e](std::string anchor, std::string description,
                          std::function<Outcome(Context&, Convention)> c) {
        e.push_back({std::move(anchor), std::move(description), true, std::move(c)});
    };

    // exact linear algebra
    plain("rref.sol-degree2-system", "rref [[2,0,1],[0,1,0]] = [[1,0,1/2],[0,1,0]]", [](Context&) {
        const auto r = rref(ExactMatrix{{2, 0, 1}, {0, 1, 0}});
        const ExactMatrix want{{1, 0, GaussianRational(Rational(1, 2))}, {0, 1, 0}};
        return check(r.matrix == want && r.pivots == std::vector<std::size_t>{0, 1});
    });
    plain("nullspace.sol-degree2-system", "kernel of [[2,0,1],[0,1,0]] is span (1,0,-2)", [](Context&) {
        const auto k = nullspace(ExactMatrix{{2, 0, 1}, {0, 1, 0}});
        return check(k.size() == 1 && k[0] == ExactVector{1, 0, -2});
    });
    plain("nullspace.sol-degree3-system", "kernel of the degree-3 system is proportional to (0,-3/2,0,1)", [](Context&) {
        const auto k = nullspace(ExactMatrix{{9, 0, 2, 0}, {0, 2, 0, 3}, {0, 0, 1, 0}});
        if (k.size() != 1) return check(false, "kernel dimension " + std::to_string(k.size()));
        const GaussianRational s = k[0][3];
        return check(k[0] == ExactVector{0, GaussianRational(Rational(-3, 2)) * s, 0, s});
    });

    // term algebra
    plain("expr.sol-axis2-sum", "2x^2 + (-e^{-2t}) = 2x^2 - e^{-2t}", [](Context&) {
        const auto sol = make_sol();
        return expect_equal(printed(*sol, "2*x^2") + printed(*sol, "-E(-2)"), printed(*sol, "2*x^2 - E(-2)"));
    });
    plain("expr.sol-axis3-derivative", "d/dx (2x^3 - 3x e^{-2t}) = 6x^2 - 3e^{-2t}", [](Context&) {
        const auto sol = make_sol();
        return expect_equal(differentiate(printed(*sol, "2*x^3 - 3*x*E(-2)"), "x"), printed(*sol, "6*x^2 - 3*E(-2)"));
    });
    plain("expr.sol-axis2-tension-zero", "tau(2x^2 - e^{-2t}) is exactly zero", [](Context&) {
        const auto sol = make_sol();
        return check(is_zero(tension(*sol, printed(*sol, "2*x^2 - E(-2)"))));
    });

    // operators
    plain("tension.nil-b11", "tau_Nil(y^2 t) = 2(t + 2xy)", [](Context&) {
        const auto nil = make_nil();
        return expect_equal(tension(*nil, printed(*nil, "y^2*t")), printed(*nil, "2*(t + 2*x*y)"));
    });
    plain("tension.sl2-b3", "tau_SL2(x t^2) = 4(x - yt)", [](Context&) {
        const auto sl2 = make_sl2();
        return expect_equal(tension(*sl2, printed(*sl2, "x*t^2")), printed(*sl2, "4*(x - y*t)"));
    });
    sensitive("tension.h2-log", "tau(-log(1 - z zb)) = 4 (printed operator) or 1 (chart metric)",
              [](Context&, Convention c) {
                  const auto h2 = make_h2(c);
                  const Expr want = h2->constant(c == Convention::paper ? 4 : 1);
                  return expect_equal(tension(*h2, printed(*h2, "-log1m")), want);
              });
    plain("kappa.sol-tower-factors", "kappa(t^r, a1 + a2 x + a3 y + a4 xy) = 0", [](Context& ctx) {
        const auto sol = make_sol();
        for (int r = 1; r <= 6; ++r) {
            const Expr f = sol->constant(random_rational(ctx.rng)) + sol->var("x") * random_rational(ctx.rng) +
                           sol->var("y") * random_rational(ctx.rng) +
                           sol->var("x") * sol->var("y") * random_rational(ctx.rng);
            if (!conformality(*sol, sol->var("t", r), f).is_zero()) return check(false, "r = " + std::to_string(r));
        }
        return check(true);
    });
    plain("kappa.sol-h2h3", "kappa(h2, h3) = -4(a2 + 3a3 x)(b2 + 3b3 y), tau(h2 h3) = -8(...)", [](Context& ctx) {
        const auto sol = make_sol();
        for (int trial = 0; trial < 10; ++trial) {
            const auto a2 = random_rational(ctx.rng), a3 = random_rational(ctx.rng);
            const auto b2 = random_rational(ctx.rng), b3 = random_rational(ctx.rng);
            const Expr h2 = printed(*sol, "2*x^2 - E(-2)") * a2 + printed(*sol, "2*x^3 - 3*x*E(-2)") * a3;
            const Expr h3 = printed(*sol, "2*y^2 - E(2)") * b2 + printed(*sol, "2*y^3 - 3*y*E(2)") * b3;
            const Expr shape = (sol->constant(a2) + sol->var("x") * (a3 * 3)) *
                               (sol->constant(b2) + sol->var("y") * (b3 * 3));
            if (conformality(*sol, h2, h3) != shape * GaussianRational(-4)) return check(false, "kappa mismatch");
            const auto chain = iterated_tension(*sol, h2 * h3, 2);
            if (chain[1] != shape * GaussianRational(-8) || !chain[2].is_zero()) return check(false, "chain mismatch");
        }
        return check(true);
    });

    // Sol families
    const std::vector<std::string> axis_printed = {
        "2*x^2 - E(-2)",
        "2*x^3 - 3*x*E(-2)",
        "8*x^4 - 24*x^2*E(-2) + 3*E(-4)",
        "8*x^5 - 40*x^3*E(-2) + 15*x*E(-4)",
        "16*x^6 - 120*x^4*E(-2) + 90*x^2*E(-4) - 5*E(-6)",
        "16*x^7 - 168*x^5*E(-2) + 210*x^3*E(-4) - 35*x*E(-6)",
    };
    for (int n = 2; n <= 7; ++n) {
        plain("sol.axis.n" + std::to_string(n), "harmonic axis generator of degree " + std::to_string(n),
              [n, text = axis_printed[static_cast<std::size_t>(n - 2)]](Context&) {
                  const auto sol = make_sol();
                  const Expr want = printed(*sol, text);
                  if (!is_zero(tension(*sol, want))) return check(false, "printed form is not harmonic");
                  const Expr got = sol_harmonic_axis_family(sol, n);
                  Outcome o = expect_equal(got, want);
                  if (o.status == Status::pass && to_string(got) != text) o = check(false, "text differs: " + to_string(got));
                  return o;
              });
    }
    plain("sol.axis.y-mirror", "y-axis generator of degree 2 is 2y^2 - e^{2t}", [](Context&) {
        const auto sol = make_sol();
        return expect_equal(sol_harmonic_axis_family(sol, 2, Axis::y), printed(*sol, "2*y^2 - E(2)"));
    });
    plain("sol.mixed.n2-n3", "a(alpha + beta y) X_n + b(gamma + delta x) Y_n is harmonic", [](Context& ctx) {
        const auto sol = make_sol();
        for (int n : {2, 3})
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<GaussianRational> p;
                for (int k = 0; k < 6; ++k) p.push_back(random_rational(ctx.rng));
                if (!is_zero(tension(*sol, sol_mixed_harmonic(sol, n, p[0], p[1], p[2], p[3], p[4], p[5]))))
                    return check(false, "n = " + std::to_string(n));
            }
        return check(true);
    });
    plain("sol.h2h3.specializations", "tau(h2 h3) = -8 at (1,0,1,0) and -72xy at (0,1,0,1)", [](Context&) {
        const auto sol = make_sol();
        const bool a = tension(*sol, sol_h2h3(sol, 1, 0, 1, 0)) == sol->constant(-8);
        const bool b = tension(*sol, sol_h2h3(sol, 0, 1, 0, 1)) == printed(*sol, "-72*x*y");
        return check(a && b);
    });
    plain("sol.h2h3.order", "h2 h3 is proper biharmonic", [](Context& ctx) {
        const auto sol = make_sol();
        return expect_order(ctx, *sol,
                            sol_h2h3(sol, random_rational(ctx.rng), random_rational(ctx.rng), random_rational(ctx.rng),
                                     random_rational(ctx.rng)),
                            2);
    });
    plain("sol.tower.first-iterate", "tau(t^{2r} f1 + t^{2r+1} f2) = 2r(2r-1) t^{2r-2} f1 + 2r(2r+1) t^{2r-1} f2",
          [](Context& ctx) {
              const auto sol = make_sol();
              for (int r = 1; r <= 4; ++r) {
                  std::vector<GaussianRational> a, b;
                  for (int k = 0; k < 4; ++k) {
                      a.push_back(random_rational(ctx.rng));
                      b.push_back(random_rational(ctx.rng));
                  }
                  const Expr f1 = thurston::detail::sol_bilinear(*sol, a);
                  const Expr f2 = thurston::detail::sol_bilinear(*sol, b);
                  const Expr t = sol->var("t");
                  const Expr f = t.pow(static_cast<unsigned>(2 * r)) * f1 + t.pow(static_cast<unsigned>(2 * r + 1)) * f2;
                  const Expr want = t.pow(static_cast<unsigned>(2 * r - 2)) * f1 * GaussianRational(2 * r * (2 * r - 1)) +
                                    t.pow(static_cast<unsigned>(2 * r - 1)) * f2 * GaussianRational(2 * r * (2 * r + 1));
                  if (tension(*sol, f) != want) return check(false, "r = " + std::to_string(r));
              }
              return check(true);
          });
    for (int r = 1; r <= 5; ++r) {
        plain("sol.tower.r" + std::to_string(r),
              "t^{2(r-1)} f1 + t^{2r-1} f2 has order r (r = " + std::to_string(r) + ")", [r](Context& ctx) {
                  const auto sol = make_sol();
                  const std::vector<GaussianRational> a{1, 2, 3, 4}, b{5, 6, 7, 8};
                  return expect_order(ctx, *sol, sol_tower(sol, r, a, b), r);
              });
    }
    for (int r = 1; r <= 4; ++r) {
        plain("sol.tower.unshifted-r" + std::to_string(r),
              "t^{2r} f1 + t^{2r+1} f2 has order r + 1 (r = " + std::to_string(r) + ")", [r](Context& ctx) {
                  const auto sol = make_sol();
                  const std::vector<GaussianRational> a{1, 2, 3, 4}, b{5, 6, 7, 8};
                  return expect_order(ctx, *sol, sol_tower_unshifted(sol, r, a, b), r + 1);
              });
    }

    // Nil and SL2~
    plain("nil.f1.harmonic", "h1(x+iy) + h2(x-iy) + a1 t + a2 xt is harmonic", [](Context&) {
        const auto nil = make_nil();
        const std::vector<GaussianRational> hol{1, 2, GaussianRational(Rational(0), Rational(3)), 4};
        const std::vector<GaussianRational> antihol{0, 5, 0, GaussianRational(Rational(1, 2))};
        return check(is_zero(tension(*nil, nil_harmonic(nil, 1, 1, hol, antihol))));
    });
    plain("nil.f2.expansion", "tau(f2) matches the twelve-term expansion and tau^2(f2) = 0", [](Context&) {
        const auto nil = make_nil();
        const std::vector<std::string> images = {"2", "2", "2*x", "6*x", "2*y", "2*t", "2*x",
                                                 "6*y", "6*x*y", "6*x*y", "2*(t + 2*x*y)", "6*x*t"};
        for (std::size_t k = 0; k < 12; ++k) {
            std::vector<GaussianRational> b(12);
            b[k] = 1;
            const auto chain = iterated_tension(*nil, nil_biharmonic12(nil, b), 2);
            if (chain[1] != printed(*nil, images[k]) || !chain[2].is_zero())
                return check(false, "b" + std::to_string(k + 1));
        }
        return check(true);
    });
    plain("nil.f2.all-ones", "f2 with all b_i = 1 is proper biharmonic", [](Context& ctx) {
        const auto nil = make_nil();
        return expect_order(ctx, *nil, nil_biharmonic12(nil, std::vector<GaussianRational>(12, 1)), 2);
    });
    plain("sl2.f1.harmonic", "h1(x+iy) + h2(x-iy) + a1 t + a2 yt is harmonic", [](Context&) {
        const auto sl2 = make_sl2();
        const std::vector<GaussianRational> hol{0, 1, 1, 1};
        const std::vector<GaussianRational> antihol{3, 0, GaussianRational(Rational(0), Rational(1))};
        return check(is_zero(tension(*sl2, sl2_harmonic(sl2, 2, 3, hol, antihol))));
    });
    plain("sl2.f2.expansion", "tau(f2) = -2b1 y + 4b2 + 4b3(x - yt) + 4b4 y + 12b5 t + 12b6 yt, tau^2 = 0",
          [](Context&) {
              const auto sl2 = make_sl2();
              const std::vector<std::string> images = {"-2*y", "4", "4*(x - y*t)", "4*y", "12*t", "12*y*t"};
              for (std::size_t k = 0; k < 6; ++k) {
                  std::vector<GaussianRational> b(6);
                  b[k] = 1;
                  const auto chain = iterated_tension(*sl2, sl2_biharmonic6(sl2, b), 2);
                  if (chain[1] != printed(*sl2, images[k]) || !chain[2].is_zero())
                      return check(false, "b" + std::to_string(k + 1));
              }
              return check(true);
          });

    // products
    plain("product.binomial-n1", "tau(f1 f2) = tau(f1) f2 + f1 tau(f2) on H^2 x R", [](Context&) {
        const auto g = make_geometry("h2xr");
        const auto& h2 = *g->factors()[0].geometry;
        const auto& line = *g->factors()[1].geometry;
        const Expr f1 = printed(h2, "z^2*zb + 3*zb");
        const Expr f2 = printed(line, "t^3 - t");
        return expect_equal(tension(*g, embed(*g, 0, f1) * embed(*g, 1, f2)),
                            embed(*g, 0, tension(h2, f1)) * embed(*g, 1, f2) +
                                embed(*g, 0, f1) * embed(*g, 1, tension(line, f2)));
    });
    plain("product.binomial-n3", "tau^3(f1 f2) has binomial weights 1, 3, 3, 1", [](Context&) {
        const auto g = make_geometry("product:linexline");
        const auto& line = *g->factors()[0].geometry;
        const Expr f1 = printed(line, "t^7");
        const Expr f2 = printed(line, "t^6 + t^5");
        const auto direct = iterated_tension(*g, embed(*g, 0, f1) * embed(*g, 1, f2), 3).back();
        return expect_equal(direct, product_tension_binomial(*g, f1, f2, 3));
    });
    sensitive("product.biharmonic-pair", "biharmonic x biharmonic: tau^2 = 2 tau(f1) tau(f2) != 0, order 3",
              [](Context& ctx, Convention c) {
                  const auto g = make_geometry("h2xr", c);
                  const auto& h2 = *g->factors()[0].geometry;
                  const auto& line = *g->factors()[1].geometry;
                  const Expr f1 = printed(h2, "-log1m + z^2");
                  const Expr f2 = printed(line, "t^3 + t^2");
                  const Expr f = embed(*g, 0, f1) * embed(*g, 1, f2);
                  const Expr want = embed(*g, 0, tension(h2, f1)) * embed(*g, 1, tension(line, f2)) * 2;
                  const Expr tau2 = iterated_tension(*g, f, 2).back();
                  if (tau2 != want || tau2.is_zero()) return check(false, "tau^2 mismatch");
                  return expect_order(ctx, *g, f, 3);
              });

    // H^2 x R, punctured S^2 x R and the log functions
    sensitive("conformal.log-biharmonic", "-log(1 - z zb) on H^2 and log(1 + z zb) on S^2 are proper biharmonic",
              [](Context& ctx, Convention c) {
                  for (const auto& g : {make_h2(c), make_s2p(c)}) {
                      const Outcome o = expect_order(ctx, *g, log_biharmonic(g), 2);
                      if (o.status != Status::pass) return o;
                  }
                  return check(true);
              });
    sensitive("conformal.separable", "(f(z) + g(zb)) p(t) with cubic p is proper biharmonic",
              [](Context& ctx, Convention c) {
                  for (const char* id : {"h2xr", "s2pxr"}) {
                      const auto g = make_geometry(id, c);
                      const std::vector<GaussianRational> hol{0, 0, 1}, antihol{0, 1}, p{1, 0, 1, 1};
                      const Outcome o = expect_order(ctx, *g, h2r_separable(g, hol, antihol, p), 2);
                      if (o.status != Status::pass) return o;
                  }
                  return check(true);
              });
    sensitive("conformal.log-times-linear", "log function times a0 + a1 t is proper biharmonic",
              [](Context& ctx, Convention c) {
                  for (const char* id : {"h2xr", "s2pxr"}) {
                      const auto g = make_geometry(id, c);
                      const std::vector<GaussianRational> p{2, 1};
                      const Outcome o = expect_order(ctx, *g, log_biharmonic(g, p), 2);
                      if (o.status != Status::pass) return o;
                  }
                  return check(true);
              });

    // finite-difference oracle
    plain("oracle.nil-f2", "symbolic tau of the Nil biharmonic family agrees with the metric", [](Context& ctx) {
        const auto nil = make_nil();
        oracle::OracleConfig cfg;
        cfg.samples = 20;
        cfg.seed = ctx.rng();
        const auto r = oracle::cross_validate(*nil, nil_biharmonic12(nil, std::vector<GaussianRational>(12, 1)), cfg);
        std::ostringstream os;
        os << "max_rel " << r.max_rel;
        return check(r.passed, os.str());
    });
    sensitive("oracle.h2-conformal-factor", "finite-difference tau of z zb on H^2 against the symbolic operator",
              [](Context& ctx, Convention c) {
                  const auto h2 = make_h2(c);
                  oracle::OracleConfig cfg;
                  cfg.samples = 20;
                  cfg.seed = ctx.rng();
                  const auto r = oracle::cross_validate(*h2, printed(*h2, "z*zb"), cfg);
                  std::ostringstream os;
                  os << "max_rel " << r.max_rel << ", symbolic/numeric ratio " << r.median_ratio;
                  if (c == Convention::metric_derived) return check(r.passed, os.str());
                  const bool factor_four = std::abs(r.median_ratio - 4.0) < 1e-4;
                  return Outcome{factor_four ? Status::expected_mismatch : Status::fail, os.str()};
              });
    return e;
}

}  // namespace detail

/// Runs every published identity as an exact assertion. Identities whose
/// outcome depends on the operator convention run once per requested convention.
inline std::vector<IdentityResult> run(const SuiteOptions& opts = {}) {
    detail::Context ctx{opts, std::mt19937_64(opts.seed)};
    std::vector<IdentityResult> out;
    for (const auto& entry : detail::entries()) {
        auto record = [&](std::string convention, Convention c) {
            Outcome o;
            try {
                o = entry.run(ctx, c);
            } catch (const std::exception& ex) {
                o = {Status::fail, std::string("exception: ") + ex.what()};
            }
            out.push_back({entry.anchor, std::move(convention), entry.description, o.status, std::move(o.detail)});
        };
        if (entry.convention_sensitive) {
            for (auto c : opts.conventions) record(std::string(thurston::to_string(c)), c);
        } else {
            record("any", opts.conventions.empty() ? Convention::metric_derived : opts.conventions.front());
        }
    }
    return out;
}

inline bool all_passed(const std::vector<IdentityResult>& results) {
    return std::none_of(results.begin(), results.end(), [](const auto& r) { return r.status == Status::fail; });
}

}  // namespace thurston::identities
