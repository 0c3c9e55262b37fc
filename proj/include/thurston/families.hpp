#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thurston/geometry.hpp"
#include "thurston/matrix.hpp"
#include "thurston/parser.hpp"

namespace thurston {

// ---------------------------------------------------------------------------
// Ansatz systems
// ---------------------------------------------------------------------------

/// The matrix of tau^r restricted to span(basis), written in the monomials
/// (image_basis) that actually occur in the images. Columns follow `basis`,
/// rows follow `image_basis` in canonical term order.
struct AnsatzSystem {
    GeometryPtr geometry;
    std::vector<Expr> basis;
    std::vector<Expr> image_basis;
    ExactMatrix matrix;
    int order = 1;
};

namespace detail {

inline Expr monomial_expr(const AtomSetPtr& atoms, const Monomial& m) {
    return Expr::from_terms(atoms, {Term{m, GaussianRational(1)}});
}

/// Coefficient matrix of `exprs` (columns) over the union of their monomials (rows).
inline std::pair<std::vector<Monomial>, ExactMatrix> coefficient_matrix(const std::vector<Expr>& exprs) {
    std::map<Monomial, std::size_t, MonomialOrder> rows;
    for (const auto& e : exprs)
        for (const auto& t : e.terms()) rows.emplace(t.monomial, 0);
    std::vector<Monomial> order;
    for (auto& [m, idx] : rows) {
        idx = order.size();
        order.push_back(m);
    }
    ExactMatrix mat(order.size(), exprs.size());
    for (std::size_t c = 0; c < exprs.size(); ++c)
        for (const auto& t : exprs[c].terms()) mat(rows.at(t.monomial), c) = t.coefficient;
    return {std::move(order), std::move(mat)};
}

}  // namespace detail

inline AnsatzSystem make_ansatz(GeometryPtr geometry, std::vector<Expr> basis, int order = 1) {
    if (basis.empty()) throw UsageError("ansatz basis is empty");
    if (order < 1) throw UsageError("ansatz order must be positive");
    for (const auto& b : basis) detail::require_member(*geometry, b);
    if (rank(detail::coefficient_matrix(basis).second) != basis.size())
        throw UsageError("ansatz basis is linearly dependent");

    std::vector<Expr> images;
    images.reserve(basis.size());
    for (const auto& b : basis) images.push_back(iterated_tension(*geometry, b, order).back());
    auto [monomials, matrix] = detail::coefficient_matrix(images);

    AnsatzSystem sys{std::move(geometry), std::move(basis), {}, std::move(matrix), order};
    for (const auto& m : monomials) sys.image_basis.push_back(detail::monomial_expr(sys.geometry->atoms(), m));
    return sys;
}

/// Exact basis of { f in span(basis) : tau^r f = 0 }.
inline std::vector<Expr> generate_kernel(const AnsatzSystem& sys) {
    std::vector<Expr> out;
    const auto kernel = sys.image_basis.empty()
                            ? std::vector<ExactVector>()
                            : nullspace(sys.matrix);
    auto combine = [&](const ExactVector& v) {
        Expr f = sys.geometry->zero();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) f += sys.basis[i] * v[i];
        return f;
    };
    if (sys.image_basis.empty()) {
        // tau^r vanishes on the whole span.
        for (std::size_t i = 0; i < sys.basis.size(); ++i) {
            ExactVector e(sys.basis.size());
            e[i] = 1;
            out.push_back(combine(e));
        }
    } else {
        for (const auto& v : kernel) out.push_back(combine(v));
    }
    for (const auto& f : out)
        if (!iterated_tension(*sys.geometry, f, sys.order).back().is_zero())
            throw Error("kernel element failed exact verification");
    return out;
}

/// Scales f to coprime integer coefficients with a positive leading term when
/// all coefficients are real, otherwise to a leading coefficient of 1.
inline Expr primitive_normalized(const Expr& f) {
    if (f.is_zero()) return f;
    const bool real = std::all_of(f.terms().begin(), f.terms().end(),
                                  [](const Term& t) { return t.coefficient.is_real(); });
    if (!real) return f * (GaussianRational(1) / f.terms().front().coefficient);
    BigInt den_lcm = 1;
    for (const auto& t : f.terms()) den_lcm = boost::multiprecision::lcm(den_lcm, denominator_of(t.coefficient.re()));
    BigInt num_gcd = 0;
    for (const auto& t : f.terms())
        num_gcd = boost::multiprecision::gcd(num_gcd, numerator_of(t.coefficient.re() * Rational(den_lcm)));
    Rational scale = Rational(den_lcm) / Rational(num_gcd);
    if (f.terms().front().coefficient.re() < 0) scale = -scale;
    return f * GaussianRational(scale);
}

// ---------------------------------------------------------------------------
// Sol families
// ---------------------------------------------------------------------------

enum class Axis { x, y };

/// The (x <-> y, t -> -t) isometry of Sol applied to an expression.
inline Expr sol_mirror(const Expr& f) {
    std::vector<Term> out;
    for (auto t : f.terms()) {
        std::swap(t.monomial.powers[0], t.monomial.powers[1]);
        t.monomial.exp_weight = -t.monomial.exp_weight;
        if (t.monomial.powers[2] % 2) t.coefficient = -t.coefficient;
        out.push_back(std::move(t));
    }
    return Expr::from_terms(f.atoms(), std::move(out));
}

/// Basis { x^k e^{-(n-k)t} : k = n..0 } (mirrored for the y axis).
inline std::vector<Expr> sol_axis_basis(const Geometry& sol, int n, Axis axis) {
    std::vector<Expr> basis;
    const char* v = axis == Axis::x ? "x" : "y";
    const int sign = axis == Axis::x ? -1 : 1;
    for (int k = n; k >= 0; --k) basis.push_back(sol.var(v, k) * Expr::exponential(sol.atoms(), sign * (n - k)));
    return basis;
}

/// The harmonic generator of degree n along one axis, e.g. n = 4, x:
/// 8*x^4 - 24*x^2*E(-2) + 3*E(-4).
inline Expr sol_harmonic_axis_family(const GeometryPtr& sol, int n, Axis axis = Axis::x) {
    if (sol->id() != "sol") throw UsageError("axis families live on sol");
    if (n < 2) throw UsageError("axis family degree must be at least 2");
    const auto kernel = generate_kernel(make_ansatz(sol, sol_axis_basis(*sol, n, axis)));
    if (kernel.size() != 1) throw Error("axis family kernel is not one-dimensional");
    return primitive_normalized(kernel.front());
}

namespace detail {

inline Expr sol_x_generator(const Geometry& sol, int n) {
    const Expr x = sol.var("x");
    if (n == 2) return x * x * GaussianRational(2) - Expr::exponential(sol.atoms(), -2);
    return x.pow(3) * GaussianRational(2) - x * Expr::exponential(sol.atoms(), -2) * GaussianRational(3);
}

inline Expr sol_bilinear(const Geometry& sol, std::span<const GaussianRational> c) {
    const Expr x = sol.var("x");
    const Expr y = sol.var("y");
    return sol.constant(c[0]) + x * c[1] + y * c[2] + x * y * c[3];
}

inline bool all_zero(std::span<const GaussianRational> v) {
    return std::all_of(v.begin(), v.end(), [](const auto& q) { return q.is_zero(); });
}

}  // namespace detail

/// t^{2(r-1)} f1 + t^{2r-1} f2 with f1 = a1 + a2 x + a3 y + a4 xy (f2 from b);
/// proper r-harmonic for r >= 1.
inline Expr sol_tower(const GeometryPtr& sol, int r, std::span<const GaussianRational> a,
                      std::span<const GaussianRational> b) {
    if (r < 1) throw UsageError("tower index must be at least 1");
    if (a.size() != 4 || b.size() != 4) throw UsageError("tower needs a, b in C^4");
    if (detail::all_zero(a) && detail::all_zero(b)) throw UsageError("tower parameters are all zero");
    const Expr t = sol->var("t");
    return t.pow(static_cast<unsigned>(2 * (r - 1))) * detail::sol_bilinear(*sol, a) +
           t.pow(static_cast<unsigned>(2 * r - 1)) * detail::sol_bilinear(*sol, b);
}

/// t^{2r} f1 + t^{2r+1} f2, the tower with its index as originally printed;
/// it is proper (r+1)-harmonic.
inline Expr sol_tower_unshifted(const GeometryPtr& sol, int r, std::span<const GaussianRational> a,
                                std::span<const GaussianRational> b) {
    if (r < 0) throw UsageError("tower index must be non-negative");
    return sol_tower(sol, r + 1, a, b);
}

/// a (alpha + beta y) X_n + b (gamma + delta x) Y_n with X_2 = 2x^2 - e^{-2t},
/// X_3 = 2x^3 - 3x e^{-2t} and Y_n their mirror images. Harmonic.
inline Expr sol_mixed_harmonic(const GeometryPtr& sol, int n, const GaussianRational& a, const GaussianRational& b,
                               const GaussianRational& alpha, const GaussianRational& beta,
                               const GaussianRational& gamma, const GaussianRational& delta) {
    if (n != 2 && n != 3) throw UsageError("mixed harmonic family needs n = 2 or 3");
    if (a.is_zero() && b.is_zero()) throw UsageError("(a, b) must be nonzero");
    if (!a.is_zero() && alpha.is_zero() && beta.is_zero()) throw UsageError("(alpha, beta) must be nonzero");
    if (!b.is_zero() && gamma.is_zero() && delta.is_zero()) throw UsageError("(gamma, delta) must be nonzero");
    const Expr xn = detail::sol_x_generator(*sol, n);
    const Expr yn = sol_mirror(xn);
    return xn * (sol->constant(alpha) + sol->var("y") * beta) * a +
           yn * (sol->constant(gamma) + sol->var("x") * delta) * b;
}

/// h2 * h3 with h2 = a2 X_2 + a3 X_3 and h3 = b2 Y_2 + b3 Y_3; proper biharmonic with
/// tau(h2 h3) = -8 (a2 + 3 a3 x)(b2 + 3 b3 y).
inline Expr sol_h2h3(const GeometryPtr& sol, const GaussianRational& a2, const GaussianRational& a3,
                     const GaussianRational& b2, const GaussianRational& b3) {
    if (a2.is_zero() && a3.is_zero()) throw UsageError("(a2, a3) must be nonzero");
    if (b2.is_zero() && b3.is_zero()) throw UsageError("(b2, b3) must be nonzero");
    const Expr x2 = detail::sol_x_generator(*sol, 2);
    const Expr x3 = detail::sol_x_generator(*sol, 3);
    const Expr h2 = x2 * a2 + x3 * a3;
    const Expr h3 = sol_mirror(x2) * b2 + sol_mirror(x3) * b3;
    return h2 * h3;
}

// ---------------------------------------------------------------------------
// Nil and SL2~ families
// ---------------------------------------------------------------------------

namespace detail {

/// sum_k hol[k] (x + iy)^k + sum_k antihol[k] (x - iy)^k on a real (x, y, t) chart.
inline Expr holomorphic_parts(const Geometry& g, std::span<const GaussianRational> hol,
                              std::span<const GaussianRational> antihol) {
    const Expr x = g.var("x");
    const Expr iy = g.var("y") * GaussianRational::i();
    const Expr w = x + iy;
    const Expr wb = x - iy;
    Expr out = g.zero();
    for (std::size_t k = 0; k < hol.size(); ++k)
        if (!hol[k].is_zero()) out += w.pow(static_cast<unsigned>(k)) * hol[k];
    for (std::size_t k = 0; k < antihol.size(); ++k)
        if (!antihol[k].is_zero()) out += wb.pow(static_cast<unsigned>(k)) * antihol[k];
    return out;
}

inline Expr monomial_family(const Geometry& g, std::span<const GaussianRational> b,
                            std::span<const char* const> shapes) {
    if (b.size() != shapes.size()) throw UsageError("wrong parameter count");
    if (all_zero(b)) throw UsageError("parameters are all zero");
    Expr out = g.zero();
    std::size_t k = 0;
    for (const char* shape : shapes) {
        if (!b[k].is_zero()) out += parse(shape, g.atoms()) * b[k];
        ++k;
    }
    return out;
}

}  // namespace detail

/// h1(x + iy) + h2(x - iy) + a1 t + a2 x t on Nil (polynomial h1, h2). Harmonic.
inline Expr nil_harmonic(const GeometryPtr& nil, const GaussianRational& a1, const GaussianRational& a2,
                         std::span<const GaussianRational> hol, std::span<const GaussianRational> antihol) {
    const Expr t = nil->var("t");
    Expr f = detail::holomorphic_parts(*nil, hol, antihol) + t * a1 + nil->var("x") * t * a2;
    if (f.is_zero()) throw UsageError("nil harmonic family member is zero");
    return f;
}

inline constexpr std::array<const char*, 12> nil_biharmonic_shapes = {
    "x^2", "y^2", "y*t", "x^3", "x^2*y", "x^2*t", "x*y^2", "y^3", "x^3*y", "x*y^3", "y^2*t", "x^3*t"};

/// The twelve-parameter biharmonic family on Nil.
inline Expr nil_biharmonic12(const GeometryPtr& nil, std::span<const GaussianRational> b) {
    return detail::monomial_family(*nil, b, nil_biharmonic_shapes);
}

/// h1(x + iy) + h2(x - iy) + a1 t + a2 y t on SL2~. Harmonic.
inline Expr sl2_harmonic(const GeometryPtr& sl2, const GaussianRational& a1, const GaussianRational& a2,
                         std::span<const GaussianRational> hol, std::span<const GaussianRational> antihol) {
    const Expr t = sl2->var("t");
    Expr f = detail::holomorphic_parts(*sl2, hol, antihol) + t * a1 + sl2->var("y") * t * a2;
    if (f.is_zero()) throw UsageError("sl2 harmonic family member is zero");
    return f;
}

inline constexpr std::array<const char*, 6> sl2_biharmonic_shapes = {"x*t",   "t^2",   "x*t^2",
                                                                         "y*t^2", "t^3", "y*t^3"};

/// The six-parameter biharmonic family on SL2~.
inline Expr sl2_biharmonic6(const GeometryPtr& sl2, std::span<const GaussianRational> b) {
    return detail::monomial_family(*sl2, b, sl2_biharmonic_shapes);
}

// ---------------------------------------------------------------------------
// H^2 x R and punctured S^2 x R
// ---------------------------------------------------------------------------

namespace detail {

inline void require_conformal_product(const Geometry& g) {
    if (!g.is_product() || !g.log_calculus() || g.factors()[1].geometry->id() != "line")
        throw UsageError("expected h2xr or s2pxr, got " + g.id());
}

inline Expr cubic_in(const Geometry& g, std::string_view var, std::span<const GaussianRational> p) {
    const Expr t = g.var(var);
    Expr out = g.zero();
    for (std::size_t k = 0; k < p.size(); ++k)
        if (!p[k].is_zero()) out += t.pow(static_cast<unsigned>(k)) * p[k];
    return out;
}

}  // namespace detail

/// (f(z) + g(zb)) * p(t) with polynomial f, g and cubic p = b0 + b1 t + b2 t^2 + b3 t^3.
/// Proper biharmonic when (b2, b3) != 0, harmonic otherwise.
inline Expr h2r_separable(const GeometryPtr& g, std::span<const GaussianRational> hol,
                          std::span<const GaussianRational> antihol, std::span<const GaussianRational> p) {
    detail::require_conformal_product(*g);
    if (p.size() != 4) throw UsageError("p needs four coefficients b0..b3");
    if (detail::all_zero(p)) throw UsageError("p is zero");
    const Expr z = g->var("z");
    const Expr zb = g->var("zb");
    Expr planar = g->zero();
    for (std::size_t k = 0; k < hol.size(); ++k)
        if (!hol[k].is_zero()) planar += z.pow(static_cast<unsigned>(k)) * hol[k];
    for (std::size_t k = 0; k < antihol.size(); ++k)
        if (!antihol[k].is_zero()) planar += zb.pow(static_cast<unsigned>(k)) * antihol[k];
    if (planar.is_zero()) throw UsageError("holomorphic part is zero");
    const auto& t_name = g->atoms()->variables[g->factors()[1].var_offset];
    return planar * detail::cubic_in(*g, t_name, p);
}

/// -log(1 - z zb) on H^2 (log(1 + z zb) on the punctured sphere). On a x R
/// product the log is multiplied by p = a0 + a1 t.
inline Expr log_biharmonic(const GeometryPtr& g, std::span<const GaussianRational> p = {}) {
    if (!g->log_calculus()) throw UsageError("geometry " + g->id() + " has no log atom");
    const Expr log = Expr::logarithm(g->atoms()) * GaussianRational(g->log_calculus()->sign == -1 ? -1 : 1);
    if (!g->is_product()) {
        if (!p.empty()) throw UsageError("a linear factor needs a product geometry");
        return log;
    }
    detail::require_conformal_product(*g);
    if (p.size() != 2) throw UsageError("p needs two coefficients a0, a1");
    if (detail::all_zero(p)) throw UsageError("p is zero");
    const auto& t_name = g->atoms()->variables[g->factors()[1].var_offset];
    return log * detail::cubic_in(*g, t_name, p);
}

/// f1 * f2 on a product where f1 is proper harmonic on the first factor and f2
/// proper r-harmonic on the second; the product is proper r-harmonic.
inline Expr product_r_harmonic(const GeometryPtr& g, const Expr& f1, const Expr& f2, int r_max = default_r_max) {
    if (!g->is_product()) throw UsageError("product_r_harmonic needs a product geometry");
    const auto c1 = classify(*g->factors()[0].geometry, f1, r_max);
    if (c1.order != 1) throw UsageError("first factor is not proper harmonic");
    const auto c2 = classify(*g->factors()[1].geometry, f2, r_max);
    if (!c2.order || *c2.order < 1) throw UsageError("second factor has no finite properness order");
    return embed(*g, 0, f1) * embed(*g, 1, f2);
}

// ---------------------------------------------------------------------------
// Registry used by the command line
// ---------------------------------------------------------------------------

struct FamilyArgs {
    std::vector<GaussianRational> params;
    int n = 0;  // tower index r, axis degree n, or mixed-family n; 0 selects the default
    Axis axis = Axis::x;
    std::vector<GaussianRational> hol;
    std::vector<GaussianRational> antihol;
    std::string geometry;  // product.generic only
    std::string f1;        // product.generic only
    std::string f2;        // product.generic only
};

struct FamilyInstance {
    GeometryPtr geometry;
    Expr function;
    int claimed_order;
    bool degenerate;  // parameters on a measure-zero set where the order drops
};

/// A parametrized family: its parameters and claimed properness order.
struct FamilyDescriptor {
    std::string id;
    std::string geometry;
    std::vector<std::string> parameters;
    int default_n = 0;
    std::function<FamilyInstance(const FamilyArgs&, Convention)> build;
};

namespace detail {

inline std::vector<GaussianRational> padded(const FamilyArgs& args, std::size_t arity) {
    if (args.params.size() > arity)
        throw UsageError("too many parameters: expected at most " + std::to_string(arity));
    std::vector<GaussianRational> p = args.params;
    p.resize(arity);
    return p;
}

inline int pick_n(const FamilyArgs& args, int fallback) { return args.n != 0 ? args.n : fallback; }

inline FamilyInstance conformal_separable(const FamilyArgs& args, Convention c, std::string_view id) {
    auto g = make_geometry(id, c);
    const auto p = padded(args, 4);
    Expr f = h2r_separable(g, args.hol, args.antihol, p);
    const bool cubic = !p[2].is_zero() || !p[3].is_zero();
    return {g, f, cubic ? 2 : 1, false};
}

inline FamilyInstance conformal_logxp(const FamilyArgs& args, Convention c, std::string_view id) {
    auto g = make_geometry(id, c);
    const auto p = padded(args, 2);
    return {g, log_biharmonic(g, p), 2, false};
}

}  // namespace detail

inline const std::vector<FamilyDescriptor>& family_registry() {
    static const std::vector<FamilyDescriptor> registry = [] {
        std::vector<FamilyDescriptor> r;
        r.push_back({"sol.tower", "sol", {"a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"}, 1,
                     [](const FamilyArgs& args, Convention c) {
                         auto g = make_sol(c);
                         const auto p = detail::padded(args, 8);
                         const int n = detail::pick_n(args, 1);
                         return FamilyInstance{g, sol_tower(g, n, std::span(p).first(4), std::span(p).last(4)), n,
                                               false};
                     }});
        r.push_back({"sol.axis", "sol", {}, 2, [](const FamilyArgs& args, Convention c) {
                         auto g = make_sol(c);
                         detail::padded(args, 0);
                         return FamilyInstance{g, sol_harmonic_axis_family(g, detail::pick_n(args, 2), args.axis), 1,
                                               false};
                     }});
        r.push_back({"sol.mixed", "sol", {"a", "b", "alpha", "beta", "gamma", "delta"}, 2,
                     [](const FamilyArgs& args, Convention c) {
                         auto g = make_sol(c);
                         const auto p = detail::padded(args, 6);
                         return FamilyInstance{
                             g, sol_mixed_harmonic(g, detail::pick_n(args, 2), p[0], p[1], p[2], p[3], p[4], p[5]), 1,
                             false};
                     }});
        r.push_back({"sol.h2h3", "sol", {"a2", "a3", "b2", "b3"}, 0, [](const FamilyArgs& args, Convention c) {
                         auto g = make_sol(c);
                         const auto p = detail::padded(args, 4);
                         return FamilyInstance{g, sol_h2h3(g, p[0], p[1], p[2], p[3]), 2, false};
                     }});
        r.push_back({"nil.f1", "nil", {"a1", "a2"}, 0, [](const FamilyArgs& args, Convention c) {
                         auto g = make_nil(c);
                         const auto p = detail::padded(args, 2);
                         Expr f = nil_harmonic(g, p[0], p[1], args.hol, args.antihol);
                         return FamilyInstance{g, f, 1, false};
                     }});
        r.push_back({"nil.f2", "nil", {"b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9", "b10", "b11", "b12"}, 0,
                     [](const FamilyArgs& args, Convention c) {
                         auto g = make_nil(c);
                         const auto b = detail::padded(args, 12);
                         // tau(f2) vanishes exactly when every coefficient of its expansion does.
                         const bool degenerate = (b[0] + b[1]).is_zero() &&
                                                 (b[2] + b[3] * 3 + b[6]).is_zero() && (b[4] + b[7] * 3).is_zero() &&
                                                 (b[5] + b[10]).is_zero() &&
                                                 (b[8] * 3 + b[9] * 3 + b[10] * 2).is_zero() && b[11].is_zero();
                         return FamilyInstance{g, nil_biharmonic12(g, b), degenerate ? 1 : 2, degenerate};
                     }});
        r.push_back({"sl2.f1", "sl2", {"a1", "a2"}, 0, [](const FamilyArgs& args, Convention c) {
                         auto g = make_sl2(c);
                         const auto p = detail::padded(args, 2);
                         return FamilyInstance{g, sl2_harmonic(g, p[0], p[1], args.hol, args.antihol), 1, false};
                     }});
        r.push_back({"sl2.f2", "sl2", {"b1", "b2", "b3", "b4", "b5", "b6"}, 0,
                     [](const FamilyArgs& args, Convention c) {
                         auto g = make_sl2(c);
                         const auto b = detail::padded(args, 6);
                         const bool degenerate = b[1].is_zero() && b[2].is_zero() && b[4].is_zero() &&
                                                 b[5].is_zero() && (b[0] - b[3] * 2).is_zero();
                         return FamilyInstance{g, sl2_biharmonic6(g, b), degenerate ? 1 : 2, degenerate};
                     }});
        r.push_back({"h2r.separable", "h2xr", {"b0", "b1", "b2", "b3"}, 0, [](const FamilyArgs& a, Convention c) {
                         return detail::conformal_separable(a, c, "h2xr");
                     }});
        r.push_back({"s2r.separable", "s2pxr", {"b0", "b1", "b2", "b3"}, 0, [](const FamilyArgs& a, Convention c) {
                         return detail::conformal_separable(a, c, "s2pxr");
                     }});
        r.push_back({"h2r.logxp", "h2xr", {"a0", "a1"}, 0, [](const FamilyArgs& a, Convention c) {
                         return detail::conformal_logxp(a, c, "h2xr");
                     }});
        r.push_back({"s2r.logxp", "s2pxr", {"a0", "a1"}, 0, [](const FamilyArgs& a, Convention c) {
                         return detail::conformal_logxp(a, c, "s2pxr");
                     }});
        r.push_back({"product.generic", "product:<id>x<id>", {}, 0, [](const FamilyArgs& args, Convention c) {
                         if (args.geometry.empty() || args.f1.empty() || args.f2.empty())
                             throw UsageError("product.generic needs a product geometry, f1 and f2");
                         auto g = make_geometry(args.geometry, c);
                         if (!g->is_product()) throw UsageError(args.geometry + " is not a product geometry");
                         const Expr f1 = parse(args.f1, g->factors()[0].geometry->atoms());
                         const Expr f2 = parse(args.f2, g->factors()[1].geometry->atoms());
                         Expr f = product_r_harmonic(g, f1, f2);
                         const int r = *classify(*g->factors()[1].geometry, f2).order;
                         return FamilyInstance{g, f, r, false};
                     }});
        return r;
    }();
    return registry;
}

inline const FamilyDescriptor& find_family(std::string_view id) {
    for (const auto& d : family_registry())
        if (d.id == id) return d;
    throw UsageError("unknown family '" + std::string(id) + "'");
}

}  // namespace thurston
