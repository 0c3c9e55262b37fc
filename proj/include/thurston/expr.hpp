#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thurston/atoms.hpp"
#include "thurston/errors.hpp"
#include "thurston/rational.hpp"

namespace thurston {

/// Power signature of a term: variable exponents, one integer exponential weight
/// and a log power in {0, 1}.
struct Monomial {
    std::vector<int> powers;
    int exp_weight = 0;
    int log_power = 0;

    [[nodiscard]] int degree() const { return std::accumulate(powers.begin(), powers.end(), 0); }
    [[nodiscard]] bool is_unit() const { return exp_weight == 0 && log_power == 0 && degree() == 0; }

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Canonical term order: log terms first, then by descending total degree, then
/// descending variable exponents (declared variable order), then descending
/// exponential weight. Gives `8*x^4 - 24*x^2*E(-2) + 3*E(-4)` and `2*y^2 - E(2)`.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.log_power != b.log_power) return a.log_power > b.log_power;
        const int da = a.degree(), db = b.degree();
        if (da != db) return da > db;
        if (a.powers != b.powers) return a.powers > b.powers;
        return a.exp_weight > b.exp_weight;
    }
};

struct Term {
    Monomial monomial;
    GaussianRational coefficient;

    friend bool operator==(const Term&, const Term&) = default;
};

/// A canonical finite sum of terms over one atom set. Like terms are merged,
/// zero coefficients dropped, and terms kept in MonomialOrder, so two
/// expressions are equal exactly when their term lists are identical.
class Expr {
public:
    explicit Expr(AtomSetPtr atoms) : atoms_(std::move(atoms)) {}

    static Expr constant(AtomSetPtr atoms, const GaussianRational& c) {
        Expr e(std::move(atoms));
        e.insert(e.unit(), c);
        return e;
    }

    static Expr variable(AtomSetPtr atoms, std::size_t index, int power = 1) {
        Expr e(std::move(atoms));
        if (index >= e.atoms_->variables.size()) throw UsageError("variable index out of range");
        Monomial m = e.unit();
        m.powers[index] = power;
        e.insert(std::move(m), 1);
        return e;
    }

    static Expr variable(AtomSetPtr atoms, std::string_view name, int power = 1) {
        const auto idx = atoms->index_of(name);
        if (!idx) throw UsageError("unknown variable '" + std::string(name) + "'");
        return variable(std::move(atoms), *idx, power);
    }

    /// e^{weight * base}
    static Expr exponential(AtomSetPtr atoms, int weight) {
        if (!atoms->exp) throw UsageError("atom set has no exponential atom");
        Expr e(std::move(atoms));
        Monomial m = e.unit();
        m.exp_weight = weight;
        e.insert(std::move(m), 1);
        return e;
    }

    static Expr logarithm(AtomSetPtr atoms) {
        if (!atoms->log) throw UsageError("atom set has no log atom");
        Expr e(std::move(atoms));
        Monomial m = e.unit();
        m.log_power = 1;
        e.insert(std::move(m), 1);
        return e;
    }

    /// Builds a canonical expression from arbitrary (possibly repeated) terms.
    static Expr from_terms(AtomSetPtr atoms, std::vector<Term> terms) {
        Expr e(std::move(atoms));
        std::map<Monomial, GaussianRational, MonomialOrder> acc;
        for (auto& t : terms) {
            e.check_monomial(t.monomial);
            acc[std::move(t.monomial)] += t.coefficient;
        }
        e.assign(std::move(acc));
        return e;
    }

    [[nodiscard]] const AtomSetPtr& atoms() const noexcept { return atoms_; }
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_unit()); }
    [[nodiscard]] GaussianRational constant_value() const {
        if (!is_constant()) throw UsageError("expression is not constant");
        return terms_.empty() ? GaussianRational() : terms_[0].coefficient;
    }
    [[nodiscard]] bool has_log() const { return !terms_.empty() && terms_.front().monomial.log_power > 0; }

    /// Coefficient of a given power signature (zero when absent).
    [[nodiscard]] GaussianRational coefficient_of(const Monomial& m) const {
        for (const auto& t : terms_)
            if (t.monomial == m) return t.coefficient;
        return {};
    }

    [[nodiscard]] Monomial unit() const {
        Monomial m;
        m.powers.assign(atoms_->variables.size(), 0);
        return m;
    }

    Expr& operator+=(const Expr& o) { return *this = combine(*this, o, 1); }
    Expr& operator-=(const Expr& o) { return *this = combine(*this, o, -1); }
    Expr& operator*=(const Expr& o) { return *this = multiply(*this, o); }
    Expr& operator*=(const GaussianRational& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_) t.coefficient *= c;
        return *this;
    }

    friend Expr operator+(const Expr& a, const Expr& b) { return combine(a, b, 1); }
    friend Expr operator-(const Expr& a, const Expr& b) { return combine(a, b, -1); }
    friend Expr operator-(Expr a) { return a *= GaussianRational(-1); }
    friend Expr operator*(const Expr& a, const Expr& b) { return multiply(a, b); }
    friend Expr operator*(Expr a, const GaussianRational& c) { return a *= c; }
    friend Expr operator*(const GaussianRational& c, Expr a) { return a *= c; }

    friend bool operator==(const Expr& a, const Expr& b) {
        return same_atoms(a.atoms_, b.atoms_) && a.terms_ == b.terms_;
    }

    [[nodiscard]] Expr pow(unsigned n) const {
        Expr result = constant(atoms_, 1);
        Expr base = *this;
        while (n) {
            if (n & 1U) result *= base;
            n >>= 1U;
            if (n) base *= base;
        }
        return result;
    }

private:
    static void require_same(const Expr& a, const Expr& b) {
        if (!same_atoms(a.atoms_, b.atoms_)) throw UsageError("expressions belong to different atom sets");
    }

    static Expr combine(const Expr& a, const Expr& b, int sign) {
        require_same(a, b);
        Expr out(a.atoms_);
        auto ia = a.terms_.begin();
        auto ib = b.terms_.begin();
        const MonomialOrder before;
        while (ia != a.terms_.end() || ib != b.terms_.end()) {
            if (ib == b.terms_.end() || (ia != a.terms_.end() && before(ia->monomial, ib->monomial))) {
                out.terms_.push_back(*ia++);
            } else if (ia == a.terms_.end() || before(ib->monomial, ia->monomial)) {
                out.terms_.push_back({ib->monomial, sign > 0 ? ib->coefficient : -ib->coefficient});
                ++ib;
            } else {
                GaussianRational c = sign > 0 ? ia->coefficient + ib->coefficient : ia->coefficient - ib->coefficient;
                if (!c.is_zero()) out.terms_.push_back({ia->monomial, std::move(c)});
                ++ia;
                ++ib;
            }
        }
        return out;
    }

    static Expr multiply(const Expr& a, const Expr& b) {
        require_same(a, b);
        Expr out(a.atoms_);
        std::map<Monomial, GaussianRational, MonomialOrder> acc;
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                Monomial m = ta.monomial;
                for (std::size_t i = 0; i < m.powers.size(); ++i) m.powers[i] += tb.monomial.powers[i];
                m.exp_weight += tb.monomial.exp_weight;
                m.log_power += tb.monomial.log_power;
                out.check_monomial(m);
                acc[std::move(m)] += ta.coefficient * tb.coefficient;
            }
        out.assign(std::move(acc));
        return out;
    }

    void check_monomial(const Monomial& m) const {
        if (m.powers.size() != atoms_->variables.size()) throw UsageError("monomial arity does not match atom set");
        for (int p : m.powers)
            if (p < 0) throw UsageError("negative variable exponent");
        if (m.exp_weight != 0 && !atoms_->exp) throw UsageError("exponential atom not available in this geometry");
        if (m.log_power < 0) throw UsageError("negative log power");
        if (m.log_power > 0) {
            if (!atoms_->log) throw UsageError("log atom not available in this geometry");
            if (m.log_power > 1)
                throw ClosureError(std::string(atoms_->log->name()) + " may appear at most to the first power");
            if (m.powers[atoms_->log->z] != 0 || m.powers[atoms_->log->zb] != 0)
                throw ClosureError(std::string(atoms_->log->name()) + " may only multiply functions of the other factor");
        }
    }

    void insert(Monomial m, const GaussianRational& c) {
        check_monomial(m);
        if (!c.is_zero()) terms_.push_back({std::move(m), c});
    }

    void assign(std::map<Monomial, GaussianRational, MonomialOrder> acc) {
        terms_.clear();
        terms_.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (!c.is_zero()) terms_.push_back({m, std::move(c)});
    }

    AtomSetPtr atoms_;
    std::vector<Term> terms_;
};

inline bool is_zero(const Expr& f) { return f.is_zero(); }

/// Exact partial derivative. z and zb are independent symbols. The log atom
/// counts as a constant for every variable other than its own z, zb; asking
/// for its z or zb derivative leaves the algebra.
inline Expr differentiate(const Expr& f, std::size_t var) {
    const AtomSet& atoms = *f.atoms();
    if (var >= atoms.variables.size()) throw UsageError("variable index out of range");
    std::vector<Term> out;
    for (const auto& t : f.terms()) {
        if (t.monomial.log_power > 0 && atoms.owns_log(var))
            throw ClosureError("derivative of " + std::string(atoms.log->name()) + " with respect to " +
                               atoms.variables[var] + " is outside the algebra");
        if (const int p = t.monomial.powers[var]; p > 0) {
            Term d = t;
            d.monomial.powers[var] = p - 1;
            d.coefficient *= GaussianRational(p);
            out.push_back(std::move(d));
        }
        if (atoms.exp && atoms.exp->base == var && t.monomial.exp_weight != 0) {
            Term d = t;
            d.coefficient *= GaussianRational(t.monomial.exp_weight);
            out.push_back(std::move(d));
        }
    }
    return Expr::from_terms(f.atoms(), std::move(out));
}

inline Expr differentiate(const Expr& f, std::string_view var) {
    const auto idx = f.atoms()->index_of(var);
    if (!idx) throw UsageError("unknown variable '" + std::string(var) + "'");
    return differentiate(f, *idx);
}

/// Splits f = P + L*Q into (P, Q) with both parts log-free.
inline std::pair<Expr, Expr> split_log(const Expr& f) {
    std::vector<Term> plain;
    std::vector<Term> logged;
    for (const auto& t : f.terms()) {
        if (t.monomial.log_power == 0) {
            plain.push_back(t);
        } else {
            Term q = t;
            q.monomial.log_power = 0;
            logged.push_back(std::move(q));
        }
    }
    return {Expr::from_terms(f.atoms(), std::move(plain)), Expr::from_terms(f.atoms(), std::move(logged))};
}

/// L * q for a log-free q.
inline Expr times_log(const Expr& q) {
    if (!q.atoms()->log) throw UsageError("atom set has no log atom");
    std::vector<Term> out(q.terms());
    for (auto& t : out) {
        if (t.monomial.log_power != 0) throw ClosureError("log atom may appear at most to the first power");
        t.monomial.log_power = 1;
    }
    return Expr::from_terms(q.atoms(), std::move(out));
}

/// Floating-point evaluator for one expression on the real chart.
class CompiledExpr {
public:
    explicit CompiledExpr(const Expr& f) : atoms_(f.atoms()) {
        terms_.reserve(f.terms().size());
        for (const auto& t : f.terms()) terms_.push_back({t.monomial, t.coefficient.to_complex()});
    }

    [[nodiscard]] std::complex<double> operator()(std::span<const double> p) const {
        const AtomSet& a = *atoms_;
        if (p.size() != a.coordinates.size()) throw UsageError("point dimension does not match chart");
        if (!a.admissible(p)) throw DomainError("point outside the chart domain");
        std::vector<std::complex<double>> values(a.variables.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto& b = a.bindings[i];
            switch (b.kind) {
                case VariableBinding::Kind::real: values[i] = p[b.re]; break;
                case VariableBinding::Kind::holomorphic: values[i] = {p[b.re], p[b.im]}; break;
                case VariableBinding::Kind::antiholomorphic: values[i] = {p[b.re], -p[b.im]}; break;
            }
        }
        double log_value = 0.0;
        if (a.log) {
            const double r2 = std::norm(values[a.log->z]);
            const double arg = a.log->kind == LogKind::one_minus ? 1.0 - r2 : 1.0 + r2;
            if (!(arg > 0.0)) throw DomainError("log argument is not positive");
            log_value = std::log(arg);
        }
        std::complex<double> sum = 0.0;
        for (const auto& [m, c] : terms_) {
            std::complex<double> v = c;
            for (std::size_t i = 0; i < m.powers.size(); ++i)
                for (int k = 0; k < m.powers[i]; ++k) v *= values[i];
            if (m.exp_weight != 0) v *= std::exp(m.exp_weight * values[a.exp->base].real());
            if (m.log_power) v *= log_value;
            sum += v;
        }
        return sum;
    }

private:
    AtomSetPtr atoms_;
    std::vector<std::pair<Monomial, std::complex<double>>> terms_;
};

inline std::complex<double> evaluate(const Expr& f, std::span<const double> p) { return CompiledExpr(f)(p); }

/// Canonical text; parse(to_string(f)) reproduces f exactly.
inline std::string to_string(const Expr& f) {
    if (f.is_zero()) return "0";
    const AtomSet& atoms = *f.atoms();
    std::string out;
    bool first = true;
    for (const auto& [m, c] : f.terms()) {
        std::vector<std::string> factors;
        for (std::size_t i = 0; i < m.powers.size(); ++i) {
            if (m.powers[i] == 0) continue;
            factors.push_back(atoms.variables[i] + (m.powers[i] > 1 ? "^" + std::to_string(m.powers[i]) : ""));
        }
        if (m.exp_weight != 0) factors.push_back("E(" + std::to_string(m.exp_weight) + ")");
        if (m.log_power) factors.emplace_back(atoms.log->name());

        bool negative = false;
        std::string coeff;
        if (c.is_real()) {
            negative = c.re() < 0;
            const Rational mag = negative ? Rational(-c.re()) : c.re();
            if (mag != 1 || factors.empty()) coeff = to_string(mag);
        } else if (c.re() == 0) {
            negative = c.im() < 0;
            const Rational mag = negative ? Rational(-c.im()) : c.im();
            coeff = mag == 1 ? "i" : to_string(mag) + "i";
        } else {
            coeff = to_string(c);
        }

        if (first) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        std::string body = coeff;
        for (const auto& fac : factors) body += (body.empty() ? "" : "*") + fac;
        out += body;
    }
    return out;
}

}  // namespace thurston
