#pragma once

#include <cctype>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "thurston/expr.hpp"

namespace thurston {

namespace detail {

// Recursive descent over
//   expr   := sign? term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('+'|'-') unary | power
//   power  := base ('^' uint)?
//   base   := variable | 'E' '(' int ')' | 'log1m' | 'log1p' | literal | '(' expr ')'
//   literal:= int ('/' uint)? 'i'? | 'i'
// Juxtaposition is not multiplication. Division is by nonzero constants only.
class Parser {
public:
    Parser(std::string_view src, AtomSetPtr atoms) : src_(src), atoms_(std::move(atoms)) {}

    Expr parse() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        Expr e = expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    Expr expr() {
        Expr acc = term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    Expr term() {
        Expr acc = unary();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                acc *= unary();
            } else if (peek() == '/') {
                const std::size_t at = pos_++;
                const Expr d = unary();
                if (!d.is_constant() || d.is_zero()) throw ParseError("division requires a nonzero constant", at);
                acc *= GaussianRational(1) / d.constant_value();
            } else {
                return acc;
            }
        }
    }

    Expr unary() {
        skip_ws();
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr b = base();
        skip_ws();
        if (accept('^')) {
            skip_ws();
            const std::size_t at = pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError("expected exponent", at);
            const std::string digits = read_digits();
            if (digits.size() > 4) throw ParseError("exponent too large", at);
            b = b.pow(static_cast<unsigned>(std::stoul(digits)));
        }
        return b;
    }

    Expr base() {
        skip_ws();
        const std::size_t at = pos_;
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            skip_ws();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::string name = read_identifier();
            if (name == "i") return Expr::constant(atoms_, GaussianRational::i());
            if (name == "E") return exponential(at);
            if (name == "log1m" || name == "log1p") {
                if (!atoms_->log || atoms_->log->name() != name)
                    throw ParseError("unknown atom '" + name + "' for this geometry", at);
                return Expr::logarithm(atoms_);
            }
            const auto idx = atoms_->index_of(name);
            if (!idx) throw ParseError("unknown atom '" + name + "' for this geometry", at);
            return Expr::variable(atoms_, *idx);
        }
        if (c == '\0') throw ParseError("unexpected end of input", at);
        throw ParseError(std::string("unexpected '") + c + "'", at);
    }

    Expr exponential(std::size_t at) {
        if (!atoms_->exp) throw ParseError("unknown atom 'E' for this geometry", at);
        skip_ws();
        if (!accept('(')) throw ParseError("expected '(' after E", pos_);
        skip_ws();
        bool negative = false;
        if (accept('-')) {
            negative = true;
        } else {
            accept('+');
        }
        skip_ws();
        const std::size_t num_at = pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError("expected integer weight", num_at);
        const std::string digits = read_digits();
        if (digits.size() > 6) throw ParseError("exponential weight too large", num_at);
        skip_ws();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        const int w = std::stoi(digits);
        return Expr::exponential(atoms_, negative ? -w : w);
    }

    Expr literal() {
        Rational q{BigInt(read_digits())};
        if (peek() == '/' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            ++pos_;
            const std::size_t at = pos_;
            const BigInt den(read_digits());
            if (den == 0) throw ParseError("zero denominator", at);
            q /= Rational(den);
        }
        if (peek() == 'i' && !is_ident_char(peek(1))) {
            ++pos_;
            return Expr::constant(atoms_, GaussianRational(Rational(0), q));
        }
        return Expr::constant(atoms_, GaussianRational(q));
    }

    static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::string read_digits() {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    std::string read_identifier() {
        const std::size_t start = pos_;
        while (is_ident_char(peek())) ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    [[nodiscard]] char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    void skip_ws() {
        while (std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    std::string_view src_;
    AtomSetPtr atoms_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses expression text against an atom set.
/// Throws ParseError for syntax problems and unknown atoms, ClosureError when
/// the text leaves the algebra (e.g. `log1m^2`).
inline Expr parse(std::string_view src, const AtomSetPtr& atoms) { return detail::Parser(src, atoms).parse(); }

/// Parses an exact constant such as `-3/4`, `2i` or `(1+2i)/3`.
inline GaussianRational parse_constant(std::string_view src) {
    static const AtomSetPtr no_atoms = std::make_shared<const AtomSet>();
    const Expr e = parse(src, no_atoms);
    return e.constant_value();
}

}  // namespace thurston
