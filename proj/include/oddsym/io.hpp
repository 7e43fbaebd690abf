#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>

#include "oddsym/polynomial.hpp"

namespace oddsym {

// ---------------------------------------------------------------------------
// Canonical printer. Terms in graded-lex order; within a term even factors
// first (x's, then dxi's), then the odd factors in the global odd order, so
// the printed word re-parses with sign +1.
// ---------------------------------------------------------------------------

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

namespace detail {

inline std::string coefficient_prefix(const Coefficient& c, bool* negated) {
    // Renders |c| (or c itself for mixed re/im) as a factor prefix such as
    // "3/2*", "i*", "(1+i)*"; *negated reports whether a '-' was split off.
    *negated = false;
    if (c.im == 0) {
        Rational r = c.re;
        if (r < 0) {
            *negated = true;
            r = -r;
        }
        if (r == 1)
            return "";
        return to_string(r) + "*";
    }
    if (c.re == 0) {
        Rational b = c.im;
        if (b < 0) {
            *negated = true;
            b = -b;
        }
        if (b == 1)
            return "i*";
        return to_string(b) + "*i*";
    }
    std::string s = "(" + to_string(c.re);
    if (c.im > 0)
        s += "+";
    else
        s += "-";
    Rational b = c.im < 0 ? Rational(-c.im) : c.im;
    if (b != 1)
        s += to_string(b) + "*";
    s += "i)*";
    return s;
}

} // namespace detail

inline std::string to_string(const SuperPolynomial& p) {
    if (p.is_zero())
        return "0";
    const auto& gens = *p.gens();
    std::string out;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        bool neg = false;
        std::string term = detail::coefficient_prefix(c, &neg);
        std::string factors;
        for (int slot = 0; slot < gens.num_even(); ++slot) {
            int e = m.even[slot];
            if (!e)
                continue;
            if (!factors.empty())
                factors += "*";
            factors += gens.name(gens.even_slot_generator(slot));
            if (e > 1)
                factors += "^" + std::to_string(e);
        }
        uint64_t rest = m.odd;
        while (rest) {
            int bit = std::countr_zero(rest);
            rest &= rest - 1;
            if (!factors.empty())
                factors += "*";
            factors += gens.name(gens.odd_bit_generator(bit));
        }
        if (factors.empty()) {
            // bare coefficient; drop the trailing '*'
            if (term.empty())
                term = "1";
            else
                term.pop_back();
        } else {
            term += factors;
        }
        if (first) {
            out = (neg ? "-" : "") + term;
            first = false;
        } else {
            out += neg ? " - " : " + ";
            out += term;
        }
    }
    return out;
}

inline std::string to_string(const Coefficient& c) {
    SuperPolynomial p = SuperPolynomial::constant(GeneratorSet::make(1, 0), c);
    return to_string(p);
}

// ---------------------------------------------------------------------------
// Parser for the expression grammar:
//   expr    := ['+'|'-'] term (('+'|'-') term)*
//   term    := factor ('*' factor)*
//   factor  := primary ['^' nat]
//   primary := nat ['/' nat] | name | '(' expr ')'
//   name    := x<k> | xi<k> | dx<k> | dxi<k> | th<k> | i
// ---------------------------------------------------------------------------

class ExpressionParser {
  public:
    ExpressionParser(std::string_view text, GenSetPtr gens)
        : text_(text), gens_(std::move(gens)) {}

    SuperPolynomial parse() {
        SuperPolynomial p = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return p;
    }

  private:
    SuperPolynomial parse_expr() {
        skip_ws();
        int sign = 1;
        while (peek() == '+' || peek() == '-') {
            if (get() == '-')
                sign = -sign;
            skip_ws();
        }
        SuperPolynomial acc = parse_term();
        if (sign < 0)
            acc *= Coefficient(-1);
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-')
                break;
            get();
            SuperPolynomial t = parse_term();
            if (c == '+')
                acc += t;
            else
                acc -= t;
        }
        return acc;
    }

    SuperPolynomial parse_term() {
        SuperPolynomial acc = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() != '*')
                break;
            get();
            acc *= parse_factor();
        }
        return acc;
    }

    SuperPolynomial parse_factor() {
        SuperPolynomial base = parse_primary();
        skip_ws();
        if (peek() == '^') {
            get();
            skip_ws();
            std::size_t at = pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail("expected a nonnegative integer exponent");
            Integer e = parse_nat();
            if (e > 64)
                throw ParseError(at, "exponent too large");
            return base.pow(static_cast<int>(e));
        }
        return base;
    }

    SuperPolynomial parse_primary() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            get();
            SuperPolynomial p = parse_expr();
            skip_ws();
            if (peek() != ')')
                fail("expected ')'");
            get();
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Integer num = parse_nat();
            if (peek() == '/') {
                get();
                std::size_t at = pos_;
                if (!std::isdigit(static_cast<unsigned char>(peek())))
                    fail("expected denominator");
                Integer den = parse_nat();
                if (den == 0)
                    throw ParseError(at, "zero denominator");
                return SuperPolynomial::constant(gens_, Coefficient(Rational(num, den)));
            }
            return SuperPolynomial::constant(gens_, Coefficient(Rational(num)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_name();
        fail("expected a number, symbol or '('");
    }

    SuperPolynomial parse_name() {
        std::size_t start = pos_;
        std::string letters;
        while (std::isalpha(static_cast<unsigned char>(peek())))
            letters += get();
        if (letters == "i" && !std::isdigit(static_cast<unsigned char>(peek())))
            return SuperPolynomial::constant(gens_, Coefficient::i());
        GenKind kind;
        if (letters == "x")
            kind = GenKind::x;
        else if (letters == "xi")
            kind = GenKind::xi;
        else if (letters == "dx")
            kind = GenKind::dx;
        else if (letters == "dxi")
            kind = GenKind::dxi;
        else if (letters == "th")
            kind = GenKind::th;
        else
            throw ParseError(start, "unknown symbol '" + letters + "'");
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            throw ParseError(pos_, "expected an index after '" + letters + "'");
        Integer idx = parse_nat();
        Generator g{kind, static_cast<int>(idx)};
        if (!gens_->contains(g))
            throw ParseError(start, "generator " + letters + to_string_plain(idx) +
                                        " out of range for this chart");
        return SuperPolynomial::generator(gens_, g);
    }

    static std::string to_string_plain(const Integer& v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    Integer parse_nat() {
        Integer v = 0;
        while (std::isdigit(static_cast<unsigned char>(peek())))
            v = v * 10 + (get() - '0');
        return v;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char get() { return text_[pos_++]; }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    std::string_view text_;
    GenSetPtr gens_;
    std::size_t pos_ = 0;
};

inline SuperPolynomial parse_polynomial(std::string_view text, GenSetPtr gens) {
    return ExpressionParser(text, std::move(gens)).parse();
}

} // namespace oddsym
