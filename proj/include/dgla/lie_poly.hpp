#pragma once

// Bracket expressions: the textual form of Lie polynomials shared by every
// file format.
//
//   expr     := term (('+' | '-') term)*
//   term     := rational '*' monomial | rational | monomial
//   monomial := IDENT | '[' expr ',' expr ']'
//   rational := INT ('/' POSINT)?
//
// A leading sign on the first term is accepted.  Whitespace is ignored and
// "0" is the zero polynomial.

#include <dgla/error.hpp>
#include <dgla/linalg.hpp>

#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dgla {

struct Monomial;

struct LiePoly {
    struct Term {
        Rational coef;
        std::shared_ptr<const Monomial> mono; // null for a bare rational
    };
    std::vector<Term> terms;

    bool empty() const noexcept { return terms.empty(); }
};

struct Monomial {
    std::string name; // set for generators
    std::shared_ptr<const LiePoly> left, right;

    bool is_bracket() const noexcept { return left != nullptr; }
};

inline LiePoly lie_gen(std::string name, Rational coef = 1)
{
    auto m = std::make_shared<Monomial>();
    m->name = std::move(name);
    return LiePoly{{{std::move(coef), std::move(m)}}};
}

inline LiePoly lie_bracket(LiePoly a, LiePoly b, Rational coef = 1)
{
    auto m = std::make_shared<Monomial>();
    m->left = std::make_shared<const LiePoly>(std::move(a));
    m->right = std::make_shared<const LiePoly>(std::move(b));
    return LiePoly{{{std::move(coef), std::move(m)}}};
}

inline LiePoly operator+(LiePoly a, const LiePoly& b)
{
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    return a;
}

inline LiePoly operator*(const Rational& s, LiePoly p)
{
    for (auto& t : p.terms)
        t.coef *= s;
    return p;
}

inline LiePoly operator-(LiePoly a, const LiePoly& b) { return a + Rational(-1) * b; }

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    LiePoly parse()
    {
        LiePoly p = expr();
        skip_ws();
        if (pos_ != src_.size())
            fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError("bracket expression: " + msg, 1, pos_ + 1);
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool peek(char c)
    {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    void expect(char c)
    {
        if (!peek(c))
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    LiePoly expr()
    {
        LiePoly out;
        Rational sign = 1;
        if (peek('-') || peek('+')) {
            sign = src_[pos_] == '-' ? -1 : 1;
            ++pos_;
        }
        out.terms.push_back(term(sign));
        for (;;) {
            if (peek('+'))
                sign = 1;
            else if (peek('-'))
                sign = -1;
            else
                break;
            ++pos_;
            out.terms.push_back(term(sign));
        }
        return out;
    }

    LiePoly::Term term(const Rational& sign)
    {
        skip_ws();
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            Rational c = rational() * sign;
            if (peek('*')) {
                ++pos_;
                return {c, monomial()};
            }
            return {c, nullptr};
        }
        return {sign, monomial()};
    }

    Rational rational()
    {
        std::string digits = integer();
        if (peek('/')) {
            ++pos_;
            skip_ws();
            std::size_t at = pos_;
            std::string den = integer();
            if (den.find_first_not_of('0') == std::string::npos) {
                pos_ = at;
                fail("denominator must be positive");
            }
            digits += "/" + den;
        }
        Rational q(digits, 10);
        q.canonicalize();
        return q;
    }

    std::string integer()
    {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("expected an integer");
        return std::string(src_.substr(start, pos_ - start));
    }

    std::shared_ptr<const Monomial> monomial()
    {
        skip_ws();
        if (pos_ >= src_.size())
            fail("unexpected end of expression");
        auto m = std::make_shared<Monomial>();
        if (src_[pos_] == '[') {
            ++pos_;
            m->left = std::make_shared<const LiePoly>(expr());
            expect(',');
            m->right = std::make_shared<const LiePoly>(expr());
            expect(']');
            return m;
        }
        char c = src_[pos_];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_'))
            fail("expected a generator name or '['");
        std::size_t start = pos_;
        while (pos_ < src_.size()
               && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        m->name = std::string(src_.substr(start, pos_ - start));
        return m;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline LiePoly parse_lie_poly(std::string_view src) { return detail::ExprParser(src).parse(); }

inline std::string to_string(const LiePoly& p);

inline std::string to_string(const Monomial& m)
{
    if (!m.is_bracket())
        return m.name;
    return "[" + to_string(*m.left) + "," + to_string(*m.right) + "]";
}

inline std::string to_string(const LiePoly& p)
{
    std::string out;
    bool first = true;
    for (const auto& t : p.terms) {
        if (sgn(t.coef) == 0)
            continue;
        Rational mag = abs(t.coef);
        if (first)
            out += sgn(t.coef) < 0 ? "-" : "";
        else
            out += sgn(t.coef) < 0 ? " - " : " + ";
        if (!t.mono)
            out += mag.get_str();
        else if (mag == 1)
            out += to_string(*t.mono);
        else
            out += mag.get_str() + "*" + to_string(*t.mono);
        first = false;
    }
    return first ? "0" : out;
}

} // namespace dgla
