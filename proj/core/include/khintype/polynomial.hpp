#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "khintype/rational.hpp"

namespace khintype {

/// Syntax error in the polynomial language, with a 0-based offset into the source.
class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, size_t position)
        : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position) {}
    size_t position() const { return position_; }

private:
    size_t position_;
};

using Exponents = std::vector<int>;

/// Multivariate polynomial in variables a1..a_n with exact rational coefficients.
/// Only nonzero coefficients are stored.
class Polynomial {
public:
    explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c);
    /// The variable a_{index+1}.
    static Polynomial variable(int nvars, int index);

    int nvars() const { return nvars_; }
    const std::map<Exponents, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int total_degree() const;
    int degree_in(int var) const;

    void add_term(const Exponents& e, const Rational& c);

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial pow(unsigned e) const;
    Polynomial derivative(int var) const;
    bool operator==(const Polynomial&) const = default;

    Rational evaluate(std::span<const Rational> x) const;
    double evaluate(std::span<const double> x) const;

    /// Canonical form: graded-lex descending monomials, explicit coefficients,
    /// e.g. "1*a1^2 - 1*a2^2". Parses back to an identical polynomial.
    std::string to_string() const;

private:
    int nvars_;
    std::map<Exponents, Rational> terms_;
};

/// Parses a single polynomial over a1..a_nvars.
/// Grammar: integer/rational/decimal literals, a1..an, + - * ^ (nonnegative integer powers), parentheses.
Polynomial parse_polynomial(std::string_view source, int nvars, size_t offset = 0);

/// Double-precision evaluator for hot loops; precomputes variable powers.
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const Polynomial& p);

    double operator()(std::span<const double> x) const;
    bool is_zero() const { return coef_.empty(); }

private:
    int nvars_ = 0;
    int max_deg_ = 0;
    std::vector<double> coef_;
    std::vector<int> exps_;  // row-major terms x nvars
};

}  // namespace khintype
