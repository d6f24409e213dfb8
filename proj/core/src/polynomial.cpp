#include "khintype/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace khintype {

Polynomial Polynomial::constant(int nvars, const Rational& c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
    if (index < 0 || index >= nvars) throw std::out_of_range("Polynomial::variable: index out of range");
    Exponents e(nvars, 0);
    e[index] = 1;
    Polynomial p(nvars);
    p.add_term(e, Rational(1));
    return p;
}

int Polynomial::total_degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
    return deg;
}

int Polynomial::degree_in(int var) const {
    int deg = 0;
    for (const auto& [e, c] : terms_) deg = std::max(deg, e[var]);
    return deg;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("Polynomial: exponent arity mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (rhs.nvars_ != nvars_) throw std::invalid_argument("Polynomial: variable count mismatch");
    for (const auto& [e, c] : rhs.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (rhs.nvars_ != nvars_) throw std::invalid_argument("Polynomial: variable count mismatch");
    for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.nvars_ != b.nvars_) throw std::invalid_argument("Polynomial: variable count mismatch");
    Polynomial out(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    return out;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial result = constant(nvars_, Rational(1));
    Polynomial base = *this;
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1u;
        if (e) base = base * base;
    }
    return result;
}

Polynomial Polynomial::derivative(int var) const {
    if (var < 0 || var >= nvars_) throw std::out_of_range("Polynomial::derivative: variable out of range");
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents de = e;
        de[var] -= 1;
        out.add_term(de, c * e[var]);
    }
    return out;
}

Rational Polynomial::evaluate(std::span<const Rational> x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("Polynomial::evaluate: arity mismatch");
    Rational sum = 0;
    Rational term;
    Rational pw;
    for (const auto& [e, c] : terms_) {
        term = c;
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            mpz_pow_ui(pw.get_num_mpz_t(), x[i].get_num_mpz_t(), e[i]);
            mpz_pow_ui(pw.get_den_mpz_t(), x[i].get_den_mpz_t(), e[i]);
            term *= pw;
        }
        sum += term;
    }
    return sum;
}

double Polynomial::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("Polynomial::evaluate: arity mismatch");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = c.get_d();
        for (int i = 0; i < nvars_; ++i)
            for (int k = 0; k < e[i]; ++k) term *= x[i];
        sum += term;
    }
    return sum;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::vector<const std::pair<const Exponents, Rational>*> order;
    for (const auto& t : terms_) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
        const int da = std::accumulate(a->first.begin(), a->first.end(), 0);
        const int db = std::accumulate(b->first.begin(), b->first.end(), 0);
        if (da != db) return da > db;
        return a->first > b->first;
    });
    std::string out;
    bool first = true;
    for (const auto* t : order) {
        const Rational& c = t->second;
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += (c < 0) ? " - " : " + ";
        }
        first = false;
        out += Rational(abs(c)).get_str();
        for (int i = 0; i < nvars_; ++i) {
            const int p = t->first[i];
            if (p == 0) continue;
            out += "*a" + std::to_string(i + 1);
            if (p > 1) out += "^" + std::to_string(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser

namespace {

class Parser {
public:
    Parser(std::string_view src, int nvars, size_t offset) : src_(src), nvars_(nvars), offset_(offset) {}

    Polynomial parse() {
        skip_ws();
        if (pos_ >= src_.size()) fail("empty expression");
        Polynomial p = expr();
        skip_ws();
        if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, offset_ + pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr() {
        Polynomial acc = term();
        for (;;) {
            if (accept('+')) acc += term();
            else if (accept('-')) acc -= term();
            else return acc;
        }
    }

    Polynomial term() {
        Polynomial acc = unary();
        while (accept('*')) acc = acc * unary();
        return acc;
    }

    Polynomial unary() {
        if (accept('-')) return Polynomial(nvars_) - unary();
        if (accept('+')) return unary();
        return power();
    }

    Polynomial power() {
        Polynomial base = primary();
        if (accept('^')) {
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '-') fail("negative exponent");
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                fail("expected a nonnegative integer exponent");
            const size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            const std::string digits(src_.substr(start, pos_ - start));
            if (digits.size() > 4) fail("exponent too large");
            return base.pow(static_cast<unsigned>(std::stoul(digits)));
        }
        return base;
    }

    Polynomial primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return variable();
        fail(std::string("unexpected '") + c + "'");
    }

    Polynomial number() {
        const size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        // a '/' directly followed by digits is part of a rational literal
        if (pos_ + 1 < src_.size() && src_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        const std::string_view lit = src_.substr(start, pos_ - start);
        try {
            return Polynomial::constant(nvars_, parse_rational(lit));
        } catch (const std::invalid_argument&) {
            pos_ = start;
            fail("malformed number '" + std::string(lit) + "'");
        }
    }

    Polynomial variable() {
        const size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        bool ok = name.size() >= 2 && name[0] == 'a' && name[1] != '0';
        for (size_t i = 1; ok && i < name.size(); ++i) ok = std::isdigit(static_cast<unsigned char>(name[i]));
        int index = 0;
        if (ok && name.size() <= 4) index = std::stoi(std::string(name.substr(1)));
        if (!ok || index < 1 || index > nvars_) {
            pos_ = start;
            fail("unknown variable '" + std::string(name) + "'");
        }
        return Polynomial::variable(nvars_, index - 1);
    }

    std::string_view src_;
    int nvars_;
    size_t offset_;
    size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view source, int nvars, size_t offset) {
    if (nvars < 1) throw std::invalid_argument("parse_polynomial: need at least one variable");
    return Parser(source, nvars, offset).parse();
}

// ---------------------------------------------------------------------------

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : nvars_(p.nvars()) {
    for (const auto& [e, c] : p.terms()) {
        coef_.push_back(c.get_d());
        for (int v : e) {
            exps_.push_back(v);
            max_deg_ = std::max(max_deg_, v);
        }
    }
}

double CompiledPolynomial::operator()(std::span<const double> x) const {
    if (coef_.empty()) return 0.0;
    // powers[v * (max_deg+1) + k] = x_v^k
    double stack_buf[128];
    std::vector<double> heap;
    const size_t need = static_cast<size_t>(nvars_) * (max_deg_ + 1);
    double* powers = stack_buf;
    if (need > 128) {
        heap.resize(need);
        powers = heap.data();
    }
    for (int v = 0; v < nvars_; ++v) {
        double* row = powers + static_cast<size_t>(v) * (max_deg_ + 1);
        row[0] = 1.0;
        for (int k = 1; k <= max_deg_; ++k) row[k] = row[k - 1] * x[v];
    }
    double sum = 0.0;
    for (size_t t = 0; t < coef_.size(); ++t) {
        double term = coef_[t];
        const int* e = exps_.data() + t * nvars_;
        for (int v = 0; v < nvars_; ++v)
            if (e[v]) term *= powers[static_cast<size_t>(v) * (max_deg_ + 1) + e[v]];
        sum += term;
    }
    return sum;
}

}  // namespace khintype
