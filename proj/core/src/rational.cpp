#include "khintype/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace khintype {

namespace {

Integer parse_integer(std::string_view s, std::string_view whole) {
    if (s.empty()) throw std::invalid_argument("invalid rational: '" + std::string(whole) + "'");
    for (size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        const bool sign = (i == 0 && (c == '-' || c == '+'));
        if (!sign && (c < '0' || c > '9'))
            throw std::invalid_argument("invalid rational: '" + std::string(whole) + "'");
    }
    if (s.size() == 1 && (s[0] == '-' || s[0] == '+'))
        throw std::invalid_argument("invalid rational: '" + std::string(whole) + "'");
    std::string str(s.front() == '+' ? s.substr(1) : s);
    return Integer(str, 10);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string_view s = trim(text);
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(trim(s.substr(0, slash)), s);
        Integer den = parse_integer(trim(s.substr(slash + 1)), s);
        if (den == 0) throw std::invalid_argument("invalid rational: zero denominator");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    // decimal with optional exponent
    std::string_view mant = s;
    long exp10 = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mant = s.substr(0, e);
        exp10 = parse_integer(s.substr(e + 1), s).get_si();
    }
    std::string digits;
    if (const auto dot = mant.find('.'); dot != std::string_view::npos) {
        std::string_view frac = mant.substr(dot + 1);
        std::string_view ip = mant.substr(0, dot);
        if (ip.empty() || ip == "-" || ip == "+") digits = std::string(ip) + "0";
        else digits = std::string(ip);
        digits += frac;
        exp10 -= static_cast<long>(frac.size());
    } else {
        digits = std::string(mant);
    }
    Rational r(parse_integer(digits, s));
    Integer p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    if (exp10 >= 0) r *= p10;
    else r /= p10;
    r.canonicalize();
    return r;
}

std::vector<Rational> parse_rational_list(std::string_view text) {
    std::vector<Rational> out;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_rational(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Rational rationalize(double x, long max_den) {
    if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite value");
    if (max_den < 1) throw std::invalid_argument("rationalize: max_den must be >= 1");
    // exact binary value of x, then continued-fraction convergents of it
    Rational exact(x);
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Rational rem = exact;
    Rational best = Rational(floor(exact));
    for (int iter = 0; iter < 128; ++iter) {
        const Integer a = floor(rem);
        const Integer p2 = a * p1 + p0;
        const Integer q2 = a * q1 + q0;
        if (q2 > max_den) {
            // largest semiconvergent that still fits
            const Integer k = (Integer(max_den) - q0) / q1;
            const Rational semi(k * p1 + p0, k * q1 + q0);
            const Rational conv(p1, q1);
            const Rational ds = abs(semi - exact), dc = abs(conv - exact);
            best = (k > 0 && ds < dc) ? semi : conv;
            best.canonicalize();
            return best;
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        best = Rational(p1, q1);
        const Rational frac = rem - a;
        if (frac == 0) break;
        rem = 1 / frac;
    }
    best.canonicalize();
    return best;
}

Integer floor(const Rational& x) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Integer ceil(const Rational& x) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

std::string to_string(const Rational& x) { return x.get_str(); }

}  // namespace khintype
