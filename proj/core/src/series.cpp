#include "khintype/series.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace khintype {

DimensionFunction::DimensionFunction(Rational s_, int log_power_) : s(std::move(s_)), log_power(log_power_) {
    if (s <= 0) throw std::invalid_argument("DimensionFunction: s must be positive");
}

double DimensionFunction::operator()(double rho) const {
    if (rho <= 0) return 0.0;
    double v = std::pow(rho, s.get_d());
    if (log_power != 0) v *= std::pow(Log(1.0 / rho), log_power);
    return v;
}

double DimensionFunction::quotient(double rho, int m) const {
    if (rho <= 0) return 0.0;
    double v = std::exp((s.get_d() - m) * std::log(rho));
    if (log_power != 0) v *= std::pow(Log(1.0 / rho), log_power);
    return v;
}

ApproxFunction::ApproxFunction(Rational c_, Rational tau_) : c(std::move(c_)), tau(std::move(tau_)) {
    if (c < 0) throw std::invalid_argument("ApproxFunction: c must be nonnegative");
    if (tau <= 0) throw std::invalid_argument("ApproxFunction: tau must be positive");
}

double ApproxFunction::operator()(double q) const {
    if (c == 0) return 0.0;
    return c.get_d() * std::pow(q, -tau.get_d());
}

double Log(double x) { return std::max(1.0, std::log(x)); }

std::string to_string(SeriesVerdict v) { return v == SeriesVerdict::Converges ? "CONVERGES" : "DIVERGES"; }

std::string to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::Khinchin: return "khinchin";
        case SeriesKind::Jarnik: return "jarnik";
        case SeriesKind::GSeries: return "gseries";
    }
    return "?";
}

long binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

GSeriesClass classify_gseries(const Rational& s, int n, int m, int k) {
    if (s <= 0 || n < 1 || m < 1 || k < 1) throw std::invalid_argument("classify_gseries: parameters must be positive");
    GSeriesClass c;
    c.lhs = s * Rational(2 * m + 2 * k, 2 * m + k);
    c.lhs.canonicalize();
    c.rhs = n + 1;
    c.critical = (c.lhs == c.rhs);
    c.verdict = c.lhs > c.rhs ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
    return c;
}

Applicability applicability(int d, int m, int k, const Rational& s) {
    if (d < 1 || m < 1 || k < 1) throw std::invalid_argument("applicability: d, m, k must be positive");
    Applicability a;
    a.d = d;
    a.m = m;
    a.k = k;
    a.s = s;
    a.case1 = (k == 1) && (m < d - 1);
    a.case2 = (k == 2) && (m < binomial(d + 1, 2));
    a.jarnik = classify_gseries(s, d + m, m, k);
    a.rank2_typical = m <= binomial(d, 2);
    a.drv_typical = m <= binomial(d - 1, 2);
    if (k > d) a.notes.push_back("k > d: no Hessian pencil can satisfy the rank condition");
    if (k == 2 && m >= binomial(d + 1, 2)) a.notes.push_back("m >= C(d+1,2): the rank-2 condition is unsatisfiable");
    if (a.jarnik.critical)
        a.notes.push_back("critical exponent: the series reduces to sum q^-1 (log^2 q)^(sk/(2m+k)), which diverges");
    return a;
}

std::string Applicability::summary() const {
    std::string out;
    if (case1)
        out = "Case 1 applies";
    else if (case2)
        out = "Case 2 applies";
    else
        out = "No case applies";
    out += "; " + to_string(jarnik.verdict);
    if (jarnik.critical) out += " (CRITICAL)";
    return out;
}

std::string Applicability::to_text() const {
    std::ostringstream os;
    os << summary() << '\n';
    os << "d=" << d << " m=" << m << " n=" << d + m << " k=" << k << " s=" << s.get_str() << '\n';
    os << "case1 (k=1, m<d-1): " << (case1 ? "yes" : "no") << '\n';
    os << "case2 (k=2, m<C(d+1,2)): " << (case2 ? "yes" : "no") << '\n';
    os << "series criterion: " << jarnik.lhs.get_str() << (jarnik.lhs > jarnik.rhs ? " > " : " <= ")
       << jarnik.rhs.get_str() << " -> " << to_string(jarnik.verdict) << '\n';
    os << "rank2 typical (m<=C(d,2)): " << (rank2_typical ? "yes" : "no") << '\n';
    os << "drv typical (m<=C(d-1,2)): " << (drv_typical ? "yes" : "no") << '\n';
    for (const auto& n : notes) os << "note: " << n << '\n';
    return os.str();
}

double series_term(const SeriesSpec& spec, long q) {
    if (q < 1) throw std::invalid_argument("series_term: q must be positive");
    const double qd = static_cast<double>(q);
    const int n = spec.n;
    switch (spec.kind) {
        case SeriesKind::Khinchin:
            return std::pow(spec.psi(qd), n);
        case SeriesKind::Jarnik:
            return std::pow(qd, n) * spec.g(spec.psi(qd) / qd);
        case SeriesKind::GSeries: {
            const double L = std::log(qd);
            const double inner = std::pow(L * L / qd, static_cast<double>(spec.k) / (2.0 * spec.m + spec.k));
            const double rho = inner / qd;
            if (rho <= 0) return 0.0;
            // log space keeps large n from overflowing
            double logv = n * std::log(qd) + spec.g.s.get_d() * std::log(rho);
            if (spec.g.log_power != 0) logv += spec.g.log_power * std::log(Log(1.0 / rho));
            return std::exp(logv);
        }
    }
    return 0.0;
}

ProbeResult partial_sum_probe(const SeriesSpec& spec, long Q) {
    if (Q < 100) throw std::invalid_argument("partial_sum_probe: Q must be at least 100");
    ProbeResult r;
    const long q1 = Q / 4, q2 = Q / 2;
    double sum = 0.0;
    for (long q = 1; q <= Q; ++q) {
        sum += series_term(spec, q);
        if (q == q1) r.sum_quarter = sum;
        if (q == q2) r.sum_half = sum;
    }
    r.sum_full = sum;

    const long qs[3] = {q1, q2, Q};
    double y[3];
    for (int i = 0; i < 3; ++i) {
        const double t = series_term(spec, qs[i]);
        if (!(t > 0)) {
            r.fitted_power = std::numeric_limits<double>::infinity();
            r.verdict = SeriesVerdict::Converges;
            return r;
        }
        y[i] = std::log(t);
    }
    // ln t = C - p ln q + c ln ln q, solved exactly through three points
    double A[3][3];
    for (int i = 0; i < 3; ++i) {
        const double L = std::log(static_cast<double>(qs[i]));
        A[i][0] = 1.0;
        A[i][1] = -L;
        A[i][2] = std::log(L);
    }
    auto det3 = [](const double M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double D = det3(A);
    double Ap[3][3], Ac[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Ap[i][j] = Ac[i][j] = A[i][j];
    for (int i = 0; i < 3; ++i) {
        Ap[i][1] = y[i];
        Ac[i][2] = y[i];
    }
    r.fitted_power = det3(Ap) / D;
    r.fitted_log_power = det3(Ac) / D;
    constexpr double tol = 0.01;
    const double p = r.fitted_power, c = r.fitted_log_power;
    const bool conv = p > 1.0 + tol || (std::abs(p - 1.0) <= tol && c < -1.0);
    r.verdict = conv ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
    return r;
}

}  // namespace khintype
