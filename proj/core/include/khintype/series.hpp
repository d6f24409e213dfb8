#pragma once

#include <string>
#include <vector>

#include "khintype/rational.hpp"

namespace khintype {

/// g(rho) = rho^s * Log(1/rho)^log_power. Exact verdicts need log_power == 0.
struct DimensionFunction {
    Rational s = 1;
    int log_power = 0;

    DimensionFunction() = default;
    DimensionFunction(Rational s_, int log_power_ = 0);

    double operator()(double rho) const;
    /// g(rho) / rho^m
    double quotient(double rho, int m) const;
};

/// psi(q) = c * q^-tau. c == 0 is accepted and gives psi == 0.
struct ApproxFunction {
    Rational c = 1;
    Rational tau = 1;

    ApproxFunction() = default;
    ApproxFunction(Rational c_, Rational tau_);

    double operator()(double q) const;
};

/// Log(x) = max(1, ln x).
double Log(double x);

enum class SeriesVerdict { Converges, Diverges };
std::string to_string(SeriesVerdict v);

struct GSeriesClass {
    SeriesVerdict verdict = SeriesVerdict::Diverges;
    bool critical = false;  // s(1 + k/(2m+k)) == n + 1 exactly
    Rational lhs;           // s(1 + k/(2m+k))
    Rational rhs;           // n + 1
};

/// Convergence of sum_q q^n g(q^-1 (q^-1 Log^2 q)^(k/(2m+k))) for g(rho) = rho^s.
GSeriesClass classify_gseries(const Rational& s, int n, int m, int k);

struct Applicability {
    int d = 0, m = 0, k = 0;
    Rational s;
    bool case1 = false;        // k == 1 and m < d - 1
    bool case2 = false;        // k == 2 and m < C(d+1, 2)
    GSeriesClass jarnik;       // classify_gseries(s, d + m, m, k)
    bool rank2_typical = false;    // m <= C(d, 2)
    bool drv_typical = false;      // m <= C(d-1, 2)
    std::vector<std::string> notes;

    std::string summary() const;  // e.g. "Case 1 applies; CONVERGES"
    std::string to_text() const;
};

Applicability applicability(int d, int m, int k, const Rational& s);

enum class SeriesKind { Khinchin, Jarnik, GSeries };
std::string to_string(SeriesKind k);

struct SeriesSpec {
    SeriesKind kind = SeriesKind::GSeries;
    int n = 1;                 // ambient dimension
    int m = 1;
    int k = 1;
    ApproxFunction psi;        // khinchin, jarnik
    DimensionFunction g;       // jarnik, gseries
};

/// term(q) of the requested series.
double series_term(const SeriesSpec& spec, long q);

struct ProbeResult {
    double sum_quarter = 0.0;  // partial sum up to Q/4
    double sum_half = 0.0;
    double sum_full = 0.0;
    double fitted_power = 0.0;      // terms behave like q^-p (Log q)^c
    double fitted_log_power = 0.0;
    SeriesVerdict verdict = SeriesVerdict::Diverges;
    static constexpr const char* kLabel = "NON-RIGOROUS";
};

/// Partial sums plus a heuristic verdict from the decay of the terms near Q.
ProbeResult partial_sum_probe(const SeriesSpec& spec, long Q);

long binomial(int n, int k);

}  // namespace khintype
