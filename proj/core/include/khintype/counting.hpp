#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "khintype/manifold.hpp"
#include "khintype/rational.hpp"
#include "khintype/series.hpp"

namespace khintype {

/// Target shift theta = (lambda, gamma).
struct Theta {
    std::vector<Rational> lambda;  // length d
    std::vector<Rational> gamma;   // length m

    static Theta zero(int d, int m);
    /// "0" for the zero vector, otherwise d+m comma-separated rationals.
    static Theta parse(std::string_view text, int d, int m);
    std::string to_string() const;
    bool operator==(const Theta&) const = default;
};

struct CountQuery {
    long q = 1;
    Rational kappa = 1;
    Theta theta;
};

/// A point (a, b) of R(q, kappa, theta).
struct LatticePoint {
    std::vector<std::int64_t> a;
    std::vector<std::int64_t> b;
    auto operator<=>(const LatticePoint&) const = default;
};

struct CountResult {
    CountQuery query;
    std::vector<LatticePoint> points;  // lexicographic in (a, b)
    std::uint64_t A = 0;
};

struct CountOptions {
    int threads = 0;  // 0: default_threads()
};

/// All (a, b) with (a + lambda)/q in K and |f((a + lambda)/q) - (b + gamma)/q| < kappa/q,
/// decided exactly in integer arithmetic.
CountResult enumerate_R(const ManifoldSpec& spec, const CountQuery& query, const CountOptions& opts = {});
/// Same count without materializing the points.
std::uint64_t count_R(const ManifoldSpec& spec, const CountQuery& query, const CountOptions& opts = {});

/// Inclusive range of a_i with (a_i + lambda_i)/q in [lo_i, hi_i].
std::pair<Integer, Integer> a_range(const Rectangle& K, long q, const Rational& lambda_i, int i);

/// (q^-1 Log^2 q)^(k/(2m+k)) with Log = max(1, ln).
double phi(long q, int m, int k);
/// Real-argument version of phi.
double phi_real(double q, int m, int k);

/// One entry of a kappa rule: a fixed rational or scale * phi(q).
struct KappaTerm {
    enum class Kind { Fixed, Phi } kind = Kind::Fixed;
    Rational value = 1;  // the fixed kappa, or the phi scale

    Rational at(long q, int m, int k) const;
    std::string label() const;
};

/// "phi", "scaled-phi:c", or a comma-separated mix of those and rationals.
std::vector<KappaTerm> parse_kappa_rule(std::string_view text);

/// "64..1024x2" (geometric), "1..10" (step 1), or a comma-separated list.
std::vector<long> parse_q_range(std::string_view text);

struct SweepRow {
    long q = 0;
    Rational kappa;
    int theta_id = 0;
    std::uint64_t A = 0;
    double envelope = 0.0;  // q^d max(kappa, phi(q))^m
    double ratio = 0.0;
};

struct BlockSummary {
    int log2_q = 0;         // block [2^j, 2^(j+1))
    double max_ratio = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<BlockSummary> blocks;
    std::vector<std::string> warnings;

    /// Max ratio over rows with q_lo <= q < q_hi (0 if none).
    double max_ratio(long q_lo, long q_hi) const;
};

struct SweepOptions {
    int threads = 0;
    bool rank_precheck = true;
    int precheck_points = 8;
    long precheck_budget = 0;  // 0: default
};

/// Counts for every (q, kappa term, theta) and the envelope ratios.
SweepTable bound_sweep(const ManifoldSpec& spec, int k, const std::vector<long>& qs,
                       const std::vector<KappaTerm>& kappas, const std::vector<Theta>& thetas,
                       const SweepOptions& opts = {});

/// Header q,kappa_num,kappa_den,theta_id,A,envelope,ratio then one line per row.
void write_sweep_csv(std::ostream& os, const SweepTable& table);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

struct HcResult {
    double sum = 0.0;
    std::vector<double> last_increments;  // up to ten, in q order
    double c1 = 0.0;
};

/// sum_{q<=Q} A_L(q, C1 psi(q), theta) * gbar(psi(q)/q), counted over the enlarged rectangle L.
HcResult hc_partial_sum(const ManifoldSpec& spec, const ApproxFunction& psi, const DimensionFunction& g,
                        const Theta& theta, long Q, const CountOptions& opts = {});

}  // namespace khintype
