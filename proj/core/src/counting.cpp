#include "khintype/counting.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "khintype/nondegen.hpp"
#include "khintype/parallel.hpp"

namespace khintype {

// ---------------------------------------------------------------------------
// Theta, kappa rules, q ranges

Theta Theta::zero(int d, int m) { return Theta{std::vector<Rational>(d, Rational(0)), std::vector<Rational>(m, Rational(0))}; }

Theta Theta::parse(std::string_view text, int d, int m) {
    auto trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
    if (trimmed == "0") return zero(d, m);
    const auto vals = parse_rational_list(trimmed);
    if (static_cast<int>(vals.size()) != d + m)
        throw std::invalid_argument("theta: expected " + std::to_string(d + m) + " components, got " +
                                    std::to_string(vals.size()));
    Theta t;
    t.lambda.assign(vals.begin(), vals.begin() + d);
    t.gamma.assign(vals.begin() + d, vals.end());
    return t;
}

std::string Theta::to_string() const {
    std::string out = "(";
    bool first = true;
    for (const auto* v : {&lambda, &gamma})
        for (const auto& x : *v) {
            if (!first) out += ",";
            out += x.get_str();
            first = false;
        }
    return out + ")";
}

double phi_real(double q, int m, int k) {
    if (q < 1 || m < 1 || k < 1) throw std::invalid_argument("phi: need q >= 1, m >= 1, k >= 1");
    const double L = Log(q);
    return std::pow(L * L / q, static_cast<double>(k) / (2.0 * m + k));
}

double phi(long q, int m, int k) { return phi_real(static_cast<double>(q), m, k); }

Rational KappaTerm::at(long q, int m, int k) const {
    if (kind == Kind::Fixed) return value;
    Rational r = value * rationalize(phi(q, m, k));
    r.canonicalize();
    return r;
}

std::string KappaTerm::label() const {
    if (kind == Kind::Fixed) return value.get_str();
    if (value == 1) return "phi";
    return "scaled-phi:" + value.get_str();
}

std::vector<KappaTerm> parse_kappa_rule(std::string_view text) {
    std::vector<KappaTerm> out;
    size_t start = 0;
    for (;;) {
        const size_t comma = text.find(',', start);
        std::string item(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        KappaTerm t;
        if (item == "phi") {
            t.kind = KappaTerm::Kind::Phi;
            t.value = 1;
        } else if (item.rfind("scaled-phi:", 0) == 0) {
            t.kind = KappaTerm::Kind::Phi;
            t.value = parse_rational(item.substr(11));
        } else {
            t.value = parse_rational(item);
        }
        if (t.value <= 0) throw std::invalid_argument("kappa rule: values must be positive: '" + item + "'");
        out.push_back(t);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<long> parse_q_range(std::string_view text) {
    std::vector<long> out;
    auto to_long = [](std::string_view s) {
        long v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v < 1)
            throw std::invalid_argument("q range: bad positive integer '" + std::string(s) + "'");
        return v;
    };
    size_t start = 0;
    for (;;) {
        const size_t comma = text.find(',', start);
        const std::string_view item =
            text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        const size_t dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(to_long(item));
        } else {
            const long lo = to_long(item.substr(0, dots));
            std::string_view rest = item.substr(dots + 2);
            const size_t x = rest.find('x');
            long hi, factor = 0;
            if (x == std::string_view::npos) {
                hi = to_long(rest);
            } else {
                hi = to_long(rest.substr(0, x));
                factor = to_long(rest.substr(x + 1));
                if (factor < 2) throw std::invalid_argument("q range: geometric factor must be >= 2");
            }
            if (hi < lo) throw std::invalid_argument("q range: empty range");
            for (long q = lo; q <= hi; q = factor ? q * factor : q + 1) out.push_back(q);
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact enumeration

std::pair<Integer, Integer> a_range(const Rectangle& K, long q, const Rational& lambda_i, int i) {
    const Rational lo = Rational(q) * K.lo()[i] - lambda_i;
    const Rational hi = Rational(q) * K.hi()[i] - lambda_i;
    return {ceil(lo), floor(hi)};
}

namespace {

using i128 = __int128;

i128 to_i128(const Integer& z) {
    unsigned long long words[2] = {0, 0};
    size_t count = 0;
    mpz_export(words, &count, -1, sizeof(unsigned long long), 0, 0, z.get_mpz_t());
    const unsigned __int128 mag = (static_cast<unsigned __int128>(words[1]) << 64) | words[0];
    const i128 v = static_cast<i128>(mag);
    return sgn(z) < 0 ? -v : v;
}

i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && (a < 0)) --q;
    return q;
}

i128 ceil_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && (a > 0)) ++q;
    return q;
}

// f_j((a + lambda)/q) = N_j(a) / Den_j with N_j(a) = sum_t W_t prod_i X_i^e_ti and X_i = a_i lamD_i + lamN_i.
// b is admissible iff (Y - K)/E < b < (Y + K)/E where Y = ymul N + yoff.
struct Component {
    std::vector<Integer> W;
    std::vector<std::vector<int>> exps;
    Integer ymul, yoff, K, E;
    std::vector<i128> W128;
    i128 ymul128 = 0, yoff128 = 0, K128 = 0, E128 = 0;
};

struct Prepared {
    int d = 0, m = 0;
    std::vector<Integer> lamN, lamD;
    std::vector<std::int64_t> a_lo, a_hi;
    std::vector<Component> comps;
    bool fast = false;
    bool empty = false;
    std::vector<i128> lamN128, lamD128;
};

Prepared prepare(const ManifoldSpec& spec, const CountQuery& query) {
    const int d = spec.d(), m = spec.m();
    if (query.q < 1) throw std::invalid_argument("count: q must be >= 1");
    if (query.kappa <= 0) throw std::invalid_argument("count: kappa must be positive");
    if (static_cast<int>(query.theta.lambda.size()) != d || static_cast<int>(query.theta.gamma.size()) != m)
        throw std::invalid_argument("count: theta has the wrong dimensions");

    Prepared P;
    P.d = d;
    P.m = m;
    const Integer q = query.q;
    std::vector<Integer> Q(d);
    Integer xmax_all = 0;
    std::vector<Integer> xmax(d);
    for (int i = 0; i < d; ++i) {
        Rational lam = query.theta.lambda[i];
        lam.canonicalize();
        P.lamN.push_back(lam.get_num());
        P.lamD.push_back(lam.get_den());
        Q[i] = q * lam.get_den();
        const auto [lo, hi] = a_range(spec.rect(), query.q, lam, i);
        if (lo > hi) P.empty = true;
        if (!lo.fits_slong_p() || !hi.fits_slong_p()) throw std::overflow_error("count: a-range exceeds 64 bits");
        P.a_lo.push_back(lo.get_si());
        P.a_hi.push_back(hi.get_si());
        xmax[i] = std::max(abs(lo), abs(hi)) * lam.get_den() + abs(lam.get_num());
    }

    Rational kappa = query.kappa;
    kappa.canonicalize();
    const Integer kn = kappa.get_num(), kd = kappa.get_den();
    const Integer limit = Integer(1) << 124;
    bool fast = true;

    for (int j = 0; j < m; ++j) {
        const Polynomial& f = spec.map().components[j];
        Component c;
        Integer dc = 1;
        std::vector<int> maxdeg(d, 0);
        for (const auto& [e, coef] : f.terms()) {
            mpz_lcm(dc.get_mpz_t(), dc.get_mpz_t(), coef.get_den_mpz_t());
            for (int i = 0; i < d; ++i) maxdeg[i] = std::max(maxdeg[i], e[i]);
        }
        Integer den = dc;
        for (int i = 0; i < d; ++i) {
            Integer p;
            mpz_pow_ui(p.get_mpz_t(), Q[i].get_mpz_t(), maxdeg[i]);
            den *= p;
        }
        Integer nbound = 0;
        for (const auto& [e, coef] : f.terms()) {
            Integer w = coef.get_num() * (dc / coef.get_den());
            Integer b = abs(w);
            for (int i = 0; i < d; ++i) {
                Integer p;
                mpz_pow_ui(p.get_mpz_t(), Q[i].get_mpz_t(), maxdeg[i] - e[i]);
                w *= p;
                b *= p;
                mpz_pow_ui(p.get_mpz_t(), xmax[i].get_mpz_t(), e[i]);
                b *= p;
            }
            c.W.push_back(w);
            c.exps.push_back(e);
            nbound += b;
        }
        Rational gam = query.theta.gamma[j];
        gam.canonicalize();
        c.ymul = q * gam.get_den() * kd;
        c.yoff = -gam.get_num() * den * kd;
        c.K = kn * den * gam.get_den();
        c.E = den * gam.get_den() * kd;
        const Integer ybound = abs(c.ymul) * nbound + abs(c.yoff) + c.K;
        if (ybound >= limit || c.E >= limit) fast = false;
        P.comps.push_back(std::move(c));
    }
    for (int i = 0; i < d; ++i)
        if (xmax[i] >= limit) fast = false;

    P.fast = fast;
    if (fast) {
        for (int i = 0; i < d; ++i) {
            P.lamN128.push_back(to_i128(P.lamN[i]));
            P.lamD128.push_back(to_i128(P.lamD[i]));
        }
        for (auto& c : P.comps) {
            for (const auto& w : c.W) c.W128.push_back(to_i128(w));
            c.ymul128 = to_i128(c.ymul);
            c.yoff128 = to_i128(c.yoff);
            c.K128 = to_i128(c.K);
            c.E128 = to_i128(c.E);
        }
    }
    return P;
}

struct BRange {
    std::int64_t lo, hi;  // inclusive; empty when lo > hi
};

std::int64_t checked_i64(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw std::overflow_error("count: b exceeds 64 bits");
    return static_cast<std::int64_t>(v);
}

// Admissible b-range for component c at the point a (fast path).
BRange b_range_fast(const Prepared& P, const Component& c, const i128* X, int maxe) {
    (void)maxe;
    i128 N = 0;
    for (size_t t = 0; t < c.W128.size(); ++t) {
        i128 v = c.W128[t];
        const auto& e = c.exps[t];
        for (int i = 0; i < P.d && v != 0; ++i)
            for (int k = 0; k < e[i]; ++k) v *= X[i];
        N += v;
    }
    const i128 Y = c.ymul128 * N + c.yoff128;
    const i128 lo = floor_div(Y - c.K128, c.E128) + 1;
    const i128 hi = ceil_div(Y + c.K128, c.E128) - 1;
    if (lo > hi) return {1, 0};
    return {checked_i64(lo), checked_i64(hi)};
}

struct SlowScratch {
    Integer N, v, Y, lo, hi;
};

BRange b_range_slow(const Prepared& P, const Component& c, const std::vector<Integer>& X, SlowScratch& s) {
    s.N = 0;
    for (size_t t = 0; t < c.W.size(); ++t) {
        s.v = c.W[t];
        const auto& e = c.exps[t];
        for (int i = 0; i < P.d; ++i)
            for (int k = 0; k < e[i]; ++k) s.v *= X[i];
        s.N += s.v;
    }
    s.Y = c.ymul * s.N + c.yoff;
    s.lo = s.Y - c.K;
    mpz_fdiv_q(s.lo.get_mpz_t(), s.lo.get_mpz_t(), c.E.get_mpz_t());
    s.lo += 1;
    s.hi = s.Y + c.K;
    mpz_cdiv_q(s.hi.get_mpz_t(), s.hi.get_mpz_t(), c.E.get_mpz_t());
    s.hi -= 1;
    if (s.lo > s.hi) return {1, 0};
    if (!s.lo.fits_slong_p() || !s.hi.fits_slong_p()) throw std::overflow_error("count: b exceeds 64 bits");
    return {s.lo.get_si(), s.hi.get_si()};
}

struct SlabOutput {
    std::uint64_t count = 0;
    std::vector<LatticePoint> points;
};

void emit_points(const std::vector<std::int64_t>& a, const std::vector<BRange>& ranges, std::vector<LatticePoint>& out) {
    const int m = static_cast<int>(ranges.size());
    std::vector<std::int64_t> b(m);
    for (int j = 0; j < m; ++j) b[j] = ranges[j].lo;
    for (;;) {
        out.push_back(LatticePoint{a, b});
        int j = m - 1;
        while (j >= 0 && b[j] == ranges[j].hi) {
            b[j] = ranges[j].lo;
            --j;
        }
        if (j < 0) break;
        ++b[j];
    }
}

void scan_slab(const Prepared& P, std::int64_t a1, bool store, SlabOutput& out) {
    const int d = P.d, m = P.m;
    std::vector<std::int64_t> a(d);
    a[0] = a1;
    for (int i = 1; i < d; ++i) a[i] = P.a_lo[i];
    std::vector<BRange> ranges(m);
    std::vector<i128> X128(d);
    std::vector<Integer> X(d);
    SlowScratch scratch;
    for (;;) {
        bool nonempty = true;
        if (P.fast) {
            for (int i = 0; i < d; ++i) X128[i] = static_cast<i128>(a[i]) * P.lamD128[i] + P.lamN128[i];
            for (int j = 0; j < m && nonempty; ++j) {
                ranges[j] = b_range_fast(P, P.comps[j], X128.data(), 0);
                nonempty = ranges[j].lo <= ranges[j].hi;
            }
        } else {
            for (int i = 0; i < d; ++i) X[i] = Integer(static_cast<long>(a[i])) * P.lamD[i] + P.lamN[i];
            for (int j = 0; j < m && nonempty; ++j) {
                ranges[j] = b_range_slow(P, P.comps[j], X, scratch);
                nonempty = ranges[j].lo <= ranges[j].hi;
            }
        }
        if (nonempty) {
            std::uint64_t n = 1;
            for (int j = 0; j < m; ++j) n *= static_cast<std::uint64_t>(ranges[j].hi - ranges[j].lo + 1);
            out.count += n;
            if (store) emit_points(a, ranges, out.points);
        }
        int i = d - 1;
        while (i >= 1 && a[i] == P.a_hi[i]) {
            a[i] = P.a_lo[i];
            --i;
        }
        if (i < 1) break;
        ++a[i];
    }
}

CountResult run(const ManifoldSpec& spec, const CountQuery& query, const CountOptions& opts, bool store) {
    const Prepared P = prepare(spec, query);
    CountResult res;
    res.query = query;
    if (P.empty) return res;
    const std::int64_t n1 = P.a_hi[0] - P.a_lo[0] + 1;
    std::vector<SlabOutput> slabs(static_cast<size_t>(n1));
    const int threads = resolve_threads(opts.threads);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
    for (std::int64_t s = 0; s < n1; ++s) {
        try {
            scan_slab(P, P.a_lo[0] + s, store, slabs[s]);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    for (auto& s : slabs) {
        res.A += s.count;
        if (store) {
            res.points.insert(res.points.end(), std::make_move_iterator(s.points.begin()),
                              std::make_move_iterator(s.points.end()));
        }
    }
    return res;
}

}  // namespace

CountResult enumerate_R(const ManifoldSpec& spec, const CountQuery& query, const CountOptions& opts) {
    return run(spec, query, opts, true);
}

std::uint64_t count_R(const ManifoldSpec& spec, const CountQuery& query, const CountOptions& opts) {
    return run(spec, query, opts, false).A;
}

// ---------------------------------------------------------------------------
// Sweeps

double SweepTable::max_ratio(long q_lo, long q_hi) const {
    double best = 0.0;
    for (const auto& r : rows)
        if (r.q >= q_lo && r.q < q_hi) best = std::max(best, r.ratio);
    return best;
}

std::string format_double(double x) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

SweepTable bound_sweep(const ManifoldSpec& spec, int k, const std::vector<long>& qs,
                       const std::vector<KappaTerm>& kappas, const std::vector<Theta>& thetas,
                       const SweepOptions& opts) {
    const int d = spec.d(), m = spec.m();
    SweepTable table;
    if (opts.rank_precheck) {
        // deterministic Kronecker sample of alpha in K
        int failed = 0, inconclusive = 0;
        for (int p = 0; p < opts.precheck_points; ++p) {
            std::vector<double> alpha(d);
            for (int i = 0; i < d; ++i) {
                const double u = std::fmod(0.5 + (p + 1) * std::sqrt(2.0 + i), 1.0);
                alpha[i] = spec.rect().lo_d(i) + u * (spec.rect().hi_d(i) - spec.rect().lo_d(i));
            }
            const auto ev = eval_all(spec, std::span<const double>(alpha));
            if (k > d) {
                ++failed;
                continue;
            }
            SearchSettings s;
            s.budget = opts.precheck_budget;
            s.threads = opts.threads;
            const auto rep = check_rank_k(ev.hessian, k, s);
            if (rep.verdict == Verdict::Fail) ++failed;
            if (rep.verdict == Verdict::Inconclusive) ++inconclusive;
        }
        if (failed)
            table.warnings.push_back("rank condition (k=" + std::to_string(k) + ") fails at " + std::to_string(failed) +
                                     " of " + std::to_string(opts.precheck_points) +
                                     " sampled points; the envelope need not hold");
        if (inconclusive)
            table.warnings.push_back("rank condition inconclusive at " + std::to_string(inconclusive) +
                                     " sampled points");
    }

    CountOptions copts;
    copts.threads = opts.threads;
    for (long q : qs) {
        const double ph = phi(q, m, k);
        for (const auto& kt : kappas) {
            const Rational kappa = kt.at(q, m, k);
            for (size_t ti = 0; ti < thetas.size(); ++ti) {
                SweepRow row;
                row.q = q;
                row.kappa = kappa;
                row.theta_id = static_cast<int>(ti);
                row.A = count_R(spec, CountQuery{q, kappa, thetas[ti]}, copts);
                row.envelope = std::pow(static_cast<double>(q), d) * std::pow(std::max(kappa.get_d(), ph), m);
                row.ratio = static_cast<double>(row.A) / row.envelope;
                table.rows.push_back(std::move(row));
            }
        }
    }
    for (const auto& r : table.rows) {
        const int j = static_cast<int>(std::floor(std::log2(static_cast<double>(r.q))));
        auto it = std::find_if(table.blocks.begin(), table.blocks.end(), [&](const auto& b) { return b.log2_q == j; });
        if (it == table.blocks.end()) {
            table.blocks.push_back({j, r.ratio});
        } else {
            it->max_ratio = std::max(it->max_ratio, r.ratio);
        }
    }
    std::sort(table.blocks.begin(), table.blocks.end(), [](const auto& a, const auto& b) { return a.log2_q < b.log2_q; });
    return table;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
    os << "q,kappa_num,kappa_den,theta_id,A,envelope,ratio\n";
    for (const auto& r : table.rows) {
        os << r.q << ',' << r.kappa.get_num().get_str() << ',' << r.kappa.get_den().get_str() << ',' << r.theta_id
           << ',' << r.A << ',' << format_double(r.envelope) << ',' << format_double(r.ratio) << '\n';
    }
}

HcResult hc_partial_sum(const ManifoldSpec& spec, const ApproxFunction& psi, const DimensionFunction& g,
                        const Theta& theta, long Q, const CountOptions& opts) {
    if (Q < 1) throw std::invalid_argument("hc_partial_sum: Q must be >= 1");
    HcResult res;
    const Rectangle L = enlarged_rectangle(spec.rect());
    const ManifoldSpec onL = spec.with_rect(L);
    res.c1 = lipschitz_c1(spec, L);
    const int m = spec.m();
    std::vector<double> incs;
    for (long q = 1; q <= Q; ++q) {
        const double p = psi(static_cast<double>(q));
        double inc = 0.0;
        if (p > 0) {
            // doubles are dyadic rationals, so this conversion is exact
            const Rational kappa(res.c1 * p);
            const auto A = count_R(onL, CountQuery{q, kappa, theta}, opts);
            inc = static_cast<double>(A) * g.quotient(p / static_cast<double>(q), m);
        }
        res.sum += inc;
        incs.push_back(inc);
    }
    const size_t keep = std::min<size_t>(10, incs.size());
    res.last_increments.assign(incs.end() - keep, incs.end());
    return res;
}

}  // namespace khintype
