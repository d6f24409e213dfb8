// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "brute_force.hpp"
#include "khintype/counting.hpp"
#include "khintype/expsum.hpp"
#include "khintype/manifold.hpp"
#include "khintype/nondegen.hpp"
#include "khintype/series.hpp"
#include "khintype/typicality.hpp"

using namespace khintype;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<long> kSweepQ{64, 128, 256, 512, 1024, 2048};

std::vector<KappaTerm> sweep_kappas() { return parse_kappa_rule("1/4,1/16,phi,scaled-phi:1/4"); }

std::vector<Theta> sweep_thetas() { return {Theta::zero(2, 2), Theta::parse("3/10,7/10,1/10,9/10", 2, 2)}; }

Outcome counting_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    const std::vector<std::tuple<std::string, int, int>> maps{
        {"a1^2", 1, 1},          {"a1^3 - 2/3*a1", 1, 1},       {"1/2*a1^2 + a1", 1, 1},
        {"a1*a2", 2, 1},         {"a1^2 + 1/3*a2^2 - a2", 2, 1}, {"a1^2 - a2^2", 2, 1},
        {"a1^2 - a2^2; a1*a2", 2, 2}, {"a1^2; a2^2 + 1/2*a1", 2, 2}, {"a1*a2 - a1; 2*a2^2", 2, 2}};
    std::uniform_int_distribution<int> num(-7, 7), den(1, 9), kap(1, 24), qdist(1, 50);
    int cases = 0, mismatches = 0;
    long points = 0;
    for (int rep = 0; rep < 240; ++rep) {
        const auto& [src, d, m] = maps[rep % maps.size()];
        std::vector<Rational> lo(d), hi(d);
        for (int i = 0; i < d; ++i) {
            lo[i] = Rational(num(rng), den(rng));
            hi[i] = lo[i] + Rational(1 + std::abs(num(rng)), den(rng));
        }
        const ManifoldSpec spec(Rectangle(lo, hi), parse_map(src, d, m), "random");
        Theta th = Theta::zero(d, m);
        if (rep % 3) {
            for (auto& l : th.lambda) l = Rational(num(rng), den(rng));
            for (auto& g : th.gamma) g = Rational(num(rng), den(rng));
        }
        const CountQuery q{qdist(rng), Rational(kap(rng), 16), th};
        const auto r = enumerate_R(spec, q);
        const auto ref = testing_support::brute_force(spec, q);
        points += static_cast<long>(ref.size());
        if (r.points != ref || r.A != ref.size()) ++mismatches;
        ++cases;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && cases >= 200 && secs < 60,
            fmt::format("{} cases, {} oracle points, {} mismatches, {:.1f}s", cases, points, mismatches, secs)};
}

Outcome counting_envelope() {
    const auto t0 = Clock::now();
    SweepOptions o;
    o.threads = 1;
    const auto table = bound_sweep(builtin("tracefree2"), 2, kSweepQ, sweep_kappas(), sweep_thetas(), o);
    const double secs = seconds_since(t0);
    const double top = table.max_ratio(512, 1L << 40);
    const double mid = table.max_ratio(128, 512);
    const double factor = top / mid;
    return {factor <= 1.5 && secs <= 600 && table.warnings.empty(),
            fmt::format("max ratio top block {:.4f}, middle block {:.4f}, factor {:.4f} (<= 1.5), {} rows, {:.1f}s "
                        "single-threaded",
                        top, mid, factor, table.rows.size(), secs)};
}

Outcome kernel_inequalities() {
    const auto t0 = Clock::now();
    std::vector<double> xs(10000);
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / xs.size();
    double fejer = 1e300, dirichlet = 1e300;
    for (int H = 1; H <= 64; ++H) {
        const auto r = kernel_check(H, xs);
        fejer = std::min(fejer, r.worst_fejer_slack);
        dirichlet = std::min(dirichlet, r.worst_dirichlet_slack);
    }
    const double secs = seconds_since(t0);
    return {fejer >= -1e-9 && dirichlet >= -1e-9,
            fmt::format("worst Fejer slack {:.3g}, worst Dirichlet slack {:.3g}, {:.2f}s", fejer, dirichlet, secs)};
}

Outcome majorant_dominance() {
    const auto t0 = Clock::now();
    const auto spec = builtin("tracefree2");
    std::vector<CountQuery> queries;
    for (long q : kSweepQ)
        for (const auto& k : sweep_kappas())
            for (const auto& th : sweep_thetas()) queries.push_back({q, k.at(q, 2, 2), th});
    std::map<double, double> C;
    std::map<double, size_t> rows_in;
    double worst_grid = 0.0;
    for (double delta : {0.01, 0.1}) {
        CompareOptions o;
        o.k = 2;
        const auto rows = compare_sweep(spec, queries, delta, 64, o);
        double c = 0.0;
        for (const auto& r : rows) c = std::max(c, r.majorant_ratio);
        C[delta] = c;
        rows_in[delta] = rows.size();
        // grid doubling on every distinct in-regime (q, kappa)
        std::map<std::pair<long, double>, bool> seen;
        for (const auto& r : rows) {
            const auto key = std::make_pair(r.q, r.kappa.get_d());
            if (seen[key]) continue;
            seen[key] = true;
            const double fine = majorant(spec, r.q, r.kappa, delta, 128);
            worst_grid = std::max(worst_grid, std::abs(fine - r.majorant) / fine);
        }
    }
    const double secs = seconds_since(t0);
    const bool nonempty = rows_in[0.01] > 0 && rows_in[0.1] > 0;
    const double variation = nonempty ? std::max(C[0.01], C[0.1]) / std::min(C[0.01], C[0.1]) : INFINITY;
    return {nonempty && variation <= 2.0 && worst_grid <= 0.05,
            fmt::format("C(0.01) = {:.4g} over {} rows, C(0.1) = {:.4g} over {} rows, variation {:.3f} (<= 2), "
                        "grid doubling change {:.2f}% (<= 5%), {:.1f}s",
                        C[0.01], rows_in[0.01], C[0.1], rows_in[0.1], variation, 100 * worst_grid, secs)};
}

SymPencil center_pencil(const std::string& name) {
    const auto spec = builtin(name);
    std::vector<Rational> c(spec.d());
    for (int i = 0; i < spec.d(); ++i) c[i] = (spec.rect().lo()[i] + spec.rect().hi()[i]) / 2;
    return eval_all(spec, c).hessian_pencil();
}

Outcome catalog_verdicts() {
    const auto t0 = Clock::now();
    int inconclusive = 0;
    std::vector<std::string> bad;
    auto note = [&](Verdict v) { inconclusive += v == Verdict::Inconclusive; };

    const auto v5 = center_pencil("veronese5");
    const bool surj = check_surjective(v5).holds;
    const bool det1 = check_det1(v5).holds;
    const auto r2 = check_rank_k(v5, 2);
    note(r2.verdict);
    const int witness_rank = rank_eps(contract(v5, r2.witness_t));
    if (!surj) bad.push_back("veronese5 surjective");
    if (det1) bad.push_back("veronese5 det1");
    if (r2.verdict != Verdict::Fail || witness_rank != 1) bad.push_back("veronese5 rank2");
    for (int d = 2; d <= 4; ++d) {
        const auto r = check_rank_k(center_pencil("tracefree(" + std::to_string(d) + ")"), 2);
        note(r.verdict);
        if (r.verdict != Verdict::Pass) bad.push_back(fmt::format("tracefree({}) rank2", d));
    }
    const auto drv = check_drv(center_pencil("tracefree2"));
    note(drv.verdict);
    if (drv.verdict != Verdict::Fail) bad.push_back("tracefree2 drv");
    std::string failed;
    for (const auto& b : bad) failed += " " + b;
    return {bad.empty() && inconclusive == 0,
            fmt::format("veronese5 surjective={} det1={} rank2={} (witness rank {}); tracefree(2..4) rank2; tracefree2 "
                        "drv={}; {} inconclusive{}{}; {:.1f}s",
                        surj, det1, to_string(r2.verdict), witness_rank, to_string(drv.verdict), inconclusive,
                        failed.empty() ? "" : "; wrong:", failed, seconds_since(t0))};
}

Outcome implication_suite() {
    const auto t0 = Clock::now();
    long violations = 0, inconclusive = 0, pencils = 0;
    long det1_true = 0, det2_true = 0, drv_true = 0;
    for (int d = 2; d <= 4; ++d)
        for (int m = 1; m <= 3; ++m)
            for (int i = 0; i < 500; ++i) {
                const auto p = sample_operator(d, m, 1'000'000ULL * d + 1000ULL * m + i).pencil;
                ++pencils;
                const bool surj = check_surjective(p).holds;
                const auto r2 = check_rank_k(p, 2);
                const auto r1 = check_rank_k(p, 1);
                const auto dv = check_drv(p);
                inconclusive += (r2.verdict == Verdict::Inconclusive) + (r1.verdict == Verdict::Inconclusive) +
                                (dv.verdict == Verdict::Inconclusive);
                if (m <= d && check_det1(p).holds) {
                    ++det1_true;
                    violations += !surj;
                }
                if (m == 1 && check_det2(p).holds) {
                    ++det2_true;
                    violations += r2.verdict == Verdict::Fail;
                }
                if (dv.verdict == Verdict::Pass) {
                    ++drv_true;
                    violations += r2.verdict == Verdict::Fail;
                }
                if (r1.verdict != Verdict::Inconclusive) violations += (r1.verdict == Verdict::Pass) != surj;
            }
    return {violations == 0,
            fmt::format("{} pencils, {} violations (det1 held {}x, det2 {}x, drv {}x), {} inconclusive searches, {:.1f}s",
                        pencils, violations, det1_true, det2_true, drv_true, inconclusive, seconds_since(t0))};
}

Outcome typicality_phase() {
    const auto t0 = Clock::now();
    PhaseOptions o;
    o.seed = 7;
    const auto cells = phase_scan(3, 1000, o);
    const double secs = seconds_since(t0);
    std::vector<std::string> bad;
    std::string table;
    for (const auto& c : cells) {
        const int d = c.d, m = c.m;
        const double fu = c.freq_U(), ft = c.freq_Utilde();
        const bool both_u = c.n_in_U > 0 && c.n_in_U < c.n_decided_U;
        const bool both_t = c.n_in_Utilde > 0 && c.n_in_Utilde < c.n_decided_Utilde;
        std::vector<std::string> why;
        if (m <= binomial(d, 2) && fu != 1.0) why.push_back("U freq != 1");
        if (m >= binomial(d + 1, 2) && fu != 0.0) why.push_back("U freq != 0");
        if (m > binomial(d, 2) && m < binomial(d + 1, 2) && !both_u) why.push_back("U not mixed");
        if (m <= binomial(d - 1, 2) && ft != 1.0) why.push_back("Utilde freq != 1");
        if (d == 3 && m == 2 && ft != 0.0) why.push_back("Utilde freq != 0");
        if (d == 2 && m == 1 && !both_t) why.push_back("Utilde not mixed");
        if (c.n_inconclusive * 100 >= c.n_samples) why.push_back("inconclusive >= 1%");
        if (c.violations) why.push_back("Utilde member outside U");
        table += fmt::format(" ({},{}) U={:.3f} Ut={:.3f} inc={}", d, m, fu, ft, c.n_inconclusive);
        for (const auto& w : why) bad.push_back(fmt::format("({},{}) {}", d, m, w));
    }
    std::string failed;
    for (const auto& b : bad) failed += "; " + b;
    return {bad.empty() && secs <= 900, fmt::format("{} cells x 1000 samples, {:.1f}s (<= 900s);{}{}", cells.size(),
                                                    secs, table, failed)};
}

Outcome middle_eigenvalue_zeros() {
    int ok = 0, tried = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; tried < 100; ++seed) {
        const auto A = sample_operator(3, 2, 5000 + seed);
        if (!check_surjective(A.pencil).holds) continue;
        ++tried;
        const auto z = find_zero_middle_eig(A);
        worst = std::max(worst, std::abs(z.gamma));
        ok += z.success && std::abs(z.gamma) <= 1e-8;
    }
    return {ok == 100, fmt::format("{}/{} zeros found, worst |gamma| = {:.3g}", ok, tried, worst)};
}

Outcome dim_s() {
    std::string detail;
    bool pass = true;
    for (int d = 2; d <= 4; ++d) {
        const int r = dim_S_check(d);
        pass = pass && r == 2 * d - 1;
        detail += fmt::format("d={}: {} (want {}) ", d, r, 2 * d - 1);
    }
    return {pass, detail};
}

Outcome series_classifier() {
    int checked = 0, wrong = 0;
    struct Tuple {
        int n, m, k;
        double gap;
    };
    std::vector<Tuple> candidates;
    for (int d = 1; d <= 6; ++d)
        for (int m = 1; m < binomial(d + 1, 2); ++m)
            for (int k = 1; k <= 2; ++k) {
                const int n = d + m;
                const auto c = classify_gseries(n, n, m, k);
                ++checked;
                const bool closed = 2 * m < k * (n - 1);
                wrong += (c.verdict == SeriesVerdict::Converges) != closed;
                // exponent of q in the term is n - lhs; the probe needs to see it away from -1
                const double gap = Rational(c.lhs - c.rhs).get_d();
                if (!c.critical) candidates.push_back({n, m, k, gap});
            }
    // 40 probe cross-checks spread evenly over the non-critical tuples
    int probes = 0, agree = 0;
    const size_t step = std::max<size_t>(1, candidates.size() / 40);
    for (size_t i = 0; i < candidates.size() && probes < 40; i += step) {
        const auto& t = candidates[i];
        SeriesSpec s;
        s.kind = SeriesKind::GSeries;
        s.n = t.n;
        s.m = t.m;
        s.k = t.k;
        s.g = DimensionFunction(t.n);
        const auto p = partial_sum_probe(s, 1 << 18);
        agree += p.verdict == classify_gseries(t.n, t.n, t.m, t.k).verdict;
        ++probes;
    }
    return {wrong == 0 && probes == 40 && agree == 40,
            fmt::format("{} exact verdicts, {} disagree with 2m < k(n-1); probes {}/{} agree", checked, wrong, agree,
                        probes)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / fmt::format("khintype_accept_{}", ::getpid());
    std::filesystem::create_directories(dir);
    const std::string cli = KHINTYPE_CLI_PATH;
    const std::vector<std::pair<std::string, std::string>> runs{
        {"count", "count --manifold tracefree2 --k 2 --q 64..1024x2 --kappa 1/4,phi --theta 0 --theta 3/10,7/10,1/10,9/10"},
        {"expsum", "expsum --manifold tracefree2 --q 512..2048x2 --kappa 1/4,1/16 --delta 0.01,0.1 --grid 32"},
        {"nondegen", "nondegen --manifold 'tracefree(3)' --points 4 --seed 11"},
        {"typicality", "typicality --dmax 2 --n 200 --seed 7"},
        {"series", "series --d 4 --m 1 --k 1 --s 5 --probe 4096"},
        {"catalog", "catalog"},
    };
    int same = 0;
    std::string bad;
    for (const auto& [name, args] : runs) {
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "1", "4"}) {
            const auto out = dir / fmt::format("{}_{}_{}.out", name, threads, outputs.size());
            const std::string cmd =
                fmt::format("\"{}\" {} --threads {} -o \"{}\" > /dev/null 2>&1", cli, args, threads, out.string());
            const int rc = std::system(cmd.c_str());
            outputs.push_back(rc == 0 ? slurp(out) : std::string("exit ") + std::to_string(rc));
        }
        const bool ok = !outputs[0].empty() && outputs[0].rfind("exit ", 0) != 0 && outputs[0] == outputs[1] &&
                        outputs[0] == outputs[2];
        same += ok;
        if (!ok) bad += " " + name;
    }
    std::filesystem::remove_all(dir);
    return {same == static_cast<int>(runs.size()),
            fmt::format("{}/{} subcommands byte-identical across repeat and 1 vs 4 threads{}{}", same, runs.size(),
                        bad.empty() ? "" : "; differing:", bad)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"counting oracle equivalence", counting_oracle},
        {"counting envelope", counting_envelope},
        {"kernel inequalities", kernel_inequalities},
        {"majorant dominance", majorant_dominance},
        {"catalog verdicts", catalog_verdicts},
        {"implication suite", implication_suite},
        {"typicality phase diagram", typicality_phase},
        {"middle-eigenvalue obstruction", middle_eigenvalue_zeros},
        {"dim S check", dim_s},
        {"series classifier", series_classifier},
        {"determinism", determinism},
    };
    // optional list of criterion numbers to run
    std::vector<bool> selected(criteria.size(), argc <= 1);
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k >= 1 && k <= static_cast<int>(criteria.size())) selected[k - 1] = true;
    }
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
