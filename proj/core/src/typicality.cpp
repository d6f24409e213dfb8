#include "khintype/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "khintype/parallel.hpp"
#include "khintype/series.hpp"
#include "khintype/sphere_search.hpp"

namespace khintype {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, int d, int m) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(m)};
    return std::mt19937_64(seq);
}

}  // namespace

OperatorSample sample_operator(int d, int m, std::uint64_t seed) {
    if (d < 1 || m < 1) throw std::invalid_argument("sample_operator: d and m must be positive");
    auto rng = make_rng(seed, d, m);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<SymMatrix> gens;
    for (int k = 0; k < m; ++k) {
        SymMatrix S(d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) S.set(i, j, normal(rng));
        gens.push_back(std::move(S));
    }
    return OperatorSample{SymPencil(std::move(gens)), seed, "gaussian"};
}

Membership membership_U(const OperatorSample& A, const SearchSettings& settings) {
    Membership out;
    const auto surj = check_surjective(A.pencil, settings.eps_rel);
    out.surjective = surj.holds;
    if (A.pencil.d() < 2 || !surj.holds) {
        out.verdict = Verdict::Fail;
        return out;
    }
    out.search = check_rank_k(A.pencil, 2, settings);
    out.verdict = out.search.verdict;
    return out;
}

Membership membership_Utilde(const OperatorSample& A, const SearchSettings& settings) {
    Membership out;
    const auto surj = check_surjective(A.pencil, settings.eps_rel);
    out.surjective = surj.holds;
    if (A.pencil.d() < 2 || !surj.holds) {
        out.verdict = Verdict::Fail;
        return out;
    }
    out.search = check_drv(A.pencil, settings);
    out.verdict = out.search.verdict;
    return out;
}

std::vector<std::string> construction_names() { return {"posdef-pad", "shear", "diag-squares", "tracefree-basis"}; }

OperatorSample construct(const std::string& name, int d, int l) {
    if (d < 1) throw std::invalid_argument("construct: d must be positive");
    std::vector<SymMatrix> gens;
    if (name == "posdef-pad") {
        if (l < 1) throw std::invalid_argument("construct posdef-pad: need m >= 1");
        gens.push_back(SymMatrix::identity(d));
        for (int k = 1; k < l; ++k) gens.push_back(SymMatrix::zero(d));
    } else if (name == "shear") {
        if (l < 1 || l >= d) throw std::invalid_argument("construct shear: need 1 <= l < d");
        for (int i = 0; i < l; ++i) gens.push_back(SymMatrix::unit(d, i, d - 1));
    } else if (name == "diag-squares") {
        if (l < d) throw std::invalid_argument("construct diag-squares: need l >= d");
        for (int i = 0; i < d; ++i) gens.push_back(SymMatrix::unit(d, i, i));
        for (int k = d; k < l; ++k) gens.push_back(SymMatrix::zero(d));
    } else if (name == "tracefree-basis") {
        if (d < 2) throw std::invalid_argument("construct tracefree-basis: need d >= 2");
        for (int i = 0; i + 1 < d; ++i) {
            SymMatrix S(d);
            S.set(i, i, 2.0);
            S.set(i + 1, i + 1, -2.0);
            gens.push_back(std::move(S));
        }
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) gens.push_back(SymMatrix::unit(d, i, j));
    } else {
        throw std::invalid_argument("construct: unknown construction '" + name + "'");
    }
    return OperatorSample{SymPencil(std::move(gens)), 0, "construct:" + name};
}

ZeroSearch annihilator_zero_search(const OperatorSample& omega, long budget, double eps) {
    const SymPencil& P = omega.pencil;
    const int d = P.d();
    auto objective = [&P, d](std::span<const double> v) {
        double total = 0.0;
        for (int k = 0; k < P.m(); ++k) {
            double q = 0.0;
            for (int i = 0; i < d; ++i) {
                q += P[k](i, i) * v[i] * v[i];
                for (int j = i + 1; j < d; ++j) q += 2.0 * P[k](i, j) * v[i] * v[j];
            }
            total += q * q;
        }
        return total;
    };
    SphereSearchOptions opts;
    opts.budget = budget > 0 ? budget : 20000;
    opts.antipodal = true;
    const auto res = minimize_on_sphere(d, objective, opts);
    ZeroSearch out;
    out.min_value = res.value;
    out.witness_v = res.t;
    out.budget_used = res.evaluations;
    out.found = res.value < eps;
    return out;
}

MiddleZero find_zero_middle_eig(const OperatorSample& A, double tol) {
    const SymPencil& P = A.pencil;
    if (P.d() != 3 || P.m() != 2) throw std::invalid_argument("find_zero_middle_eig: requires d = 3, m = 2");
    auto gamma = [&P](double theta) {
        const double t[2] = {std::cos(theta), std::sin(theta)};
        return middle_eigenvalue(contract(P, t));
    };
    MiddleZero out;
    auto finish = [&](double theta, double g) {
        out.t = {std::cos(theta), std::sin(theta)};
        out.gamma = g;
        out.success = std::abs(g) <= tol;
        return out;
    };
    double a = 0.0, b = std::numbers::pi;
    double ga = gamma(a);
    if (std::abs(ga) <= tol) return finish(a, ga);
    // gamma(pi) = -gamma(0) by oddness, so the sign changes on [0, pi]
    double best_theta = a, best_g = ga;
    for (int it = 0; it < 200; ++it) {
        ++out.iterations;
        const double mid = 0.5 * (a + b);
        const double gm = gamma(mid);
        if (std::abs(gm) < std::abs(best_g)) {
            best_theta = mid;
            best_g = gm;
        }
        if (std::abs(gm) <= tol) return finish(mid, gm);
        if ((gm > 0) == (ga > 0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
        if (b - a < 1e-17) break;
    }
    return finish(best_theta, best_g);
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Empty: return "EMPTY";
        case Regime::NotDense: return "NOT_DENSE";
        case Regime::DenseConull: return "DENSE_CONULL";
    }
    return "?";
}

Regime predicted_U(int d, int m) {
    if (m >= binomial(d + 1, 2)) return Regime::Empty;
    if (m <= binomial(d, 2)) return Regime::DenseConull;
    return Regime::NotDense;
}

Regime predicted_Utilde(int d, int m) {
    if (m > binomial(d, 2)) return Regime::Empty;
    // d = 3: any two-dimensional slice of t already meets a zero of the middle eigenvalue
    if (d == 3 && m >= 2) return Regime::Empty;
    if (m <= binomial(d - 1, 2)) return Regime::DenseConull;
    return Regime::NotDense;
}

double PhaseReport::freq_U() const {
    return n_decided_U ? static_cast<double>(n_in_U) / static_cast<double>(n_decided_U) : 0.0;
}

double PhaseReport::freq_Utilde() const {
    return n_decided_Utilde ? static_cast<double>(n_in_Utilde) / static_cast<double>(n_decided_Utilde) : 0.0;
}

namespace {

bool agrees(Regime r, long in, long decided) {
    switch (r) {
        case Regime::Empty: return in == 0;
        case Regime::DenseConull: return in == decided;
        case Regime::NotDense: return in > 0 && in < decided;
    }
    return false;
}

}  // namespace

bool PhaseReport::agree_U() const { return agrees(predicted_U, n_in_U, n_decided_U); }
bool PhaseReport::agree_Utilde() const { return agrees(predicted_Utilde, n_in_Utilde, n_decided_Utilde); }

PhaseReport phase_cell(int d, int m, long n_samples, const PhaseOptions& opts) {
    if (d < 1 || m < 1 || n_samples < 1) throw std::invalid_argument("phase_cell: d, m, n must be positive");
    PhaseReport rep;
    rep.d = d;
    rep.m = m;
    rep.n_samples = n_samples;
    rep.predicted_U = predicted_U(d, m);
    rep.predicted_Utilde = predicted_Utilde(d, m);

    std::vector<Verdict> vu(n_samples), vt(n_samples);
    SearchSettings settings;
    settings.budget = opts.budget;
    settings.threads = 1;  // parallelism is across samples
    const int threads = resolve_threads(opts.threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long i = 0; i < n_samples; ++i) {
        const std::uint64_t s = splitmix64(opts.seed ^ splitmix64(static_cast<std::uint64_t>(i)));
        const OperatorSample A = sample_operator(d, m, s);
        vu[i] = membership_U(A, settings).verdict;
        vt[i] = membership_Utilde(A, settings).verdict;
    }
    for (long i = 0; i < n_samples; ++i) {
        if (vu[i] != Verdict::Inconclusive) {
            ++rep.n_decided_U;
            if (vu[i] == Verdict::Pass) ++rep.n_in_U;
        }
        if (vt[i] != Verdict::Inconclusive) {
            ++rep.n_decided_Utilde;
            if (vt[i] == Verdict::Pass) ++rep.n_in_Utilde;
        }
        if (vu[i] == Verdict::Inconclusive || vt[i] == Verdict::Inconclusive) ++rep.n_inconclusive;
        if (vt[i] == Verdict::Pass && vu[i] == Verdict::Fail) ++rep.violations;
    }
    return rep;
}

std::vector<PhaseReport> phase_scan(int d_max, long n_samples, const PhaseOptions& opts) {
    if (d_max < 1) throw std::invalid_argument("phase_scan: d_max must be positive");
    std::vector<PhaseReport> out;
    for (int d = 1; d <= d_max; ++d)
        for (int m = 1; m <= binomial(d + 1, 2); ++m) {
            PhaseOptions o = opts;
            o.seed = splitmix64(opts.seed ^ (static_cast<std::uint64_t>(d) << 32 | static_cast<std::uint64_t>(m)));
            out.push_back(phase_cell(d, m, n_samples, o));
        }
    return out;
}

int dim_S_rank_at(const std::vector<double>& v, const std::vector<double>& w) {
    const int d = static_cast<int>(v.size());
    if (d < 1 || w.size() != v.size()) throw std::invalid_argument("dim_S_rank_at: v and w must have equal length");
    const int D = d * (d + 1) / 2;
    DenseMatrix J(D, 2 * d);
    for (int c = 0; c < 2 * d; ++c) {
        // derivative in direction e_c of (v, w): x v^T + v x^T, or -(y w^T + w y^T)
        const int i0 = c % d;
        const std::vector<double>& base = c < d ? v : w;
        const double sign = c < d ? 1.0 : -1.0;
        SymMatrix S(d);
        for (int j = 0; j < d; ++j) S.add(i0, j, sign * base[j]);
        S.add(i0, i0, sign * base[i0]);
        const auto col = flatten_frobenius(S);
        for (int r = 0; r < D; ++r) J(r, c) = col[r];
    }
    const auto sv = singular_values(J);
    const double thr = 1e-10 * std::max(1.0, sv.empty() ? 0.0 : sv[0]);
    int rank = 0;
    for (double s : sv)
        if (s > thr) ++rank;
    return rank;
}

int dim_S_check(int d, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("dim_S_check: d must be >= 2");
    std::vector<double> v(d, 0.0), w(d, 0.0);
    v[0] = 1.0;
    w[1] = 1.0;
    int best = dim_S_rank_at(v, w);
    auto rng = make_rng(seed, d, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int p = 0; p < 20; ++p) {
        for (int i = 0; i < d; ++i) {
            v[i] = normal(rng);
            w[i] = normal(rng);
        }
        best = std::max(best, dim_S_rank_at(v, w));
    }
    return best;
}

}  // namespace khintype
