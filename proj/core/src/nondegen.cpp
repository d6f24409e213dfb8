#include "khintype/nondegen.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "khintype/sphere_search.hpp"

namespace khintype {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

long default_budget(int m) { return m <= 3 ? 20000 : 200000; }

DetReport check_det1(const SymPencil& pencil, double eps_rel) {
    const int d = pencil.d(), m = pencil.m();
    if (m > d) throw std::invalid_argument("check_det1: requires m <= d");
    DenseMatrix M(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) M(i, j) = pencil[j](0, i);
    DetReport r;
    r.det = determinant(M);
    r.holds = std::abs(r.det) > eps_rel;
    return r;
}

DetReport check_det2(const SymPencil& pencil, double eps_rel) {
    if (pencil.m() != 1) throw std::invalid_argument("check_det2: requires m == 1");
    DetReport r;
    r.det = determinant(pencil[0].dense());
    r.holds = std::abs(r.det) > eps_rel;
    return r;
}

SurjectivityReport check_surjective(const SymPencil& pencil, double eps_rel) {
    const int d = pencil.d(), m = pencil.m();
    const int D = d * (d + 1) / 2;
    DenseMatrix F(m, D);
    for (int k = 0; k < m; ++k) {
        const auto row = flatten_frobenius(pencil[k]);
        std::copy(row.begin(), row.end(), F.data.begin() + static_cast<size_t>(k) * D);
    }
    const auto sv = singular_values(F);
    SurjectivityReport r;
    r.sigma_min = m <= D ? sv[m - 1] : 0.0;
    r.threshold = eps_rel * std::max(1.0, sv.empty() ? 0.0 : sv[0]);
    r.holds = r.sigma_min > r.threshold;
    return r;
}

double drv_margin(std::span<const double> ev) {
    const int d = static_cast<int>(ev.size());
    if (d < 2) return 0.0;
    return std::max(ev[1], -ev[d - 2]);
}

namespace {

struct Scratch {
    std::optional<SymMatrix> M;
    std::vector<double> ev;
};

SymMatrix& scratch_matrix(int d) {
    thread_local Scratch s;
    if (!s.M || s.M->dim() != d) s.M.emplace(d);
    return *s.M;
}

std::vector<double>& scratch_values() {
    thread_local std::vector<double> ev;
    return ev;
}

// Alternating step: with V the selected eigenvectors of M(t), the next t
// minimizes |V^T M(t) V|_F over unit t.
bool subspace_step(const SymPencil& pencil, std::span<const double> t, const std::vector<int>& columns,
                   std::vector<double>& next) {
    const int d = pencil.d(), m = pencil.m();
    const int r = static_cast<int>(columns.size());
    if (r == 0) return false;
    const EigenSystem es = eigensystem(contract(pencil, t));
    std::vector<std::vector<double>> B(m, std::vector<double>(static_cast<size_t>(r) * r));
    for (int k = 0; k < m; ++k)
        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b) {
                double s = 0.0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        s += es.vectors(i, columns[a]) * pencil[k](i, j) * es.vectors(j, columns[b]);
                B[k][static_cast<size_t>(a) * r + b] = s;
            }
    SymMatrix G(m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double s = 0.0;
            for (size_t x = 0; x < B[i].size(); ++x) s += B[i][x] * B[j][x];
            G.set(i, j, s);
        }
    const EigenSystem gs = eigensystem(G);
    next.resize(m);
    for (int i = 0; i < m; ++i) next[i] = gs.vectors(i, m - 1);
    return true;
}

RankReport finish(RankReport r, const SymPencil& pencil, double eps_rel) {
    r.threshold = eps_rel * std::max(1.0, pencil.norm());
    r.passes = r.margin > r.threshold;
    if (!r.passes)
        r.verdict = Verdict::Fail;
    else if (r.margin < 10.0 * r.threshold)
        r.verdict = Verdict::Inconclusive;
    else
        r.verdict = Verdict::Pass;
    return r;
}

SphereSearchOptions options_for(const SymPencil& pencil, const SearchSettings& s) {
    SphereSearchOptions o;
    o.budget = s.budget > 0 ? s.budget : default_budget(pencil.m());
    o.antipodal = true;
    o.threads = s.threads;
    return o;
}

// Least-squares projections of the rank-one matrices v v^T (v = e_i, (e_i +- e_j)/sqrt 2)
// onto the span of the generators. Exact witnesses when the generators span Sym(d).
std::vector<std::vector<double>> rank_one_projections(const SymPencil& pencil) {
    const int d = pencil.d(), m = pencil.m();
    SymMatrix G(m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            double s = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) s += (i == j ? 1.0 : 2.0) * pencil[a](i, j) * pencil[b](i, j);
            G.set(a, b, s);
        }
    const EigenSystem gs = eigensystem(G);
    const double cutoff = 1e-12 * std::max(1.0, gs.values.empty() ? 0.0 : gs.values[0]);

    std::vector<std::vector<double>> vs;
    for (int i = 0; i < d; ++i) {
        std::vector<double> v(d, 0.0);
        v[i] = 1.0;
        vs.push_back(v);
        for (int j = i + 1; j < d; ++j)
            for (double sgn : {1.0, -1.0}) {
                std::vector<double> w(d, 0.0);
                w[i] = std::sqrt(0.5);
                w[j] = sgn * std::sqrt(0.5);
                vs.push_back(w);
            }
    }
    std::vector<std::vector<double>> out;
    for (const auto& v : vs) {
        std::vector<double> rhs(m);
        for (int k = 0; k < m; ++k) {
            double s = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) s += v[i] * pencil[k](i, j) * v[j];
            rhs[k] = s;
        }
        std::vector<double> t(m, 0.0);
        for (int c = 0; c < m; ++c) {
            if (gs.values[c] <= cutoff) continue;
            double proj = 0.0;
            for (int k = 0; k < m; ++k) proj += gs.vectors(k, c) * rhs[k];
            proj /= gs.values[c];
            for (int k = 0; k < m; ++k) t[k] += proj * gs.vectors(k, c);
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

RankReport check_rank_k(const SymPencil& pencil, int k, const SearchSettings& settings) {
    const int d = pencil.d(), m = pencil.m();
    if (k < 1 || k > d) throw std::invalid_argument("check_rank_k: need 1 <= k <= d");

    auto objective = [&pencil, k, d](std::span<const double> t) {
        SymMatrix& M = scratch_matrix(d);
        contract_into(pencil, t, M);
        auto& ev = scratch_values();
        eigenvalues_into(M, ev);
        return kth_singular_value(ev, k);
    };
    auto polish = [&pencil, k, d](std::span<const double> t, std::vector<double>& next) {
        // the d-k+1 eigenvectors of smallest |lambda|
        const auto ev = eigenvalues(contract(pencil, t));
        std::vector<int> idx(d);
        for (int i = 0; i < d; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(ev[a]) < std::abs(ev[b]); });
        idx.resize(d - k + 1);
        return subspace_step(pencil, t, idx, next);
    };
    auto opts = options_for(pencil, settings);
    if (k >= 2) opts.extra_starts = rank_one_projections(pencil);
    if (d == 3) {
        opts.seed_objective = [&pencil, k](std::span<const double> t) {
            SymMatrix& M = scratch_matrix(3);
            contract_into(pencil, t, M);
            double ev[3];
            eigenvalues3_approx(M, ev);
            return kth_singular_value(ev, k);
        };
    }
    const auto res = minimize_on_sphere(m, objective, opts, polish);

    RankReport r;
    r.k = k;
    r.margin = res.value;
    r.witness_t = res.t;
    r.budget_used = res.evaluations;
    return finish(std::move(r), pencil, settings.eps_rel);
}

RankReport check_drv(const SymPencil& pencil, const SearchSettings& settings) {
    const int d = pencil.d(), m = pencil.m();
    auto objective = [&pencil, d](std::span<const double> t) {
        SymMatrix& M = scratch_matrix(d);
        contract_into(pencil, t, M);
        auto& ev = scratch_values();
        eigenvalues_into(M, ev);
        return drv_margin(ev);
    };
    SpherePolish polish;
    if (d >= 3) {
        polish = [&pencil, d](std::span<const double> t, std::vector<double>& next) {
            std::vector<int> middle;
            for (int i = 1; i <= d - 2; ++i) middle.push_back(i);
            return subspace_step(pencil, t, middle, next);
        };
    }
    RankReport r;
    r.k = 0;
    if (d < 2) {
        // a single eigenvalue can never supply two of equal sign
        r.margin = 0.0;
        r.witness_t.assign(m, 0.0);
        r.witness_t[0] = 1.0;
        r.budget_used = 0;
        return finish(std::move(r), pencil, settings.eps_rel);
    }
    auto opts = options_for(pencil, settings);
    if (d == 3) {
        opts.seed_objective = [&pencil](std::span<const double> t) {
            SymMatrix& M = scratch_matrix(3);
            contract_into(pencil, t, M);
            double ev[3];
            eigenvalues3_approx(M, ev);
            return drv_margin(ev);
        };
    }
    const auto res = minimize_on_sphere(m, objective, opts, polish);
    r.margin = res.value;
    r.witness_t = res.t;
    r.budget_used = res.evaluations;
    return finish(std::move(r), pencil, settings.eps_rel);
}

}  // namespace khintype
