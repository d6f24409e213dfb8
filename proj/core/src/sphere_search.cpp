#include "khintype/sphere_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/normal.hpp>

#include "khintype/parallel.hpp"

namespace khintype {

namespace {

void normalize(std::span<double> t) {
    double n = 0.0;
    for (double v : t) n += v * v;
    n = std::sqrt(n);
    for (double& v : t) v /= n;
}

// Flip so the first coordinate of non-negligible size is positive.
void canonical_sign(std::span<double> t) {
    for (double v : t) {
        if (std::abs(v) > 1e-15) {
            if (v < 0)
                for (double& w : t) w = -w;
            return;
        }
    }
}

// Root of x^(m+1) = x + 1; its inverse powers give a low-discrepancy Kronecker sequence.
double generalized_golden(int m) {
    double x = 1.5;
    for (int it = 0; it < 100; ++it) {
        const double fx = std::pow(x, m + 1) - x - 1;
        const double dfx = (m + 1) * std::pow(x, m) - 1;
        x -= fx / dfx;
    }
    return x;
}

std::vector<double> make_seeds(int m, long count, bool antipodal) {
    std::vector<double> pts;
    if (m == 1) {
        pts.push_back(1.0);
        if (!antipodal) pts.push_back(-1.0);
        return pts;
    }
    pts.resize(static_cast<size_t>(count) * m);
    const double pi = std::numbers::pi;
    if (m == 2) {
        const double span = antipodal ? pi : 2 * pi;
        for (long i = 0; i < count; ++i) {
            const double a = span * (i + 0.5) / count;
            pts[2 * i] = std::cos(a);
            pts[2 * i + 1] = std::sin(a);
        }
    } else if (m == 3) {
        const double golden_angle = pi * (3.0 - std::sqrt(5.0));
        for (long i = 0; i < count; ++i) {
            const double z = antipodal ? 1.0 - (i + 0.5) / count : 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden_angle * i;
            pts[3 * i] = z;
            pts[3 * i + 1] = r * std::cos(phi);
            pts[3 * i + 2] = r * std::sin(phi);
        }
    } else {
        const double g = generalized_golden(m);
        std::vector<double> alpha(m);
        for (int j = 0; j < m; ++j) alpha[j] = std::fmod(std::pow(1.0 / g, j + 1), 1.0);
        const boost::math::normal normal;
        for (long i = 0; i < count; ++i) {
            double* p = pts.data() + static_cast<size_t>(i) * m;
            for (int j = 0; j < m; ++j) {
                double u = std::fmod(0.5 + alpha[j] * static_cast<double>(i + 1), 1.0);
                u = std::clamp(u, 1e-12, 1.0 - 1e-12);
                p[j] = boost::math::quantile(normal, u);
            }
            normalize({p, static_cast<size_t>(m)});
            if (antipodal) canonical_sign({p, static_cast<size_t>(m)});
        }
    }
    return pts;
}

struct LocalResult {
    double value;
    std::vector<double> t;
    long evaluations;
};

// Compass search on the sphere: try t +- s e_j (renormalized); double s after a
// successful sweep, halve it after a failed one.
void compass(const SphereObjective& f, std::vector<double>& t, double& value, double s, double tol, long& evals) {
    const int m = static_cast<int>(t.size());
    std::vector<double> cand(m);
    while (s >= tol) {
        bool improved = false;
        for (int j = 0; j < m; ++j) {
            for (int sign = -1; sign <= 1; sign += 2) {
                cand = t;
                cand[j] += sign * s;
                normalize(cand);
                const double v = f(cand);
                ++evals;
                if (v < value) {
                    value = v;
                    t = cand;
                    improved = true;
                }
            }
        }
        s = improved ? std::min(2.0 * s, 0.5) : 0.5 * s;
    }
}

}  // namespace

std::shared_ptr<const std::vector<double>> sphere_seeds(int m, long count, bool antipodal) {
    if (m < 1) throw std::invalid_argument("sphere_seeds: m must be positive");
    if (count < 1) throw std::invalid_argument("sphere_seeds: count must be positive");
    static std::mutex mu;
    static std::map<std::tuple<int, long, bool>, std::shared_ptr<const std::vector<double>>> cache;
    const auto key = std::make_tuple(m, m == 1 ? 1L : count, antipodal);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto pts = std::make_shared<const std::vector<double>>(make_seeds(m, count, antipodal));
    cache.emplace(key, pts);
    return pts;
}

SphereSearchResult minimize_on_sphere(int m, const SphereObjective& f, const SphereSearchOptions& opts,
                                      const SpherePolish& polish) {
    if (m < 1) throw std::invalid_argument("minimize_on_sphere: m must be positive");
    if (opts.budget < 1) throw std::invalid_argument("minimize_on_sphere: budget must be positive");
    const auto seeds = sphere_seeds(m, opts.budget, opts.antipodal);
    const long n = static_cast<long>(seeds->size()) / m;
    const int threads = resolve_threads(opts.threads);

    std::vector<double> values(n);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        const std::span<const double> t{seeds->data() + static_cast<size_t>(i) * m, static_cast<size_t>(m)};
        values[i] = opts.seed_objective ? opts.seed_objective(t) : f(t);
    }

    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0L);
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return values[a] < values[b]; });

    // pick diverse starting points among the best seeds
    std::vector<long> starts;
    auto seed = [&](long i) { return seeds->data() + static_cast<size_t>(i) * m; };
    for (long idx : order) {
        if (static_cast<int>(starts.size()) >= opts.starts) break;
        bool close = false;
        for (long s : starts) {
            double dot = 0.0;
            for (int j = 0; j < m; ++j) dot += seed(idx)[j] * seed(s)[j];
            if ((opts.antipodal ? std::abs(dot) : dot) > 0.98) {
                close = true;
                break;
            }
        }
        if (!close) starts.push_back(idx);
        if (m == 1) break;
    }

    std::vector<LocalResult> initial;
    long extra_evals = 0;
    for (long idx : starts) {
        LocalResult r{values[idx], std::vector<double>(seed(idx), seed(idx) + m), 0};
        if (opts.seed_objective) {
            r.value = f(r.t);
            ++r.evaluations;
        }
        initial.push_back(std::move(r));
    }
    if (!opts.extra_starts.empty()) {
        std::vector<LocalResult> extra;
        for (const auto& e : opts.extra_starts) {
            if (static_cast<int>(e.size()) != m) throw std::invalid_argument("minimize_on_sphere: extra start has wrong size");
            double nn = 0.0;
            for (double v : e) nn += v * v;
            if (!(nn > 0.0) || !std::isfinite(nn)) continue;
            LocalResult r{0.0, e, 0};
            normalize(r.t);
            r.value = f(r.t);
            ++extra_evals;
            extra.push_back(std::move(r));
        }
        std::stable_sort(extra.begin(), extra.end(),
                         [](const LocalResult& a, const LocalResult& b) { return a.value < b.value; });
        if (static_cast<int>(extra.size()) > opts.extra_keep) extra.resize(opts.extra_keep);
        for (auto& r : extra) initial.push_back(std::move(r));
    }

    const double s0 = m == 1 ? 0.0 : std::min(0.5, 4.0 * std::pow(static_cast<double>(n), -1.0 / (m - 1)));
    std::vector<LocalResult> local(initial.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (size_t si = 0; si < initial.size(); ++si) {
        LocalResult r = initial[si];
        if (m > 1) compass(f, r.t, r.value, s0, opts.step_tol, r.evaluations);
        if (polish) {
            std::vector<double> cur = r.t, next;
            bool improved = false;
            for (int round = 0; round < opts.polish_rounds; ++round) {
                if (!polish(cur, next)) break;
                normalize(next);
                const double v = f(next);
                ++r.evaluations;
                if (v < r.value) {
                    r.value = v;
                    r.t = next;
                    improved = true;
                }
                double dot = 0.0;
                for (int j = 0; j < m; ++j) dot += cur[j] * next[j];
                cur = next;
                if (1.0 - std::abs(dot) < 1e-28) break;
            }
            if (improved && m > 1) compass(f, r.t, r.value, 1e-3, opts.step_tol, r.evaluations);
        }
        local[si] = std::move(r);
    }

    SphereSearchResult out;
    out.evaluations = n + extra_evals;
    size_t best = 0;
    for (size_t si = 0; si < local.size(); ++si) {
        out.evaluations += local[si].evaluations;
        if (local[si].value < local[best].value) best = si;
    }
    out.value = local[best].value;
    out.t = local[best].t;
    if (opts.antipodal) canonical_sign(out.t);
    return out;
}

}  // namespace khintype
