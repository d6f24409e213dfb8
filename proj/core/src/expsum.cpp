#include "khintype/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "khintype/parallel.hpp"

namespace khintype {

double dist_to_int(double x) { return std::abs(x - std::nearbyint(x)); }

KernelReport kernel_check(int H, std::span<const double> xs) {
    if (H < 1) throw std::invalid_argument("kernel_check: H must be >= 1");
    const double pi = std::numbers::pi;
    KernelReport rep;
    rep.H = H;
    rep.worst_fejer_slack = std::numeric_limits<double>::infinity();
    rep.worst_dirichlet_slack = std::numeric_limits<double>::infinity();
    const double lower = (2.0 * H / pi) * (2.0 * H / pi);
    for (double x : xs) {
        const double y = x - std::nearbyint(x);  // same kernels, shifted into [-1/2, 1/2]
        const double nx = std::abs(y);
        const double s = std::sin(pi * y);
        double fejer, dirichlet;
        if (s == 0.0) {
            fejer = static_cast<double>(H) * H;
            dirichlet = 2.0 * H + 1;
        } else {
            const double ratio = std::sin(H * pi * y) / s;
            fejer = ratio * ratio;
            dirichlet = std::sin((2.0 * H + 1) * pi * y) / s;
        }
        double direct = H;
        for (int h = 1; h < H; ++h) direct += 2.0 * (H - h) * std::cos(2 * pi * h * y);
        rep.max_closed_form_error = std::max(rep.max_closed_form_error, std::abs(direct - fejer));

        const double fslack = fejer - (nx <= 1.0 / (2.0 * H) ? lower : 0.0);
        const double cap = nx == 0.0 ? 2.0 * H + 1 : std::min(2.0 * H + 1, 1.0 / (2.0 * nx));
        const double dslack = cap - std::abs(dirichlet);
        if (fslack < rep.worst_fejer_slack) {
            rep.worst_fejer_slack = fslack;
            rep.worst_fejer_x = x;
        }
        if (dslack < rep.worst_dirichlet_slack) {
            rep.worst_dirichlet_slack = dslack;
            rep.worst_dirichlet_x = x;
        }
        ++rep.checked;
    }
    return rep;
}

OutOfRegime::OutOfRegime(const MajorantParams& p)
    : std::domain_error("OUT_OF_REGIME: H=" + std::to_string(p.H) + " r=" + std::to_string(p.r) +
                        " (both must be >= 1)"),
      params(p) {}

MajorantParams majorant_params(long q, const Rational& kappa, double delta) {
    if (q < 1) throw std::invalid_argument("majorant: q must be >= 1");
    if (kappa <= 0) throw std::invalid_argument("majorant: kappa must be positive");
    if (!(delta > 0)) throw std::invalid_argument("majorant: delta must be positive");
    MajorantParams p;
    p.delta = delta;
    Rational inv = 1 / (4 * kappa);
    const Integer H = floor(inv);
    p.H = H.fits_slong_p() ? H.get_si() : std::numeric_limits<long>::max();
    const double x = delta * static_cast<double>(q) * kappa.get_d();
    long r = static_cast<long>(std::floor(std::sqrt(x)));
    while (static_cast<double>(r + 1) * (r + 1) <= x) ++r;
    while (r > 0 && static_cast<double>(r) * r > x) --r;
    p.r = r;
    return p;
}

namespace {

// Jacobian of f sampled on the vertex lattice and the cell midpoints of a grid^d tensor grid.
struct GridSamples {
    int d = 0, m = 0, grid = 0;
    std::vector<double> lo, width;  // cell widths per axis
    std::vector<double> vertex_jac; // (grid+1)^d points, m*d each (row-major j,i)
    std::vector<double> mid_jac;    // grid^d cells
};

void jacobian_at(const ManifoldSpec& spec, std::span<const double> x, double* out) {
    const int d = spec.d(), m = spec.m();
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < d; ++i) out[j * d + i] = spec.jacobian_compiled(j, i)(x);
}

GridSamples sample_grid(const ManifoldSpec& spec, int grid) {
    GridSamples g;
    g.d = spec.d();
    g.m = spec.m();
    g.grid = grid;
    const int d = g.d, md = g.m * g.d;
    for (int i = 0; i < d; ++i) {
        g.lo.push_back(spec.rect().lo_d(i));
        g.width.push_back((spec.rect().hi_d(i) - spec.rect().lo_d(i)) / grid);
    }
    long nv = 1, nc = 1;
    for (int i = 0; i < d; ++i) {
        nv *= grid + 1;
        nc *= grid;
    }
    g.vertex_jac.resize(static_cast<size_t>(nv) * md);
    g.mid_jac.resize(static_cast<size_t>(nc) * md);
    std::vector<double> x(d);
    for (long v = 0; v < nv; ++v) {
        long rem = v;
        for (int i = d - 1; i >= 0; --i) {
            x[i] = g.lo[i] + g.width[i] * static_cast<double>(rem % (grid + 1));
            rem /= grid + 1;
        }
        jacobian_at(spec, x, g.vertex_jac.data() + static_cast<size_t>(v) * md);
    }
    for (long c = 0; c < nc; ++c) {
        long rem = c;
        for (int i = d - 1; i >= 0; --i) {
            x[i] = g.lo[i] + g.width[i] * (static_cast<double>(rem % grid) + 0.5);
            rem /= grid;
        }
        jacobian_at(spec, x, g.mid_jac.data() + static_cast<size_t>(c) * md);
    }
    return g;
}

double integrand(const double* jac, int d, int m, std::span<const long> h, long r) {
    double prod = 1.0;
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += static_cast<double>(h[j]) * jac[j * d + i];
        const double nx = dist_to_int(s);
        if (nx == 0.0) continue;
        prod *= std::min(1.0, 1.0 / (static_cast<double>(r) * nx));
    }
    return prod;
}

double integrate(const ManifoldSpec& spec, const GridSamples& g, std::span<const long> h, long r) {
    const int d = g.d, m = g.m, grid = g.grid, md = m * d;
    long nc = 1;
    for (int i = 0; i < d; ++i) nc *= grid;
    double cell_vol = 1.0;
    for (int i = 0; i < d; ++i) cell_vol *= g.width[i];

    std::vector<long> idx(d);
    std::vector<double> x(d), jac(md);
    double total = 0.0;
    for (long c = 0; c < nc; ++c) {
        long rem = c;
        for (int i = d - 1; i >= 0; --i) {
            idx[i] = rem % grid;
            rem /= grid;
        }
        const double mid = integrand(g.mid_jac.data() + static_cast<size_t>(c) * md, d, m, h, r);
        double lo = mid, hi = mid;
        for (int corner = 0; corner < (1 << d); ++corner) {
            long v = 0;
            for (int i = 0; i < d; ++i) v = v * (grid + 1) + idx[i] + ((corner >> i) & 1);
            const double f = integrand(g.vertex_jac.data() + static_cast<size_t>(v) * md, d, m, h, r);
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        if (hi <= 4.0 * lo) {
            total += mid * cell_vol;
            continue;
        }
        // one dyadic refinement: midpoints of the 2^d subcells
        double sub = 0.0;
        for (int corner = 0; corner < (1 << d); ++corner) {
            for (int i = 0; i < d; ++i)
                x[i] = g.lo[i] + g.width[i] * (static_cast<double>(idx[i]) + 0.25 + 0.5 * ((corner >> i) & 1));
            jacobian_at(spec, x, jac.data());
            sub += integrand(jac.data(), d, m, h, r);
        }
        total += sub / (1 << d) * cell_vol;
    }
    return total;
}

}  // namespace

double product_integral(const ManifoldSpec& spec, std::span<const long> h, long r, int grid) {
    if (r < 1) throw std::invalid_argument("product_integral: r must be >= 1");
    if (grid < 8) throw std::invalid_argument("product_integral: grid must be >= 8");
    if (static_cast<int>(h.size()) != spec.m()) throw std::invalid_argument("product_integral: h must have length m");
    const GridSamples g = sample_grid(spec, grid);
    return integrate(spec, g, h, r);
}

double majorant(const ManifoldSpec& spec, long q, const Rational& kappa, double delta, int grid, int threads) {
    const MajorantParams p = majorant_params(q, kappa, delta);
    if (!p.in_regime()) throw OutOfRegime(p);
    if (grid < 8) throw std::invalid_argument("majorant: grid must be >= 8");
    const int m = spec.m(), d = spec.d();
    const GridSamples g = sample_grid(spec, grid);

    // h and -h give the same integrand; keep h = 0 and those whose first nonzero entry is positive
    std::vector<std::vector<long>> hs;
    std::vector<long> h(m, -p.H);
    for (;;) {
        int first = 0;
        while (first < m && h[first] == 0) ++first;
        if (first == m || h[first] > 0) hs.push_back(h);
        int j = m - 1;
        while (j >= 0 && h[j] == p.H) {
            h[j] = -p.H;
            --j;
        }
        if (j < 0) break;
        ++h[j];
    }
    std::vector<double> vals(hs.size());
    const int nthreads = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
    for (size_t t = 0; t < hs.size(); ++t) vals[t] = integrate(spec, g, hs[t], p.r);

    double sum = 0.0;
    for (size_t t = 0; t < hs.size(); ++t) {
        const bool zero = std::all_of(hs[t].begin(), hs[t].end(), [](long v) { return v == 0; });
        sum += (zero ? 1.0 : 2.0) * vals[t];
    }
    return std::pow(static_cast<double>(q), d) * std::pow(static_cast<double>(p.H), -m) * sum;
}

std::vector<CompareRow> compare_sweep(const ManifoldSpec& spec, const std::vector<CountQuery>& queries, double delta,
                                      int grid, const CompareOptions& opts) {
    std::vector<CompareRow> rows;
    std::vector<Theta> seen;
    // the majorant ignores theta, so cache it per (q, kappa)
    std::vector<std::tuple<long, Rational, double>> cache;
    CountOptions copts;
    copts.threads = opts.threads;
    for (const auto& query : queries) {
        auto it = std::find(seen.begin(), seen.end(), query.theta);
        const int theta_id = static_cast<int>(it - seen.begin());
        if (it == seen.end()) seen.push_back(query.theta);

        const MajorantParams p = majorant_params(query.q, query.kappa, delta);
        if (!p.in_regime()) {
            if (opts.skip_out_of_regime) continue;
            throw OutOfRegime(p);
        }
        double maj = -1.0;
        for (const auto& [cq, ck, cv] : cache)
            if (cq == query.q && ck == query.kappa) maj = cv;
        if (maj < 0) {
            maj = majorant(spec, query.q, query.kappa, delta, grid, opts.threads);
            cache.emplace_back(query.q, query.kappa, maj);
        }
        CompareRow row;
        row.q = query.q;
        row.kappa = query.kappa;
        row.theta_id = theta_id;
        row.A = count_R(spec, query, copts);
        row.envelope = std::pow(static_cast<double>(query.q), spec.d()) *
                       std::pow(std::max(query.kappa.get_d(), phi(query.q, spec.m(), opts.k)), spec.m());
        row.ratio = static_cast<double>(row.A) / row.envelope;
        row.majorant = maj;
        row.majorant_ratio = static_cast<double>(row.A) / maj;
        row.params = p;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
    os << "q,kappa_num,kappa_den,theta_id,A,envelope,ratio,majorant,majorant_ratio,H,r,delta\n";
    for (const auto& r : rows) {
        os << r.q << ',' << r.kappa.get_num().get_str() << ',' << r.kappa.get_den().get_str() << ',' << r.theta_id
           << ',' << r.A << ',' << format_double(r.envelope) << ',' << format_double(r.ratio) << ','
           << format_double(r.majorant) << ',' << format_double(r.majorant_ratio) << ',' << r.params.H << ','
           << r.params.r << ',' << format_double(r.params.delta) << '\n';
    }
}

}  // namespace khintype
