#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "khintype/cli/app.hpp"
#include "khintype/counting.hpp"
#include "khintype/expsum.hpp"
#include "khintype/manifold.hpp"
#include "khintype/nondegen.hpp"
#include "khintype/series.hpp"
#include "khintype/typicality.hpp"

namespace khintype::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string header(const RunConfig& cfg) { return fmt::format("# khintype {} config={}\n", kVersion, config_hash(cfg)); }

Json meta(const RunConfig& cfg) {
    Json j;
    j["tool"] = "khintype";
    j["version"] = kVersion;
    j["config"] = config_hash(cfg);
    j["command"] = cfg.command;
    j["seed"] = cfg.seed;
    return j;
}

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

ManifoldSpec resolve_manifold(const RunConfig& cfg) {
    if (cfg.source.empty()) return builtin(cfg.manifold);
    if (cfg.d < 1 || cfg.m < 1) throw std::invalid_argument("a custom source needs --d and --m");
    auto corner = [&](const std::string& text, int fallback) {
        if (text.empty()) return std::vector<Rational>(cfg.d, Rational(fallback));
        auto v = parse_rational_list(text);
        if (static_cast<int>(v.size()) != cfg.d)
            throw std::invalid_argument(fmt::format("rectangle corner needs {} coordinates", cfg.d));
        return v;
    };
    return ManifoldSpec(Rectangle(corner(cfg.lo, 0), corner(cfg.hi, 1)), parse_map(cfg.source, cfg.d, cfg.m), "custom");
}

std::vector<Theta> resolve_thetas(const RunConfig& cfg, const ManifoldSpec& spec) {
    std::vector<Theta> out;
    for (const auto& t : cfg.theta) out.push_back(Theta::parse(t, spec.d(), spec.m()));
    if (out.empty()) out.push_back(Theta::zero(spec.d(), spec.m()));
    return out;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string verdict_word(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "yes";
        case Verdict::Fail: return "no";
        default: return "inconclusive";
    }
}

Json rank_json(const RankReport& r) {
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["margin"] = r.margin;
    j["threshold"] = r.threshold;
    j["witness_t"] = r.witness_t;
    j["evaluations"] = r.budget_used;
    return j;
}

SearchSettings search_settings(const RunConfig& cfg) {
    SearchSettings s;
    s.budget = cfg.budget;
    s.eps_rel = cfg.eps;
    s.threads = cfg.threads;
    return s;
}

}  // namespace

int run_count(const RunConfig& cfg, Streams io) {
    const auto spec = resolve_manifold(cfg);
    const auto qs = parse_q_range(cfg.q);
    const auto kappas = parse_kappa_rule(cfg.kappa);
    const auto thetas = resolve_thetas(cfg, spec);
    SweepOptions opts;
    opts.threads = cfg.threads;
    opts.precheck_budget = cfg.budget;
    const auto table = bound_sweep(spec, cfg.k, qs, kappas, thetas, opts);

    io.data << header(cfg);
    for (size_t i = 0; i < thetas.size(); ++i) io.data << "# theta_id " << i << ": " << thetas[i].to_string() << '\n';
    write_sweep_csv(io.data, table);

    fmt::print(io.summary, "count: {} (d={}, m={}, k={}), {} rows\n", spec.name(), spec.d(), spec.m(), cfg.k,
               table.rows.size());
    for (const auto& b : table.blocks)
        fmt::print(io.summary, "  block q in [2^{}, 2^{}): max A/envelope = {}\n", b.log2_q, b.log2_q + 1,
                   format_double(b.max_ratio));
    double overall = 0.0;
    for (const auto& r : table.rows) overall = std::max(overall, r.ratio);
    fmt::print(io.summary, "  max ratio = {}\n", format_double(overall));
    for (const auto& w : table.warnings) fmt::print(io.summary, "  warning: {}\n", w);
    return kOk;
}

int run_expsum(const RunConfig& cfg, Streams io) {
    const auto spec = resolve_manifold(cfg);
    const auto qs = parse_q_range(cfg.q);
    const auto kappas = parse_kappa_rule(cfg.kappa);
    const auto thetas = resolve_thetas(cfg, spec);
    std::vector<CountQuery> queries;
    for (long q : qs)
        for (const auto& kt : kappas)
            for (const auto& th : thetas) queries.push_back({q, kt.at(q, spec.m(), cfg.k), th});
    if (cfg.delta.empty()) throw std::invalid_argument("expsum needs at least one delta");

    CompareOptions opts;
    opts.k = cfg.k;
    opts.threads = cfg.threads;
    std::vector<CompareRow> all;
    fmt::print(io.summary, "expsum: {} (d={}, m={}), grid {}\n", spec.name(), spec.d(), spec.m(), cfg.grid);
    for (double delta : cfg.delta) {
        auto rows = compare_sweep(spec, queries, delta, cfg.grid, opts);
        double c = 0.0;
        for (const auto& r : rows) c = std::max(c, r.majorant_ratio);
        fmt::print(io.summary, "  delta {}: {} of {} queries in regime, C = max A/majorant = {}\n",
                   format_double(delta), rows.size(), queries.size(), format_double(c));
        all.insert(all.end(), rows.begin(), rows.end());
    }
    io.data << header(cfg);
    for (size_t i = 0; i < thetas.size(); ++i) io.data << "# theta_id " << i << ": " << thetas[i].to_string() << '\n';
    write_compare_csv(io.data, all);
    return kOk;
}

int run_nondegen(const RunConfig& cfg, Streams io) {
    const auto spec = resolve_manifold(cfg);
    const int d = spec.d(), m = spec.m();
    if (cfg.k < 1 || cfg.k > d) throw std::invalid_argument(fmt::format("--k must lie in [1, {}]", d));

    std::vector<std::vector<Rational>> points;
    if (!cfg.alpha.empty()) {
        points.push_back(parse_rational_list(cfg.alpha));
        if (static_cast<int>(points[0].size()) != d)
            throw std::invalid_argument(fmt::format("--alpha needs {} coordinates", d));
    } else {
        if (cfg.points < 1) throw std::invalid_argument("--points must be positive");
        const auto& K = spec.rect();
        std::vector<Rational> center(d);
        for (int i = 0; i < d; ++i) center[i] = (K.lo()[i] + K.hi()[i]) / 2;
        points.push_back(center);
        std::mt19937_64 rng(cfg.seed);
        for (long p = 1; p < cfg.points; ++p) {
            std::vector<Rational> a(d);
            for (int i = 0; i < d; ++i) {
                const Rational u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // exact dyadic in [0, 1)
                a[i] = K.lo()[i] + (K.hi()[i] - K.lo()[i]) * u;
            }
            points.push_back(std::move(a));
        }
    }

    const auto settings = search_settings(cfg);
    Json out;
    out["meta"] = meta(cfg);
    out["manifold"] = {{"name", spec.name()}, {"d", d}, {"m", m}, {"map", spec.map().to_string()},
                       {"rect", spec.rect().to_string()}};
    Json rows = Json::array();
    long decided = 0, inconclusive = 0;
    std::map<std::string, long> holds;
    auto tally = [&](const std::string& key, Verdict v) {
        if (v == Verdict::Inconclusive) {
            ++inconclusive;
            return;
        }
        ++decided;
        if (v == Verdict::Pass) ++holds[key];
    };
    for (const auto& alpha : points) {
        const auto ev = eval_all(spec, alpha);
        const auto pencil = ev.hessian_pencil();
        Json row;
        std::vector<std::string> alpha_text;
        for (const auto& a : alpha) alpha_text.push_back(to_string(a));
        row["alpha"] = alpha_text;
        if (m <= d) {
            const auto r = check_det1(pencil, cfg.eps);
            row["det1"] = {{"holds", r.holds}, {"det", r.det}};
            tally("det1", r.holds ? Verdict::Pass : Verdict::Fail);
        }
        if (m == 1) {
            const auto r = check_det2(pencil, cfg.eps);
            row["det2"] = {{"holds", r.holds}, {"det", r.det}};
            tally("det2", r.holds ? Verdict::Pass : Verdict::Fail);
        }
        const auto sj = check_surjective(pencil, cfg.eps);
        row["surjective"] = {{"holds", sj.holds}, {"sigma_min", sj.sigma_min}, {"threshold", sj.threshold}};
        tally("surjective", sj.holds ? Verdict::Pass : Verdict::Fail);
        const auto rk = check_rank_k(pencil, cfg.k, settings);
        row["rank_k"] = rank_json(rk);
        row["rank_k"]["k"] = cfg.k;
        tally("rank_k", rk.verdict);
        const auto drv = check_drv(pencil, settings);
        row["drv"] = rank_json(drv);
        tally("drv", drv.verdict);
        rows.push_back(std::move(row));
    }
    out["points"] = std::move(rows);
    out["summary"] = {{"points", points.size()}, {"decided", decided}, {"inconclusive", inconclusive}};
    for (const auto& [key, count] : holds) out["summary"]["holds_" + key] = count;
    write_json(io.data, out);

    fmt::print(io.summary, "nondegen: {} (d={}, m={}), {} point(s), k={}\n", spec.name(), d, m, points.size(), cfg.k);
    for (const char* key : {"det1", "det2", "surjective", "rank_k", "drv"})
        if (out["points"][0].contains(key))
            fmt::print(io.summary, "  {}: holds at {}/{}\n", key, holds[key], points.size());
    fmt::print(io.summary, "  inconclusive verdicts: {}\n", inconclusive);
    return inconclusive > decided ? kInconclusive : kOk;
}

int run_typicality(const RunConfig& cfg, Streams io) {
    PhaseOptions opts;
    opts.budget = cfg.budget;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    std::vector<PhaseReport> reports;
    if (cfg.d > 0 && cfg.m > 0)
        reports.push_back(phase_cell(cfg.d, cfg.m, cfg.n, opts));
    else
        reports = phase_scan(cfg.dmax, cfg.n, opts);

    Json out;
    out["meta"] = meta(cfg);
    Json cells = Json::array();
    long inconclusive = 0, total = 0;
    bool all_agree = true;
    fmt::print(io.summary, "typicality: {} samples per cell, seed {}\n", cfg.n, cfg.seed);
    fmt::print(io.summary, "  {:>2} {:>2} {:>8} {:>8} {:>5}  {:<12} {:<12} {}\n", "d", "m", "freq_U", "freq_Ut",
               "inc", "pred_U", "pred_Ut", "agree");
    for (const auto& r : reports) {
        Json c;
        c["d"] = r.d;
        c["m"] = r.m;
        c["n"] = r.n_samples;
        c["freq_U"] = r.freq_U();
        c["freq_Utilde"] = r.freq_Utilde();
        c["n_in_U"] = r.n_in_U;
        c["n_in_Utilde"] = r.n_in_Utilde;
        c["n_inconclusive"] = r.n_inconclusive;
        c["violations"] = r.violations;
        c["predicted_U"] = to_string(r.predicted_U);
        c["predicted_Utilde"] = to_string(r.predicted_Utilde);
        c["agree"] = r.agree();
        cells.push_back(std::move(c));
        inconclusive += r.n_inconclusive;
        total += r.n_samples;
        all_agree = all_agree && r.agree();
        fmt::print(io.summary, "  {:>2} {:>2} {:>8.4f} {:>8.4f} {:>5}  {:<12} {:<12} {}\n", r.d, r.m, r.freq_U(),
                   r.freq_Utilde(), r.n_inconclusive, to_string(r.predicted_U), to_string(r.predicted_Utilde),
                   r.agree() ? "yes" : "NO");
    }
    out["cells"] = std::move(cells);
    out["agree"] = all_agree;
    write_json(io.data, out);
    fmt::print(io.summary, "  all cells agree: {}\n", yes_no(all_agree));
    return 2 * inconclusive > total ? kInconclusive : kOk;
}

int run_series(const RunConfig& cfg, Streams io) {
    if (cfg.d < 1 || cfg.m < 1) throw std::invalid_argument("series needs --d and --m");
    const int n = cfg.d + cfg.m;
    Rational s = parse_rational(cfg.s);
    if (s == 0) s = n;
    const auto a = applicability(cfg.d, cfg.m, cfg.k, s);

    Json out;
    out["meta"] = meta(cfg);
    out["d"] = a.d;
    out["m"] = a.m;
    out["k"] = a.k;
    out["s"] = to_string(a.s);
    out["case1"] = a.case1;
    out["case2"] = a.case2;
    out["gseries"] = {{"verdict", to_string(a.jarnik.verdict)},
                      {"critical", a.jarnik.critical},
                      {"lhs", to_string(a.jarnik.lhs)},
                      {"rhs", to_string(a.jarnik.rhs)}};
    out["rank2_typical"] = a.rank2_typical;
    out["drv_typical"] = a.drv_typical;
    out["notes"] = a.notes;
    out["summary"] = a.summary();
    if (cfg.probe > 0) {
        SeriesSpec spec;
        spec.kind = SeriesKind::GSeries;
        spec.n = n;
        spec.m = cfg.m;
        spec.k = cfg.k;
        spec.g = DimensionFunction(s);
        const auto p = partial_sum_probe(spec, cfg.probe);
        out["probe"] = {{"label", ProbeResult::kLabel},
                        {"Q", cfg.probe},
                        {"sum_quarter", p.sum_quarter},
                        {"sum_half", p.sum_half},
                        {"sum_full", p.sum_full},
                        {"fitted_power", p.fitted_power},
                        {"fitted_log_power", p.fitted_log_power},
                        {"verdict", to_string(p.verdict)}};
    }
    write_json(io.data, out);
    io.summary << a.summary() << '\n';
    if (cfg.probe > 0)
        fmt::print(io.summary, "probe ({}, Q={}): {}\n", ProbeResult::kLabel, cfg.probe,
                   out["probe"]["verdict"].get<std::string>());
    return kOk;
}

int run_catalog(const RunConfig& cfg, Streams io) {
    auto& os = io.data;
    os << "manifolds:\n";
    os << "  veronese5: surjective=yes det1=no rank2=no  (d=5, m=3; f = a1^2, a1*a2, a2^2)\n";
    os << "  parabola: surjective=yes det1=yes  (d=1, m=1; f = a1^2)\n";
    os << "  tracefree2: rank2=yes drv=no  (d=2, m=2; f = a1^2 - a2^2, a1*a2)\n";
    for (int d = 3; d <= 6; ++d)
        os << fmt::format("  tracefree({}): rank2=yes  (d={}, m={})\n", d, d, binomial(d + 1, 2) - 1);
    os << "constructions:\n";
    os << "  posdef-pad: U=yes Utilde=yes for l=1  (I_d, then zero generators)\n";
    os << "  shear: U=yes Utilde=no for l<d  (x_i x_d, i <= l)\n";
    os << "  diag-squares: U=no annihilator=none  (x_i^2, i <= d, zero padded)\n";
    os << "  tracefree-basis: U=yes for 2<=d<=4  (trace-free symmetric basis)\n";
    if (!cfg.verify) return kOk;

    os << "computed (center of K for manifolds):\n";
    const auto settings = search_settings(cfg);
    long inconclusive = 0;
    auto word = [&](Verdict v) {
        if (v == Verdict::Inconclusive) ++inconclusive;
        return verdict_word(v);
    };
    for (const auto& name : builtin_names()) {
        const auto spec = builtin(name);
        std::vector<Rational> center(spec.d());
        for (int i = 0; i < spec.d(); ++i) center[i] = (spec.rect().lo()[i] + spec.rect().hi()[i]) / 2;
        const auto pencil = eval_all(spec, center).hessian_pencil();
        std::string line = "  " + name + ":";
        line += " surjective=" + yes_no(check_surjective(pencil, cfg.eps).holds);
        if (spec.m() <= spec.d()) line += " det1=" + yes_no(check_det1(pencil, cfg.eps).holds);
        if (spec.d() >= 2) {
            line += " rank2=" + word(check_rank_k(pencil, 2, settings).verdict);
            line += " drv=" + word(check_drv(pencil, settings).verdict);
        }
        os << line << '\n';
    }
    const int d = 3;
    const std::vector<std::pair<std::string, int>> cons{
        {"posdef-pad", 1}, {"shear", 2}, {"diag-squares", 3}, {"tracefree-basis", 0}};
    for (const auto& [name, l] : cons) {
        const auto A = construct(name, d, l);
        const auto u = membership_U(A, settings);
        const auto ut = membership_Utilde(A, settings);
        const auto z = annihilator_zero_search(A);
        os << fmt::format("  {} (d={}, l={}): U={} Utilde={} annihilator={}\n", name, d, A.pencil.m(),
                          word(u.verdict), word(ut.verdict), z.found ? "found" : "none");
    }
    return inconclusive > 0 ? kInconclusive : kOk;
}

}  // namespace khintype::cli
