#include "khintype/cli/app.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace khintype::cli {

namespace {

// Flag values land here; only flags actually given override the config file.
struct Overrides {
    std::string manifold, source, lo, hi, q, kappa, s, alpha, output;
    std::vector<std::string> theta;
    std::vector<double> delta;
    int k = 0, grid = 0, dmax = 0, d = 0, m = 0, threads = 0;
    long budget = 0, n = 0, probe = 0, points = 0;
    double eps = 0;
    std::uint64_t seed = 0;
    bool verify = false;
};

using Apply = std::function<void(RunConfig&)>;

struct Binder {
    CLI::App* app;
    std::vector<std::pair<CLI::Option*, Apply>>& applies;

    template <class T>
    void add(const std::string& flag, T& slot, T RunConfig::*field, const std::string& help) {
        auto* opt = app->add_option(flag, slot, help);
        applies.emplace_back(opt, [&slot, field](RunConfig& c) { c.*field = slot; });
    }
    void flag(const std::string& name, bool& slot, bool RunConfig::*field, const std::string& help) {
        auto* opt = app->add_flag(name, slot, help);
        applies.emplace_back(opt, [&slot, field](RunConfig& c) { c.*field = slot; });
    }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical experiments on rational points near manifolds and nondegeneracy of Hessian pencils",
                 "khintype"};
    app.set_version_flag("--version", std::string("khintype ") + kVersion);
    app.require_subcommand(0, 1);

    Overrides ov;
    std::string config_path;
    std::vector<std::pair<CLI::Option*, Apply>> applies;

    const std::map<std::string, std::string> about{
        {"count", "Exact counts A(q, kappa, theta) against the envelope q^d max(kappa, phi(q))^m (CSV)"},
        {"expsum", "Exact counts against the exponential-sum majorant (CSV)"},
        {"nondegen", "Nondegeneracy conditions of the Hessian pencil at points of K (JSON)"},
        {"typicality", "Phase diagram of the rank-2 and DRV conditions for random operators (JSON)"},
        {"series", "Which convergence case applies, and the g-series verdict (JSON)"},
        {"catalog", "Builtin manifolds and constructions with their known verdicts"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : about) {
        auto* sub = app.add_subcommand(name, help);
        subs[name] = sub;
        sub->add_option("--config", config_path, "INI file with [run] [manifold] [sweep] [params] [output]")
            ->check(CLI::ExistingFile);
        Binder b{sub, applies};
        b.add("--seed", ov.seed, &RunConfig::seed, "Random seed");
        b.add("--threads", ov.threads, &RunConfig::threads, "Worker threads (0: KHINTYPE_THREADS or all cores)");
        b.add("--out,-o", ov.output, &RunConfig::output, "Output file (default: stdout, summary on stderr)");
        b.add("--budget", ov.budget, &RunConfig::budget, "Sphere-search seed budget (0: default per m)");
        b.add("--eps", ov.eps, &RunConfig::eps, "Relative rank threshold");
        b.add("--k", ov.k, &RunConfig::k, "Rank k");
        if (name == "count" || name == "expsum" || name == "nondegen") {
            b.add("--manifold", ov.manifold, &RunConfig::manifold, "Builtin manifold name");
            b.add("--source", ov.source, &RunConfig::source, "Custom map 'expr; expr' over a1..ad");
            b.add("--lo", ov.lo, &RunConfig::lo, "Custom rectangle lower corner");
            b.add("--hi", ov.hi, &RunConfig::hi, "Custom rectangle upper corner");
        }
        if (name == "count" || name == "expsum") {
            b.add("--q", ov.q, &RunConfig::q, "q values: 'a..bxr', 'a..b' or a list");
            b.add("--kappa", ov.kappa, &RunConfig::kappa, "kappa rule: phi, scaled-phi:c, or rationals");
            auto* opt = sub->add_option("--theta", ov.theta, "Shift: 0 or d+m comma-separated rationals (repeatable)");
            applies.emplace_back(opt, [&ov](RunConfig& c) { c.theta = ov.theta; });
        }
        if (name == "expsum") {
            auto* opt = sub->add_option("--delta", ov.delta, "delta values")->delimiter(',');
            applies.emplace_back(opt, [&ov](RunConfig& c) { c.delta = ov.delta; });
            b.add("--grid", ov.grid, &RunConfig::grid, "Quadrature cells per axis");
        }
        if (name == "nondegen") {
            b.add("--points", ov.points, &RunConfig::points, "Number of points of K (the first is the center)");
            b.add("--alpha", ov.alpha, &RunConfig::alpha, "A single point, comma-separated rationals");
        }
        if (name == "typicality" || name == "series") {
            b.add("--d", ov.d, &RunConfig::d, "Dimension d");
            b.add("--m", ov.m, &RunConfig::m, "Codimension m");
        } else if (name == "nondegen" || name == "count" || name == "expsum") {
            b.add("--d", ov.d, &RunConfig::d, "d for a custom source");
            b.add("--m", ov.m, &RunConfig::m, "m for a custom source");
        }
        if (name == "typicality") {
            b.add("--dmax", ov.dmax, &RunConfig::dmax, "Largest d in the scan");
            b.add("--n", ov.n, &RunConfig::n, "Samples per cell");
        }
        if (name == "series") {
            b.add("--s", ov.s, &RunConfig::s, "Exponent of g(rho) = rho^s (0: s = d + m)");
            b.add("--probe", ov.probe, &RunConfig::probe, "Also run the numerical partial-sum probe up to Q");
        }
        if (name == "catalog") b.flag("--verify", ov.verify, &RunConfig::verify, "Recompute the verdicts");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << "khintype " << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }

    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) command = name;
    if (command.empty()) {
        out << app.help();
        return kOk;
    }
    // subcommand --help is handled by CLI11 above

    RunConfig cfg;
    try {
        if (!config_path.empty()) load_ini(config_path, cfg);
        if (!cfg.command.empty() && cfg.command != command)
            throw std::invalid_argument("config is for '" + cfg.command + "', not '" + command + "'");
        cfg.command = command;
        for (const auto& [opt, apply] : applies)
            if (opt->count() > 0) apply(cfg);

        std::ofstream file;
        if (!cfg.output.empty()) {
            file.open(cfg.output, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open " + cfg.output);
        }
        Streams io{cfg.output.empty() ? out : file, cfg.output.empty() ? err : out};
        int status = kOk;
        if (command == "count") status = run_count(cfg, io);
        else if (command == "expsum") status = run_expsum(cfg, io);
        else if (command == "nondegen") status = run_nondegen(cfg, io);
        else if (command == "typicality") status = run_typicality(cfg, io);
        else if (command == "series") status = run_series(cfg, io);
        else status = run_catalog(cfg, io);
        if (file.is_open()) {
            file.close();
            if (!file) throw std::runtime_error("write failed: " + cfg.output);
        }
        return status;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
}

}  // namespace khintype::cli
