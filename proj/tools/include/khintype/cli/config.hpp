#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace khintype::cli {

/// Everything a run depends on. Defaults match the documented CLI defaults.
struct RunConfig {
    std::string command;

    // [manifold]
    std::string manifold = "tracefree2";
    std::string source;         // custom map "expr; expr; ..." over a1..ad (overrides `manifold`)
    std::string lo, hi;         // custom rectangle corners, comma-separated rationals; default unit cube

    // [sweep]
    std::string q = "64..1024x2";
    std::string kappa = "phi";
    std::vector<std::string> theta{"0"};
    int k = 2;

    // [params]
    std::vector<double> delta{0.01};
    int grid = 64;
    long budget = 0;
    double eps = 1e-9;
    int dmax = 3;
    long n = 1000;
    int d = 0, m = 0;           // explicit dimensions: series, single typicality cell, custom source
    std::string s = "0";        // series exponent; "0" means s = n
    long probe = 0;             // partial_sum_probe length for series, 0 = off
    long points = 8;            // nondegen: sampled alpha count
    std::string alpha;          // nondegen: a single explicit point (comma-separated rationals)
    bool verify = false;        // catalog: recompute verdicts

    // [run]
    std::uint64_t seed = 1;
    int threads = 0;            // not part of the hash: output never depends on it

    // [output]
    std::string output;         // empty: data goes to stdout, summary to stderr
};

/// Reads an INI file with sections [run], [manifold], [sweep], [params], [output].
/// Unknown keys are errors. Lists use ';' (theta) or ',' (delta).
void load_ini(const std::string& path, RunConfig& cfg);

/// Canonical "key=value" lines for every field that influences results.
std::string canonical_text(const RunConfig& cfg);

/// SHA-256 of canonical_text, lowercase hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace khintype::cli
