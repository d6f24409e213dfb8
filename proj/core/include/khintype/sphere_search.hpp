#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace khintype {

/// Objective on the unit sphere of R^m. Must be safe to call concurrently.
using SphereObjective = std::function<double(std::span<const double> t)>;

/// Optional second-stage improver: given t, writes a proposed unit vector to
/// `next` and returns false when it has nothing to propose.
using SpherePolish = std::function<bool(std::span<const double> t, std::vector<double>& next)>;

struct SphereSearchOptions {
    long budget = 20000;       // number of seed points
    bool antipodal = true;     // objective(t) == objective(-t); seed one hemisphere
    int starts = 8;            // seeds handed to local refinement
    double step_tol = 1e-10;   // refinement stops once the step is below this
    int polish_rounds = 60;
    int threads = 0;           // 0: default_threads()
    // Cheaper stand-in used only to rank the seed grid; the starts are re-evaluated with the real objective.
    SphereObjective seed_objective;
    // Caller-supplied candidates (unit length not required). The best `extra_keep` of them
    // by objective value are refined alongside the seed-grid starts.
    std::vector<std::vector<double>> extra_starts;
    int extra_keep = 2;
};

struct SphereSearchResult {
    double value = 0.0;
    std::vector<double> t;     // unit vector attaining `value`
    long evaluations = 0;
};

/// Quasi-uniform points on S^{m-1} (one hemisphere when antipodal), stored
/// row-major as count x m. Cached per (m, count, antipodal).
std::shared_ptr<const std::vector<double>> sphere_seeds(int m, long count, bool antipodal);

/// Global minimization over the unit sphere: seed grid, then compass search
/// on the best few seeds, then optional polish. Deterministic for any thread count.
SphereSearchResult minimize_on_sphere(int m, const SphereObjective& f, const SphereSearchOptions& opts,
                                      const SpherePolish& polish = {});

}  // namespace khintype
