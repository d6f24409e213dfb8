#pragma once

#include <string>
#include <vector>

#include "khintype/symspace.hpp"

namespace khintype {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

/// Outcome of a condition quantified over all unit t.
struct RankReport {
    Verdict verdict = Verdict::Fail;
    bool passes = false;           // margin > threshold
    int k = 0;                     // required rank (0 for the DRV condition)
    double margin = 0.0;           // minimum located over the unit sphere
    std::vector<double> witness_t; // unit vector attaining `margin`
    long budget_used = 0;          // objective evaluations
    double threshold = 0.0;
};

/// Determinant test, true iff |det| > eps_rel.
struct DetReport {
    bool holds = false;
    double det = 0.0;
};

struct SurjectivityReport {
    bool holds = false;
    double sigma_min = 0.0;   // m-th singular value of the flattened generators
    double threshold = 0.0;
};

struct SearchSettings {
    long budget = 0;          // 0: default_budget(m)
    double eps_rel = kDefaultEpsRel;
    int threads = 0;
};

/// 20000 seeds for m <= 3, 200000 otherwise.
long default_budget(int m);

/// m x m matrix with entry (i, j) = generators[j](0, i). Requires m <= d.
DetReport check_det1(const SymPencil& pencil, double eps_rel = kDefaultEpsRel);
/// det of the single generator. Requires m == 1.
DetReport check_det2(const SymPencil& pencil, double eps_rel = kDefaultEpsRel);
SurjectivityReport check_surjective(const SymPencil& pencil, double eps_rel = kDefaultEpsRel);

/// min over unit t of the k-th singular value of contract(pencil, t).
RankReport check_rank_k(const SymPencil& pencil, int k, const SearchSettings& settings = {});

/// min over unit t of max(lambda_2(t), -lambda_{d-1}(t)).
RankReport check_drv(const SymPencil& pencil, const SearchSettings& settings = {});

/// Pointwise DRV margin for one matrix; max(lambda_2, -lambda_{d-1}), or 0 when d == 1.
double drv_margin(std::span<const double> eigenvalues_desc);

}  // namespace khintype
