#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "khintype/nondegen.hpp"
#include "khintype/symspace.hpp"

namespace khintype {

struct OperatorSample {
    SymPencil pencil;
    std::uint64_t seed = 0;
    std::string distribution;  // "gaussian", or "construct:<name>"
};

/// m symmetric d x d matrices with iid N(0,1) upper-triangle entries.
OperatorSample sample_operator(int d, int m, std::uint64_t seed);

struct Membership {
    Verdict verdict = Verdict::Fail;
    bool surjective = false;
    RankReport search;  // the rank-2 or DRV search
};

/// Surjective and rank >= 2 for every nonzero contraction.
Membership membership_U(const OperatorSample& A, const SearchSettings& settings = {});
/// Surjective and the DRV condition for every nonzero contraction.
Membership membership_Utilde(const OperatorSample& A, const SearchSettings& settings = {});

/// "posdef-pad" (I_d, 0, ...; l = m), "shear" (x_i x_d for i <= l < d),
/// "diag-squares" (x_i^2 for i <= d, zero-padded to l >= d), "tracefree-basis" (l ignored).
OperatorSample construct(const std::string& name, int d, int l);
std::vector<std::string> construction_names();

struct ZeroSearch {
    bool found = false;
    double min_value = 0.0;    // min over unit v of sum_i Q_i(v)^2
    std::vector<double> witness_v;
    long budget_used = 0;
};

/// Looks for a unit v with Q_i(v) = v^T S_i v = 0 for every generator.
ZeroSearch annihilator_zero_search(const OperatorSample& omega, long budget = 0, double eps = 1e-10);

struct MiddleZero {
    bool success = false;
    std::vector<double> t;  // unit vector
    double gamma = 0.0;     // middle eigenvalue of contract(A, t)
    int iterations = 0;
};

/// Bisection on the half circle from t0 = (1, 0) to -t0 for a zero of the middle eigenvalue.
MiddleZero find_zero_middle_eig(const OperatorSample& A, double tol = 1e-8);

enum class Regime { Empty, NotDense, DenseConull };
std::string to_string(Regime r);

Regime predicted_U(int d, int m);
Regime predicted_Utilde(int d, int m);

struct PhaseReport {
    int d = 0, m = 0;
    long n_samples = 0;
    long n_in_U = 0, n_in_Utilde = 0;
    long n_decided_U = 0, n_decided_Utilde = 0;  // samples with a definite verdict
    long n_inconclusive = 0;                     // samples with any inconclusive verdict
    long violations = 0;                         // Utilde member that is not a U member
    Regime predicted_U = Regime::Empty, predicted_Utilde = Regime::Empty;

    double freq_U() const;
    double freq_Utilde() const;
    /// EMPTY means frequency 0, DENSE_CONULL frequency 1, NOT_DENSE both outcomes seen.
    bool agree_U() const;
    bool agree_Utilde() const;
    bool agree() const { return agree_U() && agree_Utilde(); }
};

struct PhaseOptions {
    long budget = 0;          // 0: default per m
    std::uint64_t seed = 1;
    int threads = 0;
};

/// One cell: n samples of L(Sym^2 R^d, R^m).
PhaseReport phase_cell(int d, int m, long n_samples, const PhaseOptions& opts = {});
/// Every (d, m) with 1 <= d <= d_max and 1 <= m <= C(d+1, 2).
std::vector<PhaseReport> phase_scan(int d_max, long n_samples, const PhaseOptions& opts = {});

/// Max numerical rank of the derivative of (v, w) -> vv^T - ww^T at (e1, e2) and 20 random points.
int dim_S_check(int d, std::uint64_t seed = 1);
/// Numerical rank of that derivative at one point (v, w).
int dim_S_rank_at(const std::vector<double>& v, const std::vector<double>& w);

}  // namespace khintype
