#pragma once

#include <span>
#include <string>
#include <vector>

namespace khintype {

inline constexpr double kDefaultEpsRel = 1e-8;

/// Dense row-major matrix used for minors, Jacobians and eigenvector bases.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    DenseMatrix transposed() const;
    bool operator==(const DenseMatrix&) const = default;
};

/// Real symmetric d x d matrix with packed upper-triangular storage, so
/// symmetry holds by construction.
class SymMatrix {
public:
    explicit SymMatrix(int dim);

    static SymMatrix zero(int dim) { return SymMatrix(dim); }
    static SymMatrix identity(int dim);
    static SymMatrix diagonal(std::span<const double> diag);
    /// Throws std::invalid_argument unless `rows` is square and exactly symmetric.
    static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
    /// E_ii for i == j, E_ij + E_ji otherwise (0-based indices).
    static SymMatrix unit(int dim, int i, int j);

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return packed_[index(i, j)]; }
    void set(int i, int j, double v) { packed_[index(i, j)] = v; }
    void add(int i, int j, double v) { packed_[index(i, j)] += v; }

    std::span<const double> packed() const { return packed_; }
    std::span<double> packed() { return packed_; }

    double frobenius_norm() const;
    DenseMatrix dense() const;
    std::string to_string() const;

    SymMatrix& operator+=(const SymMatrix& rhs);
    SymMatrix& operator-=(const SymMatrix& rhs);
    SymMatrix& operator*=(double s);
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
    bool operator==(const SymMatrix&) const = default;

private:
    size_t index(int i, int j) const {
        if (i > j) std::swap(i, j);
        // row i of the upper triangle starts after i rows of decreasing length
        return static_cast<size_t>(i) * dim_ - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
    }

    int dim_;
    std::vector<double> packed_;
};

/// Linear family t -> sum_k t_k * generators[k] of symmetric d x d matrices.
class SymPencil {
public:
    explicit SymPencil(std::vector<SymMatrix> generators);

    static SymPencil zero(int d, int m);

    int d() const { return d_; }
    int m() const { return static_cast<int>(generators_.size()); }
    const std::vector<SymMatrix>& generators() const { return generators_; }
    const SymMatrix& operator[](int k) const { return generators_[k]; }

    /// sqrt(sum_k |A_k|_F^2); an upper bound for the spectral norm of any unit contraction.
    double norm() const;

private:
    int d_;
    std::vector<SymMatrix> generators_;
};

struct Signature {
    int n_pos = 0;
    int n_neg = 0;
    int n_zero = 0;
    bool operator==(const Signature&) const = default;
};

/// Rank decision together with its distance to the threshold.
struct SpectralRank {
    int rank = 0;
    double threshold = 0.0;
    double min_retained = 0.0;   // smallest |lambda| counted as nonzero (0 if none)
    double max_discarded = 0.0;  // largest |lambda| counted as zero (0 if none)
};

struct EigenSystem {
    std::vector<double> values;  // descending
    DenseMatrix vectors;         // column j is the unit eigenvector of values[j]
};

/// Eigenvalues in descending order (Householder tridiagonalization + implicit QL).
std::vector<double> eigenvalues(const SymMatrix& M);
/// Same as eigenvalues() but reuses `out` and a per-thread workspace.
void eigenvalues_into(const SymMatrix& M, std::vector<double>& out);
EigenSystem eigensystem(const SymMatrix& M);

double spectral_norm(const SymMatrix& M);

SymMatrix contract(const SymPencil& pencil, std::span<const double> t);
/// Allocation-free contract for hot loops; `out` must have dimension pencil.d().
void contract_into(const SymPencil& pencil, std::span<const double> t, SymMatrix& out);

/// Threshold used by every rank decision: eps_rel * max(1, |M|_2).
double rank_threshold(std::span<const double> eigenvalues, double eps_rel);

SpectralRank spectral_rank(const SymMatrix& M, double eps_rel = kDefaultEpsRel);
int rank_eps(const SymMatrix& M, double eps_rel = kDefaultEpsRel);
Signature signature(const SymMatrix& M, double eps_rel = kDefaultEpsRel);

/// k-th largest |lambda| (k is 1-based), i.e. the k-th singular value of a symmetric matrix.
double kth_singular_value(std::span<const double> eigenvalues, int k);

/// Closed-form (trigonometric) eigenvalues of a 3 x 3 symmetric matrix, descending.
/// Fast but loses accuracy near repeated eigenvalues; use for screening only.
void eigenvalues3_approx(const SymMatrix& M, double out[3]);

/// Second eigenvalue of a 3 x 3 symmetric matrix.
double middle_eigenvalue(const SymMatrix& M);

/// Submatrix keeping `rows` and `cols` (0-based). Throws on bad indices or unequal sizes.
DenseMatrix minor(const SymMatrix& M, std::span<const int> rows, std::span<const int> cols);

double determinant(const DenseMatrix& A);

/// Singular values in descending order (one-sided Jacobi); min(rows, cols) values.
std::vector<double> singular_values(const DenseMatrix& A);

/// Upper triangle as a d(d+1)/2 vector with off-diagonals scaled by sqrt(2),
/// so the Euclidean inner product matches the Frobenius one.
std::vector<double> flatten_frobenius(const SymMatrix& M);

}  // namespace khintype
