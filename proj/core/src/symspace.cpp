#include "khintype/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace khintype {

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols, rows);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
    return t;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("SymMatrix: dimension must be >= 1");
    packed_.assign(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0);
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix I(dim);
    for (int i = 0; i < dim; ++i) I.set(i, i, 1.0);
    return I;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
    SymMatrix D(static_cast<int>(diag.size()));
    for (size_t i = 0; i < diag.size(); ++i) D.set(static_cast<int>(i), static_cast<int>(i), diag[i]);
    return D;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int d = static_cast<int>(rows.size());
    SymMatrix M(d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(rows[i].size()) != d)
            throw std::invalid_argument("SymMatrix::from_rows: matrix is not square");
        for (int j = 0; j < d; ++j) {
            if (rows[i][j] != rows[j][i])
                throw std::invalid_argument("SymMatrix::from_rows: matrix is not symmetric");
            if (j >= i) M.set(i, j, rows[i][j]);
        }
    }
    return M;
}

SymMatrix SymMatrix::unit(int dim, int i, int j) {
    if (i < 0 || j < 0 || i >= dim || j >= dim)
        throw std::out_of_range("SymMatrix::unit: index out of range");
    SymMatrix E(dim);
    E.set(i, j, 1.0);
    return E;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            const double v = (*this)(i, j);
            s += (i == j ? 1.0 : 2.0) * v * v;
        }
    return std::sqrt(s);
}

DenseMatrix SymMatrix::dense() const {
    DenseMatrix D(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) D(i, j) = (*this)(i, j);
    return D;
}

std::string SymMatrix::to_string() const {
    std::ostringstream os;
    os << '[';
    for (int i = 0; i < dim_; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < dim_; ++j) os << (j ? " " : "") << (*this)(i, j);
    }
    os << ']';
    return os.str();
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& rhs) {
    if (rhs.dim_ != dim_) throw std::invalid_argument("SymMatrix: dimension mismatch");
    for (size_t k = 0; k < packed_.size(); ++k) packed_[k] += rhs.packed_[k];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& rhs) {
    if (rhs.dim_ != dim_) throw std::invalid_argument("SymMatrix: dimension mismatch");
    for (size_t k = 0; k < packed_.size(); ++k) packed_[k] -= rhs.packed_[k];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : packed_) v *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// SymPencil

SymPencil::SymPencil(std::vector<SymMatrix> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) throw std::invalid_argument("SymPencil: need at least one generator");
    d_ = generators_.front().dim();
    for (const auto& g : generators_)
        if (g.dim() != d_) throw std::invalid_argument("SymPencil: generators differ in dimension");
}

SymPencil SymPencil::zero(int d, int m) {
    return SymPencil(std::vector<SymMatrix>(static_cast<size_t>(m), SymMatrix(d)));
}

double SymPencil::norm() const {
    double s = 0.0;
    for (const auto& g : generators_) {
        const double f = g.frobenius_norm();
        s += f * f;
    }
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Eigensolver: Householder reduction to tridiagonal form followed by the
// implicit QL algorithm with Wilkinson-style shifts (EISPACK tred2/tql2).

namespace {

struct Workspace {
    std::vector<double> V, d, e;
    void resize(int n) {
        V.resize(static_cast<size_t>(n) * n);
        d.resize(n);
        e.resize(n);
    }
};

Workspace& thread_workspace() {
    thread_local Workspace ws;
    return ws;
}

// sqrt(a^2 + b^2), falling back to std::hypot only when squaring could over/underflow.
inline double fast_hypot(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    if (m < 1e150 && m > 1e-150) return std::sqrt(a * a + b * b);
    return std::hypot(a, b);
}

void tridiagonalize(int n, double* V, double* d, double* e, bool want_vectors) {
    auto at = [&](int r, int c) -> double& { return V[static_cast<size_t>(r) * n + c]; };
    for (int j = 0; j < n; ++j) d[j] = at(n - 1, j);

    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = at(i - 1, j);
                at(i, j) = 0.0;
                at(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;

            for (int j = 0; j < i; ++j) {
                f = d[j];
                at(j, i) = f;
                g = e[j] + at(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += at(k, j) * d[k];
                    e[k] += at(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) at(k, j) -= (f * e[k] + g * d[k]);
                d[j] = at(i - 1, j);
                at(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    if (!want_vectors) {
        for (int j = 0; j < n; ++j) d[j] = at(j, j);
        e[0] = 0.0;
        return;
    }
    // accumulate transformations
    for (int i = 0; i < n - 1; ++i) {
        at(n - 1, i) = at(i, i);
        at(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = at(k, i + 1) / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += at(k, i + 1) * at(k, j);
                for (int k = 0; k <= i; ++k) at(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) at(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = at(n - 1, j);
        at(n - 1, j) = 0.0;
    }
    at(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

void ql_implicit(int n, double* V, double* d, double* e, bool want_vectors) {
    auto at = [&](int r, int c) -> double& { return V[static_cast<size_t>(r) * n + c]; };
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 200) throw std::runtime_error("eigenvalues: QL iteration did not converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = fast_hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = fast_hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if (want_vectors) {
                        for (int k = 0; k < n; ++k) {
                            h = at(k, i + 1);
                            at(k, i + 1) = s * at(k, i) + c * h;
                            at(k, i) = c * at(k, i) - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

void load(const SymMatrix& M, Workspace& ws) {
    const int n = M.dim();
    ws.resize(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ws.V[static_cast<size_t>(i) * n + j] = M(i, j);
}

}  // namespace

void eigenvalues_into(const SymMatrix& M, std::vector<double>& out) {
    const int n = M.dim();
    out.resize(n);
    if (n == 1) {
        out[0] = M(0, 0);
        return;
    }
    if (n == 2) {
        const double a = M(0, 0), b = M(0, 1), c = M(1, 1);
        const double mean = 0.5 * (a + c);
        const double rad = std::hypot(0.5 * (a - c), b);
        out[0] = mean + rad;
        out[1] = mean - rad;
        return;
    }
    Workspace& ws = thread_workspace();
    load(M, ws);
    tridiagonalize(n, ws.V.data(), ws.d.data(), ws.e.data(), false);
    ql_implicit(n, ws.V.data(), ws.d.data(), ws.e.data(), false);
    std::copy(ws.d.begin(), ws.d.begin() + n, out.begin());
    std::sort(out.begin(), out.end(), std::greater<>());
}

std::vector<double> eigenvalues(const SymMatrix& M) {
    std::vector<double> out;
    eigenvalues_into(M, out);
    return out;
}

EigenSystem eigensystem(const SymMatrix& M) {
    const int n = M.dim();
    EigenSystem es;
    es.values.resize(n);
    es.vectors = DenseMatrix(n, n);
    if (n == 1) {
        es.values[0] = M(0, 0);
        es.vectors(0, 0) = 1.0;
        return es;
    }
    Workspace ws;
    load(M, ws);
    tridiagonalize(n, ws.V.data(), ws.d.data(), ws.e.data(), true);
    ql_implicit(n, ws.V.data(), ws.d.data(), ws.e.data(), true);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ws.d[a] > ws.d[b]; });
    for (int j = 0; j < n; ++j) {
        es.values[j] = ws.d[order[j]];
        for (int i = 0; i < n; ++i) es.vectors(i, j) = ws.V[static_cast<size_t>(i) * n + order[j]];
    }
    return es;
}

double spectral_norm(const SymMatrix& M) {
    const auto ev = eigenvalues(M);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

SymMatrix contract(const SymPencil& pencil, std::span<const double> t) {
    SymMatrix out(pencil.d());
    contract_into(pencil, t, out);
    return out;
}

void contract_into(const SymPencil& pencil, std::span<const double> t, SymMatrix& out) {
    if (static_cast<int>(t.size()) != pencil.m())
        throw std::invalid_argument("contract: length(t) must equal the number of generators");
    if (out.dim() != pencil.d()) throw std::invalid_argument("contract: output dimension mismatch");
    auto dst = out.packed();
    std::fill(dst.begin(), dst.end(), 0.0);
    for (int k = 0; k < pencil.m(); ++k) {
        const double tk = t[k];
        if (tk == 0.0) continue;
        const auto src = pencil[k].packed();
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += tk * src[i];
    }
}

double rank_threshold(std::span<const double> ev, double eps_rel) {
    double norm = 0.0;
    for (double v : ev) norm = std::max(norm, std::abs(v));
    return eps_rel * std::max(1.0, norm);
}

SpectralRank spectral_rank(const SymMatrix& M, double eps_rel) {
    if (!(eps_rel > 0)) throw std::invalid_argument("rank: eps_rel must be positive");
    const auto ev = eigenvalues(M);
    SpectralRank r;
    r.threshold = rank_threshold(ev, eps_rel);
    r.min_retained = std::numeric_limits<double>::infinity();
    for (double v : ev) {
        const double a = std::abs(v);
        if (a > r.threshold) {
            ++r.rank;
            r.min_retained = std::min(r.min_retained, a);
        } else {
            r.max_discarded = std::max(r.max_discarded, a);
        }
    }
    if (r.rank == 0) r.min_retained = 0.0;
    return r;
}

int rank_eps(const SymMatrix& M, double eps_rel) { return spectral_rank(M, eps_rel).rank; }

Signature signature(const SymMatrix& M, double eps_rel) {
    if (!(eps_rel > 0)) throw std::invalid_argument("signature: eps_rel must be positive");
    const auto ev = eigenvalues(M);
    const double thr = rank_threshold(ev, eps_rel);
    Signature s;
    for (double v : ev) {
        if (v > thr)
            ++s.n_pos;
        else if (v < -thr)
            ++s.n_neg;
        else
            ++s.n_zero;
    }
    return s;
}

double kth_singular_value(std::span<const double> ev, int k) {
    if (k < 1 || k > static_cast<int>(ev.size()))
        throw std::out_of_range("kth_singular_value: k out of range");
    // small fixed buffers cover every dimension this library handles
    double buf[64] = {};
    std::vector<double> heap;
    double* a = buf;
    if (ev.size() > 64) {
        heap.resize(ev.size());
        a = heap.data();
    }
    for (size_t i = 0; i < ev.size(); ++i) a[i] = std::abs(ev[i]);
    std::nth_element(a, a + (k - 1), a + ev.size(), std::greater<>());
    return a[k - 1];
}

double middle_eigenvalue(const SymMatrix& M) {
    if (M.dim() != 3) throw std::invalid_argument("middle_eigenvalue: matrix must be 3 x 3");
    std::vector<double> ev;
    eigenvalues_into(M, ev);
    return ev[1];
}

void eigenvalues3_approx(const SymMatrix& M, double out[3]) {
    if (M.dim() != 3) throw std::invalid_argument("eigenvalues3_approx: need a 3 x 3 matrix");
    const double a = M(0, 0), b = M(1, 1), c = M(2, 2);
    const double x = M(0, 1), y = M(0, 2), z = M(1, 2);
    const double p1 = x * x + y * y + z * z;
    const double q = (a + b + c) / 3.0;
    const double p2 = (a - q) * (a - q) + (b - q) * (b - q) + (c - q) * (c - q) + 2.0 * p1;
    if (p2 <= 1e-300) {
        out[0] = out[1] = out[2] = q;
        return;
    }
    const double p = std::sqrt(p2 / 6.0);
    // B = (M - qI) / p; r = det(B) / 2
    const double ba = (a - q) / p, bb = (b - q) / p, bc = (c - q) / p;
    const double bx = x / p, by = y / p, bz = z / p;
    const double det = ba * (bb * bc - bz * bz) - bx * (bx * bc - bz * by) + by * (bx * bz - bb * by);
    const double r = std::clamp(0.5 * det, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    out[0] = q + 2.0 * p * std::cos(phi);
    out[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    out[1] = 3.0 * q - out[0] - out[2];
}

DenseMatrix minor(const SymMatrix& M, std::span<const int> rows, std::span<const int> cols) {
    if (rows.size() != cols.size()) throw std::invalid_argument("minor: index sets differ in size");
    if (static_cast<int>(rows.size()) > M.dim()) throw std::invalid_argument("minor: too many indices");
    for (int i : rows)
        if (i < 0 || i >= M.dim()) throw std::out_of_range("minor: row index out of range");
    for (int j : cols)
        if (j < 0 || j >= M.dim()) throw std::out_of_range("minor: column index out of range");
    const int k = static_cast<int>(rows.size());
    DenseMatrix out(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) out(r, c) = M(rows[r], cols[c]);
    return out;
}

double determinant(const DenseMatrix& A) {
    if (A.rows != A.cols) throw std::invalid_argument("determinant: matrix is not square");
    const int n = A.rows;
    DenseMatrix lu = A;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(lu(r, c)) > std::abs(lu(piv, c))) piv = r;
        if (lu(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(lu(piv, k), lu(c, k));
            det = -det;
        }
        det *= lu(c, c);
        for (int r = c + 1; r < n; ++r) {
            const double f = lu(r, c) / lu(c, c);
            for (int k = c; k < n; ++k) lu(r, k) -= f * lu(c, k);
        }
    }
    return det;
}

std::vector<double> singular_values(const DenseMatrix& A) {
    // orthogonalize the columns of W, which has no more columns than rows
    DenseMatrix W = (A.cols <= A.rows) ? A : A.transposed();
    const int p = W.rows, n = W.cols;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j) {
                double alpha = 0, beta = 0, gamma = 0;
                for (int k = 0; k < p; ++k) {
                    alpha += W(k, i) * W(k, i);
                    beta += W(k, j) * W(k, j);
                    gamma += W(k, i) * W(k, j);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int k = 0; k < p; ++k) {
                    const double wi = W(k, i), wj = W(k, j);
                    W(k, i) = c * wi - s * wj;
                    W(k, j) = s * wi + c * wj;
                }
            }
        if (!rotated) break;
    }
    std::vector<double> sv(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < p; ++k) s += W(k, j) * W(k, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

std::vector<double> flatten_frobenius(const SymMatrix& M) {
    const int d = M.dim();
    std::vector<double> v;
    v.reserve(static_cast<size_t>(d) * (d + 1) / 2);
    const double r2 = std::sqrt(2.0);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) v.push_back(i == j ? M(i, j) : r2 * M(i, j));
    return v;
}

}  // namespace khintype
