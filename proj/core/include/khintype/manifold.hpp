#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "khintype/polynomial.hpp"
#include "khintype/rational.hpp"
#include "khintype/symspace.hpp"

namespace khintype {

/// Closed axis-parallel box with exact rational corners, lo[i] < hi[i].
class Rectangle {
public:
    Rectangle(std::vector<Rational> lo, std::vector<Rational> hi);

    static Rectangle unit_cube(int d);

    int dim() const { return static_cast<int>(lo_.size()); }
    const std::vector<Rational>& lo() const { return lo_; }
    const std::vector<Rational>& hi() const { return hi_; }
    double lo_d(int i) const { return lo_[i].get_d(); }
    double hi_d(int i) const { return hi_[i].get_d(); }
    Rational volume() const;

    bool contains(std::span<const Rational> x) const;
    bool contains(std::span<const double> x) const;
    bool contains(const Rectangle& other) const;
    /// Interior strictly contains `other`.
    bool strictly_contains(const Rectangle& other) const;

    /// Each side pushed outwards by `fraction` of its length.
    Rectangle inflated(const Rational& fraction) const;

    std::string to_string() const;
    bool operator==(const Rectangle&) const = default;

private:
    std::vector<Rational> lo_, hi_;
};

/// Polynomial map f: R^d -> R^m.
struct PolyMap {
    int d = 0;
    int m = 0;
    std::vector<Polynomial> components;

    /// Components joined by "; " in canonical form.
    std::string to_string() const;
    bool operator==(const PolyMap&) const = default;
};

/// `source` holds m polynomials over a1..ad separated by ';'.
PolyMap parse_map(std::string_view source, int d, int m);

/// Exact value, Jacobian and Hessians at a rational point.
struct ExactEvaluation {
    std::vector<Rational> value;                 // f(alpha), length m
    std::vector<std::vector<Rational>> jacobian; // m rows of length d
    std::vector<std::vector<Rational>> hessian;  // m packed upper triangles of length d(d+1)/2
    bool inside = true;                          // alpha in the declared rectangle

    SymPencil hessian_pencil() const;
};

struct Evaluation {
    std::vector<double> value;
    DenseMatrix jacobian;  // m x d
    SymPencil hessian;
    bool inside = true;
};

/// Graph manifold {(alpha, f(alpha)) : alpha in K} with precomputed derivatives.
class ManifoldSpec {
public:
    ManifoldSpec(Rectangle rect, PolyMap map, std::string name);

    const Rectangle& rect() const { return rect_; }
    const PolyMap& map() const { return map_; }
    const std::string& name() const { return name_; }
    int d() const { return map_.d; }
    int m() const { return map_.m; }
    int n() const { return map_.d + map_.m; }

    /// Same map over a different rectangle (used for the enlarged rectangle L).
    ManifoldSpec with_rect(Rectangle rect) const;

    /// d f_j / d a_i
    const Polynomial& jacobian_entry(int j, int i) const { return jac_[static_cast<size_t>(j) * d() + i]; }
    const CompiledPolynomial& jacobian_compiled(int j, int i) const {
        return jac_c_[static_cast<size_t>(j) * d() + i];
    }
    /// d^2 f_k / d a_i d a_j
    const Polynomial& hessian_entry(int k, int i, int j) const;

private:
    Rectangle rect_;
    PolyMap map_;
    std::string name_;
    std::vector<Polynomial> jac_;
    std::vector<CompiledPolynomial> jac_c_;
    std::vector<Polynomial> hess_;  // per component, packed upper triangle
};

/// Evaluates f, f' and f'' exactly. Points outside the rectangle are still
/// evaluated (polynomials extend globally); `inside` records the check.
ExactEvaluation eval_all(const ManifoldSpec& spec, std::span<const Rational> alpha);
Evaluation eval_all(const ManifoldSpec& spec, std::span<const double> alpha);

/// Catalog: "veronese5", "parabola", "tracefree2", "tracefree(d)" for 2 <= d <= 6.
ManifoldSpec builtin(std::string_view name);
std::vector<std::string> builtin_names();

/// Rectangle L with K in its interior: K inflated by 10% per side.
Rectangle enlarged_rectangle(const Rectangle& K);

/// 1 + max over L of |f'(alpha)| in the operator norm induced by the max norm
/// (largest absolute row sum). Branch and bound with interval enclosures; the
/// returned value is an upper bound within 1% of the true maximum.
double lipschitz_c1(const ManifoldSpec& spec, const Rectangle& L);

}  // namespace khintype
