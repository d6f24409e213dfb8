#include "khintype/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace khintype {

// ---------------------------------------------------------------------------
// Rectangle

Rectangle::Rectangle(std::vector<Rational> lo, std::vector<Rational> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size())
        throw std::invalid_argument("Rectangle: lo and hi must be nonempty and of equal length");
    for (size_t i = 0; i < lo_.size(); ++i)
        if (!(lo_[i] < hi_[i])) throw std::invalid_argument("Rectangle: need lo[i] < hi[i]");
}

Rectangle Rectangle::unit_cube(int d) {
    return Rectangle(std::vector<Rational>(d, Rational(0)), std::vector<Rational>(d, Rational(1)));
}

Rational Rectangle::volume() const {
    Rational v = 1;
    for (size_t i = 0; i < lo_.size(); ++i) v *= hi_[i] - lo_[i];
    return v;
}

bool Rectangle::contains(std::span<const Rational> x) const {
    if (x.size() != lo_.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    return true;
}

bool Rectangle::contains(std::span<const double> x) const {
    if (x.size() != lo_.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo_d(static_cast<int>(i)) || x[i] > hi_d(static_cast<int>(i))) return false;
    return true;
}

bool Rectangle::contains(const Rectangle& other) const {
    if (other.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (other.lo_[i] < lo_[i] || other.hi_[i] > hi_[i]) return false;
    return true;
}

bool Rectangle::strictly_contains(const Rectangle& other) const {
    if (other.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (!(other.lo_[i] > lo_[i]) || !(other.hi_[i] < hi_[i])) return false;
    return true;
}

Rectangle Rectangle::inflated(const Rational& fraction) const {
    std::vector<Rational> lo = lo_, hi = hi_;
    for (size_t i = 0; i < lo.size(); ++i) {
        const Rational pad = fraction * (hi_[i] - lo_[i]);
        lo[i] -= pad;
        hi[i] += pad;
    }
    return Rectangle(std::move(lo), std::move(hi));
}

std::string Rectangle::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < dim(); ++i) os << (i ? " x " : "") << '[' << lo_[i].get_str() << ',' << hi_[i].get_str() << ']';
    return os.str();
}

// ---------------------------------------------------------------------------
// PolyMap

std::string PolyMap::to_string() const {
    std::string out;
    for (size_t j = 0; j < components.size(); ++j) {
        if (j) out += "; ";
        out += components[j].to_string();
    }
    return out;
}

PolyMap parse_map(std::string_view source, int d, int m) {
    if (d < 1 || m < 1) throw std::invalid_argument("parse_map: d and m must be positive");
    PolyMap map{d, m, {}};
    size_t start = 0;
    for (;;) {
        const size_t semi = source.find(';', start);
        const size_t len = (semi == std::string_view::npos) ? std::string_view::npos : semi - start;
        map.components.push_back(parse_polynomial(source.substr(start, len), d, start));
        if (semi == std::string_view::npos) break;
        start = semi + 1;
    }
    if (static_cast<int>(map.components.size()) != m)
        throw std::invalid_argument("parse_map: expected " + std::to_string(m) + " components, found " +
                                    std::to_string(map.components.size()));
    return map;
}

// ---------------------------------------------------------------------------
// ManifoldSpec

ManifoldSpec::ManifoldSpec(Rectangle rect, PolyMap map, std::string name)
    : rect_(std::move(rect)), map_(std::move(map)), name_(std::move(name)) {
    if (rect_.dim() != map_.d) throw std::invalid_argument("ManifoldSpec: rectangle dimension differs from map.d");
    if (static_cast<int>(map_.components.size()) != map_.m)
        throw std::invalid_argument("ManifoldSpec: map has the wrong number of components");
    for (const auto& p : map_.components)
        if (p.nvars() != map_.d) throw std::invalid_argument("ManifoldSpec: component over the wrong variables");

    const int d = map_.d;
    for (int j = 0; j < map_.m; ++j)
        for (int i = 0; i < d; ++i) {
            jac_.push_back(map_.components[j].derivative(i));
            jac_c_.emplace_back(jac_.back());
        }
    for (int k = 0; k < map_.m; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) hess_.push_back(jacobian_entry(k, i).derivative(j));
}

ManifoldSpec ManifoldSpec::with_rect(Rectangle rect) const { return ManifoldSpec(std::move(rect), map_, name_); }

const Polynomial& ManifoldSpec::hessian_entry(int k, int i, int j) const {
    if (i > j) std::swap(i, j);
    const int d = map_.d;
    const size_t per = static_cast<size_t>(d) * (d + 1) / 2;
    const size_t off = static_cast<size_t>(i) * d - static_cast<size_t>(i) * (i - 1) / 2 + (j - i);
    return hess_[k * per + off];
}

SymPencil ExactEvaluation::hessian_pencil() const {
    std::vector<SymMatrix> gens;
    for (const auto& packed : hessian) {
        // recover d from d(d+1)/2
        const int d = static_cast<int>((std::sqrt(8.0 * packed.size() + 1) - 1) / 2 + 0.5);
        SymMatrix H(d);
        for (size_t t = 0; t < packed.size(); ++t) H.packed()[t] = packed[t].get_d();
        gens.push_back(std::move(H));
    }
    return SymPencil(std::move(gens));
}

ExactEvaluation eval_all(const ManifoldSpec& spec, std::span<const Rational> alpha) {
    if (static_cast<int>(alpha.size()) != spec.d()) throw std::invalid_argument("eval_all: point has wrong dimension");
    const int d = spec.d(), m = spec.m();
    ExactEvaluation ev;
    ev.inside = spec.rect().contains(alpha);
    for (int j = 0; j < m; ++j) ev.value.push_back(spec.map().components[j].evaluate(alpha));
    ev.jacobian.assign(m, std::vector<Rational>(d));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < d; ++i) ev.jacobian[j][i] = spec.jacobian_entry(j, i).evaluate(alpha);
    for (int k = 0; k < m; ++k) {
        std::vector<Rational> packed;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) packed.push_back(spec.hessian_entry(k, i, j).evaluate(alpha));
        ev.hessian.push_back(std::move(packed));
    }
    return ev;
}

Evaluation eval_all(const ManifoldSpec& spec, std::span<const double> alpha) {
    if (static_cast<int>(alpha.size()) != spec.d()) throw std::invalid_argument("eval_all: point has wrong dimension");
    const int d = spec.d(), m = spec.m();
    std::vector<SymMatrix> gens;
    for (int k = 0; k < m; ++k) {
        SymMatrix H(d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) H.set(i, j, spec.hessian_entry(k, i, j).evaluate(alpha));
        gens.push_back(std::move(H));
    }
    Evaluation ev{{}, DenseMatrix(m, d), SymPencil(std::move(gens)), spec.rect().contains(alpha)};
    for (int j = 0; j < m; ++j) ev.value.push_back(spec.map().components[j].evaluate(alpha));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < d; ++i) ev.jacobian(j, i) = spec.jacobian_compiled(j, i)(alpha);
    return ev;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

std::string tracefree_source(int d) {
    std::string src;
    auto add = [&](const std::string& piece) {
        if (!src.empty()) src += "; ";
        src += piece;
    };
    for (int i = 1; i < d; ++i) add("a" + std::to_string(i) + "^2 - a" + std::to_string(i + 1) + "^2");
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) add("a" + std::to_string(i) + "*a" + std::to_string(j));
    return src;
}

}  // namespace

ManifoldSpec builtin(std::string_view name) {
    if (name == "veronese5")
        return ManifoldSpec(Rectangle::unit_cube(5), parse_map("a1^2; a1*a2; a2^2", 5, 3), "veronese5");
    if (name == "parabola") return ManifoldSpec(Rectangle::unit_cube(1), parse_map("a1^2", 1, 1), "parabola");
    int d = -1;
    if (name == "tracefree2") {
        d = 2;
    } else if (name.starts_with("tracefree(") && name.ends_with(")")) {
        const std::string_view inner = name.substr(10, name.size() - 11);
        if (inner.size() == 1 && inner[0] >= '0' && inner[0] <= '9') d = inner[0] - '0';
    }
    if (d < 2 || d > 6) throw std::invalid_argument("builtin: unknown manifold '" + std::string(name) + "'");
    const int m = d * (d + 1) / 2 - 1;
    const std::string label = (d == 2 && name == "tracefree2") ? "tracefree2" : "tracefree(" + std::to_string(d) + ")";
    return ManifoldSpec(Rectangle::unit_cube(d), parse_map(tracefree_source(d), d, m), label);
}

std::vector<std::string> builtin_names() {
    return {"veronese5", "parabola", "tracefree2", "tracefree(3)", "tracefree(4)", "tracefree(5)", "tracefree(6)"};
}

Rectangle enlarged_rectangle(const Rectangle& K) { return K.inflated(Rational(1, 10)); }

// ---------------------------------------------------------------------------
// Lipschitz constant by branch and bound

namespace {

struct Interval {
    double lo, hi;
};

Interval imul(Interval a, Interval b) {
    const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval ipow(Interval x, int e) {
    if (e == 0) return {1.0, 1.0};
    const double a = std::pow(x.lo, e), b = std::pow(x.hi, e);
    if (e % 2 == 1) return {a, b};
    if (x.lo >= 0) return {a, b};
    if (x.hi <= 0) return {b, a};
    return {0.0, std::max(a, b)};
}

// Outward-padded enclosure of a polynomial over a box.
Interval enclose(const Polynomial& p, const std::vector<Interval>& box) {
    Interval sum{0.0, 0.0};
    double scale = 0.0;
    for (const auto& [e, c] : p.terms()) {
        Interval term{c.get_d(), c.get_d()};
        for (size_t v = 0; v < e.size(); ++v)
            if (e[v]) term = imul(term, ipow(box[v], e[v]));
        sum.lo += term.lo;
        sum.hi += term.hi;
        scale += std::max(std::abs(term.lo), std::abs(term.hi));
    }
    const double pad = 1e-12 * scale + 1e-300;
    return {sum.lo - pad, sum.hi + pad};
}

struct Box {
    std::vector<Interval> iv;
    double upper;
    bool operator<(const Box& o) const { return upper < o.upper; }
};

}  // namespace

double lipschitz_c1(const ManifoldSpec& spec, const Rectangle& L) {
    if (!L.contains(spec.rect())) throw std::invalid_argument("lipschitz_c1: L must contain the manifold's rectangle");
    const int d = spec.d(), m = spec.m();

    auto row_sum_at = [&](std::span<const double> x) {
        double best = 0.0;
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += std::abs(spec.jacobian_compiled(j, i)(x));
            best = std::max(best, s);
        }
        return best;
    };
    auto upper_on = [&](const std::vector<Interval>& box) {
        double best = 0.0;
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) {
                const Interval r = enclose(spec.jacobian_entry(j, i), box);
                s += std::max(std::abs(r.lo), std::abs(r.hi));
            }
            best = std::max(best, s);
        }
        return best;
    };

    // initial grid of boxes, at most ~4096 of them
    int per_axis = std::max(1, static_cast<int>(std::floor(std::pow(4096.0, 1.0 / d))));
    per_axis = std::min(per_axis, 16);
    std::priority_queue<Box> queue;
    double lower = 0.0;
    std::vector<int> idx(d, 0);
    std::vector<double> pt(d);
    for (;;) {
        Box b;
        for (int i = 0; i < d; ++i) {
            const double lo = L.lo_d(i), hi = L.hi_d(i), w = (hi - lo) / per_axis;
            const double a = lo + w * idx[i];
            const double c = (idx[i] + 1 == per_axis) ? hi : a + w;
            b.iv.push_back({a, c});
            pt[i] = 0.5 * (a + c);
        }
        lower = std::max(lower, row_sum_at(pt));
        b.upper = upper_on(b.iv);
        queue.push(std::move(b));
        int k = 0;
        while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == d) break;
    }
    // corners of L are common maximizers for polynomial derivatives
    for (int mask = 0; mask < (1 << std::min(d, 12)); ++mask) {
        for (int i = 0; i < d; ++i) pt[i] = (mask >> i & 1) ? L.hi_d(i) : L.lo_d(i);
        lower = std::max(lower, row_sum_at(pt));
    }

    for (int iter = 0; iter < 200000 && !queue.empty(); ++iter) {
        const Box top = queue.top();
        if (top.upper <= lower * 1.01 + 1e-12) return 1.0 + top.upper;
        queue.pop();
        int split = 0;
        for (int i = 1; i < d; ++i)
            if (top.iv[i].hi - top.iv[i].lo > top.iv[split].hi - top.iv[split].lo) split = i;
        const double mid = 0.5 * (top.iv[split].lo + top.iv[split].hi);
        for (int half = 0; half < 2; ++half) {
            Box child{top.iv, 0.0};
            if (half == 0) child.iv[split].hi = mid;
            else child.iv[split].lo = mid;
            for (int i = 0; i < d; ++i) pt[i] = 0.5 * (child.iv[i].lo + child.iv[i].hi);
            lower = std::max(lower, row_sum_at(pt));
            child.upper = upper_on(child.iv);
            queue.push(std::move(child));
        }
    }
    return 1.0 + (queue.empty() ? lower : queue.top().upper);
}

}  // namespace khintype
