#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "khintype/manifold.hpp"
#include "khintype/nondegen.hpp"
#include "khintype/sphere_search.hpp"

using namespace khintype;

namespace {

SymPencil pencil_of(const std::string& name) {
    const auto spec = builtin(name);
    std::vector<Rational> alpha(spec.d(), Rational(1, 2));
    return eval_all(spec, alpha).hessian_pencil();
}

SymPencil random_pencil(int d, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    std::vector<SymMatrix> g;
    for (int k = 0; k < m; ++k) {
        SymMatrix M(d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) M.set(i, j, n(rng));
        g.push_back(M);
    }
    return SymPencil(g);
}

double unit_norm(const std::vector<double>& t) {
    double s = 0.0;
    for (double v : t) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST(Det1, Examples) {
    const auto v = check_det1(pencil_of("veronese5"));
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(v.det, 0.0);
    const auto p = check_det1(pencil_of("parabola"));
    EXPECT_TRUE(p.holds);
    EXPECT_DOUBLE_EQ(p.det, 2.0);
    EXPECT_FALSE(check_det1(SymPencil::zero(3, 2)).holds);
    EXPECT_THROW(check_det1(SymPencil::zero(2, 3)), std::invalid_argument);
}

TEST(Det2, Examples) {
    EXPECT_TRUE(check_det2(SymPencil({SymMatrix::diagonal(std::vector<double>{2, 2})})).holds);
    const auto off = check_det2(SymPencil({SymMatrix::unit(2, 0, 1)}));
    EXPECT_TRUE(off.holds);
    EXPECT_DOUBLE_EQ(off.det, -1.0);
    EXPECT_FALSE(check_det2(SymPencil({2.0 * SymMatrix::unit(2, 0, 0)})).holds);
    EXPECT_THROW(check_det2(SymPencil::zero(2, 2)), std::invalid_argument);
}

TEST(Surjective, Examples) {
    EXPECT_TRUE(check_surjective(pencil_of("veronese5")).holds);
    EXPECT_TRUE(check_surjective(pencil_of("tracefree2")).holds);
    EXPECT_FALSE(check_surjective(SymPencil::zero(3, 2)).holds);
    // m > d(d+1)/2 can never be surjective
    std::mt19937_64 rng(1);
    EXPECT_FALSE(check_surjective(random_pencil(2, 4, rng)).holds);
}

TEST(RankK, TracefreeAgainstCircleGrid) {
    const auto pencil = pencil_of("tracefree2");
    // dense S^1 oracle for min over t of sigma_2(contract(t))
    double oracle = 1e300;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double a = std::numbers::pi * i / N;
        const std::vector<double> t{std::cos(a), std::sin(a)};
        const auto ev = eigenvalues(contract(pencil, t));
        oracle = std::min(oracle, kth_singular_value(ev, 2));
    }
    EXPECT_NEAR(oracle, 1.0, 1e-9);
    const auto r = check_rank_k(pencil, 2);
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_NEAR(r.margin, oracle, 1e-9);
    EXPECT_NEAR(std::abs(r.witness_t[1]), 1.0, 1e-6);
    EXPECT_NEAR(unit_norm(r.witness_t), 1.0, 1e-12);
}

TEST(RankK, Veronese) {
    const auto pencil = pencil_of("veronese5");
    const auto r2 = check_rank_k(pencil, 2);
    EXPECT_EQ(r2.verdict, Verdict::Fail);
    EXPECT_FALSE(r2.passes);
    EXPECT_NEAR(std::abs(r2.witness_t[0]), 1.0, 1e-6);
    EXPECT_EQ(rank_eps(contract(pencil, r2.witness_t)), 1);
    EXPECT_EQ(check_rank_k(pencil, 1).verdict, Verdict::Pass);
    EXPECT_THROW(check_rank_k(pencil, 6), std::invalid_argument);
}

TEST(RankK, InconclusiveNearThreshold) {
    SearchSettings s;
    s.eps_rel = 1e-8;
    // margin 5e-8 lies above the threshold but within 10x of it
    const auto r = check_rank_k(SymPencil({SymMatrix::diagonal(std::vector<double>{1, 5e-8})}), 2, s);
    EXPECT_EQ(r.verdict, Verdict::Inconclusive);
    EXPECT_TRUE(r.passes);
}

TEST(Drv, Examples) {
    const auto tf = check_drv(pencil_of("tracefree2"));
    EXPECT_EQ(tf.verdict, Verdict::Fail);
    EXPECT_LT(tf.margin, 0.0);
    EXPECT_EQ(check_drv(SymPencil({SymMatrix::identity(3)})).verdict, Verdict::Pass);
    EXPECT_EQ(check_drv(SymPencil({SymMatrix::diagonal(std::vector<double>{1, -1, 0})})).verdict, Verdict::Fail);
}

TEST(Drv, MarginFunction) {
    EXPECT_DOUBLE_EQ(drv_margin(std::vector<double>{3, 1, -2}), 1.0);
    EXPECT_DOUBLE_EQ(drv_margin(std::vector<double>{3, -1, -2}), 1.0);
    EXPECT_DOUBLE_EQ(drv_margin(std::vector<double>{2, -2}), -2.0);
}

TEST(Implications, RandomPencils) {
    std::mt19937_64 rng(42);
    SearchSettings s;
    s.budget = 2000;
    for (int d = 2; d <= 3; ++d)
        for (int m = 1; m <= 3; ++m)
            for (int rep = 0; rep < 30; ++rep) {
                const auto p = random_pencil(d, m, rng);
                const bool surj = check_surjective(p).holds;
                if (m <= d && check_det1(p).holds) EXPECT_TRUE(surj);
                const auto r2 = check_rank_k(p, 2, s);
                if (m == 1 && check_det2(p).holds) EXPECT_NE(r2.verdict, Verdict::Fail);
                if (check_drv(p, s).verdict == Verdict::Pass) EXPECT_NE(r2.verdict, Verdict::Fail);
                EXPECT_EQ(check_rank_k(p, 1, s).verdict == Verdict::Pass, surj);
            }
}

TEST(RankK, MonotoneInK) {
    std::mt19937_64 rng(4);
    SearchSettings s;
    s.budget = 2000;
    for (int rep = 0; rep < 20; ++rep) {
        const auto p = random_pencil(4, 2, rng);
        bool prev = true;
        for (int k = 1; k <= 4; ++k) {
            const bool now = check_rank_k(p, k, s).passes;
            if (!prev) EXPECT_FALSE(now);
            prev = now;
        }
    }
}

TEST(SphereSearch, AntipodalSeedsAndDeterminism) {
    const auto seeds = sphere_seeds(4, 500, true);
    ASSERT_EQ(seeds->size(), 2000u);
    for (size_t i = 0; i < 500; ++i) {
        double n = 0.0;
        for (int j = 0; j < 4; ++j) n += (*seeds)[i * 4 + j] * (*seeds)[i * 4 + j];
        EXPECT_NEAR(n, 1.0, 1e-12);
    }
    std::mt19937_64 rng(12);
    const auto p = random_pencil(3, 4, rng);
    SearchSettings one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = check_rank_k(p, 2, one), b = check_rank_k(p, 2, four);
    EXPECT_EQ(a.margin, b.margin);
    EXPECT_EQ(a.witness_t, b.witness_t);
    EXPECT_EQ(a.budget_used, b.budget_used);
}

TEST(SphereSearch, AntipodalInvariance) {
    std::mt19937_64 rng(13);
    const auto p = random_pencil(3, 3, rng);
    for (int rep = 0; rep < 20; ++rep) {
        std::normal_distribution<double> n;
        std::vector<double> t{n(rng), n(rng), n(rng)}, neg(3);
        for (int i = 0; i < 3; ++i) neg[i] = -t[i];
        EXPECT_NEAR(kth_singular_value(eigenvalues(contract(p, t)), 2),
                    kth_singular_value(eigenvalues(contract(p, neg)), 2), 1e-12);
        EXPECT_NEAR(drv_margin(eigenvalues(contract(p, t))), drv_margin(eigenvalues(contract(p, neg))), 1e-12);
    }
}

TEST(SphereSearch, FindsKnownMinimum) {
    // minimum of -t1*t2 - t3 on S^2 is at (1/2, 1/2, 1/sqrt 2)-ish; compare with a fine grid
    auto f = [](std::span<const double> t) { return -(t[0] * t[1] + 0.5 * t[2]); };
    SphereSearchOptions o;
    o.antipodal = false;
    o.budget = 5000;
    const auto r = minimize_on_sphere(3, f, o);
    double best = 1e300;
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j < 800; ++j) {
            const double th = std::numbers::pi * i / 400, ph = 2 * std::numbers::pi * j / 800;
            const std::vector<double> t{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
            best = std::min(best, f(t));
        }
    EXPECT_LE(r.value, best + 1e-9);
    EXPECT_NEAR(unit_norm(r.t), 1.0, 1e-12);
}
