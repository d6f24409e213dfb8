#include <random>

#include <gtest/gtest.h>

#include "khintype/manifold.hpp"
#include "khintype/polynomial.hpp"
#include "khintype/rational.hpp"

using namespace khintype;

TEST(Rational, ParseAndFormat) {
    EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
    EXPECT_EQ(parse_rational("-6/8"), Rational(-3, 4));
    EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
    EXPECT_EQ(to_string(Rational(5, 1)), "5");
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
    EXPECT_EQ(parse_rational_list("1, 1/2,3").size(), 3u);
}

TEST(Rational, Rationalize) {
    EXPECT_EQ(rationalize(0.5), Rational(1, 2));
    const Rational r = rationalize(3.14159265358979, 1000);
    EXPECT_EQ(r, Rational(355, 113));
    EXPECT_EQ(floor(Rational(-1, 2)), -1);
    EXPECT_EQ(ceil(Rational(-1, 2)), 0);
}

TEST(Polynomial, ParseRoundTrip) {
    const char* sources[] = {"a1^2 - a2^2", "3/2*a1*a2 + 7", "(a1 + a2)^3", "0", "-a3 + 2*(a1 - 1/3)^2"};
    for (const char* s : sources) {
        const auto p = parse_polynomial(s, 3);
        EXPECT_EQ(parse_polynomial(p.to_string(), 3), p) << s;
    }
    const auto cube = parse_polynomial("(a1 + a2)^3", 2);
    EXPECT_EQ(cube.terms().size(), 4u);
    EXPECT_EQ(cube.total_degree(), 3);
}

TEST(Polynomial, Errors) {
    EXPECT_THROW(parse_polynomial("a4", 3), ParseError);
    EXPECT_THROW(parse_polynomial("a1^-1", 2), ParseError);
    EXPECT_THROW(parse_polynomial("a1 +", 2), ParseError);
    EXPECT_THROW(parse_polynomial("(a1", 2), ParseError);
}

TEST(Polynomial, CompiledMatchesExact) {
    const auto p = parse_polynomial("a1^3*a2 - 5/7*a2^2 + a1 - 2", 2);
    const CompiledPolynomial c(p);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> u(-50, 50);
    for (int rep = 0; rep < 100; ++rep) {
        const std::vector<Rational> x{Rational(u(rng), 7), Rational(u(rng), 11)};
        const std::vector<double> xd{x[0].get_d(), x[1].get_d()};
        const double exact = p.evaluate(std::span<const Rational>(x)).get_d();
        EXPECT_NEAR(c(xd), exact, 1e-12 * (1 + std::abs(exact)));
    }
}

TEST(ParseMap, Examples) {
    const auto v = parse_map("a1^2; a1*a2; a2^2", 5, 3);
    EXPECT_EQ(v.components.size(), 3u);
    const auto z = parse_map("0", 1, 1);
    EXPECT_TRUE(z.components[0].is_zero());
    EXPECT_THROW(parse_map("a1; a2", 2, 3), std::invalid_argument);
    EXPECT_EQ(parse_map(v.to_string(), 5, 3), v);
}

TEST(Builtin, Dimensions) {
    const auto v = builtin("veronese5");
    EXPECT_EQ(v.d(), 5);
    EXPECT_EQ(v.m(), 3);
    EXPECT_EQ(builtin("tracefree2").m(), 2);
    EXPECT_EQ(builtin("tracefree(4)").m(), 9);
    for (int d = 2; d <= 6; ++d) EXPECT_EQ(builtin("tracefree(" + std::to_string(d) + ")").m(), d * (d + 1) / 2 - 1);
    EXPECT_EQ(builtin("tracefree(2)").map(), builtin("tracefree2").map());
    EXPECT_THROW(builtin("tracefree(7)"), std::invalid_argument);
    EXPECT_THROW(builtin("sphere"), std::invalid_argument);
    EXPECT_EQ(builtin("parabola").rect(), Rectangle::unit_cube(1));
}

TEST(EvalAll, TracefreeHessian) {
    const auto tf = builtin("tracefree2");
    const std::vector<Rational> alpha{Rational(1, 3), Rational(2, 5)};
    const auto pencil = eval_all(tf, alpha).hessian_pencil();
    EXPECT_EQ(pencil[0], SymMatrix::diagonal(std::vector<double>{2, -2}));
    EXPECT_EQ(pencil[1], SymMatrix::unit(2, 0, 1));
}

TEST(EvalAll, ParabolaAtThree) {
    const auto p = builtin("parabola");
    const std::vector<Rational> alpha{Rational(3)};
    const auto e = eval_all(p, alpha);
    EXPECT_EQ(e.value[0], 9);
    EXPECT_EQ(e.jacobian[0][0], 6);
    EXPECT_EQ(e.hessian[0][0], 2);
    EXPECT_FALSE(e.inside);
}

TEST(EvalAll, ZeroMap) {
    const ManifoldSpec z(Rectangle::unit_cube(2), parse_map("0; 0", 2, 2), "zero");
    const auto e = eval_all(z, std::vector<double>{0.3, 0.7});
    EXPECT_EQ(e.value, (std::vector<double>{0, 0}));
    EXPECT_EQ(e.hessian[0], SymMatrix::zero(2));
    EXPECT_EQ(e.hessian[1], SymMatrix::zero(2));
}

TEST(EvalAll, FiniteDifferences) {
    const ManifoldSpec spec(Rectangle::unit_cube(3),
                            parse_map("a1^3*a2 - a3^2*a1 + 2; a1*a2*a3 - 1/3*a2^4", 3, 2), "cubic");
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> u(100, 900);
    const double h = 1e-5;
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> a{u(rng) / 1000.0, u(rng) / 1000.0, u(rng) / 1000.0};
        const auto e = eval_all(spec, a);
        double jnorm = 0.0;
        for (double v : e.jacobian.data) jnorm = std::max(jnorm, std::abs(v));
        for (int i = 0; i < 3; ++i) {
            auto ap = a, am = a;
            ap[i] += h;
            am[i] -= h;
            const auto ep = eval_all(spec, ap), em = eval_all(spec, am);
            for (int j = 0; j < 2; ++j) {
                const double fd = (ep.value[j] - em.value[j]) / (2 * h);
                EXPECT_NEAR(e.jacobian(j, i), fd, 1e-8 * (1 + jnorm));
                for (int l = 0; l < 3; ++l) {
                    const double fd2 = (ep.jacobian(j, l) - em.jacobian(j, l)) / (2 * h);
                    EXPECT_NEAR(e.hessian[j](i, l), fd2, 1e-8 * (1 + jnorm));
                }
            }
        }
    }
}

TEST(EvalAll, ExactIsRepeatable) {
    const auto tf = builtin("tracefree(3)");
    const std::vector<Rational> alpha{Rational(1, 7), Rational(5, 9), Rational(2, 3)};
    const auto a = eval_all(tf, alpha), b = eval_all(tf, alpha);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.jacobian, b.jacobian);
    EXPECT_EQ(a.hessian, b.hessian);
}

TEST(Rectangle, Enlarged) {
    const auto K = Rectangle::unit_cube(2);
    const auto L = enlarged_rectangle(K);
    EXPECT_TRUE(L.strictly_contains(K));
    EXPECT_EQ(L.lo()[0], Rational(-1, 10));
    EXPECT_EQ(L.hi()[1], Rational(11, 10));
    EXPECT_THROW(Rectangle({Rational(1)}, {Rational(1)}), std::invalid_argument);
}

TEST(Lipschitz, Examples) {
    const ManifoldSpec zero(Rectangle::unit_cube(2), parse_map("0", 2, 1), "zero");
    EXPECT_DOUBLE_EQ(lipschitz_c1(zero, zero.rect()), 1.0);
    const auto p = builtin("parabola");
    const double c = lipschitz_c1(p, p.rect());
    EXPECT_GE(c, 3.0);
    EXPECT_LE(c, 1.0 + 2.0 * 1.01);
}

TEST(Lipschitz, CornerOracle) {
    // Entries of f' for tracefree2 are linear, so each absolute row sum peaks at a corner.
    const auto tf = builtin("tracefree2");
    const auto L = enlarged_rectangle(tf.rect());
    double best = 0.0;
    for (int c = 0; c < 4; ++c) {
        const std::vector<double> a{(c & 1 ? L.hi_d(0) : L.lo_d(0)), (c & 2 ? L.hi_d(1) : L.lo_d(1))};
        const auto e = eval_all(tf, a);
        for (int j = 0; j < 2; ++j) best = std::max(best, std::abs(e.jacobian(j, 0)) + std::abs(e.jacobian(j, 1)));
    }
    const double c1 = lipschitz_c1(tf, L);
    EXPECT_GE(c1, 1.0 + best - 1e-12);
    EXPECT_LE(c1, 1.0 + 1.01 * best);
}
