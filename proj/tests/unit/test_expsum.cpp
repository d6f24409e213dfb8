#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "khintype/expsum.hpp"

using namespace khintype;

namespace {

// 1e6-point midpoint reference for the parabola integrand min(1, 1/(r |2 h a|)) over [0, 1].
double parabola_reference(long h, long r) {
    const long N = 1'000'000;
    double s = 0.0;
    for (long i = 0; i < N; ++i) {
        const double a = (i + 0.5) / N;
        const double x = dist_to_int(2.0 * h * a);
        s += x == 0.0 ? 1.0 : std::min(1.0, 1.0 / (r * x));
    }
    return s / N;
}

}  // namespace

TEST(Kernel, Examples) {
    const std::vector<double> zero{0.0};
    const auto r1 = kernel_check(1, zero);
    EXPECT_TRUE(r1.ok());
    EXPECT_NEAR(r1.worst_fejer_slack, 1.0 - 4.0 / (std::numbers::pi * std::numbers::pi), 1e-12);
    EXPECT_NEAR(r1.worst_dirichlet_slack, 0.0, 1e-12);
    const std::vector<double> eighth{0.125};
    const auto r4 = kernel_check(4, eighth);
    EXPECT_TRUE(r4.ok());
    const double fejer = std::pow(1.0 / std::sin(std::numbers::pi / 8), 2);
    EXPECT_NEAR(r4.worst_fejer_slack, fejer - 64.0 / (std::numbers::pi * std::numbers::pi), 1e-9);
    const std::vector<double> half{0.5};
    for (int H = 1; H <= 10; ++H) EXPECT_TRUE(kernel_check(H, half).ok());
    EXPECT_THROW(kernel_check(0, zero), std::invalid_argument);
}

TEST(Kernel, ManyPoints) {
    std::vector<double> xs(2000);
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = (i + 0.37) / xs.size();
    for (int H = 1; H <= 64; H += 7) {
        const auto r = kernel_check(H, xs);
        EXPECT_TRUE(r.ok(-1e-9)) << H;
        EXPECT_LT(r.max_closed_form_error, 1e-9 * H * H);
    }
}

TEST(DistToInt, Values) {
    EXPECT_EQ(dist_to_int(0.25), 0.25);
    EXPECT_EQ(dist_to_int(-0.75), 0.25);
    EXPECT_EQ(dist_to_int(2.5), 0.5);
    EXPECT_EQ(dist_to_int(3.0), 0.0);
}

TEST(MajorantParams, Regimes) {
    EXPECT_FALSE(majorant_params(100, Rational(1, 2), 0.01).in_regime());
    const auto a = majorant_params(400, Rational(1, 8), 0.01);
    EXPECT_EQ(a.H, 2);
    EXPECT_EQ(a.r, 0);
    const auto b = majorant_params(400, Rational(1, 8), 1.0);
    EXPECT_EQ(b.r, 7);
    const auto p = builtin("parabola");
    EXPECT_THROW(majorant(p, 400, Rational(1, 8), 0.01, 16), OutOfRegime);
    EXPECT_THROW(majorant(p, 100, Rational(1, 2), 1.0, 16), OutOfRegime);
    const double v = majorant(p, 400, Rational(1, 8), 1.0, 64);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
}

TEST(ProductIntegral, Trivial) {
    const auto tf = builtin("tracefree2");
    const std::vector<long> h0{0, 0};
    EXPECT_DOUBLE_EQ(product_integral(tf, h0, 5, 16), 1.0);
    const ManifoldSpec z(Rectangle({Rational(0), Rational(0)}, {Rational(2), Rational(1, 2)}), parse_map("0", 2, 1),
                         "zero");
    const std::vector<long> h{3};
    EXPECT_DOUBLE_EQ(product_integral(z, h, 9, 16), 1.0);
}

TEST(ProductIntegral, ParabolaReference) {
    const auto p = builtin("parabola");
    for (long h : {1L, 2L})
        for (long r : {3L, 10L}) {
            const double ref = parabola_reference(h, r);
            const std::vector<long> hv{h};
            const double v = product_integral(p, hv, r, 64);
            EXPECT_NEAR(v, ref, 0.02 * ref) << "h=" << h << " r=" << r;
            EXPECT_LE(v, 1.0);
        }
}

TEST(ProductIntegral, GridDoubling) {
    const auto tf = builtin("tracefree2");
    for (const std::vector<long>& h : {std::vector<long>{1, 0}, std::vector<long>{1, -2}, std::vector<long>{2, 1}}) {
        const double a = product_integral(tf, h, 4, 32), b = product_integral(tf, h, 4, 64);
        EXPECT_NEAR(a, b, 0.05 * b);
    }
}

TEST(Majorant, ZeroMapClosedForm) {
    const ManifoldSpec z(Rectangle::unit_cube(1), parse_map("0; 0", 1, 2), "zero");
    const long q = 1000;
    const Rational kappa(1, 8);
    const auto prm = majorant_params(q, kappa, 0.1);
    ASSERT_TRUE(prm.in_regime());
    const double H = static_cast<double>(prm.H);
    EXPECT_NEAR(majorant(z, q, kappa, 0.1, 16), q * std::pow(2 * H + 1, 2) / (H * H), 1e-9 * q);
}

TEST(Majorant, ThetaIndependentAndDeterministic) {
    const auto tf = builtin("tracefree2");
    std::vector<CountQuery> qs;
    for (const char* th : {"0", "3/10,7/10,1/10,9/10", "1/2,1/3,1/5,1/7"})
        qs.push_back({1024, Rational(1, 16), Theta::parse(th, 2, 2)});
    CompareOptions one;
    one.threads = 1;
    const auto rows = compare_sweep(tf, qs, 0.1, 32, one);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].majorant, rows[1].majorant);
    EXPECT_EQ(rows[1].majorant, rows[2].majorant);
    EXPECT_EQ(rows[2].theta_id, 2);
    CompareOptions three;
    three.threads = 3;
    EXPECT_EQ(compare_sweep(tf, qs, 0.1, 32, three)[0].majorant, rows[0].majorant);
}

TEST(CompareSweep, SkipsOutOfRegimeAndWritesCsv) {
    const auto tf = builtin("tracefree2");
    std::vector<CountQuery> qs{{64, Rational(1, 2), Theta::zero(2, 2)}, {512, Rational(1, 8), Theta::zero(2, 2)}};
    const auto rows = compare_sweep(tf, qs, 0.1, 16);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].q, 512);
    CompareOptions strict;
    strict.skip_out_of_regime = false;
    EXPECT_THROW(compare_sweep(tf, qs, 0.1, 16, strict), OutOfRegime);
    std::ostringstream os;
    write_compare_csv(os, rows);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
              "q,kappa_num,kappa_den,theta_id,A,envelope,ratio,majorant,majorant_ratio,H,r,delta");
}

TEST(CompareSweep, EmptyCount) {
    // f = 0 with gamma = 1/2 needs |b + 1/2| < kappa, impossible for kappa <= 1/2
    const ManifoldSpec z(Rectangle::unit_cube(1), parse_map("0", 1, 1), "zero");
    std::vector<CountQuery> qs{{1000, Rational(1, 8), Theta::parse("1/3,1/2", 1, 1)}};
    const auto rows = compare_sweep(z, qs, 0.1, 16);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].A, 0u);
    EXPECT_EQ(rows[0].majorant_ratio, 0.0);
}

TEST(ProductIntegral, SeparableClosedForm) {
    // tracefree2 with h = (1, 0): the integrand is J(2 a1) J(2 a2) with
    // int_0^1 min(1, 1/(r |2a|)) da = (2/r)(1 + ln(r/2)) for r >= 2.
    const auto tf = builtin("tracefree2");
    for (long r : {3L, 7L, 20L}) {
        const double j = (2.0 / r) * (1.0 + std::log(r / 2.0));
        const std::vector<long> h{1, 0};
        EXPECT_NEAR(product_integral(tf, h, r, 64), j * j, 0.02 * j * j) << "r=" << r;
    }
}
