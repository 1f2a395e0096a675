#include "skewlab/error.hpp"
#include "skewlab/scale_speed.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace skewlab;
using namespace skewlab::testing;

TEST(Densities, UniformMedium) {
    const ScaleSpeed s{Medium(uniform_spec(2.0, 1.0))};
    const auto d = s.densities_at(0.3, Side::left);
    EXPECT_DOUBLE_EQ(d.s_prime, 1.0);
    EXPECT_DOUBLE_EQ(d.m_prime, 1.0);
    EXPECT_DOUBLE_EQ(d.qv_rate, 2.0);
}

TEST(Densities, TwoDiffusivityInterface) {
    const ScaleSpeed s{Medium(two_diffusivity_spec())};
    const auto l = s.densities_at(0.0, Side::left);
    const auto r = s.densities_at(0.0, Side::right);
    EXPECT_DOUBLE_EQ(l.s_prime, 2.0);
    EXPECT_DOUBLE_EQ(l.m_prime, 1.0);
    EXPECT_DOUBLE_EQ(l.qv_rate, 1.0);
    EXPECT_DOUBLE_EQ(r.s_prime, 1.0);
    EXPECT_DOUBLE_EQ(r.m_prime, 1.0);
    EXPECT_DOUBLE_EQ(r.qv_rate, 2.0);
}

TEST(Densities, CapacityJumpScalesSpeed) {
    const ScaleSpeed s{Medium(
        piecewise_constant_spec({-1.0, 1.0}, {0.5, 4.0}, {lambda_interface(0.0, 0.5)}, {1.0, 1.0}, {1.0, 3.0}))};
    EXPECT_DOUBLE_EQ(s.densities_at(0.0, Side::right).m_prime / s.densities_at(0.0, Side::left).m_prime, 3.0);
    EXPECT_THROW((void)s.densities_at(1.5, Side::left), DomainError);
}

TEST(ScaleValue, ClosedForms) {
    const ScaleSpeed uniform{Medium(uniform_spec(2.0, 1.0))};
    EXPECT_DOUBLE_EQ(uniform.scale_value(0.7), 0.7);
    EXPECT_DOUBLE_EQ(uniform.scale_value(-1.3), -1.3);

    const ScaleSpeed sec{Medium(two_diffusivity_spec())};
    EXPECT_NEAR(sec.scale_value(-1.0), -2.0, 1e-15);
    EXPECT_NEAR(sec.scale_value(1.0), 1.0, 1e-15);
    EXPECT_EQ(sec.scale_value(0.0), 0.0);

    auto spec = uniform_spec(1.0, 1.0, 0.0, 1.0);
    spec.pieces[0].diffusion = Cubic{{1.0, 1.0, 0.0, 0.0}};
    const ScaleSpeed log_scale{Medium(spec)};
    EXPECT_NEAR(log_scale.scale_value(1.0), 2.0 * std::log(2.0), 1e-12);
    EXPECT_THROW((void)log_scale.scale_value(1.5), DomainError);
}

TEST(ScaleValue, ReferencePointClampedIntoWindow) {
    const ScaleSpeed s{Medium(uniform_spec(2.0, 1.0, 1.0, 3.0))};
    EXPECT_EQ(s.reference_point(), 1.0);
    EXPECT_DOUBLE_EQ(s.scale_value(1.0), 0.0);
    EXPECT_DOUBLE_EQ(s.scale_value(2.5), 1.5);
}

TEST(InverseScale, Examples) {
    const ScaleSpeed uniform{Medium(uniform_spec(2.0, 1.0))};
    EXPECT_DOUBLE_EQ(uniform.inverse_scale_value(0.4), 0.4);
    const ScaleSpeed sec{Medium(two_diffusivity_spec())};
    EXPECT_NEAR(sec.inverse_scale_value(-2.0), -1.0, 1e-15);
    EXPECT_NEAR(sec.inverse_scale_value(sec.scale_value(0.3)), 0.3, 1e-15);
    EXPECT_THROW((void)sec.inverse_scale_value(100.0), DomainError);
}

TEST(SpeedInScale, Examples) {
    const ScaleSpeed uniform{Medium(uniform_spec(2.0, 1.0))};
    EXPECT_DOUBLE_EQ(uniform.speed_density_in_scale(0.2, Side::left), 1.0);
    const ScaleSpeed sec{Medium(two_diffusivity_spec())};
    EXPECT_DOUBLE_EQ(sec.speed_density_in_scale(-1.0, Side::left), 0.5);
    EXPECT_DOUBLE_EQ(sec.speed_density_in_scale(1.0, Side::right), 1.0);
}

TEST(ScaleSpeedProperties, RandomMedia) {
    RandomMedia media(77);
    for (int trial = 0; trial < 60; ++trial) {
        const ScaleSpeed s{Medium(media.next())};
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 200; ++i) {
            const double x = -2.0 + 4.0 * i / 200.0;
            for (Side side : {Side::left, Side::right}) {
                const auto d = s.densities_at(x, side);
                EXPECT_NEAR(d.m_prime * d.s_prime * d.qv_rate, 2.0, 1e-13);
            }
            const double u = s.scale_value(x);
            EXPECT_GT(u, prev);
            prev = u;
            EXPECT_NEAR(s.inverse_scale_value(u), x, 1e-10 * std::max(1.0, std::abs(x)));
            const Side side = i == 200 ? Side::left : Side::right;
            const auto d = s.densities_at(x, side);
            EXPECT_NEAR(d.m_prime - d.s_prime * s.speed_density_in_scale(u, side), 0.0, 1e-10);
        }
    }
}

TEST(ScaleSpeedProperties, PiecewiseConstantScaleIsExact) {
    RandomMedia media(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto spec = media.next(true);
        const Medium m(spec);
        const ScaleSpeed s(m);
        // Closed form: integrate the piecewise-constant s' from 0.
        auto closed = [&](double x) {
            double total = 0.0;
            const double lo = std::min(0.0, x);
            const double hi = std::max(0.0, x);
            for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
                const double a = std::max(lo, spec.pieces[p].left);
                const double b = std::min(hi, spec.pieces[p].right);
                if (b > a) total += (b - a) * 2.0 * m.phi_of_piece(p) / spec.pieces[p].diffusion.c[0];
            }
            return x >= 0.0 ? total : -total;
        };
        for (double x : {-2.0, -1.3, -0.2, 0.0, 0.45, 1.9, 2.0}) {
            EXPECT_NEAR(s.scale_value(x), closed(x), 1e-12 * std::max(1.0, std::abs(closed(x))));
        }
    }
}

TEST(ExitFunctionals, BrownianClosedForms) {
    // D = 1, eta = 1: generator f''/2, P(hit b) = (x-a)/(b-a), E exit = (x-a)(b-x).
    const ScaleSpeed s{Medium(uniform_spec(1.0, 1.0))};
    EXPECT_NEAR(s.exit_probability(-1.0, 2.0, 0.5), 0.5, 1e-15);
    EXPECT_NEAR(s.expected_exit_time(-1.0, 1.0, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(s.expected_exit_time(-1.0, 2.0, 0.5), 2.25, 1e-12);
    EXPECT_NEAR(s.reflected_exit_time(0.0, 0.3), 0.09, 1e-13);
    EXPECT_NEAR(s.reflected_exit_time(0.3, 0.0), 0.09, 1e-13);
    EXPECT_THROW((void)s.exit_probability(1.0, -1.0, 0.0), UsageError);
}

TEST(ExitFunctionals, ConstantCoefficientsScaleTime) {
    // Generator (D / 2 eta) f'': exit time of (-h, h) from 0 is h^2 eta / D.
    const ScaleSpeed s{Medium(uniform_spec(2.0, 3.0))};
    EXPECT_NEAR(s.expected_exit_time(-0.1, 0.1, 0.0), 0.01 * 3.0 / 2.0, 1e-14);
}

TEST(ExitFunctionals, GreenIntegralOfGeneratorIsDynkin) {
    // f = G(s(x)) with G(u) = u^3; A f = G''(s) s' / m' and the Green integral of Af
    // equals E_x f(exit) - f(x).
    RandomMedia media(99);
    for (int trial = 0; trial < 20; ++trial) {
        const ScaleSpeed s{Medium(media.next())};
        const double a = -1.7;
        const double b = 1.4;
        const double x = 0.2;
        auto af = [&](double y, Side side) {
            const auto d = s.densities_at(y, side);
            return 6.0 * s.scale_value(y) * d.s_prime / d.m_prime;
        };
        const double p = s.exit_probability(a, b, x);
        auto f = [&](double y) { return std::pow(s.scale_value(y), 3); };
        const double dynkin = p * f(b) + (1.0 - p) * f(a) - f(x);
        EXPECT_NEAR(s.green_integral(a, b, x, af), dynkin, 1e-9 * std::max(1.0, std::abs(dynkin)));
    }
}
