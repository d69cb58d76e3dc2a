#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "vortex/errors.hpp"
#include "vortex/kinematics.hpp"
#include "vortex/numerics.hpp"

using namespace vortex;
using vortex::test::for_all;
using vortex::test::Gen;

namespace
{
constexpr double pi = std::numbers::pi;
}

TEST(TwistedState, OnShellAndValidation)
{
    const TwistedState s = TwistedState::on_shell(0.7, 3, 40, 0.5);
    EXPECT_NEAR(s.mass_squared(), 0.25, 1e-10);
    EXPECT_DOUBLE_EQ(s.paraxiality(), 0.7 / 40);
    EXPECT_NO_THROW(s.validate());

    TwistedState bad = s;
    bad.kappa = 0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = s;
    bad.omega = 10;
    EXPECT_THROW(bad.validate(), DomainError);

    CollisionGeometry g;
    EXPECT_NO_THROW(g.validate());
    g.theta = pi / 2;
    EXPECT_THROW(g.validate(), DomainError);
}

TEST(Frames, TiltedFrameIsRotation)
{
    for_all(201, 200, [](Gen& g, int) {
        const Frame<double> f = tilted_frame(g.real(-1.5, 1.5));
        EXPECT_LT((f.transpose() * f - Eigen::Matrix3d::Identity()).norm(), 1e-15);
        EXPECT_NEAR(f.determinant(), 1.0, 1e-15);
    });
    const Frame<double> f = tilted_frame(0.3);
    EXPECT_NEAR(f.col(2).x(), std::sin(0.3), 1e-16);
    EXPECT_NEAR(f.col(2).z(), std::cos(0.3), 1e-16);
}

TEST(Frames, ConeMomentumLiesOnCone)
{
    for_all(202, 1000, [](Gen& g, int) {
        const double kappa = g.real(0.1, 3), kz = g.real(-50, 50), phi = g.angle(), theta = g.real(0, 1.5);
        const Eigen::Vector3d k = cone_momentum<double>(kappa, kz, phi, theta);
        const Eigen::Vector3d axis = tilted_frame(theta).col(2);
        EXPECT_NEAR(k.dot(axis), kz, 1e-12 * (1 + std::abs(kz)));
        EXPECT_NEAR((k - k.dot(axis) * axis).norm(), kappa, 1e-12 * (1 + std::abs(kz)));
    });
}

TEST(AngleSet, DefiningRelations)
{
    for_all(203, 2000, [](Gen& g, int) {
        const CollisionGeometry geom = g.geometry();
        const AngleSet a = angle_set(geom);
        EXPECT_NEAR(std::sin(a.xi) * geom.initial.kappa, geom.q, 1e-14 * geom.initial.kappa);
        EXPECT_NEAR(std::cos(a.phi_star) * std::sin(geom.theta), std::sin(a.xi), 1e-14);
        EXPECT_NEAR(std::cos(a.phi_tilde_star) * std::tan(geom.theta), std::tan(a.xi), 1e-13);
        EXPECT_GE(a.phi_star, 0.0);
        EXPECT_LE(a.phi_star, pi);
    });
}

TEST(AngleSet, ErrorsOutsideRegion)
{
    CollisionGeometry g;
    g.initial = TwistedState::on_shell(1.0, 0, 100);
    g.theta = 0.2;
    g.q = 1.0;
    EXPECT_THROW(angle_set(g), DomainError);
    g.q = -1.5;
    EXPECT_THROW(angle_set(g), DomainError);
    g.q = std::sin(0.2);
    EXPECT_THROW(angle_set(g), SupportError);
    g.q = 0.5;
    EXPECT_THROW(angle_set(g), SupportError);
    g.q = 0.99 * std::sin(0.2);
    EXPECT_NO_THROW(angle_set(g));
    g.q = 0;
    const AngleSet a = angle_set(g);
    EXPECT_DOUBLE_EQ(a.phi_star, pi / 2);
    EXPECT_DOUBLE_EQ(a.phi_tilde_star, pi / 2);
}

TEST(Triangle, MatchesLawOfSinesSeed)
{
    for_all(204, 10000, [](Gen& g, int) {
        const double kt = g.real(0.1, 4);
        const double d1 = g.real(0.005, pi - 0.02);
        const double d2 = g.real(0.005, pi - d1 - 0.005);
        const test::TriangleSeed s = test::triangle_from_angles(kt, d1, d2);
        const double xi = g.real(-1, 1);
        const TriangleGeometry t = triangle_geometry(kt / std::cos(xi), xi, s.kappa1, s.kappa2);
        ASSERT_EQ(t.status, TriangleStatus::inside);
        EXPECT_NEAR(t.kappa_tilde, kt, 1e-14 * kt);
        EXPECT_NEAR(t.delta1, d1, 1e-10);
        EXPECT_NEAR(t.delta2, d2, 1e-10);
        EXPECT_NEAR(t.area, s.area, 1e-11 * kt * kt);
    });
}

TEST(Triangle, Statuses)
{
    const TriangleGeometry right = triangle_geometry(5, 0, 3, 4);
    EXPECT_EQ(right.status, TriangleStatus::inside);
    EXPECT_EQ(right.area, 6.0);
    EXPECT_NEAR(right.delta1 + right.delta2, pi / 2, 1e-15);
    EXPECT_NEAR(std::tan(right.delta1), 4.0 / 3.0, 1e-15);

    const TriangleGeometry flat = triangle_geometry(3, 0, 1, 2);
    EXPECT_EQ(flat.status, TriangleStatus::degenerate);
    EXPECT_EQ(flat.area, 0.0);

    const TriangleGeometry miss = triangle_geometry(4, 0, 1, 2);
    EXPECT_EQ(miss.status, TriangleStatus::outside);
    EXPECT_TRUE(std::isnan(miss.area));
    EXPECT_TRUE(std::isnan(miss.delta1));

    EXPECT_THROW(triangle_geometry(1, 0, 0, 1), DomainError);
}

TEST(Triangle, StripeAgreesWithHeron)
{
    for_all(205, 20000, [](Gen& g, int) {
        const double kt = g.real(0.1, 3), k1 = g.real(0.01, 4), k2 = g.real(0.01, 4);
        const double area = heron_area(kt, k1, k2);
        EXPECT_EQ(stripe_contains(kt, k1, k2), area > 0) << kt << " " << k1 << " " << k2;
    });
    EXPECT_FALSE(stripe_contains(3, 1, 2));
    EXPECT_FALSE(stripe_contains(1, 1, 2));
}

TEST(VortexAxis, UnitAndDirection)
{
    const Eigen::Vector3d k(0.1, 0.2, 50), p(0, 0, -50), k2(-0.3, 0.4, -10);
    const Eigen::Vector3d n = vortex_axis(k, p, k2);
    EXPECT_NEAR(n.norm(), 1.0, 1e-15);
    const Eigen::Vector3d expected = (k + p - k2).normalized();
    EXPECT_LT((n - expected).norm(), 1e-15);
    EXPECT_THROW(vortex_axis(k, p, k + p), DegenerateError);
}

TEST(Field, ValuesAndPhase)
{
    const TwistedState s0 = TwistedState::on_shell(2.0, 0, 10);
    EXPECT_NEAR(field_amplitude(s0, 0, 0.3).real(), std::sqrt(2.0 / (2 * pi)), 1e-15);
    EXPECT_EQ(field_amplitude(s0, 0, 0.3).imag(), 0.0);

    const TwistedState s1 = TwistedState::on_shell(1.0, 1, 10);
    const auto v = field_amplitude(s1, 1.0, pi / 2);
    EXPECT_NEAR(v.imag(), 0.4400505857449335 * std::sqrt(1 / (2 * pi)), 1e-15);
    EXPECT_NEAR(v.real(), 0.0, 1e-16);
    EXPECT_EQ(field_amplitude(s1, 0, 1.0), std::complex<double>(0, 0));

    for_all(206, 500, [](Gen& g, int) {
        const TwistedState s = TwistedState::on_shell(g.real(0.1, 3), g.integer(-20, 20), 10);
        const double r = g.real(0, 10), phi = g.angle(), shift = g.angle();
        const auto a = field_amplitude(s, r, phi), b = field_amplitude(s, r, phi + shift);
        EXPECT_NEAR(std::abs(a), std::abs(b), 1e-14);
        EXPECT_NEAR(std::abs(b - a * std::polar(1.0, s.m * shift)), 0.0, 1e-13);
    });
    EXPECT_THROW(field_amplitude(s1, -1, 0), DomainError);
}

TEST(Longitudinal, Conventions)
{
    EXPECT_DOUBLE_EQ(longitudinal_momentum(5, 3), 4.0);
    EXPECT_DOUBLE_EQ(longitudinal_momentum(5, 0, 9), 4.0);
    EXPECT_THROW(longitudinal_momentum(1, 2), DomainError);

    const FinalEnergies e{13, 5, 0, 0};
    EXPECT_EQ(longitudinal_imbalance(SliceConvention::fixed_q, 0.25, e, 5, 3), 0.25);
    EXPECT_DOUBLE_EQ(longitudinal_imbalance(SliceConvention::fixed_energy, 0.25, e, 5, 3), 12.0 - 4.0);
}

TEST(Frames, ConeMomentumExamples)
{
    EXPECT_EQ(cone_momentum<double>(1, 10, 0, 0), Eigen::Vector3d(1, 0, 10));
    EXPECT_LT((cone_momentum<double>(1, 10, pi / 2, 0) - Eigen::Vector3d(0, 1, 10)).norm(), 1e-15);
    const double theta = 0.3;
    const Eigen::Vector3d on_axis = cone_momentum<double>(1e-300, 10, 1.234, theta);
    EXPECT_LT((on_axis - 10 * Eigen::Vector3d(std::sin(theta), 0, std::cos(theta))).norm(), 1e-14);
}

TEST(AngleSet, HalfBoundaryAndOddIdentity)
{
    CollisionGeometry g;
    g.initial = TwistedState::on_shell(1.3, 0, 100);
    g.theta = 0.2;
    g.q = 0.5 * 1.3 * std::sin(0.2);
    const AngleSet a = angle_set(g);
    EXPECT_NEAR(a.xi, std::asin(0.5 * std::sin(0.2)), 1e-15);
    EXPECT_NEAR(a.phi_star, std::acos(0.5), 1e-15);
    EXPECT_NEAR(a.phi_tilde_star, std::acos(std::tan(a.xi) / std::tan(0.2)), 1e-15);

    for_all(207, 2000, [](Gen& gen, int) {
        CollisionGeometry geom = gen.geometry();
        const AngleSet plus = angle_set(geom);
        geom.q = -geom.q;
        const AngleSet minus = angle_set(geom);
        EXPECT_NEAR(minus.phi_star, pi - plus.phi_star, 1e-14);
        EXPECT_NEAR(minus.phi_tilde_star, pi - plus.phi_tilde_star, 1e-14);
    });
}

TEST(Triangle, Examples)
{
    const TriangleGeometry t = triangle_geometry(5, 0, 4, 3);
    EXPECT_EQ(t.area, 6.0);
    EXPECT_NEAR(t.delta1, std::acos(0.8), 1e-15);
    EXPECT_NEAR(t.delta2, std::acos(0.6), 1e-15);

    const TriangleGeometry eq = triangle_geometry(1, 0, 1, 1);
    EXPECT_NEAR(eq.delta1, pi / 3, 1e-15);
    EXPECT_NEAR(eq.delta2, pi / 3, 1e-15);
    EXPECT_NEAR(eq.area, std::sqrt(3.0) / 4, 1e-16);

    EXPECT_EQ(triangle_geometry(1, 0, 1, 3).status, TriangleStatus::outside);
    EXPECT_TRUE(stripe_contains(1.5, 1, 1));
    EXPECT_FALSE(stripe_contains(1, 1, 3));
    EXPECT_FALSE(stripe_contains(2, 1, 1));
}

TEST(Triangle, InnerAnglesSumToPi)
{
    for_all(208, 10000, [](Gen& g, int) {
        const double kt = g.real(0.1, 3), k1 = g.real(0.05, 3);
        const double k2 = g.real(std::abs(kt - k1), kt + k1);
        const TriangleGeometry t = triangle_geometry(kt, 0, k1, k2);
        if (!t.inside())
            return;
        const double delta3 = std::acos((k1 * k1 + k2 * k2 - kt * kt) / (2 * k1 * k2));
        EXPECT_NEAR(t.delta1 + t.delta2 + delta3, pi, 1e-12);
    });
}

TEST(VortexAxis, Examples)
{
    EXPECT_EQ(vortex_axis(Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0, 0, -1), Eigen::Vector3d(0, 0, -5)),
              Eigen::Vector3d(0, 0, 1));
    EXPECT_THROW(vortex_axis(Eigen::Vector3d(0, 0, 2), Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, 2)),
                 DegenerateError);
    const Eigen::Vector3d n = vortex_axis(Eigen::Vector3d(0, 0, 2), Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 0, 0));
    EXPECT_LT((n - Eigen::Vector3d(-1, 0, 2) / std::sqrt(5.0)).norm(), 1e-15);
}

TEST(Field, CoreAndWinding)
{
    EXPECT_EQ(field_amplitude(TwistedState::on_shell(1.0, 3, 10), 0, 0.7), std::complex<double>(0, 0));
    for (int m : {-7, -1, 2, 5})
    {
        const TwistedState s = TwistedState::on_shell(1.2, m, 10);
        double winding = 0;
        const auto first = field_amplitude(s, 1.7, 0);
        auto previous = first;
        for (int j = 1; j <= 64; ++j)
        {
            const auto v = field_amplitude(s, 1.7, 2 * pi * j / 64);
            EXPECT_NEAR(std::abs(v), std::abs(first), 1e-15);
            winding += std::arg(v / previous);
            previous = v;
        }
        EXPECT_NEAR(winding, 2 * pi * m, 1e-12);
    }
}
