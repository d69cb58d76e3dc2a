#include "vortex/kinematics.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "vortex/numerics.hpp"

namespace vortex
{
TwistedState TwistedState::on_shell(double kappa, int m, double k_z, double mass)
{
    TwistedState s;
    s.kappa = kappa;
    s.m = m;
    s.k_z = k_z;
    s.omega = std::sqrt(kappa * kappa + k_z * k_z + mass * mass);
    return s;
}

void TwistedState::validate() const
{
    if (!(kappa > 0))
        throw DomainError("twisted state: kappa must be > 0");
    if (!(omega > 0))
        throw DomainError("twisted state: omega must be > 0");
    // Relative slack: omega is usually built from a square root.
    if (mass_squared() < -1e-12 * omega * omega)
        throw DomainError("twisted state: omega^2 < kappa^2 + k_z^2");
}

void CollisionGeometry::validate() const
{
    initial.validate();
    if (!(theta > 0 && theta < std::numbers::pi / 2))
        throw DomainError("collision geometry: theta must lie in (0, pi/2)");
    if (!(kappa1 > 0) || !(kappa2 > 0))
        throw DomainError("collision geometry: final kappas must be > 0");
    if (!std::isfinite(q))
        throw DomainError("collision geometry: q must be finite");
}

AngleSet angle_set(const CollisionGeometry& geom)
{
    const double kappa = geom.initial.kappa;
    if (!(std::abs(geom.q) < kappa))
        throw DomainError("xi undefined: |q| >= kappa");
    const double sin_xi = geom.q / kappa;
    const double xi = std::asin(sin_xi);
    if (!(std::abs(xi) < geom.theta))
        throw SupportError("outside allowed q region: |xi| >= theta");

    AngleSet a;
    a.xi = xi;
    a.phi_star = std::acos(std::clamp(sin_xi / std::sin(geom.theta), -1.0, 1.0));
    a.phi_tilde_star = std::acos(std::clamp(std::tan(xi) / std::tan(geom.theta), -1.0, 1.0));
    return a;
}

bool stripe_contains(double kappa_tilde, double kappa1, double kappa2)
{
    return std::abs(kappa1 - kappa2) < kappa_tilde && kappa_tilde < kappa1 + kappa2;
}

TriangleGeometry triangle_geometry(double kappa, double xi, double kappa1, double kappa2)
{
    if (!(kappa > 0) || !(kappa1 > 0) || !(kappa2 > 0))
        throw DomainError("triangle_geometry: moduli must be > 0");

    TriangleGeometry t;
    t.kappa_tilde = kappa * std::cos(xi);
    t.kappa1 = kappa1;
    t.kappa2 = kappa2;
    t.area = heron_area(t.kappa_tilde, kappa1, kappa2);

    if (std::isnan(t.area))
    {
        t.status = TriangleStatus::outside;
        t.delta1 = t.delta2 = std::numeric_limits<double>::quiet_NaN();
        return t;
    }
    t.status = (t.area > 0 && stripe_contains(t.kappa_tilde, kappa1, kappa2))
                   ? TriangleStatus::inside
                   : TriangleStatus::degenerate;

    // atan2 with sin = 2 area / (a b) keeps the angles accurate near 0 and pi.
    const double kt = t.kappa_tilde;
    t.delta1 = std::atan2(4 * t.area, kt * kt + kappa1 * kappa1 - kappa2 * kappa2);
    t.delta2 = std::atan2(4 * t.area, kt * kt + kappa2 * kappa2 - kappa1 * kappa1);
    return t;
}

Eigen::Vector3d vortex_axis(const Eigen::Vector3d& mean_initial,
                            const Eigen::Vector3d& p,
                            const Eigen::Vector3d& k2)
{
    const Eigen::Vector3d axis = mean_initial + p - k2;
    const double scale = std::max({mean_initial.norm(), p.norm(), k2.norm()});
    const double len = axis.norm();
    if (!(len > 1e-14 * scale) || len == 0)
        throw DegenerateError("vortex_axis: <k> + p - k2 vanishes");
    return axis / len;
}

std::complex<double> field_amplitude(const TwistedState& state, double r, double phi_r)
{
    if (!(r >= 0))
        throw DomainError("field_amplitude: r must be >= 0");
    const double radial = bessel_j_signed(state.m, state.kappa * r)
                          * std::sqrt(state.kappa / (2 * std::numbers::pi));
    if (radial == 0)
        return {0.0, 0.0};
    const double phase = state.m * phi_r;
    return radial * std::complex<double>(std::cos(phase), std::sin(phase));
}

double longitudinal_momentum(double omega, double kappa, double mass_squared)
{
    const double kz2 = omega * omega - kappa * kappa - mass_squared;
    if (kz2 < 0)
        throw DomainError("longitudinal_momentum: kappa exceeds the on-shell limit");
    return std::sqrt(kz2);
}

double longitudinal_imbalance(SliceConvention convention,
                              double q,
                              const FinalEnergies& energies,
                              double kappa1,
                              double kappa2)
{
    if (convention == SliceConvention::fixed_q)
        return q;
    return longitudinal_momentum(energies.omega1, kappa1, energies.mass1_squared)
           - longitudinal_momentum(energies.omega2, kappa2, energies.mass2_squared);
}
} // namespace vortex
