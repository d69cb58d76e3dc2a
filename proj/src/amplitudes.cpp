#include "vortex/amplitudes.hpp"

#include <numbers>
#include <sstream>

namespace vortex
{
namespace
{
constexpr double pi = std::numbers::pi;

Complex unit_phase(double angle)
{
    return {std::cos(angle), std::sin(angle)};
}
} // namespace

Complex i_power(int n)
{
    switch (((n % 4) + 4) % 4)
    {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

FourierWeight fourier_weight(double kappa, int m, double k_perp_modulus, double k_azimuth, double tolerance)
{
    if (!(kappa > 0))
        throw DomainError("fourier_weight: kappa must be > 0");
    FourierWeight w;
    w.phase = i_power(-m) * unit_phase(m * k_azimuth) * std::sqrt(2 * pi / kappa);
    w.on_cone = std::abs(k_perp_modulus - kappa) <= tolerance * kappa;
    return w;
}

//---------------------------------------------------------------------------//

SingleTwistedSolutions
single_twisted_solutions(double kappa, double k1_mod, double k2_mod, double phi2)
{
    if (!(kappa > 0) || !(k1_mod > 0) || !(k2_mod > 0))
        throw DomainError("single_twisted_solutions: moduli must be > 0");

    // Rounding slack on the arccos arguments; anything beyond is a real miss.
    constexpr double slack = 1e-14;
    const double cos_rel = (kappa * kappa - k1_mod * k1_mod - k2_mod * k2_mod) / (2 * k1_mod * k2_mod);
    const double cos_12 = (kappa * kappa + k2_mod * k2_mod - k1_mod * k1_mod) / (2 * kappa * k2_mod);
    if (std::abs(cos_rel) > 1 + slack || std::abs(cos_12) > 1 + slack)
        throw SupportError("single-twisted: circle of radius kappa misses |k1|");

    const double alpha = std::acos(std::clamp(cos_rel, -1.0, 1.0));
    const double beta = std::acos(std::clamp(cos_12, -1.0, 1.0));

    SingleTwistedSolutions out;
    out.tangent = std::abs(cos_rel) >= 1 - slack || std::abs(cos_12) >= 1 - slack;
    for (int sign : {+1, -1})
    {
        SingleTwistedBranch b{phi2 + sign * alpha, phi2 + sign * beta, sign};

        // k1 + k2 must land on the kappa circle at phi12; flip the pairing otherwise.
        const Eigen::Vector2d sum = k1_mod * Eigen::Vector2d(std::cos(b.phi1), std::sin(b.phi1))
                                    + k2_mod * Eigen::Vector2d(std::cos(phi2), std::sin(phi2));
        const Eigen::Vector2d target = kappa * Eigen::Vector2d(std::cos(b.phi12), std::sin(b.phi12));
        if ((sum - target).norm() > 1e-8 * (kappa + k1_mod + k2_mod))
            b.phi12 = phi2 - sign * beta;

        out.branches.push_back(b);
        if (out.tangent)
            break;
    }
    return out;
}

SingleTwistedAmplitude single_twisted_amplitude(const TwistedState& state,
                                                double k12_mod,
                                                double phi12,
                                                const AmplitudeModel& model,
                                                double tolerance)
{
    if (!(k12_mod >= 0))
        throw DomainError("single_twisted_amplitude: k12 must be >= 0");
    SingleTwistedAmplitude a;
    a.on_support = std::abs(k12_mod - state.kappa) <= tolerance * state.kappa;
    if (a.on_support)
    {
        a.smooth = i_power(-state.m) * unit_phase(state.m * phi12) * model.m0
                   / (std::pow(2 * pi, 1.5) * std::sqrt(state.kappa));
    }
    return a;
}

//---------------------------------------------------------------------------//

ReducedAmplitude reduced_triple_amplitude(const CollisionGeometry& geom,
                                          int m,
                                          int m1,
                                          int m2,
                                          const AmplitudeModel& model)
{
    ReducedAmplitude out;
    out.phase_power = m1 + m2 - m;

    const double kappa = geom.initial.kappa;
    if (!(kappa > 0) || !(geom.kappa1 > 0) || !(geom.kappa2 > 0))
        throw DomainError("reduced_triple_amplitude: moduli must be > 0");
    if (!(std::abs(geom.q) < kappa * std::sin(geom.theta)))
        return out;

    AngleSet angles;
    try
    {
        angles = angle_set(geom);
    }
    catch (const SupportError&)
    {
        return out;
    }

    const TriangleGeometry tri = triangle_geometry(kappa, angles.xi, geom.kappa1, geom.kappa2);
    if (tri.status == TriangleStatus::outside)
        return out;
    if (!(tri.area >= kDegeneracyFloor * tri.kappa_tilde * tri.kappa_tilde))
    {
        std::ostringstream msg;
        msg << "reduced_triple_amplitude: triangle area " << tri.area
            << " below degeneracy floor (stripe boundary)";
        throw DegenerateError(msg.str());
    }

    // sin^2 a - sin^2 b = sin(a - b) sin(a + b), no cancellation near |xi| -> theta.
    const double root = std::sqrt(std::sin(geom.theta - angles.xi) * std::sin(geom.theta + angles.xi));
    const double azimuthal = std::cos(m * angles.phi_star - (m1 - m2) * angles.phi_tilde_star);
    const double triangle = std::cos(m1 * tri.delta1 + m2 * tri.delta2);
    const double magnitude = (2 / tri.area) * std::sqrt(geom.kappa1 * geom.kappa2 / kappa)
                             * azimuthal * triangle / root;

    out.in_support = true;
    out.value = i_power(out.phase_power) * magnitude * model.m0;
    return out;
}

//---------------------------------------------------------------------------//

PlaneWaveLimitReport plane_wave_limit_check(const CollisionGeometry& geom,
                                            int m,
                                            int m1,
                                            const std::function<double(double)>& test_weight,
                                            const std::vector<double>& epsilon_list,
                                            const AmplitudeModel& model,
                                            int node_count,
                                            double tolerance)
{
    const AngleSet angles = angle_set(geom);
    const double kappa = geom.initial.kappa;
    const double kappa_tilde = kappa * std::cos(angles.xi);
    const double root = std::sqrt(std::sin(geom.theta - angles.xi) * std::sin(geom.theta + angles.xi));
    const double azimuthal = std::cos(m * angles.phi_star - m1 * angles.phi_tilde_star);

    PlaneWaveLimitReport report;
    // 2/Delta -> 8 pi delta(kt^2 - k1^2) = 4 pi delta(k1 - kt) / kt, delta1 -> 0.
    report.limit = i_power(m1 - m) * model.m0 * test_weight(kappa_tilde) * (4 * pi)
                   * std::sqrt(2 * pi) * azimuthal / (std::sqrt(kappa_tilde * kappa) * root);

    const QuadratureRule rule = gauss_legendre(node_count, -pi / 2, pi / 2);
    for (double eps : epsilon_list)
    {
        const double kappa2 = eps * kappa_tilde;
        CollisionGeometry g = geom;
        g.kappa2 = kappa2;
        Complex sum{0.0, 0.0};
        // kappa1 = kt + kappa2 sin u removes the inverse-square-root edges of 1/Delta.
        for (Eigen::Index i = 0; i < rule.size(); ++i)
        {
            const double u = rule.nodes[i];
            g.kappa1 = kappa_tilde + kappa2 * std::sin(u);
            const double weight = test_weight(g.kappa1);
            if (weight == 0)
                continue;
            const ReducedAmplitude a = reduced_triple_amplitude(g, m, m1, 0, model);
            sum += rule.weights[i] * kappa2 * std::cos(u) * weight * std::sqrt(2 * pi / kappa2) * a.value;
        }

        PlaneWaveLimitEntry e;
        e.epsilon = eps;
        e.integral = sum;
        e.relative_error = std::abs(report.limit) > 0 ? std::abs(sum / report.limit - 1.0)
                                                      : std::abs(sum);
        report.entries.push_back(e);
    }

    report.monotone = true;
    const PlaneWaveLimitEntry* previous = nullptr;
    for (const auto& e : report.entries)
    {
        if (e.epsilon > 0.1)
            continue;
        if (previous && (e.epsilon >= previous->epsilon || e.relative_error > previous->relative_error))
            report.monotone = false;
        previous = &e;
    }
    report.passed = report.monotone && !report.entries.empty()
                    && report.entries.back().relative_error < tolerance;
    return report;
}
} // namespace vortex
