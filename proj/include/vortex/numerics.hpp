#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "vortex/errors.hpp"

namespace vortex
{
//---------------------------------------------------------------------------//
// Specs
//---------------------------------------------------------------------------//

struct QuadratureSpec
{
    int node_count = 32;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_refinements = 4;

    //! Throws DomainError listing the first violated invariant.
    void validate() const;
    bool converged(double previous, double current) const;
};

struct RootFindSpec
{
    double residual_tol = 1e-12;
    int max_iterations = 40;
    int start_grid_density = 8;
    double dedupe_tol = 1e-6;

    void validate() const;
};

//---------------------------------------------------------------------------//
// Special functions
//---------------------------------------------------------------------------//

inline constexpr int kMaxBesselOrder = 200;
inline constexpr double kMaxBesselArgument = 1.0e4;

/*!
 * Cylindrical Bessel function of the first kind, J_order(x).
 *
 * Power series for x <= 2, Miller's backward recurrence (normalized with
 * J_0 + 2 sum J_2k = 1) otherwise. Throws RangeError outside
 * 0 <= order <= 200, 0 <= x <= 1e4.
 */
double bessel_j(int order, double x);

//! J_n for signed n, using J_{-n} = (-1)^n J_n.
double bessel_j_signed(int order, double x);

//---------------------------------------------------------------------------//
// Triangle area
//---------------------------------------------------------------------------//

/*!
 * Triangle area from its three sides (Kahan's ordering of Heron's formula).
 *
 * Exactly 0 when one side equals the sum of the other two; quiet NaN when the
 * triangle inequality is strictly violated. The result does not depend on the
 * argument order.
 */
double heron_area(double a, double b, double c);

//---------------------------------------------------------------------------//
// Quadrature
//---------------------------------------------------------------------------//

struct QuadratureRule
{
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;

    Eigen::Index size() const { return nodes.size(); }

    template<class F>
    double apply(F&& f) const
    {
        double sum = 0;
        for (Eigen::Index i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

//! n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

//! Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/*!
 * Gauss-Legendre rule on [a, b] after x = a + (b - a)(1 - cos v)/2.
 *
 * The map clusters nodes at both ends, so integrands with (x - a)^{-1/2} or
 * (x - a)^{1/2} endpoint behaviour become smooth in v.
 */
QuadratureRule cosine_mapped_rule(int n, double a, double b);

/*!
 * Rule over the allowed q interval |q| < kappa sin(theta), expressed in xi.
 *
 * Nodes are xi values with sin(xi) = sin(theta) sin(u), u Gauss-Legendre on
 * (-pi/2, pi/2); weights carry dq = kappa sin(theta) cos(u) du so that
 * sum w_i g(xi_i) approximates the integral of g(xi(q)) dq.
 */
QuadratureRule q_substitution_rule(int n, double theta, double kappa);

struct QuadratureResult
{
    double value = 0;
    double error_estimate = 0;
    int node_count = 0;
};

/*!
 * Integrate g(xi(q)) dq over |q| < kappa sin(theta) with sin(xi) = q / kappa.
 *
 * Node doubling on the substituted variable; falls back to adaptive bisection
 * in u. Throws ConvergenceError with the last two estimates on failure.
 */
QuadratureResult integrate_q_substituted(const std::function<double(double)>& integrand,
                                         double theta,
                                         double kappa,
                                         const QuadratureSpec& spec);

//---------------------------------------------------------------------------//
// Root finding on the torus
//---------------------------------------------------------------------------//

template<int N>
using AngleVector = Eigen::Matrix<double, N, 1>;

template<int N>
using AngleJacobian = Eigen::Matrix<double, N, N>;

template<int N>
struct Root
{
    AngleVector<N> angles;
    double jacobian_det = 0;  //!< |det dR/dangles| at the root
    bool degenerate = false;  //!< |det| below the residual tolerance
};

inline double wrap_angle(double a)
{
    constexpr double two_pi = 2 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0)
        a += two_pi;
    // fmod of a value just below 0 can round up to 2 pi
    return a >= two_pi ? 0.0 : a;
}

//! Signed distance between two angles, in (-pi, pi].
inline double angle_distance(double a, double b)
{
    return std::remainder(a - b, 2 * std::numbers::pi);
}

//! Central finite-difference Jacobian.
template<int N, class Residual>
AngleJacobian<N> central_jacobian(const Residual& residual, const AngleVector<N>& x, double step)
{
    AngleJacobian<N> jac;
    for (int j = 0; j < N; ++j)
    {
        AngleVector<N> hi = x, lo = x;
        hi[j] += step;
        lo[j] -= step;
        jac.col(j) = (residual(hi) - residual(lo)) / (2 * step);
    }
    return jac;
}

//! Central differences at step h and h/2, Richardson-extrapolated once.
template<int N, class Residual>
AngleJacobian<N> richardson_jacobian(const Residual& residual, const AngleVector<N>& x, double step)
{
    const AngleJacobian<N> coarse = central_jacobian<N>(residual, x, step);
    const AngleJacobian<N> fine = central_jacobian<N>(residual, x, step / 2);
    return (4 * fine - coarse) / 3;
}

/*!
 * All distinct roots of an N-dimensional residual on the torus [0, 2 pi)^N.
 *
 * Damped Newton iteration from a uniform start grid of start_grid_density
 * points per angle. Roots are deduplicated modulo 2 pi within dedupe_tol and
 * returned in lexicographic order. Jacobian determinants are evaluated with
 * Richardson-extrapolated central differences of the given step; roots with
 * |det| < residual_tol are flagged degenerate.
 */
template<int N, class Residual>
std::vector<Root<N>>
solve_system(const Residual& residual, const RootFindSpec& spec, double fd_step = 1e-6)
{
    spec.validate();
    using Vec = AngleVector<N>;
    constexpr double two_pi = 2 * std::numbers::pi;
    const int density = spec.start_grid_density;

    auto wrap = [](Vec v) {
        for (int i = 0; i < N; ++i)
            v[i] = wrap_angle(v[i]);
        return v;
    };
    auto norm = [](const Vec& v) { return v.template lpNorm<Eigen::Infinity>(); };

    std::vector<Vec> found;
    long total = 1;
    for (int i = 0; i < N; ++i)
        total *= density;

    for (long index = 0; index < total; ++index)
    {
        Vec x;
        long rest = index;
        for (int i = 0; i < N; ++i)
        {
            x[i] = (static_cast<double>(rest % density) + 0.5) * two_pi / density;
            rest /= density;
        }

        Vec f = residual(x);
        double fnorm = norm(f);
        bool converged = fnorm < spec.residual_tol;
        for (int it = 0; it < spec.max_iterations && !converged; ++it)
        {
            const AngleJacobian<N> jac = central_jacobian<N>(residual, x, fd_step);
            Vec step = jac.colPivHouseholderQr().solve(f);
            if (!step.allFinite())
                break;
            const double len = step.norm();
            if (len > 1.0)
                step *= 1.0 / len;

            // Backtrack until the residual decreases.
            double scale = 1.0;
            Vec trial = wrap(x - step);
            Vec ftrial = residual(trial);
            for (int halving = 0; halving < 6 && norm(ftrial) >= fnorm; ++halving)
            {
                scale *= 0.5;
                trial = wrap(x - scale * step);
                ftrial = residual(trial);
            }
            x = trial;
            f = ftrial;
            fnorm = norm(f);
            converged = fnorm < spec.residual_tol;
        }
        if (!converged)
            continue;

        // One polishing step, kept only if it helps.
        {
            const AngleJacobian<N> jac = central_jacobian<N>(residual, x, fd_step);
            const Vec step = jac.colPivHouseholderQr().solve(f);
            if (step.allFinite())
            {
                const Vec trial = wrap(x - step);
                if (norm(residual(trial)) < fnorm)
                    x = trial;
            }
        }

        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Vec& y) {
            for (int i = 0; i < N; ++i)
                if (std::abs(angle_distance(x[i], y[i])) >= spec.dedupe_tol)
                    return false;
            return true;
        });
        if (!duplicate)
            found.push_back(x);
    }

    std::sort(found.begin(), found.end(), [](const Vec& a, const Vec& b) {
        return std::lexicographical_compare(a.data(), a.data() + N, b.data(), b.data() + N);
    });

    std::vector<Root<N>> roots;
    roots.reserve(found.size());
    for (const Vec& x : found)
    {
        Root<N> root;
        root.angles = x;
        root.jacobian_det = std::abs(richardson_jacobian<N>(residual, x, fd_step).determinant());
        root.degenerate = root.jacobian_det < spec.residual_tol;
        roots.push_back(root);
    }
    return roots;
}
} // namespace vortex
