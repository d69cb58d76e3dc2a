#include "vortex/numerics.hpp"

#include <array>
#include <limits>
#include <sstream>
#include <utility>

namespace vortex
{
namespace
{
constexpr double pi = std::numbers::pi;
} // namespace

//---------------------------------------------------------------------------//
// Specs
//---------------------------------------------------------------------------//

void QuadratureSpec::validate() const
{
    if (node_count < 2)
        throw DomainError("quadrature node_count must be >= 2");
    if (!(abs_tol >= 0) || !(rel_tol >= 0))
        throw DomainError("quadrature tolerances must be >= 0");
    if (!(abs_tol > 0) && !(rel_tol > 0))
        throw DomainError("at least one of abs_tol, rel_tol must be > 0");
    if (max_refinements < 1)
        throw DomainError("quadrature max_refinements must be >= 1");
}

bool QuadratureSpec::converged(double previous, double current) const
{
    return std::abs(current - previous) <= std::max(abs_tol, rel_tol * std::abs(current));
}

void RootFindSpec::validate() const
{
    if (!(residual_tol > 0))
        throw DomainError("root-find residual_tol must be > 0");
    if (max_iterations < 1)
        throw DomainError("root-find max_iterations must be >= 1");
    if (start_grid_density < 1)
        throw DomainError("root-find start_grid_density must be >= 1");
    if (!(dedupe_tol > residual_tol))
        throw DomainError("root-find dedupe_tol must exceed residual_tol");
}

//---------------------------------------------------------------------------//
// Bessel
//---------------------------------------------------------------------------//

namespace
{
double bessel_series(int order, double x)
{
    const double half = x / 2;
    const double quarter_sq = half * half;
    double term = std::exp(order * std::log(half) - std::lgamma(order + 1.0));
    double sum = term;
    for (int k = 1; k < 60; ++k)
    {
        term *= -quarter_sq / (k * static_cast<double>(k + order));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum))
            break;
    }
    return sum;
}

double bessel_miller(int order, double x)
{
    const double scale = std::max<double>(order, x);
    int start = static_cast<int>(scale + 30 + 6 * std::sqrt(scale));
    start += start % 2;

    constexpr double big = 1e250;
    double next = 0;      // J_{k+1}
    double current = 1e-30;  // J_k, arbitrary seed
    double even_sum = 0;
    double result = 0;
    for (int k = start; k > 0; --k)
    {
        const double prev = (2.0 * k / x) * current - next;
        next = current;
        current = prev;  // now J_{k-1}
        const int index = k - 1;
        if (index == order)
            result = current;
        if (index > 0 && index % 2 == 0)
            even_sum += current;
        if (std::abs(current) > big)
        {
            current /= big;
            next /= big;
            even_sum /= big;
            result /= big;
        }
    }
    const double norm = current + 2 * even_sum;
    return result / norm;
}
} // namespace

double bessel_j(int order, double x)
{
    if (order < 0 || order > kMaxBesselOrder)
        throw RangeError("bessel_j: order " + std::to_string(order) + " outside [0, 200]");
    if (!std::isfinite(x) || x < 0 || x > kMaxBesselArgument)
        throw RangeError("bessel_j: argument outside [0, 1e4]");
    if (x == 0)
        return order == 0 ? 1.0 : 0.0;
    if (x <= 2)
        return bessel_series(order, x);
    return bessel_miller(order, x);
}

double bessel_j_signed(int order, double x)
{
    const double value = bessel_j(std::abs(order), x);
    return (order < 0 && (order % 2 != 0)) ? -value : value;
}

//---------------------------------------------------------------------------//
// Heron
//---------------------------------------------------------------------------//

double heron_area(double a, double b, double c)
{
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || a < 0 || b < 0 || c < 0)
        throw DomainError("heron_area: sides must be finite and non-negative");

    std::array<double, 3> s{a, b, c};
    std::sort(s.begin(), s.end(), std::greater<>());
    const double x = s[0], y = s[1], z = s[2];

    const double deficit = z - (x - y);
    if (deficit < 0)
        return std::numeric_limits<double>::quiet_NaN();
    if (deficit == 0)
        return 0.0;
    const double product = (x + (y + z)) * deficit * (z + (x - y)) * (x + (y - z));
    return 0.25 * std::sqrt(product);
}

//---------------------------------------------------------------------------//
// Quadrature rules
//---------------------------------------------------------------------------//

QuadratureRule gauss_legendre(int n)
{
    if (n < 1)
        throw DomainError("gauss_legendre: n must be >= 1");
    QuadratureRule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i)
    {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Re-evaluate the derivative at the converged node for the weight.
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k)
        {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    if (n == 1)
        rule.weights[0] = 2.0;
    return rule;
}

QuadratureRule gauss_legendre(int n, double a, double b)
{
    QuadratureRule rule = gauss_legendre(n);
    const double mid = (a + b) / 2, half = (b - a) / 2;
    rule.nodes = mid + half * rule.nodes;
    rule.weights *= half;
    return rule;
}

QuadratureRule cosine_mapped_rule(int n, double a, double b)
{
    const QuadratureRule base = gauss_legendre(n, 0.0, pi);
    const double half = (b - a) / 2;
    QuadratureRule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    // 1 - cos v = 2 sin^2(v/2) avoids cancellation near v = 0.
    const Eigen::ArrayXd s = (base.nodes / 2).sin();
    rule.nodes = a + (b - a) * s.square();
    rule.weights = base.weights * half * base.nodes.sin();
    return rule;
}

QuadratureRule q_substitution_rule(int n, double theta, double kappa)
{
    const QuadratureRule base = gauss_legendre(n, -pi / 2, pi / 2);
    const double sin_theta = std::sin(theta);
    QuadratureRule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    rule.nodes = (sin_theta * base.nodes.sin()).asin();
    rule.weights = base.weights * kappa * sin_theta * base.nodes.cos();
    return rule;
}

//---------------------------------------------------------------------------//
// q integration
//---------------------------------------------------------------------------//

namespace
{
struct SubstitutedIntegrand
{
    const std::function<double(double)>& g;
    double sin_theta;
    double kappa;

    double operator()(double u) const
    {
        const double xi = std::asin(sin_theta * std::sin(u));
        return kappa * sin_theta * std::cos(u) * g(xi);
    }
};

double gl_panel(const SubstitutedIntegrand& f, const QuadratureRule& unit, double a, double b)
{
    const double mid = (a + b) / 2, half = (b - a) / 2;
    double sum = 0;
    for (Eigen::Index i = 0; i < unit.size(); ++i)
        sum += unit.weights[i] * f(mid + half * unit.nodes[i]);
    return sum * half;
}

bool bisect(const SubstitutedIntegrand& f,
            const QuadratureRule& unit,
            double a,
            double b,
            double whole,
            double abs_tol,
            double rel_tol,
            int depth,
            double& out)
{
    const double mid = (a + b) / 2;
    const double left = gl_panel(f, unit, a, mid);
    const double right = gl_panel(f, unit, mid, b);
    const double refined = left + right;
    if (std::abs(refined - whole) <= std::max(abs_tol, rel_tol * std::abs(refined)))
    {
        out = refined;
        return true;
    }
    if (depth == 0)
    {
        out = refined;
        return false;
    }
    double l = 0, r = 0;
    const bool ok_left = bisect(f, unit, a, mid, left, abs_tol / 2, rel_tol, depth - 1, l);
    const bool ok_right = bisect(f, unit, mid, b, right, abs_tol / 2, rel_tol, depth - 1, r);
    out = l + r;
    return ok_left && ok_right;
}
} // namespace

QuadratureResult integrate_q_substituted(const std::function<double(double)>& integrand,
                                         double theta,
                                         double kappa,
                                         const QuadratureSpec& spec)
{
    spec.validate();
    if (!(theta > 0 && theta < pi / 2))
        throw DomainError("integrate_q_substituted: theta must lie in (0, pi/2)");
    if (!(kappa > 0))
        throw DomainError("integrate_q_substituted: kappa must be > 0");

    const SubstitutedIntegrand f{integrand, std::sin(theta), kappa};

    int n = spec.node_count;
    double previous = gl_panel(f, gauss_legendre(n), -pi / 2, pi / 2);
    double current = previous;
    for (int r = 0; r < spec.max_refinements; ++r)
    {
        n *= 2;
        current = gl_panel(f, gauss_legendre(n), -pi / 2, pi / 2);
        if (std::isfinite(current) && spec.converged(previous, current))
            return {current, std::abs(current - previous), n};
        previous = current;
    }

    // Adaptive bisection in u with the base rule on each panel.
    const QuadratureRule unit = gauss_legendre(spec.node_count);
    double adaptive = 0;
    const double whole = gl_panel(f, unit, -pi / 2, pi / 2);
    if (bisect(f, unit, -pi / 2, pi / 2, whole, spec.abs_tol, spec.rel_tol,
               spec.max_refinements + 12, adaptive)
        && std::isfinite(adaptive))
    {
        return {adaptive, std::abs(adaptive - current), -1};
    }

    std::ostringstream msg;
    msg << "integrate_q_substituted: no convergence (estimates " << current << ", " << adaptive
        << ")";
    throw ConvergenceError(msg.str(), current, adaptive);
}
} // namespace vortex
