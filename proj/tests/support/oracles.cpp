#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace vortex::test
{
namespace
{
constexpr double pi = std::numbers::pi;
} // namespace

double series_bessel(int m, double x)
{
    using big = boost::multiprecision::cpp_bin_float_100;
    const big half = big(x) / 2;
    const big half_sq = half * half;
    big term = 1;
    for (int i = 1; i <= m; ++i)
        term *= half / i;
    big sum = term;
    const big floor = big("1e-40");
    for (int k = 1; k < 2000; ++k)
    {
        term *= -half_sq / (big(k) * big(k + m));
        sum += term;
        if (abs(term) < floor && k > x)
            break;
    }
    return static_cast<double>(sum);
}

//---------------------------------------------------------------------------//

namespace
{
const double kronrod_x[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                             0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                             0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                             0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kronrod_w[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                             0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                             0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                             0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double gauss_w[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double gk_step(const std::function<double(double)>& f, double a, double b, double& err)
{
    const double c = (a + b) / 2, h = (b - a) / 2;
    const double fc = f(c);
    double k = kronrod_w[7] * fc, g = gauss_w[3] * fc;
    for (int i = 0; i < 7; ++i)
    {
        const double s = f(c - h * kronrod_x[i]) + f(c + h * kronrod_x[i]);
        k += kronrod_w[i] * s;
        if (i % 2 == 1)
            g += gauss_w[i / 2] * s;
    }
    err = std::abs(k - g) * h;
    return k * h;
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth)
{
    double err = 0;
    const double v = gk_step(f, a, b, err);
    if (err <= tol || depth > 40)
        return v;
    const double c = (a + b) / 2;
    return adapt(f, a, c, tol / 2, depth + 1) + adapt(f, c, b, tol / 2, depth + 1);
}
} // namespace

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double tol)
{
    return adapt(f, a, b, tol, 0);
}

//---------------------------------------------------------------------------//

TriangleSeed triangle_from_angles(double kappa_tilde, double delta1, double delta2)
{
    TriangleSeed t;
    t.kappa_tilde = kappa_tilde;
    t.delta1 = delta1;
    t.delta2 = delta2;
    const double apex = std::sin(delta1 + delta2);
    // kappa1 lies opposite delta2, kappa2 opposite delta1.
    t.kappa1 = kappa_tilde * std::sin(delta2) / apex;
    t.kappa2 = kappa_tilde * std::sin(delta1) / apex;
    t.area = 0.5 * kappa_tilde * t.kappa1 * std::sin(delta1);
    return t;
}

//---------------------------------------------------------------------------//

std::vector<Eigen::Vector2d> scan_constraint_roots(const CollisionGeometry& geom, int grid)
{
    const double kappa = geom.initial.kappa;
    const double st = std::sin(geom.theta), ct = std::cos(geom.theta);
    // z' component of k(phi) = kappa (cos phi, sin phi, 0) is kappa cos(phi) sin(theta) (x' = (cos, 0, -sin)).
    // The final particles carry q along z'; transverse parts lie in the x'-y' plane.
    auto fz = [&](double phi) { return kappa * std::cos(phi) * st - geom.q; };
    auto transverse = [&](double phi) {
        // Components of k(phi) along x' = (cos t, 0, -sin t) and y' = (0, 1, 0).
        return Eigen::Vector2d(kappa * std::cos(phi) * ct, kappa * std::sin(phi));
    };

    std::vector<double> phis;
    for (int i = 0; i < grid; ++i)
    {
        double a = 2 * pi * i / grid, b = 2 * pi * (i + 1) / grid;
        double fa = fz(a), fb = fz(b);
        if ((fa < 0) == (fb < 0))
            continue;
        for (int it = 0; it < 200; ++it)
        {
            const double c = (a + b) / 2;
            if ((fz(c) < 0) == (fa < 0))
                a = c, fa = fz(c);
            else
                b = c;
        }
        phis.push_back((a + b) / 2);
    }

    std::vector<Eigen::Vector2d> roots;
    for (double phi : phis)
    {
        const Eigen::Vector2d big_k = transverse(phi);
        auto g = [&](double phi1) {
            return (big_k - geom.kappa1 * Eigen::Vector2d(std::cos(phi1), std::sin(phi1))).norm() - geom.kappa2;
        };
        for (int i = 0; i < grid; ++i)
        {
            double a = 2 * pi * i / grid, b = 2 * pi * (i + 1) / grid;
            double ga = g(a), gb = g(b);
            if ((ga < 0) == (gb < 0))
                continue;
            for (int it = 0; it < 200; ++it)
            {
                const double c = (a + b) / 2;
                if ((g(c) < 0) == (ga < 0))
                    a = c, ga = g(c);
                else
                    b = c;
            }
            roots.emplace_back(phi, (a + b) / 2);
        }
    }
    return roots;
}
} // namespace vortex::test
