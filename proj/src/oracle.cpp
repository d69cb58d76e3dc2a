#include "vortex/oracle.hpp"

#include <algorithm>
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

//! Frame of the second final particle: (x', -y', -z').
Eigen::Matrix3d reversed_frame(double theta)
{
    Eigen::Matrix3d f = tilted_frame<double>(theta);
    f.col(1) *= -1;
    f.col(2) *= -1;
    return f;
}
} // namespace

double paraxial_scale(const CollisionGeometry& geom, const OracleOptions& options)
{
    return options.paraxial_factor * std::max({geom.initial.kappa, geom.kappa1, geom.kappa2});
}

Eigen::Vector3d conservation_residual(const CollisionGeometry& geom,
                                      double phi,
                                      double phi1,
                                      double phi2,
                                      const OracleOptions& options)
{
    const double big_k = paraxial_scale(geom, options);
    const double kz = geom.initial.k_z;
    const Eigen::Matrix3d frame1 = tilted_frame<double>(geom.theta);
    const Eigen::Matrix3d frame2 = reversed_frame(geom.theta);

    // The O(K) longitudinal parts cancel down to q; summing them first keeps
    // the angle-dependent transverse parts free of K-sized rounding.
    const Eigen::Vector3d longitudinal = Eigen::Vector3d(0, 0, kz) + Eigen::Vector3d(0, 0, -kz)
                                         - frame1.col(2) * ((big_k + geom.q) / 2)
                                         - frame2.col(2) * ((big_k - geom.q) / 2);
    const Eigen::Vector3d k = cone_momentum<double>(geom.initial.kappa, 0.0, phi, 0.0);
    const Eigen::Vector3d k1 = frame1.leftCols<2>()
                               * Eigen::Vector2d(geom.kappa1 * std::cos(phi1), geom.kappa1 * std::sin(phi1));
    const Eigen::Vector3d k2 = frame2.leftCols<2>()
                               * Eigen::Vector2d(geom.kappa2 * std::cos(phi2), geom.kappa2 * std::sin(phi2));
    const Eigen::Vector3d mismatch = longitudinal + (k - k1 - k2);
    if (options.event_rotation == 0)
        return mismatch;
    return Eigen::AngleAxisd(options.event_rotation, Eigen::Vector3d::UnitZ()) * mismatch;
}

Complex solution_phase(int m, int m1, int m2, double phi, double phi1, double phi2)
{
    return i_power(m1 + m2 - m) * unit_phase(m * phi - m1 * phi1 - m2 * phi2);
}

OracleResult oracle_amplitude(const CollisionGeometry& geom,
                              int m,
                              int m1,
                              int m2,
                              const RootFindSpec& spec,
                              const AmplitudeModel& model,
                              const OracleOptions& options)
{
    geom.validate();
    const double kappa = geom.initial.kappa;

    // Residual normalized by kappa; determinants are rescaled by kappa^3 below.
    auto residual = [&](const AngleVector<3>& a) -> AngleVector<3> {
        return conservation_residual(geom, a[0], a[1], a[2], options) / kappa;
    };
    const auto roots = solve_system<3>(residual, spec, options.fd_step);

    OracleResult result;
    std::vector<std::size_t> degenerate;
    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < roots.size(); ++i)
    {
        const auto& root = roots[i];
        if (root.degenerate)
        {
            degenerate.push_back(i);
            continue;
        }
        ConstraintSolution s{root.angles[0], root.angles[1], root.angles[2],
                             root.jacobian_det * kappa * kappa * kappa};
        sum += solution_phase(m, m1, m2, s.phi, s.phi1, s.phi2) / s.jacobian_det;
        result.solutions.push_back(s);
    }
    if (!degenerate.empty())
    {
        std::ostringstream msg;
        msg << "oracle_amplitude: " << degenerate.size()
            << " root(s) with singular Jacobian (configuration at the stripe boundary)";
        throw DegenerateError(msg.str());
    }

    result.amplitude = std::sqrt(kappa * geom.kappa1 * geom.kappa2) * model.m0 * sum;
    return result;
}

Complex single_twisted_oracle(const TwistedState& state,
                              const Eigen::Vector2d& k1,
                              const Eigen::Vector2d& k2,
                              const AmplitudeModel& model,
                              double tolerance)
{
    // The transverse delta fixes k = k1 + k2; the radial delta of the weight
    // then requires |k1 + k2| on the cone.
    const Eigen::Vector2d k = k1 + k2;
    const double modulus = k.norm();
    const FourierWeight w = fourier_weight(state.kappa, state.m, modulus, std::atan2(k.y(), k.x()), tolerance);
    if (!w.on_cone)
        return {0.0, 0.0};
    return w.phase * model.m0 / ((2 * pi) * (2 * pi));
}

std::vector<SingleTwistedRoot> single_twisted_constraint_solve(double kappa,
                                                               double k1_mod,
                                                               double k2_mod,
                                                               double phi2,
                                                               const RootFindSpec& spec)
{
    const Eigen::Vector2d k2 = k2_mod * Eigen::Vector2d(std::cos(phi2), std::sin(phi2));
    auto residual = [&](const AngleVector<2>& a) -> AngleVector<2> {
        const Eigen::Vector2d k1 = k1_mod * Eigen::Vector2d(std::cos(a[0]), std::sin(a[0]));
        const Eigen::Vector2d k = kappa * Eigen::Vector2d(std::cos(a[1]), std::sin(a[1]));
        return (k1 + k2 - k) / kappa;
    };
    std::vector<SingleTwistedRoot> out;
    for (const auto& root : solve_system<2>(residual, spec))
        out.push_back({root.angles[0], root.angles[1]});
    return out;
}

//---------------------------------------------------------------------------//

double uniform_real(std::mt19937_64& rng, double lo, double hi)
{
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(rng() % span);
}

ComparisonSample draw_comparison_sample(std::mt19937_64& rng)
{
    ComparisonSample s;
    const double kappa = uniform_real(rng, 0.5, 2.0);
    s.geom.theta = uniform_real(rng, 0.05, 1.2);
    const double xi = uniform_real(rng, -0.9, 0.9) * s.geom.theta;
    s.geom.q = kappa * std::sin(xi);
    const double kt = kappa * std::cos(xi);
    for (;;)
    {
        const double k1 = uniform_real(rng, 0.3, 1.7) * kt;
        const double k2 = uniform_real(rng, std::abs(kt - k1), kt + k1);
        const double area = heron_area(kt, k1, k2);
        if (area > 0.05 * kt * kt)
        {
            s.geom.kappa1 = k1;
            s.geom.kappa2 = k2;
            break;
        }
    }
    s.m = uniform_int(rng, -8, 8);
    s.m1 = uniform_int(rng, -8, 8);
    s.m2 = uniform_int(rng, -8, 8);
    s.geom.initial = TwistedState::on_shell(kappa, s.m, 50 * kappa);
    return s;
}

ComparisonSample reference_sample()
{
    ComparisonSample s;
    s.geom.theta = 0.2;
    s.geom.q = 0.3 * std::sin(0.2);
    s.geom.kappa1 = 0.9;
    s.geom.kappa2 = 0.7;
    s.m = 5;
    s.m1 = 6;
    s.m2 = 1;
    s.geom.initial = TwistedState::on_shell(1.0, s.m, 100.0);
    return s;
}

ComparisonReport compare_with_closed_form(const std::vector<ComparisonSample>& samples,
                                          const RootFindSpec& spec,
                                          const OracleOptions& options,
                                          std::size_t k_check_count)
{
    ComparisonReport report;
    const ComparisonSample ref = reference_sample();
    report.reference_ratio = oracle_amplitude(ref.geom, ref.m, ref.m1, ref.m2, spec, {}, options).amplitude
                             / reduced_triple_amplitude(ref.geom, ref.m, ref.m1, ref.m2).value;

    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const ComparisonSample& s = samples[i];
        SampleComparison c;
        c.index = i;
        try
        {
            const OracleResult o = oracle_amplitude(s.geom, s.m, s.m1, s.m2, spec, {}, options);
            c.oracle = o.amplitude;
            c.solution_count = o.solutions.size();
        }
        catch (const DegenerateError&)
        {
            report.degenerate_samples.push_back(i);
            continue;
        }
        c.closed_form = reduced_triple_amplitude(s.geom, s.m, s.m1, s.m2).value;
        if (c.closed_form == Complex{0.0, 0.0})
            continue;
        c.ratio = c.oracle / c.closed_form / report.reference_ratio;
        report.samples.push_back(c);
    }

    if (report.samples.empty())
        return report;

    Complex mean{0.0, 0.0};
    for (const auto& c : report.samples)
        mean += c.ratio;
    mean /= static_cast<double>(report.samples.size());
    report.mean_ratio = mean;

    double var = 0;
    for (auto& c : report.samples)
    {
        c.relative_deviation = std::abs(c.ratio - mean) / std::abs(mean);
        var += c.relative_deviation * c.relative_deviation;
        report.max_relative_deviation = std::max(report.max_relative_deviation, c.relative_deviation);
    }
    report.dispersion = std::sqrt(var / static_cast<double>(report.samples.size()));

    std::vector<double> thetas;
    for (const auto& c : report.samples)
        thetas.push_back(samples[c.index].geom.theta);
    std::vector<double> sorted = thetas;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    double low = 0, high = 0;
    std::size_t n_low = 0, n_high = 0;
    for (std::size_t i = 0; i < report.samples.size(); ++i)
    {
        if (thetas[i] < median)
            low += report.samples[i].relative_deviation, ++n_low;
        else
            high += report.samples[i].relative_deviation, ++n_high;
    }
    report.low_theta_deviation = n_low ? low / n_low : 0;
    report.high_theta_deviation = n_high ? high / n_high : 0;

    OracleOptions doubled = options;
    doubled.paraxial_factor *= 2;
    for (std::size_t i = 0; i < std::min(k_check_count, report.samples.size()); ++i)
    {
        const auto& c = report.samples[i];
        const auto& s = samples[c.index];
        const Complex again = oracle_amplitude(s.geom, s.m, s.m1, s.m2, spec, {}, doubled).amplitude;
        report.k_doubling_change = std::max(report.k_doubling_change, std::abs(again - c.oracle) / std::abs(c.oracle));
    }
    return report;
}
} // namespace vortex
