#include "vortex/wavepackets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "vortex/errors.hpp"

namespace vortex
{
namespace
{
constexpr double pi = std::numbers::pi;
constexpr double support_width = 5;  // in units of sigma

//! Breakpoints strictly inside (lo, hi), with the ends, sorted.
std::vector<double> panel_edges(double lo, double hi, std::vector<double> cuts)
{
    std::vector<double> edges{lo, hi};
    const double guard = 1e-12 * (hi - lo);
    for (double c : cuts)
        if (c > lo + guard && c < hi - guard)
            edges.push_back(c);
    std::sort(edges.begin(), edges.end());
    return edges;
}

//! Rule on [0, 1], rescaled to each panel.
struct UnitRule
{
    QuadratureRule base;

    template<class F>
    void for_each(double a, double b, F&& f) const
    {
        const double width = b - a;
        for (Eigen::Index i = 0; i < base.size(); ++i)
            f(a + width * base.nodes[i], width * base.weights[i]);
    }
};

//! Triangle angle opposite kappa2 at the kappa_tilde-kappa1 vertex.
double opposite_angle(double kt, double k1, double k2)
{
    const double c = (kt * kt + k1 * k1 - k2 * k2) / (2 * kt * k1);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

//! w cos(m x) into row r and sign * w sin(m x) into row r + offset, m = lo..lo+cols-1.
void fill_harmonics(RowMatrix& out, Eigen::Index r, Eigen::Index offset, int lo, double x, double w, double sign)
{
    const Complex step{std::cos(x), std::sin(x)};
    Complex value = w * Complex{std::cos(lo * x), std::sin(lo * x)};
    double* c = out.row(r).data();
    double* s = out.row(r + offset).data();
    for (Eigen::Index k = 0; k < out.cols(); ++k)
    {
        c[k] = value.real();
        s[k] = sign * value.imag();
        value *= step;
    }
}

/*!
 * Accumulates sum_j w_j cos(m phi*_j - (m1 - m2) phi~*_j) cos(m1 delta1_j + m2 delta2_j)
 * for every (m1, m2).
 *
 * Nodes of one kappa share the azimuthal factor, so each such run reduces to
 * one real GEMM through cos(a + b) = cos a cos b - sin a sin b.
 */
class SliceAccumulator
{
  public:
    SliceAccumulator(int m, IntRange r1, IntRange r2)
        : m_(m), r1_(r1), r2_(r2), out_(Eigen::MatrixXd::Zero(r1.size(), r2.size()))
    {
    }

    void add(const SmearingNode& node)
    {
        if (!run_.empty()
            && (node.phi_star != run_.front().phi_star || node.phi_tilde_star != run_.front().phi_tilde_star))
            flush();
        run_.push_back(node);
    }

    Eigen::MatrixXd finish()
    {
        flush();
        return out_;
    }

  private:
    void flush()
    {
        if (run_.empty())
            return;
        const auto n = static_cast<Eigen::Index>(run_.size());
        left_.resize(2 * n, r1_.size());
        right_.resize(2 * n, r2_.size());
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const SmearingNode& node = run_[static_cast<std::size_t>(j)];
            fill_harmonics(left_, j, n, r1_.lo, node.delta1, node.weight, 1.0);
            fill_harmonics(right_, j, n, r2_.lo, node.delta2, 1.0, -1.0);
        }
        inner_.noalias() = left_.transpose() * right_;

        const SmearingNode& head = run_.front();
        for (Eigen::Index j = 0; j < out_.cols(); ++j)
            for (Eigen::Index i = 0; i < out_.rows(); ++i)
            {
                const int d = (r1_.lo + static_cast<int>(i)) - (r2_.lo + static_cast<int>(j));
                out_(i, j) += std::cos(m_ * head.phi_star - d * head.phi_tilde_star) * inner_(i, j);
            }
        run_.clear();
    }

    int m_;
    IntRange r1_, r2_;
    Eigen::MatrixXd out_;
    Eigen::MatrixXd inner_;
    RowMatrix left_, right_;
    std::vector<SmearingNode> run_;
};

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}
} // namespace

//---------------------------------------------------------------------------//

WavePacketProfile::WavePacketProfile(double kappa0, double sigma, ProfileShape shape)
    : kappa0_(kappa0), sigma_(sigma), shape_(shape)
{
    if (!(kappa0 > 0) || !(sigma > 0))
        throw DomainError("WavePacketProfile: kappa0 and sigma must be > 0");
    lo_ = std::max(0.0, kappa0 - support_width * sigma);
    hi_ = kappa0 + support_width * sigma;
    // int exp(-(k - k0)^2 / sigma^2) over [lo, hi]
    const double norm2 = sigma * std::sqrt(pi) / 2
                         * (std::erf((hi_ - kappa0) / sigma) - std::erf((lo_ - kappa0) / sigma));
    norm_ = 1 / std::sqrt(norm2);
}

double WavePacketProfile::value(double kappa) const
{
    if (!(kappa > 0) || kappa < lo_ || kappa > hi_)
        return 0;
    const double t = (kappa - kappa0_) / sigma_;
    return norm_ * std::exp(-0.5 * t * t);
}

PacketProfiles PacketProfiles::from_peaks(double kappa0, double kappa01, double kappa02, double sigma_rel)
{
    return {WavePacketProfile(kappa0, sigma_rel * kappa0),
            WavePacketProfile(kappa01, sigma_rel * kappa01),
            WavePacketProfile(kappa02, sigma_rel * kappa02)};
}

//---------------------------------------------------------------------------//

namespace
{
/*!
 * Calls visit(node) for every node at fixed q, grouped by kappa.
 *
 * kappa and kappa1 panels use cosine-mapped rules for their square-root
 * edges; delta1 is smooth up to its limits and uses plain Gauss-Legendre.
 */
template<class Visit>
void visit_smearing_nodes(const PacketProfiles& profiles, double theta, double q, int node_count, Visit&& visit)
{
    if (node_count < 1)
        throw DomainError("smearing_nodes: node_count must be >= 1");
    if (!(theta > 0 && theta < pi / 2))
        throw DomainError("smearing_nodes: theta must lie in (0, pi/2)");

    const WavePacketProfile& f = profiles.initial;
    const WavePacketProfile& f1 = profiles.first;
    const WavePacketProfile& f2 = profiles.second;
    const double a1 = f1.support_lo(), b1 = f1.support_hi();
    const double a2 = f2.support_lo(), b2 = f2.support_hi();
    const double sin_theta = std::sin(theta);
    const double tan_theta = std::tan(theta);

    const double lo = std::max(f.support_lo(), std::abs(q) / sin_theta);
    const double hi = f.support_hi();
    if (!(lo < hi))
        return;

    std::vector<double> cuts;
    for (double x : {a1, b1})
        for (double y : {a2, b2})
            for (double kt : {x + y, std::abs(x - y)})
                cuts.push_back(std::sqrt(kt * kt + q * q));

    const UnitRule rule{cosine_mapped_rule(node_count, 0.0, 1.0)};
    const UnitRule rule_delta{gauss_legendre(node_count, 0.0, 1.0)};
    const std::vector<double> k_edges = panel_edges(lo, hi, cuts);
    for (std::size_t p = 0; p + 1 < k_edges.size(); ++p)
    {
        rule.for_each(k_edges[p], k_edges[p + 1], [&](double kappa, double rk) {
            const double fk = f(kappa);
            if (fk == 0)
                return;
            const double xi = std::asin(std::clamp(q / kappa, -1.0, 1.0));
            const double root_sq = std::sin(theta - xi) * std::sin(theta + xi);
            if (!(root_sq > 0))
                return;
            const double kt = kappa * std::cos(xi);
            const double phi_star = std::acos(std::clamp(q / (kappa * sin_theta), -1.0, 1.0));
            const double phi_tilde = std::acos(std::clamp(std::tan(xi) / tan_theta, -1.0, 1.0));
            const double wk = rk * fk / (std::sqrt(kappa) * std::sqrt(root_sq));

            const double lo1 = std::max({a1, kt - b2, a2 - kt, 0.0});
            const double hi1 = std::min(b1, kt + b2);
            if (!(lo1 < hi1))
                return;
            const std::vector<double> k1_edges = panel_edges(lo1, hi1, {kt - a2, kt + a2, b2 - kt});
            for (std::size_t p1 = 0; p1 + 1 < k1_edges.size(); ++p1)
            {
                rule.for_each(k1_edges[p1], k1_edges[p1 + 1], [&](double k1, double r1) {
                    const double f1k = f1(k1);
                    if (f1k == 0)
                        return;
                    const double w1 = wk * r1 * f1k * std::sqrt(k1);

                    const double d_lo = a2 > std::abs(kt - k1) ? opposite_angle(kt, k1, a2) : 0.0;
                    const double d_hi = b2 < kt + k1 ? opposite_angle(kt, k1, b2) : pi;
                    if (!(d_lo < d_hi))
                        return;
                    rule_delta.for_each(d_lo, d_hi, [&](double delta1, double rd) {
                        const double x = kt - k1 * std::cos(delta1);
                        const double y = k1 * std::sin(delta1);
                        const double k2 = std::hypot(x, y);
                        const double f2k = f2(k2);
                        if (f2k == 0)
                            return;
                        visit(SmearingNode{w1 * rd * f2k * 4 / std::sqrt(k2), phi_star, phi_tilde, delta1,
                                           std::atan2(y, x)});
                    });
                });
            }
        });
    }
}
} // namespace

std::vector<SmearingNode>
smearing_nodes(const PacketProfiles& profiles, double theta, double q, int node_count)
{
    std::vector<SmearingNode> out;
    visit_smearing_nodes(profiles, theta, q, node_count, [&](const SmearingNode& n) { out.push_back(n); });
    return out;
}


//---------------------------------------------------------------------------//

namespace
{
double smeared_sum(const PacketProfiles& profiles, double theta, double q, int n, int m, int m1, int m2)
{
    double sum = 0;
    visit_smearing_nodes(profiles, theta, q, n, [&](const SmearingNode& s) {
        sum += s.weight * std::cos(m * s.phi_star - (m1 - m2) * s.phi_tilde_star)
               * std::cos(m1 * s.delta1 + m2 * s.delta2);
    });
    return sum;
}
} // namespace

Complex smeared_amplitude(const PacketProfiles& profiles,
                          const CollisionGeometry& geom_template,
                          double q,
                          int m,
                          int m1,
                          int m2,
                          const QuadratureSpec& quad,
                          const AmplitudeModel& model)
{
    quad.validate();
    const double theta = geom_template.theta;
    int n = quad.node_count;
    double previous = smeared_sum(profiles, theta, q, n, m, m1, m2);
    double current = previous;
    for (int r = 0; r < quad.max_refinements; ++r)
    {
        if (r > 0)
            previous = current;
        n *= 2;
        current = smeared_sum(profiles, theta, q, n, m, m1, m2);
        if (quad.converged(previous, current))
            return i_power(m1 + m2 - m) * current * model.m0;
    }
    std::ostringstream msg;
    msg << "smeared_amplitude: no convergence at " << n << " nodes per panel";
    throw ConvergenceError(msg.str(), previous, current);
}

//---------------------------------------------------------------------------//

QuadratureSpec default_map_quadrature()
{
    QuadratureSpec spec;
    spec.node_count = 24;
    spec.abs_tol = 1e-6;
    spec.rel_tol = 1e-4;
    spec.max_refinements = 1;
    return spec;
}

QuadratureRule map_q_rule(const PacketProfiles& profiles, double theta, int q_node_count)
{
    if (q_node_count < 2 || q_node_count % 2 != 0)
        throw DomainError("map_q_rule: q_node_count must be even and >= 2");
    const double q_max = profiles.initial.support_hi() * std::sin(theta);
    const QuadratureRule lower = gauss_legendre(q_node_count / 2, -q_max, 0.0);
    const QuadratureRule upper = gauss_legendre(q_node_count / 2, 0.0, q_max);
    QuadratureRule rule{Eigen::ArrayXd(q_node_count), Eigen::ArrayXd(q_node_count)};
    rule.nodes << lower.nodes, upper.nodes;
    rule.weights << lower.weights, upper.weights;
    return rule;
}

Eigen::MatrixXd raw_intensity(const PacketProfiles& profiles,
                              double theta,
                              int m,
                              IntRange m1_range,
                              IntRange m2_range,
                              int node_count,
                              int q_node_count,
                              unsigned threads)
{
    if (m1_range.size() < 1 || m2_range.size() < 1)
        throw DomainError("raw_intensity: empty m1 or m2 range");
    const QuadratureRule rule = map_q_rule(profiles, theta, q_node_count);

    // Per-node slices land in fixed slots and are summed in order, so the
    // result does not depend on the thread count.
    std::vector<Eigen::MatrixXd> slices(static_cast<std::size_t>(rule.size()));
    auto work = [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i)
        {
            SliceAccumulator acc(m, m1_range, m2_range);
            visit_smearing_nodes(profiles, theta, rule.nodes[i], node_count,
                                 [&](const SmearingNode& n) { acc.add(n); });
            slices[static_cast<std::size_t>(i)] = rule.weights[i] * acc.finish().cwiseAbs2();
        }
    };

    const auto count = static_cast<Eigen::Index>(std::min<std::size_t>(threads, slices.size()));
    if (count <= 1)
    {
        work(0, rule.size());
    }
    else
    {
        std::vector<std::thread> pool;
        for (Eigen::Index t = 0; t < count; ++t)
            pool.emplace_back(work, t * rule.size() / count, (t + 1) * rule.size() / count);
        for (auto& th : pool)
            th.join();
    }

    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m1_range.size(), m2_range.size());
    for (const auto& s : slices)
        total += s;
    return total;
}

IntensityMap intensity_map(const PacketProfiles& profiles,
                           const CollisionGeometry& geom_template,
                           int m,
                           IntRange m1_range,
                           IntRange m2_range,
                           const QuadratureSpec& quad,
                           const MapOptions& options,
                           const AmplitudeModel& model)
{
    quad.validate();
    if (options.q_node_count < 2)
        throw DomainError("intensity_map: q_node_count must be >= 2");
    const double theta = geom_template.theta;
    const unsigned threads = resolve_threads(options.threads);
    const double m0_sq = std::norm(model.m0);

    int n = quad.node_count;
    int nq = options.q_node_count;
    Eigen::MatrixXd coarse = m0_sq * raw_intensity(profiles, theta, m, m1_range, m2_range, n, nq, threads);
    Eigen::MatrixXd fine;

    IntensityMap map;
    map.m1_range = m1_range;
    map.m2_range = m2_range;
    int refinements = 0;
    for (;;)
    {
        n *= 2;
        nq *= 2;
        ++refinements;
        fine = m0_sq * raw_intensity(profiles, theta, m, m1_range, m2_range, n, nq, threads);

        const double scale = fine.maxCoeff();
        map.failures.clear();
        map.max_change = 0;
        map.max_relative_change = 0;
        map.max_relative_change_major = 0;
        for (Eigen::Index i = 0; i < fine.rows(); ++i)
        {
            for (Eigen::Index j = 0; j < fine.cols(); ++j)
            {
                const double diff = std::abs(fine(i, j) - coarse(i, j));
                if (scale > 0)
                    map.max_change = std::max(map.max_change, diff / scale);
                if (fine(i, j) > 0)
                    map.max_relative_change = std::max(map.max_relative_change, diff / fine(i, j));
                if (fine(i, j) >= 1e-3 * scale && fine(i, j) > 0)
                    map.max_relative_change_major = std::max(map.max_relative_change_major, diff / fine(i, j));
                if (diff > quad.abs_tol * scale + quad.rel_tol * std::abs(fine(i, j)))
                {
                    map.failures.push_back({m1_range.lo + static_cast<int>(i), m2_range.lo + static_cast<int>(j),
                                            coarse(i, j), fine(i, j)});
                }
            }
        }
        if (map.failures.empty() || refinements >= quad.max_refinements)
            break;
        coarse = fine;
    }

    map.raw_scale = fine.maxCoeff();
    map.weights = map.raw_scale > 0 ? Eigen::MatrixXd(fine / map.raw_scale) : fine;
    for (auto& f : map.failures)
    {
        if (map.raw_scale > 0)
        {
            f.coarse /= map.raw_scale;
            f.fine /= map.raw_scale;
        }
    }

    MapMetadata& md = map.metadata;
    md.m = m;
    md.theta = theta;
    md.kappa0 = profiles.initial.kappa0();
    md.sigma0 = profiles.initial.sigma();
    md.kappa01 = profiles.first.kappa0();
    md.sigma1 = profiles.first.sigma();
    md.kappa02 = profiles.second.kappa0();
    md.sigma2 = profiles.second.sigma();
    md.node_count = n;
    md.q_node_count = nq;
    md.refinements = refinements;
    return map;
}

//---------------------------------------------------------------------------//

std::vector<double> diagonal_sums(const IntensityMap& map)
{
    const int d_lo = map.m1_range.lo - map.m2_range.hi;
    const int d_hi = map.m1_range.hi - map.m2_range.lo;
    std::vector<double> sums(static_cast<std::size_t>(d_hi - d_lo + 1), 0.0);
    for (int m1 = map.m1_range.lo; m1 <= map.m1_range.hi; ++m1)
        for (int m2 = map.m2_range.lo; m2 <= map.m2_range.hi; ++m2)
            sums[static_cast<std::size_t>(m1 - m2 - d_lo)] += map.at(m1, m2);
    return sums;
}

std::pair<double, double> marginal_widths(const IntensityMap& map)
{
    auto width = [](const Eigen::VectorXd& p, int lo) {
        const double total = p.sum();
        double mean = 0, sq = 0;
        for (Eigen::Index i = 0; i < p.size(); ++i)
        {
            const double v = lo + static_cast<double>(i);
            mean += p[i] * v;
            sq += p[i] * v * v;
        }
        mean /= total;
        return std::sqrt(std::max(0.0, sq / total - mean * mean));
    };
    return {width(map.weights.rowwise().sum(), map.m1_range.lo),
            width(map.weights.colwise().sum().transpose(), map.m2_range.lo)};
}
} // namespace vortex
