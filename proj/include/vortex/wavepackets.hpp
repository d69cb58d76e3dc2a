#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortex/amplitudes.hpp"
#include "vortex/kinematics.hpp"
#include "vortex/numerics.hpp"

namespace vortex
{
enum class ProfileShape
{
    gaussian_truncated,
};

/*!
 * Radial weight f(kappa) of a transversely localized packet of Bessel states.
 *
 * f is proportional to exp(-(kappa - kappa0)^2 / (2 sigma^2)) on
 * [max(0+, kappa0 - 5 sigma), kappa0 + 5 sigma], zero elsewhere, and
 * normalized so that the integral of f^2 over the support is 1.
 */
class WavePacketProfile
{
  public:
    WavePacketProfile(double kappa0, double sigma, ProfileShape shape = ProfileShape::gaussian_truncated);

    double kappa0() const { return kappa0_; }
    double sigma() const { return sigma_; }
    ProfileShape shape() const { return shape_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }

    double value(double kappa) const;
    double operator()(double kappa) const { return value(kappa); }

  private:
    double kappa0_;
    double sigma_;
    ProfileShape shape_;
    double lo_;
    double hi_;
    double norm_;
};

//! Weights of the initial packet and of the two final packets.
struct PacketProfiles
{
    WavePacketProfile initial;
    WavePacketProfile first;
    WavePacketProfile second;

    /*!
     * kappa_0 = kappa_01 = kappa0, kappa_02 = kappa02, sigma_i = sigma_rel
     * kappa_0i. The defaults give the asymmetric kappa_01 = 2 kappa_02 choice.
     */
    static PacketProfiles
    from_peaks(double kappa0, double kappa01, double kappa02, double sigma_rel = 0.2);
};

/*!
 * One node of the (kappa, kappa1, kappa2) smearing integral at fixed q.
 *
 * kappa2 is traded for the triangle angle delta1, which absorbs the 1/Delta
 * edge singularity: dkappa2 (2/Delta) = (4/kappa2) ddelta1. The weight holds
 * every factor except the two cosines, so the smeared amplitude is
 * i^{m1+m2-m} M0 sum_j w_j cos[m phi*_j - (m1-m2) phi~*_j] cos[m1 delta1_j + m2 delta2_j].
 */
struct SmearingNode
{
    double weight = 0;
    double phi_star = 0;
    double phi_tilde_star = 0;
    double delta1 = 0;
    double delta2 = 0;
};

/*!
 * Product-rule nodes for the smeared amplitude at fixed q (fixed-q slicing).
 *
 * kappa and kappa1 are split into panels at the points where the integration
 * limits change form; their panels use cosine-mapped Gauss-Legendre rules with
 * node_count nodes, delta1 a plain one. Nodes of one kappa are contiguous.
 * Empty when q lies outside every allowed region.
 */
std::vector<SmearingNode>
smearing_nodes(const PacketProfiles& profiles, double theta, double q, int node_count);

/*!
 * f-weighted reduced amplitude A(q; m1, m2).
 *
 * Only theta is read from geom_template; the transverse moduli are integrated
 * over the packet profiles. Node doubling until quad is met; throws
 * ConvergenceError carrying the last two (real, phase-stripped) estimates.
 */
Complex smeared_amplitude(const PacketProfiles& profiles,
                          const CollisionGeometry& geom_template,
                          double q,
                          int m,
                          int m1,
                          int m2,
                          const QuadratureSpec& quad,
                          const AmplitudeModel& model = {});

struct IntRange
{
    int lo = 0;
    int hi = 0;

    int size() const { return hi - lo + 1; }
};

struct MapOptions
{
    int q_node_count = 64;  //!< q nodes, split evenly over q < 0 and q > 0; doubled with the inner rule
    unsigned threads = 0;   //!< 0: hardware concurrency
};

/*!
 * Map quadrature defaults: 24 nodes per inner panel, one doubling pass, and
 * tolerances abs_tol (relative to the map maximum) = 1e-6, rel_tol = 1e-4.
 */
QuadratureSpec default_map_quadrature();

/*!
 * Rule for the outer q integral: Gauss-Legendre on [-q_max, 0] and
 * [0, q_max], q_max = kappa_max sin(theta), q_node_count / 2 nodes each.
 *
 * The smeared |A(q)|^2 is bounded and vanishes at +-q_max, so no endpoint
 * substitution is needed; the split at q = 0 follows the kink of the lower
 * kappa limit |q| / sin(theta).
 */
QuadratureRule map_q_rule(const PacketProfiles& profiles, double theta, int q_node_count);

struct CellFailure
{
    int m1 = 0;
    int m2 = 0;
    double coarse = 0;
    double fine = 0;
};

struct MapMetadata
{
    int m = 0;
    double theta = 0;
    double kappa0 = 0, sigma0 = 0;
    double kappa01 = 0, sigma1 = 0;
    double kappa02 = 0, sigma2 = 0;
    int node_count = 0;    //!< inner nodes per panel of the reported (finest) pass
    int q_node_count = 0;  //!< q nodes of the reported pass
    int refinements = 0;
};

/*!
 * Relative (m1, m2) intensity, integrated over q, normalized to max 1.
 *
 * weights(i, j) belongs to m1 = m1_range.lo + i, m2 = m2_range.lo + j.
 */
struct IntensityMap
{
    IntRange m1_range;
    IntRange m2_range;
    Eigen::MatrixXd weights;
    double raw_scale = 0;  //!< unnormalized maximum
    //! Largest change between the last two passes, relative to the map maximum.
    double max_change = 0;
    //! Largest change relative to the cell itself, over nonzero cells.
    double max_relative_change = 0;
    //! Same, over cells >= 1e-3 of the maximum.
    double max_relative_change_major = 0;
    std::vector<CellFailure> failures;
    MapMetadata metadata;

    double at(int m1, int m2) const { return weights(m1 - m1_range.lo, m2 - m2_range.lo); }
    bool converged() const { return failures.empty(); }
};

/*!
 * I(m1, m2) = integral dq |A(q; m1, m2)|^2 over the allowed q region.
 *
 * Passes at (node_count, q_node_count), doubling both until every cell meets
 * |fine - coarse| <= abs_tol * max + rel_tol * |fine| or max_refinements is
 * exhausted; unconverged cells are listed in failures. abs_tol is relative to
 * the map maximum because the overall scale is arbitrary.
 */
IntensityMap intensity_map(const PacketProfiles& profiles,
                           const CollisionGeometry& geom_template,
                           int m,
                           IntRange m1_range,
                           IntRange m2_range,
                           const QuadratureSpec& quad,
                           const MapOptions& options = {},
                           const AmplitudeModel& model = {});

//! Raw (unnormalized) q-integrated intensities for a fixed rule; the building block of intensity_map.
Eigen::MatrixXd raw_intensity(const PacketProfiles& profiles,
                              double theta,
                              int m,
                              IntRange m1_range,
                              IntRange m2_range,
                              int node_count,
                              int q_node_count,
                              unsigned threads = 1);

//---------------------------------------------------------------------------//
// Map statistics
//---------------------------------------------------------------------------//

//! Sum of weights along each diagonal d = m1 - m2, indexed from the smallest d.
std::vector<double> diagonal_sums(const IntensityMap& map);

//! Standard deviation of m1 (first) and m2 (second) under the marginal distributions.
std::pair<double, double> marginal_widths(const IntensityMap& map);
} // namespace vortex
