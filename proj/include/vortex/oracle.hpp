#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vortex/amplitudes.hpp"
#include "vortex/kinematics.hpp"
#include "vortex/numerics.hpp"

namespace vortex
{
/*!
 * Brute-force evaluation of the triple-twisted matrix element.
 *
 * Nothing here uses the closed-form ingredients (xi, phi*, Delta, delta_i):
 * only cone momenta, Newton root finding on the three azimuths, and
 * finite-difference Jacobians.
 *
 * Azimuth conventions: phi is measured from x in the initial (z) frame, phi1
 * from x' about z', and phi2 from x' about the second particle's own direction
 * of motion -z' (frame x', -y', -z'), so that m2 is an orbital helicity.
 */
struct OracleOptions
{
    double paraxial_factor = 100;  //!< K = paraxial_factor * max(kappa, kappa1, kappa2)
    double fd_step = 1e-3;         //!< finite-difference step in radians (Richardson-extrapolated)
    double event_rotation = 0;     //!< rigid rotation of the whole event about z
};

struct ConstraintSolution
{
    double phi = 0;
    double phi1 = 0;
    double phi2 = 0;
    double jacobian_det = 0;  //!< |det d(k + p - k1 - k2)/d(phi, phi1, phi2)|
};

struct OracleResult
{
    std::vector<ConstraintSolution> solutions;
    Complex amplitude{0.0, 0.0};
    //! Convention of the raw amplitude; ratios to the closed form are taken
    //! after normalizing at one reference configuration.
    std::string normalization_tag = "raw:sqrt(k*k1*k2)*M0*sum(phase/|detJ|)";
};

//! Longitudinal scale K used by the oracle for a geometry.
double paraxial_scale(const CollisionGeometry& geom, const OracleOptions& options = {});

/*!
 * Spatial momentum mismatch k(phi) + p - k1(phi1) - k2(phi2), lab frame.
 *
 * Final longitudinal components are k_{1z'} = (K + q)/2 and
 * k_{2z'} = -(K - q)/2; p = (0, 0, -k_z) of the initial state.
 */
Eigen::Vector3d conservation_residual(const CollisionGeometry& geom,
                                      double phi,
                                      double phi1,
                                      double phi2,
                                      const OracleOptions& options = {});

//! Phase (-i)^m e^{i m phi} i^{m1} e^{-i m1 phi1} i^{m2} e^{-i m2 phi2}.
Complex solution_phase(int m, int m1, int m2, double phi, double phi1, double phi2);

/*!
 * Sum of solution phases over |det J|, times sqrt(kappa kappa1 kappa2) M0.
 *
 * Returns an empty result (amplitude 0) when the constraints have no
 * solution. Throws DegenerateError if any root has a singular Jacobian.
 */
OracleResult oracle_amplitude(const CollisionGeometry& geom,
                              int m,
                              int m1,
                              int m2,
                              const RootFindSpec& spec = {},
                              const AmplitudeModel& model = {},
                              const OracleOptions& options = {});

//! Single-twisted element by direct 2D reduction; zero off the radial support.
Complex single_twisted_oracle(const TwistedState& state,
                              const Eigen::Vector2d& k1,
                              const Eigen::Vector2d& k2,
                              const AmplitudeModel& model = {},
                              double tolerance = 1e-12);

struct SingleTwistedRoot
{
    double phi1 = 0;
    double phi12 = 0;
};

//! Solve k1(phi1) + k2(phi2) = kappa e(phi12) for (phi1, phi12) by Newton iteration.
std::vector<SingleTwistedRoot> single_twisted_constraint_solve(double kappa,
                                                               double k1_mod,
                                                               double k2_mod,
                                                               double phi2,
                                                               const RootFindSpec& spec = {});

//---------------------------------------------------------------------------//
// Closed-form comparison
//---------------------------------------------------------------------------//

struct ComparisonSample
{
    CollisionGeometry geom;
    int m = 0;
    int m1 = 0;
    int m2 = 0;
};

//! Uniform double in [lo, hi) built from the top 53 bits; portable across libraries.
double uniform_real(std::mt19937_64& rng, double lo, double hi);

//! Uniform integer in [lo, hi].
int uniform_int(std::mt19937_64& rng, int lo, int hi);

/*!
 * Random in-support configuration with |xi| < 0.9 theta and
 * Delta > 0.05 kappa_tilde^2.
 */
ComparisonSample draw_comparison_sample(std::mt19937_64& rng);

//! Fixed configuration at which oracle/closed-form ratios are normalized.
ComparisonSample reference_sample();

struct SampleComparison
{
    std::size_t index = 0;
    Complex oracle{0.0, 0.0};
    Complex closed_form{0.0, 0.0};
    Complex ratio{0.0, 0.0};  //!< (oracle / closed) / reference ratio
    double relative_deviation = 0;
    std::size_t solution_count = 0;
};

struct ComparisonReport
{
    Complex reference_ratio{0.0, 0.0};
    std::vector<SampleComparison> samples;
    std::vector<std::size_t> degenerate_samples;
    Complex mean_ratio{0.0, 0.0};
    double dispersion = 0;          //!< relative standard deviation of the ratio
    double max_relative_deviation = 0;
    //! Mean |deviation| for theta below / above the median theta.
    double low_theta_deviation = 0;
    double high_theta_deviation = 0;
    //! Largest relative change of the oracle amplitude when K is doubled (checked subset).
    double k_doubling_change = 0;
};

/*!
 * Compare the oracle with the closed form on a batch of samples.
 *
 * Samples whose oracle hits a degenerate Jacobian are excluded and listed.
 * The K-doubling check runs on the first k_check_count samples.
 */
ComparisonReport compare_with_closed_form(const std::vector<ComparisonSample>& samples,
                                          const RootFindSpec& spec = {},
                                          const OracleOptions& options = {},
                                          std::size_t k_check_count = 20);
} // namespace vortex
