#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "vortex/kinematics.hpp"
#include "vortex/numerics.hpp"

namespace vortex
{
using Complex = std::complex<double>;

//! Constant dynamical amplitude M0 pulled out of the azimuthal integrals.
struct AmplitudeModel
{
    Complex m0{1.0, 0.0};
};

/*!
 * Triple-twisted matrix element with the overall i delta(E_f - E_i)/sqrt(2 pi)
 * removed.
 */
struct ReducedAmplitude
{
    Complex value{0.0, 0.0};
    int phase_power = 0;  //!< exponent of i: m1 + m2 - m
    bool in_support = false;
};

//! i^n, exact for every integer n.
Complex i_power(int n);

//! Smooth part of the plane-wave weight of a Bessel state plus an on-cone flag.
struct FourierWeight
{
    Complex phase{0.0, 0.0};  //!< (-i)^m e^{i m phi_k} sqrt(2 pi) / sqrt(kappa)
    bool on_cone = false;
};

/*!
 * Plane-wave expansion weight of |kappa, m> at a transverse momentum.
 *
 * The radial delta(|k| - kappa) is reported through on_cone (|k| within
 * tolerance * kappa of kappa) and never evaluated.
 */
FourierWeight fourier_weight(double kappa,
                             int m,
                             double k_perp_modulus,
                             double k_azimuth,
                             double tolerance = 1e-12);

//---------------------------------------------------------------------------//
// Single-twisted scattering
//---------------------------------------------------------------------------//

struct SingleTwistedBranch
{
    double phi1 = 0;
    double phi12 = 0;
    int sign = +1;  //!< shared sign of the two arccos terms
};

struct SingleTwistedSolutions
{
    std::vector<SingleTwistedBranch> branches;  //!< two, or one when tangent
    bool tangent = false;
};

/*!
 * Azimuths of k1 (fixed |k1|) and of k12 = k1 + k2 when the vortex cone of
 * radius kappa is intersected with the circle around -k2.
 *
 * Throws SupportError when the circles do not meet.
 */
SingleTwistedSolutions
single_twisted_solutions(double kappa, double k1_mod, double k2_mod, double phi2);

struct SingleTwistedAmplitude
{
    Complex smooth{0.0, 0.0};  //!< zero off the radial support
    bool on_support = false;   //!< |k12| == kappa within tolerance
};

/*!
 * (-i)^m e^{i m phi12} M0 / ((2 pi)^{3/2} sqrt(kappa)) times delta(kappa - k12).
 *
 * The smooth part vanishes whenever k12 is off the cone, in particular at
 * k1 = -k2.
 */
SingleTwistedAmplitude single_twisted_amplitude(const TwistedState& state,
                                                double k12_mod,
                                                double phi12,
                                                const AmplitudeModel& model = {},
                                                double tolerance = 1e-12);

//---------------------------------------------------------------------------//
// Triple-twisted scattering
//---------------------------------------------------------------------------//

//! Area floor (relative to kappa_tilde^2) below which the amplitude refuses to evaluate.
inline constexpr double kDegeneracyFloor = 1e-9;

/*!
 * Closed-form reduced triple-twisted amplitude
 *
 *   i^{m1+m2-m} (2/Delta) sqrt(kappa1 kappa2 / kappa)
 *     cos[m phi* - (m1 - m2) phi~*] cos[m1 delta1 + m2 delta2]
 *     / sqrt(sin^2 theta - sin^2 xi) M0
 *
 * Zero with in_support = false outside |xi| < theta or outside the stripe.
 * Throws DegenerateError when 0 < Delta < 1e-9 kappa_tilde^2 (or exactly on
 * the boundary).
 */
ReducedAmplitude reduced_triple_amplitude(const CollisionGeometry& geom,
                                          int m,
                                          int m1,
                                          int m2,
                                          const AmplitudeModel& model = {});

//---------------------------------------------------------------------------//
// Plane-wave limit
//---------------------------------------------------------------------------//

struct PlaneWaveLimitEntry
{
    double epsilon = 0;
    Complex integral{0.0, 0.0};
    double relative_error = 0;  //!< |I / limit - 1|, or |I| when the limit is 0
};

struct PlaneWaveLimitReport
{
    Complex limit{0.0, 0.0};
    std::vector<PlaneWaveLimitEntry> entries;
    bool monotone = false;  //!< error non-increasing for epsilon <= 0.1
    bool passed = false;    //!< monotone and final error below tolerance
};

/*!
 * Recover the plane-wave/twisted result from the closed form.
 *
 * For each epsilon, kappa2 = epsilon kappa_tilde, m2 = 0, and
 * I = int dkappa1 w(kappa1) sqrt(2 pi / kappa2) S(kappa1, kappa2) is compared
 * with the value obtained from 1/Delta -> 4 pi delta(kappa_tilde^2 - kappa1^2),
 * delta1 -> 0. geom.kappa1 and geom.kappa2 are ignored.
 */
PlaneWaveLimitReport plane_wave_limit_check(const CollisionGeometry& geom,
                                            int m,
                                            int m1,
                                            const std::function<double(double)>& test_weight,
                                            const std::vector<double>& epsilon_list,
                                            const AmplitudeModel& model = {},
                                            int node_count = 64,
                                            double tolerance = 1e-2);
} // namespace vortex
