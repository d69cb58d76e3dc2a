#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "vortex/errors.hpp"

namespace vortex
{
//---------------------------------------------------------------------------//
/*!
 * A Bessel mode: plane waves on a cone of transverse radius kappa about its
 * quantization axis, with longitudinal momentum k_z and frequency omega.
 *
 * All momenta share one arbitrary inverse-length unit (hbar = c = 1).
 */
struct TwistedState
{
    double kappa = 1;
    int m = 0;
    double k_z = 100;
    double omega = std::sqrt(1.0 + 100.0 * 100.0);  //!< massless on-shell default

    //! Massless or massive on-shell state, omega = sqrt(kappa^2 + k_z^2 + mass^2).
    static TwistedState on_shell(double kappa, int m, double k_z, double mass = 0);

    double mass_squared() const { return omega * omega - kappa * kappa - k_z * k_z; }
    double paraxiality() const { return kappa / std::abs(k_z); }

    //! Throws DomainError when kappa <= 0, omega <= 0 or mass^2 < 0.
    void validate() const;
};

//---------------------------------------------------------------------------//
/*!
 * Center-of-mass configuration of the triple-twisted collision.
 *
 * The final particles share the quantization axis z', tilted by theta in the
 * x-z plane; q = k_{1z'} + k_{2z'} is their longitudinal imbalance. The plane
 * wave is p = (0, 0, -k_z).
 */
struct CollisionGeometry
{
    double theta = 0.2;
    double q = 0;
    TwistedState initial;
    double kappa1 = 1;
    double kappa2 = 1;

    void validate() const;
};

struct AngleSet
{
    double xi = 0;
    double phi_star = 0;        //!< arccos(sin xi / sin theta)
    double phi_tilde_star = 0;  //!< arccos(tan xi / tan theta)
};

enum class TriangleStatus
{
    inside,      //!< strictly inside the stripe, area > 0
    degenerate,  //!< on the stripe boundary, area == 0
    outside,     //!< triangle inequality violated
};

//! Triangle with sides (kappa_tilde, kappa1, kappa2) and two inner angles.
struct TriangleGeometry
{
    double kappa_tilde = 0;
    double kappa1 = 0;
    double kappa2 = 0;
    double area = 0;    //!< NaN when outside
    double delta1 = 0;  //!< angle between the kappa_tilde and kappa1 sides
    double delta2 = 0;  //!< angle between the kappa_tilde and kappa2 sides
    TriangleStatus status = TriangleStatus::outside;

    bool inside() const { return status == TriangleStatus::inside; }
};

//---------------------------------------------------------------------------//
// Frames and momenta
//---------------------------------------------------------------------------//

template<class Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template<class Scalar>
using Frame = Eigen::Matrix<Scalar, 3, 3>;

/*!
 * Columns (x', y', z') of the frame tilted by theta in the x-z plane:
 * z' = sin(theta) x + cos(theta) z, x' = cos(theta) x - sin(theta) z, y' = y.
 */
template<class Scalar>
Frame<Scalar> tilted_frame(Scalar theta)
{
    using std::cos;
    using std::sin;
    const Scalar c = cos(theta), s = sin(theta);
    Frame<Scalar> f;
    f << c, Scalar(0), s,  //
        Scalar(0), Scalar(1), Scalar(0),  //
        -s, Scalar(0), c;
    return f;
}

//! k = k_z z' + kappa (cos phi x' + sin phi y') in the frame tilted by axis_theta.
template<class Scalar>
Vector3<Scalar> cone_momentum(Scalar kappa, Scalar k_z, Scalar phi, Scalar axis_theta)
{
    using std::cos;
    using std::sin;
    const Vector3<Scalar> local(kappa * cos(phi), kappa * sin(phi), k_z);
    return tilted_frame<Scalar>(axis_theta) * local;
}

inline Eigen::Vector3d cone_momentum(const TwistedState& state, double phi, double axis_theta)
{
    return cone_momentum<double>(state.kappa, state.k_z, phi, axis_theta);
}

//---------------------------------------------------------------------------//
// Derived geometry
//---------------------------------------------------------------------------//

/*!
 * xi = arcsin(q / kappa) and the two initial/transverse azimuths.
 *
 * Throws DomainError ("xi undefined") for |q| >= kappa and SupportError for
 * |xi| >= theta.
 */
AngleSet angle_set(const CollisionGeometry& geom);

//! kappa_tilde = kappa cos(xi); area from heron_area; inner angles by the law of cosines.
TriangleGeometry triangle_geometry(double kappa, double xi, double kappa1, double kappa2);

//! Strict stripe test |kappa1 - kappa2| < kappa_tilde < kappa1 + kappa2.
bool stripe_contains(double kappa_tilde, double kappa1, double kappa2);

/*!
 * Unit vector along <k> + p - k2: the phase-vortex line of the first final
 * particle. Swapping k2 for k1 gives the second particle's axis.
 *
 * Throws DegenerateError when the sum vanishes.
 */
Eigen::Vector3d vortex_axis(const Eigen::Vector3d& mean_initial,
                            const Eigen::Vector3d& p,
                            const Eigen::Vector3d& k2);

//! Transverse Bessel mode e^{i m phi_r} J_m(kappa r) sqrt(kappa / 2 pi).
std::complex<double> field_amplitude(const TwistedState& state, double r, double phi_r);

//---------------------------------------------------------------------------//
// Longitudinal conventions
//---------------------------------------------------------------------------//

//! How q behaves as the transverse moduli vary inside a packet.
enum class SliceConvention
{
    fixed_q,       //!< q held fixed (used by the intensity pipeline)
    fixed_energy,  //!< final energies held fixed, q follows the k_z(kappa) relation
};

//! k_z = sqrt(omega^2 - kappa^2 - mass^2); throws DomainError when off-shell.
double longitudinal_momentum(double omega, double kappa, double mass_squared = 0);

struct FinalEnergies
{
    double omega1 = 0;
    double omega2 = 0;
    double mass1_squared = 0;
    double mass2_squared = 0;
};

/*!
 * Longitudinal imbalance for the given convention.
 *
 * fixed_q returns q unchanged; fixed_energy returns k_{1z'} - |k_{2z'}| with
 * each longitudinal momentum from longitudinal_momentum().
 */
double longitudinal_imbalance(SliceConvention convention,
                              double q,
                              const FinalEnergies& energies,
                              double kappa1,
                              double kappa2);
} // namespace vortex
