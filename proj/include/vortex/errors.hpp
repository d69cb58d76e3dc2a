#pragma once

#include <stdexcept>
#include <string>

namespace vortex
{
//! Base of every error thrown by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Argument outside the supported evaluation range (e.g. Bessel order).
class RangeError : public Error
{
  public:
    using Error::Error;
};

//! A derived quantity is mathematically undefined for the inputs.
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! Kinematic support violated (no scattering possible).
class SupportError : public Error
{
  public:
    using Error::Error;
};

//! Configuration sits on (or numerically too close to) a singular boundary.
class DegenerateError : public Error
{
  public:
    using Error::Error;
};

//! Quadrature failed to meet its tolerance; carries the last two estimates.
class ConvergenceError : public Error
{
  public:
    ConvergenceError(const std::string& what, double previous, double last)
        : Error(what), previous_(previous), last_(last)
    {
    }

    double previous_estimate() const noexcept { return previous_; }
    double last_estimate() const noexcept { return last_; }

  private:
    double previous_;
    double last_;
};
} // namespace vortex
