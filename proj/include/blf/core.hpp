#pragma once
/**
 * @file   core.hpp
 * @brief  Angles on the circle S¹ and on the orientation set P¹ = [0, π),
 *         the signed orientation distance, and the library error types.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blf
{
    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;
    inline constexpr double half_pi = 0.5 * std::numbers::pi;

    /// Base class of every error raised by the library.
    class Error : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    /// Malformed input: files, flags, sizes, empty datasets.
    class InputError : public Error
    {
      public:
        using Error::Error;
    };

    /// Numerical failure: singular evaluation, collapsed parameters, blow-up.
    class NumericalError : public Error
    {
      public:
        using Error::Error;
    };

    /// Raised when a vector field vanishes (to within the guard) at an evaluation point.
    class SingularPointError : public NumericalError
    {
      public:
        explicit SingularPointError (std::string what, std::ptrdiff_t sample = -1)
            : NumericalError (std::move (what)), sample_ (sample)
        {
        }

        /// Offending sample index, or -1 when the point is not a dataset sample.
        [[nodiscard]] std::ptrdiff_t sample () const noexcept { return sample_; }

      private:
        std::ptrdiff_t sample_;
    };

    /// Reduce @p value into [0, period). One remainder plus at most one correction add.
    [[nodiscard]] inline double wrap_positive (double value, double period) noexcept
    {
        double r = std::fmod (value, period);
        if (r < 0.0)
            r += period;
        // fmod of a tiny negative number plus period can round up to period itself.
        if (r >= period)
            r = 0.0;
        return r;
    }

    /// Direction of an oriented vector: a point of S¹ stored as radians in [0, 2π).
    class Direction
    {
      public:
        constexpr Direction () noexcept = default;
        explicit Direction (double radians) noexcept : value_ (wrap_positive (radians, two_pi)) {}

        /// Direction of the vector (x, y) measured from the reference vector (1, 0).
        [[nodiscard]] static Direction of_vector (double x, double y) noexcept { return Direction (std::atan2 (y, x)); }

        [[nodiscard]] constexpr double value () const noexcept { return value_; }

      private:
        double value_ = 0.0;
    };

    /// Orientation of an unoriented line: a point of P¹ stored as radians in [0, π).
    class Orientation
    {
      public:
        constexpr Orientation () noexcept = default;
        explicit Orientation (double radians) noexcept : value_ (wrap_positive (radians, pi)) {}

        [[nodiscard]] constexpr double value () const noexcept { return value_; }

        friend constexpr bool operator== (Orientation, Orientation) noexcept = default;

      private:
        double value_ = 0.0;
    };

    /**
     * Signed distance between two orientations, in [−π/2, π/2].
     *
     * Piecewise: a−b when |a−b| ≤ π/2, a−b−π above, a−b+π below. At |a−b| = π/2
     * exactly the first branch applies, so d(π/2, 0) = +π/2 and d(0, π/2) = −π/2.
     */
    [[nodiscard]] inline double signed_distance (Orientation a, Orientation b) noexcept
    {
        const double diff = a.value () - b.value ();
        if (std::abs (diff) <= half_pi)
            return diff;
        return diff > 0.0 ? diff - pi : diff + pi;
    }

    /// Orientation of the line bisecting the oriented pair of directions: ½(t1 + t2) mod π.
    [[nodiscard]] inline Orientation bisect_directions (Direction t1, Direction t2) noexcept
    {
        return Orientation (0.5 * (t1.value () + t2.value ()));
    }

    /// Signed difference of two directions wrapped into (−π, π].
    [[nodiscard]] inline double direction_difference (Direction a, Direction b) noexcept
    {
        double diff = std::remainder (a.value () - b.value (), two_pi);
        if (diff <= -pi)
            diff += two_pi;
        return diff;
    }
} // namespace blf
