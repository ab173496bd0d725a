#pragma once
/**
 * @file
 * @brief Shared value types: small state/control vectors, trajectories,
 *  control tapes and the library's exception hierarchy.
 */

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pirrht
{
    /// State or control vector. Built-in systems have at most three state dimensions,
    /// so storage stays on the stack.
    using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
    using Point = Eigen::Vector2d;

    class Error : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    /// A segment endpoint coincides with an obstacle representative point.
    class DegenerateSegment : public Error
    {
      public:
        using Error::Error;
    };

    class LengthMismatch : public Error
    {
      public:
        using Error::Error;
    };

    /// Consecutive trajectory samples are farther apart than the collision resolution.
    class ChordTooCoarse : public Error
    {
      public:
        using Error::Error;
    };

    class NonFiniteState : public Error
    {
      public:
        using Error::Error;
    };

    /// Every sampled weight vanished, so no desirability or control estimate exists.
    class DegenerateEstimate : public Error
    {
      public:
        using Error::Error;
    };

    /// The query state could not be connected to any node of the planner graph.
    class Unreachable : public Error
    {
      public:
        using Error::Error;
    };

    class ConfigError : public Error
    {
      public:
        using Error::Error;
    };

    /// Time-stamped state sequence, optionally with the control held over each interval.
    struct Trajectory
    {
        std::vector<double> times;
        std::vector<Vec> states;
        std::vector<Vec> controls;

        [[nodiscard]] std::size_t size () const noexcept { return states.size (); }
        [[nodiscard]] bool empty () const noexcept { return states.empty (); }
        [[nodiscard]] double duration () const noexcept { return times.empty () ? 0.0 : times.back () - times.front (); }

        /// Position projection (first two state components).
        [[nodiscard]] std::vector<Point> positions () const;

        /// Throws ConfigError when times are not strictly increasing or lengths disagree.
        void check () const;
    };

    /// Piecewise-constant open-loop control sampled at a fixed period.
    /// Reading past the end yields the zero control.
    struct ControlTape
    {
        double dt = 0.1;
        std::size_t control_dim = 0;
        std::vector<Vec> controls;

        [[nodiscard]] std::size_t size () const noexcept { return controls.size (); }
        [[nodiscard]] bool empty () const noexcept { return controls.empty (); }
        [[nodiscard]] double duration () const noexcept { return dt * static_cast<double> (controls.size ()); }
        [[nodiscard]] Vec at (std::size_t step) const;
    };

    /// Wrap an angle into [-pi, pi).
    double wrap_angle (double a) noexcept;

    inline constexpr double kPi = 3.14159265358979323846;
    inline constexpr double kTwoPi = 2.0 * kPi;
} // namespace pirrht
