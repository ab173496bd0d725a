#pragma once
/**
 * @file
 * @brief Shortest forward-only paths for a car with bounded turning radius.
 *
 * Six candidate words (LSL, RSR, LSR, RSL, RLR, LRL) are solved in closed form on
 * the normalised problem; the shortest feasible one wins.
 */

#include <pirrht/core.hpp>

#include <array>
#include <optional>

namespace pirrht::dubins
{
    enum class Word
    {
        LSL,
        RSR,
        LSR,
        RSL,
        RLR,
        LRL
    };

    inline constexpr std::array<Word, 6> kAllWords{Word::LSL, Word::RSR, Word::LSR, Word::RSL, Word::RLR, Word::LRL};

    const char *to_string (Word w) noexcept;

    /// Turn direction of each of the three segments: +1 left, -1 right, 0 straight.
    std::array<int, 3> turn_signs (Word w) noexcept;

    struct Pose
    {
        double x = 0.0, y = 0.0, theta = 0.0;
    };

    struct Path
    {
        Pose start;
        Word word = Word::LSL;
        double radius = 1.0;
        /// Segment lengths in units of the turning radius (arc angles for turns).
        std::array<double, 3> params{};

        [[nodiscard]] double length () const noexcept { return radius * (params[0] + params[1] + params[2]); }
        /// Pose after travelling arc length s along the path (clamped to [0, length]).
        [[nodiscard]] Pose sample (double s) const noexcept;
        [[nodiscard]] Pose end () const noexcept { return sample (length ()); }
    };

    /// Solve one word; nullopt when that word has no solution for the pose pair.
    std::optional<Path> solve (const Pose &q0, const Pose &q1, double radius, Word word) noexcept;

    /// Minimum-length path over all six words. Always succeeds.
    Path shortest (const Pose &q0, const Pose &q1, double radius) noexcept;
} // namespace pirrht::dubins
