#include <pirrht/dubins.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pirrht::dubins
{
    namespace
    {
        /// Angle in [0, 2pi); values within rounding of 2pi snap to 0 so that an
        /// absent segment never turns into a full loop.
        double mod2pi (double a) noexcept
        {
            double r = std::fmod (a, kTwoPi);
            if (r < 0.0)
                r += kTwoPi;
            if (kTwoPi - r < 1e-10)
                r = 0.0;
            return r;
        }

        struct Normalised
        {
            double alpha, beta, d, sa, sb, ca, cb, c_ab;
        };
    } // namespace

    const char *to_string (Word w) noexcept
    {
        switch (w)
        {
        case Word::LSL:
            return "LSL";
        case Word::RSR:
            return "RSR";
        case Word::LSR:
            return "LSR";
        case Word::RSL:
            return "RSL";
        case Word::RLR:
            return "RLR";
        case Word::LRL:
            return "LRL";
        }
        return "?";
    }

    std::array<int, 3> turn_signs (Word w) noexcept
    {
        switch (w)
        {
        case Word::LSL:
            return {1, 0, 1};
        case Word::RSR:
            return {-1, 0, -1};
        case Word::LSR:
            return {1, 0, -1};
        case Word::RSL:
            return {-1, 0, 1};
        case Word::RLR:
            return {-1, 1, -1};
        case Word::LRL:
            return {1, -1, 1};
        }
        return {0, 0, 0};
    }

    Pose Path::sample (double s) const noexcept
    {
        s = std::clamp (s, 0.0, length ());
        const auto signs = turn_signs (word);
        Pose p = start;
        double remaining = s / radius;
        for (int i = 0; i < 3 && remaining > 0.0; ++i)
        {
            const double seg = std::min (remaining, params[static_cast<std::size_t> (i)]);
            const int sign = signs[static_cast<std::size_t> (i)];
            if (sign == 0)
            {
                p.x += radius * seg * std::cos (p.theta);
                p.y += radius * seg * std::sin (p.theta);
            }
            else
            {
                const double th1 = p.theta + sign * seg;
                p.x += sign * radius * (std::sin (th1) - std::sin (p.theta));
                p.y -= sign * radius * (std::cos (th1) - std::cos (p.theta));
                p.theta = th1;
            }
            remaining -= seg;
        }
        p.theta = mod2pi (p.theta);
        return p;
    }

    std::optional<Path> solve (const Pose &q0, const Pose &q1, double radius, Word word) noexcept
    {
        const double dx = q1.x - q0.x, dy = q1.y - q0.y;
        const double D = std::hypot (dx, dy);
        const double d = D / radius;
        const double th = D > 0.0 ? mod2pi (std::atan2 (dy, dx)) : 0.0;
        const double a = mod2pi (q0.theta - th);
        const double b = mod2pi (q1.theta - th);
        const Normalised n{a, b, d, std::sin (a), std::sin (b), std::cos (a), std::cos (b), std::cos (a - b)};

        double t = 0.0, p = 0.0, q = 0.0;
        switch (word)
        {
        case Word::LSL:
        {
            const double tmp0 = n.d + n.sa - n.sb;
            const double p2 = 2.0 + n.d * n.d - 2.0 * n.c_ab + 2.0 * n.d * (n.sa - n.sb);
            if (p2 < 0.0)
                return std::nullopt;
            const double tmp1 = std::atan2 (n.cb - n.ca, tmp0);
            t = mod2pi (tmp1 - n.alpha);
            p = std::sqrt (p2);
            q = mod2pi (n.beta - tmp1);
            break;
        }
        case Word::RSR:
        {
            const double tmp0 = n.d - n.sa + n.sb;
            const double p2 = 2.0 + n.d * n.d - 2.0 * n.c_ab + 2.0 * n.d * (n.sb - n.sa);
            if (p2 < 0.0)
                return std::nullopt;
            const double tmp1 = std::atan2 (n.ca - n.cb, tmp0);
            t = mod2pi (n.alpha - tmp1);
            p = std::sqrt (p2);
            q = mod2pi (tmp1 - n.beta);
            break;
        }
        case Word::LSR:
        {
            const double p2 = -2.0 + n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sa + n.sb);
            if (p2 < 0.0)
                return std::nullopt;
            p = std::sqrt (p2);
            const double tmp0 = std::atan2 (-n.ca - n.cb, n.d + n.sa + n.sb) - std::atan2 (-2.0, p);
            t = mod2pi (tmp0 - n.alpha);
            q = mod2pi (tmp0 - n.beta);
            break;
        }
        case Word::RSL:
        {
            const double p2 = -2.0 + n.d * n.d + 2.0 * n.c_ab - 2.0 * n.d * (n.sa + n.sb);
            if (p2 < 0.0)
                return std::nullopt;
            p = std::sqrt (p2);
            const double tmp0 = std::atan2 (n.ca + n.cb, n.d - n.sa - n.sb) - std::atan2 (2.0, p);
            t = mod2pi (n.alpha - tmp0);
            q = mod2pi (n.beta - tmp0);
            break;
        }
        case Word::RLR:
        {
            const double tmp0 = (6.0 - n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sa - n.sb)) / 8.0;
            if (std::abs (tmp0) > 1.0)
                return std::nullopt;
            const double phi = std::atan2 (n.ca - n.cb, n.d - n.sa + n.sb);
            p = mod2pi (kTwoPi - std::acos (tmp0));
            t = mod2pi (n.alpha - phi + mod2pi (p / 2.0));
            q = mod2pi (n.alpha - n.beta - t + mod2pi (p));
            break;
        }
        case Word::LRL:
        {
            const double tmp0 = (6.0 - n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sb - n.sa)) / 8.0;
            if (std::abs (tmp0) > 1.0)
                return std::nullopt;
            const double phi = std::atan2 (n.ca - n.cb, n.d + n.sa - n.sb);
            p = mod2pi (kTwoPi - std::acos (tmp0));
            t = mod2pi (-n.alpha - phi + p / 2.0);
            q = mod2pi (mod2pi (n.beta) - n.alpha - t + mod2pi (p));
            break;
        }
        }
        return Path{q0, word, radius, {t, p, q}};
    }

    Path shortest (const Pose &q0, const Pose &q1, double radius) noexcept
    {
        std::optional<Path> best;
        for (Word w : kAllWords)
        {
            auto cand = solve (q0, q1, radius, w);
            if (cand && (!best || cand->length () < best->length ()))
                best = cand;
        }
        // CSC words cover every pose pair; LSL has p2 >= 0 always (it is a sum of squares).
        return *best;
    }
} // namespace pirrht::dubins
