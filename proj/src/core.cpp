#include <pirrht/core.hpp>

#include <cmath>

namespace pirrht
{
    std::vector<Point> Trajectory::positions () const
    {
        std::vector<Point> out;
        out.reserve (states.size ());
        for (const auto &s : states)
            out.emplace_back (s (0), s.size () > 1 ? s (1) : 0.0);
        return out;
    }

    void Trajectory::check () const
    {
        if (times.size () != states.size ())
            throw ConfigError ("trajectory: times and states differ in length");
        if (!controls.empty () && controls.size () + 1 != states.size ())
            throw ConfigError ("trajectory: controls must have one entry per interval");
        for (std::size_t i = 1; i < times.size (); ++i)
            if (!(times[i] > times[i - 1]))
                throw ConfigError ("trajectory: times must be strictly increasing");
    }

    Vec ControlTape::at (std::size_t step) const
    {
        if (step < controls.size ())
            return controls[step];
        return Vec::Zero (static_cast<Eigen::Index> (control_dim));
    }

    double wrap_angle (double a) noexcept
    {
        double r = std::fmod (a + kPi, kTwoPi);
        if (r < 0.0)
            r += kTwoPi;
        return r - kPi;
    }
} // namespace pirrht
