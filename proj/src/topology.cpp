#include <pirrht/topology.hpp>

#include <array>
#include <cmath>

namespace pirrht
{
    namespace
    {
        constexpr double kChordLimit = kPi / 4.0;
        constexpr int kMaxBisections = 60;

        void check_length (const HSignature &a, const HSignature &b)
        {
            if (a.size () != b.size ())
                throw LengthMismatch ("H-signature lengths differ: " + std::to_string (a.size ()) + " vs " + std::to_string (b.size ()));
        }

        /// Swept angle of a straight chord around each representative point, accumulated into `out`.
        /// Returns false if some chord angle is at or above the densification limit.
        bool accumulate_chord (const Point &z1, const Point &z2, std::span<const Point> reps, Eigen::VectorXd &out)
        {
            for (std::size_t l = 0; l < reps.size (); ++l)
            {
                const Point d1 = z1 - reps[l];
                const Point d2 = z2 - reps[l];
                if (d1.isZero (0.0) || d2.isZero (0.0))
                    throw DegenerateSegment ("segment endpoint coincides with representative point " + std::to_string (l));
                const double swept = absmin_angle (std::atan2 (d2.y (), d2.x ()) - std::atan2 (d1.y (), d1.x ()));
                if (std::abs (swept) >= kChordLimit)
                    return false;
                out (static_cast<Eigen::Index> (l)) += swept;
            }
            return true;
        }

        void accumulate_dense (const Point &a, const Point &b, std::span<const Point> reps, Eigen::VectorXd &out, Eigen::VectorXd &chord, int depth)
        {
            chord.setZero ();
            if (accumulate_chord (a, b, reps, chord))
            {
                out += chord;
                return;
            }
            if (depth >= kMaxBisections)
                throw DegenerateSegment ("chord passes through a representative point");
            const Point mid = 0.5 * (a + b);
            accumulate_dense (a, mid, reps, out, chord, depth + 1);
            accumulate_dense (mid, b, reps, out, chord, depth + 1);
        }
    } // namespace

    HSignature::HSignature (std::initializer_list<double> values) : v_ (static_cast<Eigen::Index> (values.size ()))
    {
        Eigen::Index i = 0;
        for (double x : values)
            v_ (i++) = x;
    }

    HSignature &HSignature::operator+= (const HSignature &o)
    {
        check_length (*this, o);
        v_ += o.v_;
        return *this;
    }

    HSignature operator- (const HSignature &a, const HSignature &b)
    {
        check_length (a, b);
        return HSignature (Eigen::VectorXd (a.v_ - b.v_));
    }

    double absmin (std::span<const double> candidates)
    {
        if (candidates.empty ())
            throw ConfigError ("absmin: empty candidate set");
        double best = candidates.front ();
        for (double c : candidates.subspan (1))
        {
            const double ac = std::abs (c), ab = std::abs (best);
            if (ac < ab || (ac == ab && c > best))
                best = c;
        }
        return best;
    }

    double absmin_angle (double delta)
    {
        std::array<double, 5> c{};
        for (int k = -2; k <= 2; ++k)
            c[static_cast<std::size_t> (k + 2)] = delta + 2.0 * k * kPi;
        return absmin (c);
    }

    HSignature segment_signature (const Point &z1, const Point &z2, std::span<const Point> reps)
    {
        Eigen::VectorXd h = Eigen::VectorXd::Zero (static_cast<Eigen::Index> (reps.size ()));
        for (std::size_t l = 0; l < reps.size (); ++l)
        {
            const Point d1 = z1 - reps[l];
            const Point d2 = z2 - reps[l];
            if (d1.isZero (0.0) || d2.isZero (0.0))
                throw DegenerateSegment ("segment endpoint coincides with representative point " + std::to_string (l));
            h (static_cast<Eigen::Index> (l)) = absmin_angle (std::atan2 (d2.y (), d2.x ()) - std::atan2 (d1.y (), d1.x ())) / kTwoPi;
        }
        return HSignature (std::move (h));
    }

    HSignature path_signature (std::span<const Point> path, std::span<const Point> reps)
    {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero (static_cast<Eigen::Index> (reps.size ()));
        Eigen::VectorXd scratch (sum.size ());
        if (path.size () == 1)
            accumulate_chord (path[0], path[0], reps, sum);
        for (std::size_t i = 1; i < path.size (); ++i)
            accumulate_dense (path[i - 1], path[i], reps, sum, scratch, 0);
        return HSignature (Eigen::VectorXd (sum / kTwoPi));
    }

    HSignature path_signature (const Trajectory &traj, std::span<const Point> reps)
    {
        const auto pts = traj.positions ();
        return path_signature (pts, reps);
    }

    bool homologous (const HSignature &a, const HSignature &b, double tol)
    {
        check_length (a, b);
        return a.size () == 0 || (a.values () - b.values ()).cwiseAbs ().maxCoeff () <= tol;
    }

    bool is_allowed (const HSignature &h, const ClassFilter &filter)
    {
        check_length (h, filter.offset);
        if (std::isinf (filter.h_limit))
            return true;
        return h.size () == 0 || (filter.offset.values () - h.values ()).cwiseAbs ().maxCoeff () <= filter.h_limit;
    }
} // namespace pirrht
