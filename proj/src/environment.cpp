#include <pirrht/environment.hpp>

#include <algorithm>
#include <cmath>

namespace pirrht
{
    namespace
    {
        double cross (const Point &a, const Point &b) noexcept { return a.x () * b.y () - a.y () * b.x (); }

        double point_segment_distance (const Point &p, const Point &a, const Point &b) noexcept
        {
            const Point d = b - a;
            const double len2 = d.squaredNorm ();
            if (len2 == 0.0)
                return (p - a).norm ();
            const double t = std::clamp ((p - a).dot (d) / len2, 0.0, 1.0);
            return (p - (a + t * d)).norm ();
        }

        /// Cyrus-Beck clip of the closed segment against a closed convex polygon.
        bool segment_hits_polygon (const ConvexPolygon &poly, const Point &a, const Point &b) noexcept
        {
            const auto &v = poly.vertices;
            const std::size_t n = v.size ();
            if (n < 3)
                return false;
            const Point d = b - a;
            double t0 = 0.0, t1 = 1.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const Point e = v[(i + 1) % n] - v[i];
                const double f0 = cross (e, a - v[i]);
                const double df = cross (e, d);
                if (df == 0.0)
                {
                    if (f0 < 0.0)
                        return false;
                    continue;
                }
                const double t = -f0 / df;
                if (df > 0.0)
                    t0 = std::max (t0, t);
                else
                    t1 = std::min (t1, t);
                if (t0 > t1)
                    return false;
            }
            return true;
        }

        bool polygon_contains (const ConvexPolygon &poly, const Point &p, bool strict) noexcept
        {
            const auto &v = poly.vertices;
            const std::size_t n = v.size ();
            if (n < 3)
                return false;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double c = cross (v[(i + 1) % n] - v[i], p - v[i]);
                if (strict ? c <= 0.0 : c < 0.0)
                    return false;
            }
            return true;
        }

        bool shape_strictly_contains (const Shape &s, const Point &p) noexcept
        {
            if (const auto *d = std::get_if<Disc> (&s))
                return (p - d->center).norm () < d->radius;
            return polygon_contains (std::get<ConvexPolygon> (s), p, true);
        }

        bool shapes_intersect (const Shape &a, const Shape &b) noexcept
        {
            const auto *da = std::get_if<Disc> (&a);
            const auto *db = std::get_if<Disc> (&b);
            if (da && db)
                return (da->center - db->center).norm () <= da->radius + db->radius;
            if (db)
                return shapes_intersect (b, a);
            const auto &pb = std::get<ConvexPolygon> (b);
            const std::size_t n = pb.vertices.size ();
            for (std::size_t i = 0; i < n; ++i)
                if (segment_hits_shape (a, pb.vertices[i], pb.vertices[(i + 1) % n]))
                    return true;
            // b's boundary misses a entirely; a may still sit inside b.
            if (da)
                return polygon_contains (pb, da->center, false);
            const auto &pa = std::get<ConvexPolygon> (a);
            return !pa.vertices.empty () && polygon_contains (pb, pa.vertices.front (), false);
        }

        bool shape_in_bounds (const Shape &s, const Bounds &bd) noexcept
        {
            if (const auto *d = std::get_if<Disc> (&s))
                return d->center.x () - d->radius >= bd.xmin && d->center.x () + d->radius <= bd.xmax &&
                       d->center.y () - d->radius >= bd.ymin && d->center.y () + d->radius <= bd.ymax;
            for (const auto &v : std::get<ConvexPolygon> (s).vertices)
                if (!bd.contains (v))
                    return false;
            return true;
        }

        bool polygon_is_ccw_convex (const ConvexPolygon &poly) noexcept
        {
            const auto &v = poly.vertices;
            const std::size_t n = v.size ();
            if (n < 3)
                return false;
            for (std::size_t i = 0; i < n; ++i)
                if (cross (v[(i + 1) % n] - v[i], v[(i + 2) % n] - v[(i + 1) % n]) <= 0.0)
                    return false;
            return true;
        }

        bool heading_ok (const std::optional<std::pair<double, double>> &interval, double theta) noexcept
        {
            if (!interval)
                return true;
            const auto [lo, hi] = *interval;
            if (hi - lo >= kTwoPi)
                return true;
            double shifted = std::fmod (theta - lo, kTwoPi);
            if (shifted < 0.0)
                shifted += kTwoPi;
            return lo + shifted <= hi;
        }
    } // namespace

    double Bounds::diagonal () const noexcept { return std::hypot (xmax - xmin, ymax - ymin); }

    const char *to_string (ExitClass c) noexcept
    {
        switch (c)
        {
        case ExitClass::Interior:
            return "interior";
        case ExitClass::GoalBoundary:
            return "goal";
        case ExitClass::ObstacleOrOuterBoundary:
            return "failure";
        }
        return "?";
    }

    bool shape_contains (const Shape &s, const Point &p) noexcept
    {
        if (const auto *d = std::get_if<Disc> (&s))
            return (p - d->center).squaredNorm () <= d->radius * d->radius;
        return polygon_contains (std::get<ConvexPolygon> (s), p, false);
    }

    bool segment_hits_shape (const Shape &s, const Point &a, const Point &b) noexcept
    {
        if (const auto *d = std::get_if<Disc> (&s))
            return point_segment_distance (d->center, a, b) <= d->radius;
        return segment_hits_polygon (std::get<ConvexPolygon> (s), a, b);
    }

    Workspace::Workspace (Bounds bounds, std::vector<Obstacle> obstacles, GoalRegion goal, double collision_resolution)
        : bounds_ (bounds), obstacles_ (std::move (obstacles)), goal_ (std::move (goal)), resolution_ (collision_resolution)
    {
        reps_.reserve (obstacles_.size ());
        for (const auto &o : obstacles_)
            reps_.push_back (o.representative);
    }

    bool Workspace::in_obstacle (const Point &p) const noexcept
    {
        for (const auto &o : obstacles_)
            for (const auto &piece : o.pieces)
                if (shape_contains (piece, p))
                    return true;
        return false;
    }

    bool Workspace::in_goal (const Point &p) const noexcept { return (p - goal_.disc.center).squaredNorm () <= goal_.disc.radius * goal_.disc.radius; }

    bool Workspace::contains_free (const Point &p) const noexcept { return bounds_.contains (p) && !in_obstacle (p) && !in_goal (p); }

    ExitClass Workspace::classify_exit (const Point &p) const noexcept
    {
        if (in_goal (p))
            return ExitClass::GoalBoundary;
        if (!bounds_.contains (p) || in_obstacle (p))
            return ExitClass::ObstacleOrOuterBoundary;
        return ExitClass::Interior;
    }

    ExitClass Workspace::classify_exit_state (const Vec &x) const noexcept
    {
        const Point p (x (0), x (1));
        const ExitClass c = classify_exit (p);
        if (c == ExitClass::GoalBoundary && x.size () >= 3 && !heading_ok (goal_.heading, x (2)))
            return ExitClass::ObstacleOrOuterBoundary;
        return c;
    }

    bool Workspace::segment_free (const Point &a, const Point &b) const noexcept
    {
        if (!bounds_.contains (a) || !bounds_.contains (b))
            return false;
        for (const auto &o : obstacles_)
            for (const auto &piece : o.pieces)
                if (segment_hits_shape (piece, a, b))
                    return false;
        return true;
    }

    bool Workspace::polyline_free (std::span<const Point> pts) const noexcept
    {
        if (pts.size () == 1)
            return segment_free (pts[0], pts[0]);
        for (std::size_t i = 1; i < pts.size (); ++i)
            if (!segment_free (pts[i - 1], pts[i]))
                return false;
        return true;
    }

    bool Workspace::trajectory_free (const Trajectory &traj) const
    {
        if (traj.empty ())
            throw ConfigError ("trajectory_free: empty trajectory");
        const auto pts = traj.positions ();
        for (std::size_t i = 1; i < pts.size (); ++i)
            if ((pts[i] - pts[i - 1]).norm () > resolution_ * (1.0 + 1e-12))
                throw ChordTooCoarse ("trajectory_free: chord longer than collision resolution; densify the trajectory");
        return polyline_free (pts);
    }

    std::vector<std::string> Workspace::validate () const
    {
        std::vector<std::string> issues;
        auto report = [&] (const std::string &msg) { issues.push_back (msg); };

        if (!(bounds_.xmax > bounds_.xmin && bounds_.ymax > bounds_.ymin))
            report ("bounds are empty");
        if (!(resolution_ > 0.0))
            report ("collision resolution must be positive");
        for (std::size_t i = 0; i < obstacles_.size (); ++i)
        {
            const auto &o = obstacles_[i];
            const std::string tag = "obstacle " + std::to_string (i);
            if (o.pieces.empty ())
                report (tag + " has no pieces");
            bool rep_inside = false;
            for (const auto &piece : o.pieces)
            {
                if (const auto *poly = std::get_if<ConvexPolygon> (&piece); poly && !polygon_is_ccw_convex (*poly))
                    report (tag + " has a polygon that is not convex and counter-clockwise");
                if (const auto *d = std::get_if<Disc> (&piece); d && !(d->radius > 0.0))
                    report (tag + " has a disc with non-positive radius");
                if (!shape_in_bounds (piece, bounds_))
                    report (tag + " leaves the bounds");
                rep_inside = rep_inside || shape_strictly_contains (piece, o.representative);
                if (shapes_intersect (piece, Shape (goal_.disc)))
                    report (tag + " intersects the goal region");
            }
            if (!rep_inside)
                report (tag + " representative point is not in its interior");
            for (std::size_t j = i + 1; j < obstacles_.size (); ++j)
            {
                const auto overlaps = [&] {
                    for (const auto &pa : o.pieces)
                        for (const auto &pb : obstacles_[j].pieces)
                            if (shapes_intersect (pa, pb))
                                return true;
                    return false;
                };
                if (overlaps ())
                    report (tag + " intersects obstacle " + std::to_string (j));
            }
        }
        if (!(goal_.disc.radius > 0.0))
            report ("goal radius must be positive");
        if (!bounds_.contains (goal_.disc.center))
            report ("goal center lies outside the bounds");
        if (!in_goal (goal_.representative))
            report ("goal representative point lies outside the goal region");
        return issues;
    }

    ExitClassifier Workspace::classifier () const
    {
        return [ws = *this] (const Vec &x) { return ws.classify_exit_state (x); };
    }
} // namespace pirrht
