#pragma once
/**
 * @file
 * @brief Planar workspace: outer bounds, convex obstacles with representative
 *  points, a disc goal region, and the analytic collision queries used by the
 *  planner and the rollout simulator.
 */

#include <pirrht/core.hpp>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pirrht
{
    struct Disc
    {
        Point center = Point::Zero ();
        double radius = 0.0;

        bool operator== (const Disc &) const = default;
    };

    /// Convex polygon, vertices in counter-clockwise order.
    struct ConvexPolygon
    {
        std::vector<Point> vertices;

        bool operator== (const ConvexPolygon &) const = default;
    };

    using Shape = std::variant<Disc, ConvexPolygon>;

    /// A logical obstacle: one or more convex pieces sharing one representative point.
    /// The piece union may be concave; the H-signature has one component per logical obstacle.
    struct Obstacle
    {
        std::vector<Shape> pieces;
        Point representative = Point::Zero ();

        bool operator== (const Obstacle &) const = default;
    };

    struct GoalRegion
    {
        Disc disc;
        Point representative = Point::Zero ();
        /// Admissible heading interval [lo, hi] (radians) for models carrying a heading.
        std::optional<std::pair<double, double>> heading;

        bool operator== (const GoalRegion &) const = default;
    };

    struct Bounds
    {
        double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

        [[nodiscard]] bool contains (const Point &p) const noexcept { return p.x () >= xmin && p.x () <= xmax && p.y () >= ymin && p.y () <= ymax; }
        [[nodiscard]] double diagonal () const noexcept;
        bool operator== (const Bounds &) const = default;
    };

    enum class ExitClass
    {
        Interior,
        GoalBoundary,
        ObstacleOrOuterBoundary
    };

    const char *to_string (ExitClass c) noexcept;

    /// Maps a full state to its exit classification. Lets the rollout simulator run
    /// against domains other than a planar workspace (the 1-D oracle problems, for one).
    using ExitClassifier = std::function<ExitClass (const Vec &)>;

    bool shape_contains (const Shape &s, const Point &p) noexcept;
    bool segment_hits_shape (const Shape &s, const Point &a, const Point &b) noexcept;

    class Workspace
    {
      public:
        static constexpr double kDefaultResolution = 0.05;

        Workspace () = default;
        Workspace (Bounds bounds, std::vector<Obstacle> obstacles, GoalRegion goal, double collision_resolution = kDefaultResolution);

        [[nodiscard]] const Bounds &bounds () const noexcept { return bounds_; }
        [[nodiscard]] const std::vector<Obstacle> &obstacles () const noexcept { return obstacles_; }
        [[nodiscard]] const GoalRegion &goal () const noexcept { return goal_; }
        [[nodiscard]] double collision_resolution () const noexcept { return resolution_; }
        [[nodiscard]] std::span<const Point> representative_points () const noexcept { return reps_; }

        [[nodiscard]] bool in_obstacle (const Point &p) const noexcept;
        [[nodiscard]] bool in_goal (const Point &p) const noexcept;

        /// Inside bounds, outside every obstacle and outside the goal region.
        [[nodiscard]] bool contains_free (const Point &p) const noexcept;

        [[nodiscard]] ExitClass classify_exit (const Point &p) const noexcept;

        /// State-level classification; the third component, when present, is checked
        /// against the goal heading interval.
        [[nodiscard]] ExitClass classify_exit_state (const Vec &x) const noexcept;

        /// Closed segment avoids every obstacle and stays in bounds. Exact, no sampling.
        [[nodiscard]] bool segment_free (const Point &a, const Point &b) const noexcept;

        /// Every consecutive chord is segment_free. No spacing requirement.
        [[nodiscard]] bool polyline_free (std::span<const Point> pts) const noexcept;

        /// Chord-wise check of a sampled trajectory; throws ChordTooCoarse when two
        /// consecutive samples are farther apart than the collision resolution.
        [[nodiscard]] bool trajectory_free (const Trajectory &traj) const;

        /// Human-readable list of violated invariants; empty when valid.
        [[nodiscard]] std::vector<std::string> validate () const;

        [[nodiscard]] ExitClassifier classifier () const;

        bool operator== (const Workspace &o) const
        {
            return bounds_ == o.bounds_ && obstacles_ == o.obstacles_ && goal_ == o.goal_ && resolution_ == o.resolution_;
        }

      private:
        Bounds bounds_;
        std::vector<Obstacle> obstacles_;
        GoalRegion goal_;
        double resolution_ = kDefaultResolution;
        std::vector<Point> reps_;
    };

} // namespace pirrht
