#pragma once
/**
 * @file
 * @brief H-signatures of planar trajectories: per-obstacle winding fractions of
 *  the path around each representative point, and the allowed-class filter.
 */

#include <pirrht/core.hpp>

#include <Eigen/Core>

#include <initializer_list>
#include <limits>
#include <span>

namespace pirrht
{
    /// One real component per logical obstacle. Two same-endpoint paths are homologous
    /// exactly when their signatures coincide.
    class HSignature
    {
      public:
        HSignature () = default;
        explicit HSignature (Eigen::Index n) : v_ (Eigen::VectorXd::Zero (n)) {}
        explicit HSignature (Eigen::VectorXd v) : v_ (std::move (v)) {}
        HSignature (std::initializer_list<double> values);

        static HSignature ones (Eigen::Index n) { return HSignature (Eigen::VectorXd::Ones (n)); }

        [[nodiscard]] Eigen::Index size () const noexcept { return v_.size (); }
        [[nodiscard]] double operator[] (Eigen::Index i) const { return v_ (i); }
        double &operator[] (Eigen::Index i) { return v_ (i); }
        [[nodiscard]] const Eigen::VectorXd &values () const noexcept { return v_; }

        HSignature &operator+= (const HSignature &o);
        friend HSignature operator+ (HSignature a, const HSignature &b) { return a += b; }
        friend HSignature operator- (const HSignature &a, const HSignature &b);
        friend HSignature operator- (const HSignature &a) { return HSignature (Eigen::VectorXd (-a.v_)); }
        bool operator== (const HSignature &o) const { return v_.size () == o.v_.size () && v_ == o.v_; }

      private:
        Eigen::VectorXd v_;
    };

    /// Allowed set {h : |offset_i - h_i| <= h_limit for all i}; everything else is blocked.
    struct ClassFilter
    {
        double h_limit = std::numeric_limits<double>::infinity ();
        HSignature offset;

        static ClassFilter around_ones (Eigen::Index n, double h_limit) { return {h_limit, HSignature::ones (n)}; }
    };

    /// Default tolerance for homology equality; distinct classes differ by at least one in some component.
    inline constexpr double kHomologyTolerance = 0.05;

    /// Candidate of minimum absolute value; an exact tie (a = -b) resolves to the positive one.
    double absmin (std::span<const double> candidates);

    /// absmin over delta + 2k*pi for k in -2..2.
    double absmin_angle (double delta);

    /// Signature of the straight segment z1 -> z2. Throws DegenerateSegment when an
    /// endpoint coincides with a representative point.
    HSignature segment_signature (const Point &z1, const Point &z2, std::span<const Point> reps);

    /// Sum of chord signatures. Chords are bisected until each subtends less than pi/4
    /// at every representative point.
    HSignature path_signature (std::span<const Point> path, std::span<const Point> reps);
    HSignature path_signature (const Trajectory &traj, std::span<const Point> reps);

    bool homologous (const HSignature &a, const HSignature &b, double tol = kHomologyTolerance);

    bool is_allowed (const HSignature &h, const ClassFilter &filter);
} // namespace pirrht
