#pragma once
// Independent reference computations shared by the unit and acceptance tests.

#include <pirrht/dubins.hpp>
#include <pirrht/environment.hpp>
#include <pirrht/planner.hpp>
#include <pirrht/scenario.hpp>
#include <pirrht/topology.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace oracle
{
    using pirrht::Point;

    inline std::string scenario_path (const std::string &name) { return std::string (PIRRHT_SCENARIO_DIR) + "/" + name; }

    /// Winding fraction of a polyline around zeta by midpoint quadrature of
    /// Im(dz / (z - zeta)) / 2pi, each chord split into `sub` pieces.
    inline double winding_quadrature (const std::vector<Point> &path, const Point &zeta, int sub = 4000)
    {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < path.size (); ++i)
        {
            const Point d = (path[i + 1] - path[i]) / sub;
            for (int k = 0; k < sub; ++k)
            {
                const Point z = path[i] + (k + 0.5) * d - zeta;
                total += (z.x () * d.y () - z.y () * d.x ()) / z.squaredNorm ();
            }
        }
        return total / (2.0 * pirrht::kPi);
    }

    /// Desirability of the symmetric two-sided exit problem on [-1, 1]:
    /// psi = cosh(kx) / cosh(k), k = sqrt(2q / (lambda b^2)).
    inline double cosh_desirability (double x, double q, double lambda, double b)
    {
        const double k = std::sqrt (2.0 * q / (lambda * b * b));
        return std::cosh (k * x) / std::cosh (k);
    }

    /// Finite-difference solve of 1/2 b^2 psi'' - (q / lambda) psi = 0 on [-1, 1] with
    /// psi(+-1) = 1 (Thomas algorithm), linearly interpolated at x.
    inline double fd_desirability (double x, double q, double lambda, double b, int cells = 4000)
    {
        const int n = cells - 1;
        const double h = 2.0 / cells, a = 0.5 * b * b / (h * h), c = q / lambda;
        std::vector<double> diag (n, -2.0 * a - c), rhs (n, 0.0), cp (n), dp (n);
        rhs.front () -= a;
        rhs.back () -= a;
        cp[0] = a / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (int i = 1; i < n; ++i)
        {
            const double m = diag[i] - a * cp[i - 1];
            cp[i] = a / m;
            dp[i] = (rhs[i] - a * dp[i - 1]) / m;
        }
        std::vector<double> psi (n);
        psi[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i)
            psi[i] = dp[i] - cp[i] * psi[i + 1];
        auto at = [&] (int i) { return i <= 0 || i >= cells ? 1.0 : psi[i - 1]; };
        const double s = (x + 1.0) / h;
        const int i = static_cast<int> (std::floor (s));
        return at (i) + (s - i) * (at (i + 1) - at (i));
    }

    /// Dubins candidate from circle geometry: segment kinds (+1 left, -1 right,
    /// 0 straight) and lengths in workspace units.
    struct DubinsCandidate
    {
        std::string word;
        int kinds[3];
        double lengths[3];
        [[nodiscard]] double total () const { return lengths[0] + lengths[1] + lengths[2]; }
    };

    inline double mod2pi (double a)
    {
        a = std::fmod (a, 2.0 * pirrht::kPi);
        return a < 0 ? a + 2.0 * pirrht::kPi : a;
    }

    inline pirrht::dubins::Pose advance (pirrht::dubins::Pose p, int kind, double len, double r)
    {
        if (kind == 0)
            return {p.x + len * std::cos (p.theta), p.y + len * std::sin (p.theta), p.theta};
        const double a = len / r, k = kind;
        return {p.x + k * r * (std::sin (p.theta + k * a) - std::sin (p.theta)), p.y + k * r * (std::cos (p.theta) - std::cos (p.theta + k * a)),
                p.theta + k * a};
    }

    inline pirrht::dubins::Pose endpoint (const pirrht::dubins::Pose &start, const DubinsCandidate &c, double r)
    {
        pirrht::dubins::Pose p = start;
        for (int i = 0; i < 3; ++i)
            p = advance (p, c.kinds[i], c.lengths[i], r);
        return p;
    }

    /// Every geometric solution of the six words whose forward replay lands on q1.
    inline std::vector<DubinsCandidate> dubins_candidates (const pirrht::dubins::Pose &q0, const pirrht::dubins::Pose &q1, double r)
    {
        using pirrht::kPi;
        auto center = [&] (const pirrht::dubins::Pose &p, int kind) {
            return Point (p.x - kind * r * std::sin (p.theta), p.y + kind * r * std::cos (p.theta));
        };
        auto arc = [&] (double from, double to, int kind) { return r * mod2pi (kind > 0 ? to - from : from - to); };
        std::vector<DubinsCandidate> raw;

        for (int k1 : {1, -1})
            for (int k2 : {1, -1})
            {
                const Point c1 = center (q0, k1), c2 = center (q1, k2), v = c2 - c1;
                const double d = v.norm (), base = std::atan2 (v.y (), v.x ());
                std::string name = std::string (k1 > 0 ? "L" : "R") + "S" + (k2 > 0 ? "L" : "R");
                if (k1 == k2)
                {
                    raw.push_back ({name, {k1, 0, k2}, {arc (q0.theta, base, k1), d, arc (base, q1.theta, k2)}});
                    continue;
                }
                if (d < 2.0 * r)
                    continue;
                const double s = std::sqrt (d * d - 4.0 * r * r);
                // tangent heading for the crossing tangent; try both signs, replay decides
                for (double sign : {1.0, -1.0})
                {
                    const double phi = base + sign * std::atan2 (2.0 * r, s);
                    raw.push_back ({name, {k1, 0, k2}, {arc (q0.theta, phi, k1), s, arc (phi, q1.theta, k2)}});
                }
            }

        for (int k : {1, -1})
        {
            const Point c1 = center (q0, k), c2 = center (q1, k), v = c2 - c1;
            const double d = v.norm ();
            if (d > 4.0 * r)
                continue;
            const double base = std::atan2 (v.y (), v.x ()), beta = std::acos (d / (4.0 * r));
            std::string name = k > 0 ? "LRL" : "RLR";
            for (double sign : {1.0, -1.0})
            {
                const Point c3 = c1 + 2.0 * r * Point (std::cos (base + sign * beta), std::sin (base + sign * beta));
                const Point m1 = 0.5 * (c1 + c3), m2 = 0.5 * (c3 + c2);
                auto heading = [&] (const Point &p, const Point &c, int kind) {
                    return std::atan2 (p.y () - c.y (), p.x () - c.x ()) + kind * kPi / 2.0;
                };
                const double h1 = heading (m1, c1, k), h2 = heading (m2, c2, k);
                raw.push_back ({name, {k, -k, k}, {arc (q0.theta, h1, k), arc (h1, h2, -k), arc (h2, q1.theta, k)}});
            }
        }

        std::vector<DubinsCandidate> out;
        for (const auto &c : raw)
        {
            const auto e = endpoint (q0, c, r);
            if (std::hypot (e.x - q1.x, e.y - q1.y) < 1e-7 && std::abs (pirrht::wrap_angle (e.theta - q1.theta)) < 1e-7)
                out.push_back (c);
        }
        return out;
    }

    struct Label
    {
        pirrht::HSignature h;
        double cost;
    };

    /// Cheapest allowed path of every homology class from each vertex to a root,
    /// by Bellman-Ford relaxation over all graph edges. Uses none of the planner's
    /// node bookkeeping; only vertices, edges and the filter.
    inline std::vector<std::vector<Label>> class_labels (const pirrht::PlannerGraph &g)
    {
        const auto &V = g.vertices ();
        const auto reps = g.workspace ().representative_points ();
        const Point goal = g.workspace ().goal ().representative;
        std::vector<std::vector<Label>> labels (V.size ());
        for (std::size_t v = 0; v < V.size (); ++v)
        {
            if (!V[v].root)
                continue;
            const Point p (V[v].x (0), V[v].x (1));
            pirrht::HSignature h = pirrht::HSignature::ones (static_cast<Eigen::Index> (reps.size ()));
            if (p != goal)
                h += pirrht::segment_signature (p, goal, reps);
            if (pirrht::is_allowed (h, g.filter ()))
                labels[v].push_back ({h, 0.0});
        }
        bool changed = true;
        while (changed)
        {
            changed = false;
            for (const auto &e : g.edges ())
            {
                const std::vector<Label> src = labels[e.to];
                for (const auto &l : src)
                {
                    Label cand{l.h + e.h, l.cost + e.cost};
                    if (!pirrht::is_allowed (cand.h, g.filter ()))
                        continue;
                    bool found = false;
                    for (auto &t : labels[e.from])
                        if (pirrht::homologous (t.h, cand.h, g.config ().homology_tol))
                        {
                            found = true;
                            if (cand.cost < t.cost - 1e-12)
                            {
                                t = cand;
                                changed = true;
                            }
                        }
                    if (!found)
                    {
                        labels[e.from].push_back (cand);
                        changed = true;
                    }
                }
            }
        }
        return labels;
    }

    /// Compare planner nodes with oracle labels at every vertex; returns mismatch count.
    inline std::size_t label_mismatches (const pirrht::PlannerGraph &g, const std::vector<std::vector<Label>> &labels, double tol = 1e-9)
    {
        std::size_t bad = 0;
        for (pirrht::VertexId v = 0; v < g.vertices ().size (); ++v)
        {
            const auto nodes = g.live_nodes (v);
            if (nodes.size () != labels[v].size ())
            {
                ++bad;
                continue;
            }
            for (const auto &l : labels[v])
            {
                bool ok = false;
                for (const auto *n : nodes)
                    if (pirrht::homologous (n->h, l.h) && std::abs (n->cost - l.cost) <= tol * std::max (1.0, l.cost))
                        ok = true;
                bad += ok ? 0 : 1;
            }
        }
        return bad;
    }
} // namespace oracle
