#include "doctest.h"
#include "oracles.hpp"

#include <pirrht/dubins.hpp>
#include <pirrht/dynamics.hpp>

#include <random>

using namespace pirrht;

namespace
{
    Vec v2 (double a, double b) { return Eigen::Vector2d (a, b); }
    Vec v3 (double a, double b, double c) { return Eigen::Vector3d (a, b, c); }
} // namespace

TEST_SUITE ("dynamics")
{
    TEST_CASE ("em_step")
    {
        const SdeModel m = SdeModel::single_integrator (0.1);
        const Vec a = em_step (m, v2 (0, 0), v2 (1, 0), v2 (0, 0), 0.1);
        CHECK (a (0) == doctest::Approx (0.1));
        CHECK (a (1) == 0.0);
        const Vec b = em_step (m, v2 (0, 0), v2 (0, 0), v2 (1, 0), 0.1);
        CHECK (b (0) == doctest::Approx (0.1 * std::sqrt (0.1)));

        const SdeModel car = SdeModel::dubins (1.0, 1.0, 0.03);
        Vec u (1), z (1);
        u << 0.0;
        z << 0.0;
        const Vec c = em_step (car, v3 (0, 0, 0), u, z, 0.1);
        CHECK (c (0) == doctest::Approx (0.1));
        CHECK (c (1) == 0.0);
        CHECK (c (2) == 0.0);
        CHECK_THROWS_AS (em_step (m, v2 (1e308, 0), v2 (1e308, 0), v2 (0, 0), 10.0), NonFiniteState);
    }

    TEST_CASE ("temperature and structure")
    {
        CHECK (SdeModel::single_integrator (0.1).lambda () == doctest::Approx (0.02).epsilon (1e-12));
        CHECK (SdeModel::single_integrator (0.3).lambda () == doctest::Approx (0.18).epsilon (1e-12));
        const SdeModel car = SdeModel::dubins (1.0, 1.0, 0.03);
        CHECK (car.lambda () == doctest::Approx (9e-4).epsilon (1e-12));
        CHECK (car.partitioned ());
        CHECK (car.phi () (ExitClass::ObstacleOrOuterBoundary) == 1000.0);
        CHECK (std::isinf (SdeModel::single_integrator (0.1).phi () (ExitClass::ObstacleOrOuterBoundary)));
        std::mt19937_64 rng (1);
        std::uniform_real_distribution<double> u (-5, 5);
        for (int i = 0; i < 100; ++i)
        {
            REQUIRE (SdeModel::single_integrator (0.1).lambda_residual (v2 (u (rng), u (rng))) < 1e-12);
            REQUIRE (car.lambda_residual (v3 (u (rng), u (rng), u (rng))) < 1e-12);
        }
        SdeModel bad = SdeModel::single_integrator (0.1);
        bad.override_lambda (0.05);
        CHECK (bad.lambda_residual (v2 (0, 0)) > 1e-3);
    }

    TEST_CASE ("integrator connection cost matches a scan over traversal time")
    {
        const SdeModel m = SdeModel::single_integrator (0.1);
        const Connection c = tpbvp (m, v2 (0, 0), v2 (3, 4));
        CHECK (c.length == doctest::Approx (5.0));
        CHECK (c.duration == doctest::Approx (5.0));
        CHECK (c.cost == doctest::Approx (10.0));
        CHECK (c.pieces.front ().u.norm () == doctest::Approx (1.0));

        std::mt19937_64 rng (2);
        std::uniform_real_distribution<double> u (-4, 4);
        for (int i = 0; i < 20; ++i)
        {
            const Vec a = v2 (u (rng), u (rng)), b = v2 (u (rng), u (rng));
            const double d = (b - a).norm ();
            double best = std::numeric_limits<double>::infinity ();
            for (int k = 1; k <= 200000; ++k)
            {
                const double T = 3.0 * d * k / 200000.0;
                best = std::min (best, T + d * d / T); // q T + (r / 2) (d / T)^2 T with q = 1, r = 2
            }
            const Connection cc = tpbvp (m, a, b);
            REQUIRE (cc.cost == doctest::Approx (best).epsilon (1e-6));
            REQUIRE (cc.cost == doctest::Approx (2.0 * d).epsilon (1e-12));
            REQUIRE ((cc.end_state (m) - b).norm () < 1e-12);
        }
    }

    TEST_CASE ("dubins examples")
    {
        const SdeModel car = SdeModel::dubins (1.0, 1.0, 0.03);
        const Connection s = tpbvp (car, v3 (0, 0, 0), v3 (4, 0, 0));
        CHECK (s.length == doctest::Approx (4.0));
        const Connection r = tpbvp (car, v3 (0, 0, 0), v3 (0, -2, kPi));
        CHECK (r.length == doctest::Approx (kPi));
        for (const auto &p : r.pieces)
            CHECK (p.u (0) == doctest::Approx (-1.0));
    }

    TEST_CASE ("dubins shortest path against geometric candidates")
    {
        std::mt19937_64 rng (7);
        std::uniform_real_distribution<double> u (-4, 4), th (-kPi, kPi);
        const SdeModel car = SdeModel::dubins (1.0, 1.0, 0.03);
        for (int i = 0; i < 200; ++i)
        {
            const dubins::Pose a{u (rng), u (rng), th (rng)}, b{u (rng), u (rng), th (rng)};
            const auto cands = oracle::dubins_candidates (a, b, 1.0);
            REQUIRE (cands.size () >= 2);
            double best = std::numeric_limits<double>::infinity ();
            for (const auto &c : cands)
                best = std::min (best, c.total ());
            const dubins::Path p = dubins::shortest (a, b, 1.0);
            REQUIRE (p.length () <= best + 1e-9);
            REQUIRE (p.length () >= best - 1e-9);

            const Connection c = tpbvp (car, v3 (a.x, a.y, a.theta), v3 (b.x, b.y, b.theta));
            Vec e = c.end_state (car) - v3 (b.x, b.y, b.theta);
            e (2) = wrap_angle (e (2));
            REQUIRE (e.norm () < 1e-6);
            for (const auto &piece : c.pieces)
                REQUIRE (std::abs (piece.u (0)) <= 1.0 + 1e-9);
        }
    }

    TEST_CASE ("rollout cost")
    {
        std::vector<Obstacle> obs{{{ConvexPolygon{{{4, 4}, {5, 4}, {5, 5}, {4, 5}}}}, {4.5, 4.5}}};
        const Workspace ws ({0, 0, 10, 10}, obs, {{{1, 0.5}, 0.3}, {1, 0.5}, std::nullopt});
        const SdeModel m = SdeModel::single_integrator (0.1);
        ControlTape zero{0.1, 2, {}};

        Trajectory at_goal{{0.0}, {v2 (1, 0.5)}, {}};
        CHECK (rollout_cost (m, at_goal, zero, ws.classifier ()) == 0.0);

        Trajectory walk;
        for (int i = 0; i <= 10; ++i)
        {
            walk.times.push_back (0.1 * i);
            walk.states.push_back (v2 (0.5, 2.0 - 0.15 * i));
        }
        walk.states.back () = v2 (1.0, 0.5);
        CHECK (rollout_cost (m, walk, zero, ws.classifier ()) == doctest::Approx (1.0));

        Trajectory hit{{0.0, 0.1}, {v2 (3.95, 4.5), v2 (4.05, 4.5)}, {}};
        CHECK (std::isinf (rollout_cost (m, hit, zero, ws.classifier ())));
        const SdeModel car = SdeModel::dubins (1.0, 1.0, 0.03);
        Trajectory hit3{{0.0, 0.1}, {v3 (3.95, 4.5, 0), v3 (4.05, 4.5, 0)}, {}};
        ControlTape zero1{0.1, 1, {}};
        CHECK (rollout_cost (car, hit3, zero1, ws.classifier ()) == doctest::Approx (1000.1));
    }

    TEST_CASE ("rasterize preserves the integrated control")
    {
        std::vector<ControlPiece> pieces{{0.37, v2 (1, 0)}, {0.81, v2 (0, -1)}, {0.05, v2 (2, 2)}};
        const ControlTape t = rasterize (pieces, 2, 0.1);
        Vec integral = Vec::Zero (2), expect = Vec::Zero (2);
        for (const auto &c : t.controls)
            integral += 0.1 * c;
        for (const auto &p : pieces)
            expect += p.duration * p.u;
        CHECK ((integral - expect).norm () < 1e-12);
        CHECK (t.at (1000).norm () == 0.0);
    }
}
