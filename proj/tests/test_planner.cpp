#include "doctest.h"
#include "oracles.hpp"

#include <pirrht/planner.hpp>
#include <pirrht/scenario.hpp>

#include <map>

using namespace pirrht;

namespace
{
    Vec v2 (double a, double b) { return Eigen::Vector2d (a, b); }

    /// One square obstacle in the middle of a 10 x 10 field, goal on the right.
    PlannerGraph one_block (double h_limit = std::numeric_limits<double>::infinity ())
    {
        std::vector<Obstacle> obs{{{ConvexPolygon{{{4, 4}, {6, 4}, {6, 6}, {4, 6}}}}, {5, 5}}};
        Workspace ws ({0, 0, 10, 10}, obs, {{{9, 5}, 0.5}, {9, 5}, std::nullopt});
        PlannerConfig cfg;
        cfg.h_limit = h_limit;
        cfg.gamma = 40.0;
        return PlannerGraph (ws, SdeModel::single_integrator (0.1), cfg);
    }

    Scenario integrator () { return load_scenario (oracle::scenario_path ("integrator_two_obstacles.json")); }
} // namespace

TEST_SUITE ("planner")
{
    TEST_CASE ("roots")
    {
        PlannerGraph g = one_block ();
        const VertexId a = g.add_root (v2 (9, 5));
        REQUIRE (a != kNone);
        CHECK (g.live_nodes (a).front ()->h == HSignature::ones (1));
        const VertexId b = g.add_root (v2 (9.3, 5.2));
        REQUIRE (b != kNone);
        const double expect = 1.0 + segment_signature ({9.3, 5.2}, {9, 5}, g.workspace ().representative_points ())[0];
        CHECK (g.live_nodes (b).front ()->h[0] == doctest::Approx (expect).epsilon (1e-15));
        CHECK (std::abs (expect - 1.0) < 0.05);
        CHECK (g.vertices ().size () == 2);
        CHECK (g.audit ().empty ());
    }

    TEST_CASE ("goal-only sampling yields only roots")
    {
        const Scenario s = integrator ();
        PlannerConfig cfg = s.planner_config ();
        cfg.goal_bias = 1.0;
        PlannerGraph g (s.workspace, s.model.build (), cfg);
        std::mt19937_64 rng (1);
        g.expand (50, rng);
        CHECK (g.vertices ().size () == 50);
        for (const auto &v : g.vertices ())
            CHECK (v.root);
    }

    TEST_CASE ("append_node domination")
    {
        PlannerGraph g = one_block ();
        const VertexId v = g.add_root (v2 (9, 5));
        auto node = [] (double h, double c) {
            Node n;
            n.h = HSignature{h};
            n.cost = c;
            return n;
        };
        CHECK (g.append_node (v, node (3.0, 3)));
        CHECK_FALSE (g.append_node (v, node (3.0, 5)));
        CHECK (g.live_nodes (v).size () == 2);

        PlannerGraph g2 = one_block ();
        const VertexId w = g2.add_root (v2 (9, 5));
        CHECK (g2.append_node (w, node (3.0, 5)));
        CHECK (g2.append_node (w, node (3.0, 3)));
        REQUIRE (g2.live_nodes (w).size () == 2);
        CHECK (g2.live_nodes (w).back ()->cost == 3.0);

        CHECK (g2.append_node (w, node (2.0, 9)));
        CHECK (g2.live_nodes (w).size () == 3);

        PlannerGraph g3 = one_block (0.6);
        const VertexId r = g3.add_root (v2 (9, 5));
        CHECK_FALSE (g3.append_node (r, node (1.7, 1)));
    }

    TEST_CASE ("choose_parent")
    {
        PlannerGraph g = one_block ();
        const VertexId root = g.add_root (v2 (9, 5));
        const VertexId v = g.choose_parent (v2 (8, 5));
        REQUIRE (v != kNone);
        REQUIRE (g.live_nodes (v).size () == 1);
        CHECK (g.live_nodes (v).front ()->cost == doctest::Approx (tpbvp (g.model (), v2 (8, 5), v2 (9, 5)).cost));
        CHECK (g.live_nodes (v).front ()->parent == g.vertices ()[root].nodes.front ());

        // both sides of the block are reachable from the far side
        const VertexId up = g.choose_parent (v2 (7, 8));
        const VertexId down = g.choose_parent (v2 (7, 2));
        REQUIRE (up != kNone);
        REQUIRE (down != kNone);
        g.rewire (up);
        g.rewire (down);
        const VertexId far = g.choose_parent (v2 (2, 5));
        REQUIRE (far != kNone);
        const auto nodes = g.live_nodes (far);
        REQUIRE (nodes.size () == 2);
        CHECK (std::abs (std::abs (nodes[0]->h[0] - nodes[1]->h[0]) - 1.0) < 0.05);
        CHECK (g.audit ().empty ());

        // behind a wall with nothing in sight
        PlannerGraph walled = one_block ();
        walled.add_root (v2 (9, 5));
        const std::size_t before = walled.vertices ().size ();
        CHECK (walled.choose_parent (v2 (3, 5)) == kNone);
        CHECK (walled.vertices ().size () == before);
    }

    TEST_CASE ("per-class costs match a label-correcting oracle")
    {
        const Scenario s = integrator ();
        for (std::uint64_t seed : {1u, 2u})
        {
            PlannerGraph g = s.make_graph ();
            std::mt19937_64 rng (seed);
            g.expand_until (300, 100000, rng);
            REQUIRE (g.vertices ().size () == 300);
            CHECK (g.audit ().empty ());
            (void)g.extract_reference (s.start);
            CHECK (g.audit ().empty ());
            const auto labels = oracle::class_labels (g);
            CHECK (oracle::label_mismatches (g, labels) == 0);
        }
    }

    TEST_CASE ("per-class best cost never increases")
    {
        const Scenario s = integrator ();
        PlannerGraph g = s.make_graph ();
        std::mt19937_64 rng (5);
        g.expand (300, rng);
        (void)g.extract_reference (s.start);
        const auto q = static_cast<VertexId> (g.vertices ().size () - 1);
        std::vector<std::pair<HSignature, double>> best;
        for (int round = 0; round < 12; ++round)
        {
            for (const Node *n : g.live_nodes (q))
            {
                bool seen = false;
                for (auto &[h, c] : best)
                    if (homologous (h, n->h))
                    {
                        REQUIRE (n->cost <= c + 1e-9);
                        c = n->cost;
                        seen = true;
                    }
                if (!seen)
                    best.emplace_back (n->h, n->cost);
            }
            // a class once present stays present
            for (const auto &[h, c] : best)
            {
                bool present = false;
                for (const Node *n : g.live_nodes (q))
                    present = present || homologous (h, n->h);
                REQUIRE (present);
            }
            g.expand (150, rng);
        }
        CHECK (best.size () >= 2);
    }

    TEST_CASE ("three classes and replayable tapes in the bundled scenario")
    {
        const Scenario s = integrator ();
        PlannerGraph g = s.make_graph ();
        std::mt19937_64 rng (s.planner.seed);
        g.expand (s.planner.iters, rng);
        const auto refs = g.extract_reference (s.start);
        REQUIRE (refs.size () == 3);
        for (std::size_t i = 1; i < refs.size (); ++i)
            CHECK (refs[i - 1].cost <= refs[i].cost);
        const Vec zero = Vec::Zero (2);
        for (const auto &r : refs)
        {
            Vec x = s.start;
            for (std::size_t j = 0; j < r.tape.size (); ++j)
                x = em_step (g.model (), x, r.tape.at (j), zero, r.tape.dt);
            const double gap = (Point (x (0), x (1)) - s.workspace.goal ().disc.center).norm () - s.workspace.goal ().disc.radius;
            CHECK (gap <= 1e-3);
            CHECK (r.tape.duration () >= r.duration - 1e-9);
            CHECK (r.tape.duration () < r.duration + r.tape.dt + 1e-9);
        }

        // querying at an existing vertex reproduces its classes
        VertexId probe = kNone;
        for (VertexId v = 0; v < g.vertices ().size (); ++v)
            if (!g.vertices ()[v].root && g.live_nodes (v).size () >= 2)
            {
                probe = v;
                break;
            }
        REQUIRE (probe != kNone);
        PlannerGraph copy = g;
        const auto again = copy.extract_reference (g.vertices ()[probe].x);
        for (const Node *n : g.live_nodes (probe))
        {
            bool matched = false;
            for (const auto &r : again)
                matched = matched || (homologous (r.h, n->h) && std::abs (r.cost - n->cost) < 1e-9);
            CHECK (matched);
        }
    }

    TEST_CASE ("unreachable query")
    {
        PlannerGraph g = one_block ();
        CHECK_THROWS_AS (g.extract_reference (v2 (1, 1)), Unreachable);
    }
}
