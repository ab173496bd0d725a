#include "doctest.h"
#include "oracles.hpp"

#include <pirrht/pi_control.hpp>

using namespace pirrht;

namespace
{
    Vec s1 (double x)
    {
        Vec v (1);
        v << x;
        return v;
    }

    /// dx = u dt + dw on [-1, 1] with both ends absorbing at zero cost.
    SdeModel line_model (TerminalCost phi = {0.0, std::numeric_limits<double>::infinity ()})
    {
        Mat G (1, 1), B (1, 1), R (1, 1);
        G << 1.0;
        B << 1.0;
        R << 2.0;
        return SdeModel::linear (G, B, R, 1.0, phi);
    }

    ExitClassifier line_exit ()
    {
        return [] (const Vec &x) { return std::abs (x (0)) >= 1.0 ? ExitClass::GoalBoundary : ExitClass::Interior; };
    }

    SamplerConfig line_config (std::size_t n, double dt = 0.01)
    {
        SamplerConfig c;
        c.dt = dt;
        c.samples = n;
        c.max_steps = 20000;
        c.tape_steps = 1;
        return c;
    }

    ControlTape constant_tape (double u, std::size_t steps, double dt)
    {
        ControlTape t;
        t.dt = dt;
        t.control_dim = 1;
        t.controls.assign (steps, s1 (u));
        return t;
    }
} // namespace

TEST_SUITE ("pi_control")
{
    TEST_CASE ("seed derivation is stable and spreads")
    {
        CHECK (derive_seed (1, 2, 3) == derive_seed (1, 2, 3));
        CHECK (derive_seed (1, 2, 3) != derive_seed (1, 3, 2));
        CHECK (derive_seed (1, 0, 0) != derive_seed (2, 0, 0));
    }

    TEST_CASE ("passive rollout charges only the state cost")
    {
        const SdeModel m = line_model ();
        std::mt19937_64 rng (4);
        const auto r = rollout (m, {}, s1 (0.0), line_exit (), rng, 0.01, 100000);
        REQUIRE (r.exit == ExitClass::GoalBoundary);
        CHECK (r.log_weight == doctest::Approx (-(0.01 * r.steps) / m.lambda ()).epsilon (1e-12));
        CHECK (r.increments.size () == r.steps);
    }

    TEST_CASE ("obstacle exits weigh exactly zero")
    {
        const SdeModel m = line_model ();
        auto wall = [] (const Vec &x) {
            if (x (0) >= 1.0)
                return ExitClass::GoalBoundary;
            return x (0) <= -1.0 ? ExitClass::ObstacleOrOuterBoundary : ExitClass::Interior;
        };
        std::mt19937_64 rng (9);
        int zeros = 0;
        for (int i = 0; i < 50; ++i)
        {
            const auto r = rollout (m, {}, s1 (-0.9), wall, rng, 0.01, 100000);
            if (r.exit == ExitClass::ObstacleOrOuterBoundary)
            {
                CHECK (r.weight () == 0.0);
                ++zeros;
            }
            else
                CHECK (r.weight () > 0.0);
        }
        CHECK (zeros > 0);
    }

    TEST_CASE ("single sample estimate is that sample's weight")
    {
        const SdeModel m = line_model ();
        SamplerConfig c = line_config (1);
        c.antithetic = false;
        const PiEstimate e = estimate_passive (m, s1 (0.2), line_exit (), 77, c);
        std::mt19937_64 rng (derive_seed (77, 0, 0));
        const auto r = rollout (m, {}, s1 (0.2), line_exit (), rng, c.dt, c.max_steps);
        CHECK (e.log_psi_hat == doctest::Approx (r.log_weight).epsilon (1e-14));
    }

    TEST_CASE ("one measure reproduces the drifted estimator by hand")
    {
        const SdeModel m = line_model ();
        SamplerConfig c = line_config (40, 0.01);
        c.antithetic = false;
        c.tape_steps = 0;
        const ControlTape ref = constant_tape (0.3, 50, c.dt);
        const PiEstimate e = estimate_importance (m, {{ref, {}, 0.0}}, s1 (0.1), line_exit (), 5, c);

        double sw = 0.0, swu = 0.0, shift = -std::numeric_limits<double>::infinity ();
        std::vector<RolloutResult> rs;
        for (std::size_t k = 0; k < c.samples; ++k)
        {
            std::mt19937_64 rng (derive_seed (5, 0, k));
            rs.push_back (rollout (m, ref, s1 (0.1), line_exit (), rng, c.dt, c.max_steps));
            shift = std::max (shift, rs.back ().log_weight);
        }
        for (const auto &r : rs)
        {
            const double w = std::exp (r.log_weight - shift);
            sw += w;
            swu += w * (0.3 + r.increments.front () (0) / std::sqrt (c.dt));
        }
        CHECK (e.control_tape.at (0) (0) == doctest::Approx (swu / sw).epsilon (1e-12));
        CHECK (e.log_psi_hat == doctest::Approx (std::log (sw / c.samples) + shift).epsilon (1e-12));
    }

    TEST_CASE ("mixture is the class average and ignores weight scale")
    {
        const SdeModel m = line_model ();
        const SamplerConfig c = line_config (400);
        const ControlTape a = constant_tape (0.5, 100, c.dt), b = constant_tape (-0.5, 100, c.dt);
        const PiEstimate e = estimate_importance (m, {{a, {}, 0.0}, {b, {}, 0.0}}, s1 (0.3), line_exit (), 12, c);
        REQUIRE (e.per_class.size () == 2);
        CHECK (e.psi_hat == doctest::Approx (0.5 * (e.per_class[0].psi + e.per_class[1].psi)).epsilon (1e-12));
        const Vec mix = 0.5 * (e.per_class[0].tape.at (0) + e.per_class[1].tape.at (0));
        CHECK (e.control_tape.at (0) (0) == doctest::Approx (mix (0)).epsilon (1e-12));

        const SdeModel shifted = line_model ({0.7, std::numeric_limits<double>::infinity ()});
        const PiEstimate f = estimate_importance (shifted, {{a, {}, 0.0}, {b, {}, 0.0}}, s1 (0.3), line_exit (), 12, c);
        CHECK (f.control_tape.at (0) (0) == doctest::Approx (e.control_tape.at (0) (0)).epsilon (1e-10));
        CHECK (f.log_psi_hat == doctest::Approx (e.log_psi_hat - 0.7 / m.lambda ()).epsilon (1e-10));
    }

    TEST_CASE ("desirability and control near the analytic solution")
    {
        const SdeModel m = line_model ();
        const double lambda = m.lambda ();
        CHECK (lambda == doctest::Approx (2.0));
        for (double x : {0.0, 0.5})
            CHECK (oracle::fd_desirability (x, 1.0, lambda, 1.0) == doctest::Approx (oracle::cosh_desirability (x, 1.0, lambda, 1.0)).epsilon (1e-5));

        const PiEstimate e0 = estimate_passive (m, s1 (0.0), line_exit (), 21, line_config (4000));
        CHECK (e0.psi_hat == doctest::Approx (oracle::cosh_desirability (0.0, 1.0, lambda, 1.0)).epsilon (0.06));
        CHECK (std::abs (e0.control_tape.at (0) (0)) < 3.0 * e0.u0_se (0) + 1e-12);
    }

    TEST_CASE ("all weights vanishing is reported")
    {
        const SdeModel m = line_model ();
        SamplerConfig c = line_config (10);
        c.max_steps = 1;
        CHECK_THROWS_AS (estimate_passive (m, s1 (0.0), line_exit (), 1, c), DegenerateEstimate);
    }

    TEST_CASE ("nearly noiseless closed loop follows the best reference")
    {
        std::vector<Obstacle> obs{{{ConvexPolygon{{{4, 4}, {6, 4}, {6, 6}, {4, 6}}}}, {5, 5}}};
        Workspace ws ({0, 0, 10, 10}, obs, {{{9, 5}, 0.5}, {9, 5}, std::nullopt});
        PlannerConfig pc;
        pc.h_limit = 0.6;
        PlannerGraph g (ws, SdeModel::single_integrator (1e-3), pc);
        std::mt19937_64 rng (3);
        g.expand (600, rng);
        Vec x0 (2);
        x0 << 1.0, 5.0;
        PlannerGraph probe = g;
        const double best = probe.extract_reference (x0).front ().cost;

        RecedingConfig rc;
        rc.sampler.samples = 20;
        rc.max_wall_steps = 300;
        PlannerGraph a = g, b = g;
        const RunResult r = run_receding_horizon (a, x0, 8, rc);
        CHECK (r.reached_goal);
        CHECK (r.realized_cost == doctest::Approx (best).epsilon (0.05));
        CHECK (r.realized_h.size () == 1);

        const RunResult again = run_receding_horizon (b, x0, 8, rc);
        REQUIRE (again.trace.size () == r.trace.size ());
        for (std::size_t i = 0; i < r.trace.size (); ++i)
            REQUIRE (again.trace.states[i] == r.trace.states[i]);
    }
}
