#pragma once
/**
 * @file
 * @brief Monte-Carlo path-integral control for first-exit problems: rollouts
 *  under the passive or a reference-drifted measure with likelihood-ratio
 *  weights, the desirability and open-loop control estimators, their per-class
 *  mixture, and the receding-horizon execution loop.
 *
 * Weights are kept in the log domain, -(phi + dt * sum L_j) / lambda, and
 * exponentiated with a max shift when averaged.
 */

#include <pirrht/dynamics.hpp>
#include <pirrht/environment.hpp>
#include <pirrht/planner.hpp>
#include <pirrht/topology.hpp>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace pirrht
{
    /// Sampling measure: drift by the reference tape, or the passive dynamics when it is empty.
    struct MeasureSpec
    {
        ControlTape reference;
        /// Class label carried into the estimate; may be empty.
        HSignature h;
        double cost = 0.0;
    };

    struct SamplerConfig
    {
        double dt = 0.1;
        /// Samples per measure.
        std::size_t samples = 200;
        /// Rollout step cap; 0 derives horizon_factor x the longest reference duration.
        std::size_t max_steps = 0;
        double horizon_factor = 4.0;
        /// Draw samples in pairs sharing one stream with negated increments.
        bool antithetic = true;
        /// Length of the estimated tape; 0 keeps every step reached by some rollout.
        std::size_t tape_steps = 0;
    };

    struct RolloutResult
    {
        /// -(phi + dt * sum L_j) / lambda; -inf when the terminal cost is infinite.
        double log_weight = -std::numeric_limits<double>::infinity ();
        /// Standard-normal draws Z_i, one per step taken (possibly truncated to the tape length).
        std::vector<Vec> increments;
        ExitClass exit = ExitClass::Interior;
        std::size_t steps = 0;
        Vec final_state;

        [[nodiscard]] double weight () const noexcept;
    };

    /// Simulate one rollout from x0 until exit or max_steps. sign = -1 negates every draw.
    /// Only the first record_steps increments are kept.
    RolloutResult rollout (const SdeModel &model, const ControlTape &reference, const Vec &x0, const ExitClassifier &classify,
                           std::mt19937_64 &rng, double dt, std::size_t max_steps, double sign = 1.0,
                           std::size_t record_steps = std::numeric_limits<std::size_t>::max ());

    struct ClassEstimate
    {
        HSignature h;
        double reference_cost = 0.0;
        /// Mean weight of this class's samples, and its log.
        double psi = 0.0;
        double log_psi = -std::numeric_limits<double>::infinity ();
        double psi_se = 0.0;
        /// This class's share of the mixture control, normalised by the shared desirability.
        ControlTape tape;
        std::size_t n_valid = 0;
        std::size_t n_goal = 0;
    };

    struct PiEstimate
    {
        double psi_hat = 0.0;
        double log_psi_hat = -std::numeric_limits<double>::infinity ();
        double psi_se = 0.0;
        ControlTape control_tape;
        /// Standard error of the first control (ratio estimator, delta method).
        Vec u0_se;
        std::vector<ClassEstimate> per_class;
        /// Index of the class with the largest desirability.
        std::size_t dominant = 0;
    };

    /// Independent stream seed for (root, a, b), e.g. (root seed, class, sample pair).
    std::uint64_t derive_seed (std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) noexcept;

    /// Sample under every measure and mix the per-class estimates with a shared
    /// desirability normaliser. Throws DegenerateEstimate when every weight vanishes.
    PiEstimate estimate_importance (const SdeModel &model, const std::vector<MeasureSpec> &specs, const Vec &x0,
                                    const ExitClassifier &classify, std::uint64_t seed, const SamplerConfig &config);

    /// Passive-measure estimate (single empty reference); config.max_steps must be set.
    PiEstimate estimate_passive (const SdeModel &model, const Vec &x0, const ExitClassifier &classify, std::uint64_t seed,
                                 const SamplerConfig &config);

    struct RecedingConfig
    {
        SamplerConfig sampler;
        /// Closed-loop step cap; reaching it counts as failure.
        std::size_t max_wall_steps = 1000;
    };

    struct StepLog
    {
        double t = 0.0;
        Vec x;
        Vec u;
        double log_psi = -std::numeric_limits<double>::infinity ();
        /// Dominant reference class (index into class_h), or -1 when the step fell back.
        int dominant = -1;
        std::vector<HSignature> class_h;
        std::vector<double> class_log_psi;
        bool fallback = false;
    };

    struct RunResult
    {
        Trajectory trace;
        bool reached_goal = false;
        ExitClass exit = ExitClass::Interior;
        double realized_cost = 0.0;
        std::vector<StepLog> steps;
        /// ones + H(trace) + H(final point -> goal representative); comparable with planner node signatures.
        HSignature realized_h;
    };

    /// Closed loop: extract references, estimate, apply one period of the estimated
    /// control to the true system with fresh noise, repeat until exit.
    RunResult run_receding_horizon (PlannerGraph &graph, const Vec &x0, std::uint64_t seed, const RecedingConfig &config);

    /// ones + H(path) + H(path end -> goal representative).
    HSignature realized_signature (const Workspace &ws, const std::vector<Point> &path);
} // namespace pirrht
