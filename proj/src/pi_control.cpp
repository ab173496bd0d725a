#include <pirrht/pi_control.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

namespace pirrht
{
    namespace
    {
        std::uint64_t splitmix (std::uint64_t z) noexcept
        {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

        constexpr double kNegInf = -std::numeric_limits<double>::infinity ();

        double safe_log (double v) { return v > 0.0 ? std::log (v) : kNegInf; }
    } // namespace

    double RolloutResult::weight () const noexcept { return std::exp (log_weight); }

    std::uint64_t derive_seed (std::uint64_t root, std::uint64_t a, std::uint64_t b) noexcept
    {
        return splitmix (splitmix (splitmix (root) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
    }

    RolloutResult rollout (const SdeModel &model, const ControlTape &reference, const Vec &x0, const ExitClassifier &classify,
                           std::mt19937_64 &rng, double dt, std::size_t max_steps, double sign, std::size_t record_steps)
    {
        if (!(dt > 0.0))
            throw ConfigError ("rollout: dt must be positive");
        const int m = model.control_dim ();
        if (!reference.empty () && reference.controls.front ().size () != m)
            throw LengthMismatch ("rollout: reference control dimension differs from the model");
        const Mat &coupling = model.girsanov_coupling ();
        const double sqdt = std::sqrt (dt);
        std::normal_distribution<double> normal;

        RolloutResult r;
        Vec x = x0;
        double running = 0.0;
        ExitClass exit = classify (x);
        std::size_t j = 0;
        for (; exit == ExitClass::Interior && j < max_steps; ++j)
        {
            const Vec u = reference.empty () ? Vec (Vec::Zero (m)) : reference.at (j);
            Vec z (m);
            for (int i = 0; i < m; ++i)
                z (i) = sign * normal (rng);
            running += (model.running_cost (u) + u.dot (coupling * z) / sqdt) * dt;
            if (j < record_steps)
                r.increments.push_back (z);
            x = em_step (model, x, u, z, dt);
            exit = classify (x);
        }
        r.steps = j;
        r.exit = exit;
        r.final_state = x;
        // truncated rollouts are charged as failures
        const double phi = model.phi () (exit == ExitClass::Interior ? ExitClass::ObstacleOrOuterBoundary : exit);
        r.log_weight = std::isinf (phi) ? kNegInf : -(phi + running) / model.lambda ();
        return r;
    }

    PiEstimate estimate_importance (const SdeModel &model, const std::vector<MeasureSpec> &specs, const Vec &x0,
                                    const ExitClassifier &classify, std::uint64_t seed, const SamplerConfig &config)
    {
        const std::size_t H = specs.size (), N = config.samples;
        if (H == 0 || N == 0)
            throw ConfigError ("estimate: need at least one measure and one sample");
        if (!(config.dt > 0.0))
            throw ConfigError ("estimate: dt must be positive");
        double longest = 0.0;
        for (const auto &s : specs)
        {
            if (!s.reference.empty () && std::abs (s.reference.dt - config.dt) > 1e-12 * config.dt)
                throw ConfigError ("estimate: reference tape period differs from dt");
            longest = std::max (longest, s.reference.duration ());
        }
        std::size_t max_steps = config.max_steps;
        if (max_steps == 0)
            max_steps = static_cast<std::size_t> (std::ceil (config.horizon_factor * longest / config.dt - 1e-9));
        if (max_steps == 0)
            throw ConfigError ("estimate: max_steps must be set when no reference has positive duration");
        const std::size_t record = config.tape_steps ? config.tape_steps : max_steps;

        const std::size_t units = config.antithetic ? (N + 1) / 2 : N;
        auto unit_of = [&] (std::size_t k) { return config.antithetic ? k / 2 : k; };
        std::vector<RolloutResult> results (H * N);
        const auto jobs = static_cast<long> (H * units);
#pragma omp parallel for schedule(dynamic)
        for (long job = 0; job < jobs; ++job)
        {
            const std::size_t h = static_cast<std::size_t> (job) / units, unit = static_cast<std::size_t> (job) % units;
            const std::uint64_t s = derive_seed (seed, h, unit);
            const ControlTape &ref = specs[h].reference;
            std::mt19937_64 rng (s);
            if (!config.antithetic)
            {
                results[h * N + unit] = rollout (model, ref, x0, classify, rng, config.dt, max_steps, 1.0, record);
                continue;
            }
            results[h * N + 2 * unit] = rollout (model, ref, x0, classify, rng, config.dt, max_steps, 1.0, record);
            if (2 * unit + 1 < N)
            {
                rng.seed (s);
                results[h * N + 2 * unit + 1] = rollout (model, ref, x0, classify, rng, config.dt, max_steps, -1.0, record);
            }
        }

        double shift = kNegInf;
        for (const auto &r : results)
            shift = std::max (shift, r.log_weight);
        if (shift == kNegInf)
            throw DegenerateEstimate ("estimate: every sampled weight is zero");

        const int m = model.control_dim ();
        std::size_t T = config.tape_steps;
        if (T == 0)
            for (const auto &r : results)
                T = std::max (T, r.increments.size ());
        T = std::max<std::size_t> (T, 1);

        std::vector<double> w (results.size ());
        double total = 0.0;
        for (std::size_t k = 0; k < results.size (); ++k)
        {
            w[k] = std::exp (results[k].log_weight - shift);
            total += w[k];
        }
        // shared desirability, in units of exp(shift)
        const double psi_scaled = total / static_cast<double> (H * N);
        const Mat &n2c = model.noise_to_control ();
        const double sqdt = std::sqrt (config.dt);

        PiEstimate est;
        est.log_psi_hat = std::log (psi_scaled) + shift;
        est.psi_hat = std::exp (est.log_psi_hat);
        est.control_tape.dt = config.dt;
        est.control_tape.control_dim = static_cast<std::size_t> (m);
        est.control_tape.controls.assign (T, Vec::Zero (m));

        double se2_sum = 0.0;
        for (std::size_t h = 0; h < H; ++h)
        {
            ClassEstimate ce;
            ce.h = specs[h].h;
            ce.reference_cost = specs[h].cost;
            ce.tape.dt = config.dt;
            ce.tape.control_dim = static_cast<std::size_t> (m);
            ce.tape.controls.assign (T, Vec::Zero (m));
            double sum = 0.0;
            std::vector<double> unit_sum (units, 0.0), unit_n (units, 0.0);
            for (std::size_t k = 0; k < N; ++k)
            {
                const auto &r = results[h * N + k];
                const double wk = w[h * N + k];
                sum += wk;
                unit_sum[unit_of (k)] += wk;
                unit_n[unit_of (k)] += 1.0;
                if (r.log_weight > kNegInf)
                    ++ce.n_valid;
                if (r.exit == ExitClass::GoalBoundary)
                    ++ce.n_goal;
                if (wk == 0.0)
                    continue;
                for (std::size_t i = 0; i < T; ++i)
                {
                    Vec a = specs[h].reference.empty () ? Vec (Vec::Zero (m)) : specs[h].reference.at (i);
                    if (i < r.increments.size ())
                        a += n2c * r.increments[i] / sqdt;
                    ce.tape.controls[i] += wk * a;
                }
            }
            for (auto &c : ce.tape.controls)
                c /= static_cast<double> (N) * psi_scaled;

            const double mean = sum / static_cast<double> (N);
            ce.psi = std::exp (safe_log (mean) + shift);
            ce.log_psi = safe_log (mean) + shift;
            if (units > 1)
            {
                double ss = 0.0;
                for (std::size_t j = 0; j < units; ++j)
                {
                    const double d = unit_sum[j] / unit_n[j] - mean;
                    ss += d * d;
                }
                const double se_scaled = std::sqrt (ss / static_cast<double> (units - 1) / static_cast<double> (units));
                ce.psi_se = se_scaled * std::exp (shift);
                se2_sum += se_scaled * se_scaled;
            }
            for (std::size_t i = 0; i < T; ++i)
                est.control_tape.controls[i] += ce.tape.controls[i] / static_cast<double> (H);
            est.per_class.push_back (std::move (ce));
        }
        est.psi_se = std::sqrt (se2_sum) / static_cast<double> (H) * std::exp (shift);

        // ratio-estimator standard error of the first control
        const Vec u0 = est.control_tape.controls.front ();
        Vec resid2 = Vec::Zero (m);
        for (std::size_t h = 0; h < H; ++h)
        {
            std::vector<Vec> unit_res (units, Vec::Zero (m));
            for (std::size_t k = 0; k < N; ++k)
            {
                const auto &r = results[h * N + k];
                const double wk = w[h * N + k];
                if (wk == 0.0)
                    continue;
                Vec a = specs[h].reference.empty () ? Vec (Vec::Zero (m)) : specs[h].reference.at (0);
                if (!r.increments.empty ())
                    a += n2c * r.increments.front () / sqdt;
                unit_res[unit_of (k)] += wk * (a - u0);
            }
            for (const auto &ur : unit_res)
                resid2 += ur.cwiseProduct (ur);
        }
        est.u0_se = resid2.cwiseSqrt () / total;

        est.dominant = 0;
        for (std::size_t h = 1; h < H; ++h)
            if (est.per_class[h].log_psi > est.per_class[est.dominant].log_psi)
                est.dominant = h;
        return est;
    }

    PiEstimate estimate_passive (const SdeModel &model, const Vec &x0, const ExitClassifier &classify, std::uint64_t seed,
                                 const SamplerConfig &config)
    {
        if (config.max_steps == 0)
            throw ConfigError ("estimate_passive: max_steps must be set");
        return estimate_importance (model, {MeasureSpec{}}, x0, classify, seed, config);
    }

    HSignature realized_signature (const Workspace &ws, const std::vector<Point> &path)
    {
        const auto reps = ws.representative_points ();
        HSignature h = HSignature::ones (static_cast<Eigen::Index> (reps.size ()));
        if (path.empty ())
            return h;
        h += path_signature (path, reps);
        if (path.back () != ws.goal ().representative)
            h += path_signature (std::vector<Point>{path.back (), ws.goal ().representative}, reps);
        return h;
    }

    RunResult run_receding_horizon (PlannerGraph &graph, const Vec &x0, std::uint64_t seed, const RecedingConfig &config)
    {
        const SdeModel &model = graph.model ();
        const Workspace &ws = graph.workspace ();
        const double dt = config.sampler.dt;
        if (std::abs (graph.config ().dt - dt) > 1e-12 * dt)
            throw ConfigError ("receding horizon: planner tape period differs from the control period");
        const ExitClassifier classify = ws.classifier ();

        RunResult run;
        run.trace.times.push_back (0.0);
        run.trace.states.push_back (x0);
        std::mt19937_64 world (derive_seed (seed, 0x5eedULL));
        std::normal_distribution<double> normal;
        const int m = model.control_dim ();

        std::optional<ControlTape> previous;
        std::size_t previous_step = 0;
        Vec x = x0;
        double t = 0.0, running = 0.0;
        ExitClass exit = ws.classify_exit_state (x);
        for (std::size_t step = 0; exit == ExitClass::Interior && step < config.max_wall_steps; ++step)
        {
            StepLog log;
            log.t = t;
            log.x = x;
            std::vector<Reference> refs;
            try
            {
                refs = graph.extract_reference (x);
            }
            catch (const Unreachable &)
            {
                if (!previous)
                    throw;
            }

            Vec u;
            if (refs.empty ())
            {
                // keep executing the last plan
                u = previous->at (++previous_step);
                log.fallback = true;
            }
            else
            {
                std::vector<MeasureSpec> specs;
                for (const auto &r : refs)
                {
                    specs.push_back ({r.tape, r.h, r.cost});
                    log.class_h.push_back (r.h);
                }
                try
                {
                    const PiEstimate est = estimate_importance (model, specs, x, classify, derive_seed (seed, 1, step), config.sampler);
                    u = est.control_tape.at (0);
                    previous = est.control_tape;
                    log.log_psi = est.log_psi_hat;
                    log.dominant = static_cast<int> (est.dominant);
                    for (const auto &c : est.per_class)
                        log.class_log_psi.push_back (c.log_psi);
                }
                catch (const DegenerateEstimate &)
                {
                    u = refs.front ().tape.at (0);
                    previous = refs.front ().tape;
                    log.fallback = true;
                    log.class_log_psi.assign (refs.size (), -std::numeric_limits<double>::infinity ());
                }
                previous_step = 0;
            }

            Vec z (m);
            for (int i = 0; i < m; ++i)
                z (i) = normal (world);
            running += model.running_cost (u) * dt;
            x = em_step (model, x, u, z, dt);
            t += dt;
            log.u = u;
            run.steps.push_back (std::move (log));
            run.trace.times.push_back (t);
            run.trace.states.push_back (x);
            run.trace.controls.push_back (u);
            exit = ws.classify_exit_state (x);
        }

        run.exit = exit;
        run.reached_goal = exit == ExitClass::GoalBoundary;
        run.realized_cost = running + model.phi () (exit == ExitClass::Interior ? ExitClass::ObstacleOrOuterBoundary : exit);
        try
        {
            run.realized_h = realized_signature (ws, run.trace.positions ());
        }
        catch (const DegenerateSegment &)
        {
            run.realized_h = HSignature ();
        }
        return run;
    }
} // namespace pirrht
