#include <pirrht/dubins.hpp>
#include <pirrht/dynamics.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace pirrht
{
    namespace
    {
        Mat diag (int n, double v)
        {
            Mat m = Mat::Zero (n, n);
            m.diagonal ().setConstant (v);
            return m;
        }

        dubins::Pose pose_of (const Vec &x) { return {x (0), x (1), x (2)}; }
    } // namespace

    const char *to_string (SystemKind k) noexcept
    {
        switch (k)
        {
        case SystemKind::Integrator:
            return "integrator";
        case SystemKind::Dubins:
            return "dubins";
        case SystemKind::Linear:
            return "linear";
        }
        return "?";
    }

    SdeModel SdeModel::single_integrator (double b, double q, double r)
    {
        if (!(b > 0.0) || !(r > 0.0) || !(q >= 0.0))
            throw ConfigError ("single_integrator: require b > 0, r > 0, q >= 0");
        SdeModel m;
        m.kind_ = SystemKind::Integrator;
        m.G_ = diag (2, 1.0);
        m.B_ = diag (2, b);
        m.R_ = diag (2, r);
        m.q_ = q;
        m.b_ = b;
        m.finalize ();
        return m;
    }

    SdeModel SdeModel::dubins (double V, double rho, double b, double q, double r, double phi_fail)
    {
        if (!(V > 0.0) || !(rho > 0.0) || !(b > 0.0) || !(r > 0.0) || !(q >= 0.0))
            throw ConfigError ("dubins: require V, rho, b, r > 0 and q >= 0");
        SdeModel m;
        m.kind_ = SystemKind::Dubins;
        m.G_ = Mat::Zero (3, 1);
        m.G_ (2, 0) = 1.0 / rho;
        m.B_ = Mat::Zero (3, 1);
        m.B_ (2, 0) = b;
        m.R_ = diag (1, r);
        m.q_ = q;
        m.phi_.failure = phi_fail;
        m.V_ = V;
        m.rho_ = rho;
        m.b_ = b;
        m.finalize ();
        return m;
    }

    SdeModel SdeModel::linear (Mat G, Mat B, Mat R, double q, TerminalCost phi)
    {
        if (G.rows () != B.rows () || G.cols () != B.cols () || R.rows () != G.cols () || R.cols () != G.cols ())
            throw ConfigError ("linear model: inconsistent matrix shapes");
        SdeModel m;
        m.kind_ = SystemKind::Linear;
        m.G_ = std::move (G);
        m.B_ = std::move (B);
        m.R_ = std::move (R);
        m.q_ = q;
        m.phi_ = phi;
        m.b_ = m.B_.norm ();
        m.finalize ();
        return m;
    }

    void SdeModel::finalize ()
    {
        const Mat gc = Gc (), bc = Bc ();
        const Mat sigma_c = gc * R_.inverse () * gc.transpose ();
        const Mat bb = bc * bc.transpose ();
        lambda_ = bb.trace () / sigma_c.trace ();
        noise_to_control_ = gc.inverse () * bc;
        girsanov_ = gc.transpose () * sigma_c.inverse () * bc;
    }

    Mat SdeModel::Gc () const
    {
        const int m = control_dim ();
        return G_.bottomRows (m);
    }

    Mat SdeModel::Bc () const
    {
        const int m = control_dim ();
        return B_.bottomRows (m);
    }

    Vec SdeModel::drift (const Vec &x) const
    {
        if (kind_ == SystemKind::Dubins)
        {
            Vec f (3);
            f << V_ * std::cos (x (2)), V_ * std::sin (x (2)), 0.0;
            return f;
        }
        return Vec::Zero (x.size ());
    }

    double SdeModel::lambda_residual (const Vec &) const
    {
        const Mat gc = Gc (), bc = Bc ();
        return (lambda_ * gc * R_.inverse () * gc.transpose () - bc * bc.transpose ()).norm ();
    }

    bool SdeModel::partitioned () const
    {
        const int top = state_dim () - control_dim ();
        return top <= 0 || (G_.topRows (top).isZero (0.0) && B_.topRows (top).isZero (0.0));
    }

    void SdeModel::override_lambda (double lambda)
    {
        if (!(lambda > 0.0))
            throw ConfigError ("lambda must be positive");
        lambda_ = lambda;
    }

    Vec SdeModel::propagate (const Vec &x, const Vec &u, double tau) const
    {
        if (kind_ != SystemKind::Dubins)
            return x + G_ * u * tau;
        const double omega = u (0) / rho_;
        Vec out (3);
        if (std::abs (omega) < 1e-12)
        {
            out << x (0) + V_ * tau * std::cos (x (2)), x (1) + V_ * tau * std::sin (x (2)), x (2);
            return out;
        }
        const double th1 = x (2) + omega * tau;
        out << x (0) + V_ / omega * (std::sin (th1) - std::sin (x (2))), x (1) - V_ / omega * (std::cos (th1) - std::cos (x (2))), th1;
        return out;
    }

    Vec em_step (const SdeModel &model, const Vec &x, const Vec &u, const Vec &z, double dt)
    {
        if (!(dt > 0.0))
            throw ConfigError ("em_step: dt must be positive");
        Vec next = x + model.drift (x) * dt + model.G () * u * dt + model.B () * z * std::sqrt (dt);
        if (!next.allFinite ())
            throw NonFiniteState ("em_step produced a non-finite state");
        return next;
    }

    Trajectory Connection::trajectory (const SdeModel &model, double max_step) const
    {
        Trajectory traj;
        Vec x = start;
        double t = 0.0;
        traj.times.push_back (t);
        traj.states.push_back (x);
        for (const auto &piece : pieces)
        {
            const int k = std::max (1, static_cast<int> (std::ceil (piece.duration / max_step - 1e-12)));
            const double h = piece.duration / k;
            const Vec x0 = x;
            for (int i = 1; i <= k; ++i)
            {
                x = model.propagate (x0, piece.u, h * i);
                traj.times.push_back (t + h * i);
                traj.states.push_back (x);
                traj.controls.push_back (piece.u);
            }
            t += piece.duration;
        }
        return traj;
    }

    std::vector<Point> Connection::polyline (const SdeModel &model, double resolution) const
    {
        std::vector<Point> pts;
        Vec x = start;
        pts.emplace_back (x (0), x (1));
        for (const auto &piece : pieces)
        {
            const bool turning = model.kind () == SystemKind::Dubins && piece.u (0) != 0.0;
            const Vec x0 = x;
            if (!turning)
            {
                x = model.propagate (x0, piece.u, piece.duration);
                pts.emplace_back (x (0), x (1));
                continue;
            }
            const double arc = model.speed () * piece.duration;
            const int k = std::max (1, static_cast<int> (std::ceil (arc / resolution)));
            for (int i = 1; i <= k; ++i)
            {
                x = model.propagate (x0, piece.u, piece.duration * i / k);
                pts.emplace_back (x (0), x (1));
            }
        }
        return pts;
    }

    Vec Connection::end_state (const SdeModel &model) const
    {
        Vec x = start;
        for (const auto &piece : pieces)
            x = model.propagate (x, piece.u, piece.duration);
        return x;
    }

    Connection tpbvp (const SdeModel &model, const Vec &x1, const Vec &x2)
    {
        Connection c;
        c.start = x1;
        switch (model.kind ())
        {
        case SystemKind::Integrator:
        case SystemKind::Linear:
        {
            const Vec d = x2 - x1;
            const double dRd = d.dot (model.R () * d);
            c.length = d.norm ();
            if (dRd <= 0.0)
                return c;
            if (!(model.q () > 0.0))
                throw ConfigError ("tpbvp: straight-line connection needs q > 0");
            // minimiser of qT + dRd/(2T)
            const double T = std::sqrt (dRd / (2.0 * model.q ()));
            c.pieces.push_back ({T, Vec (d / T)});
            c.duration = T;
            c.cost = std::sqrt (2.0 * model.q () * dRd);
            return c;
        }
        case SystemKind::Dubins:
        {
            const auto path = dubins::shortest (pose_of (x1), pose_of (x2), model.turning_radius ());
            const auto signs = dubins::turn_signs (path.word);
            for (std::size_t i = 0; i < 3; ++i)
            {
                const double len = path.params[i] * path.radius;
                if (len <= 0.0)
                    continue;
                Vec u (1);
                u (0) = static_cast<double> (signs[i]);
                const double dur = len / model.speed ();
                c.pieces.push_back ({dur, u});
                c.duration += dur;
                c.cost += model.running_cost (u) * dur;
            }
            c.length = path.length ();
            return c;
        }
        }
        return c;
    }

    ControlTape rasterize (const std::vector<ControlPiece> &pieces, std::size_t control_dim, double dt)
    {
        ControlTape tape;
        tape.dt = dt;
        tape.control_dim = control_dim;
        double total = 0.0;
        for (const auto &p : pieces)
            total += p.duration;
        if (total <= 0.0)
            return tape;
        const auto steps = static_cast<std::size_t> (std::ceil (total / dt - 1e-9));
        tape.controls.assign (steps, Vec::Zero (static_cast<Eigen::Index> (control_dim)));
        double t0 = 0.0;
        for (const auto &p : pieces)
        {
            const double t1 = t0 + p.duration;
            auto k = static_cast<std::size_t> (std::floor (t0 / dt));
            for (; k < steps; ++k)
            {
                const double a = std::max (t0, dt * static_cast<double> (k));
                const double b = std::min (t1, dt * static_cast<double> (k + 1));
                if (b <= a)
                {
                    if (dt * static_cast<double> (k) >= t1)
                        break;
                    continue;
                }
                tape.controls[k] += p.u * ((b - a) / dt);
            }
            t0 = t1;
        }
        return tape;
    }

    double rollout_cost (const SdeModel &model, const Trajectory &traj, const ControlTape &tape, const ExitClassifier &classify)
    {
        if (traj.empty ())
            throw ConfigError ("rollout_cost: empty trajectory");
        double running = 0.0;
        for (std::size_t j = 0; j + 1 < traj.size (); ++j)
            running += model.running_cost (tape.at (j)) * (traj.times[j + 1] - traj.times[j]);
        ExitClass exit = classify (traj.states.back ());
        if (exit == ExitClass::Interior)
            exit = ExitClass::ObstacleOrOuterBoundary;
        return model.phi () (exit) + running;
    }
} // namespace pirrht
