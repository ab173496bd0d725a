#pragma once
/**
 * @file
 * @brief Control-affine diffusions dx = f(x)dt + G u dt + B dw with partitioned
 *  state, the temperature lambda tying control cost to noise, Euler-Maruyama
 *  stepping, and obstacle-free two-point connections for the built-in systems.
 *
 * The two built-in systems (planar single integrator and the Dubins car with
 * noisy turn rate) have constant G, B, R and q; only the drift depends on state.
 */

#include <pirrht/core.hpp>
#include <pirrht/environment.hpp>

#include <limits>
#include <string>
#include <vector>

namespace pirrht
{
    enum class SystemKind
    {
        Integrator,
        Dubins,
        /// Zero drift, arbitrary constant G/B/R. Used for 1-D validation problems.
        Linear
    };

    const char *to_string (SystemKind k) noexcept;

    /// Terminal cost on the exit boundary. +inf maps to weight exactly zero.
    struct TerminalCost
    {
        double goal = 0.0;
        double failure = std::numeric_limits<double>::infinity ();

        [[nodiscard]] double operator() (ExitClass c) const noexcept { return c == ExitClass::GoalBoundary ? goal : failure; }
    };

    class SdeModel
    {
      public:
        /// f = 0, G = I2, B = b I2, q, R = r I2.
        static SdeModel single_integrator (double b, double q = 1.0, double r = 2.0);
        /// f = (V cos th, V sin th, 0), G = (0, 0, 1/rho), B = (0, 0, b), q, R = r;
        /// failure terminal cost phi_fail.
        static SdeModel dubins (double V, double rho, double b, double q = 1.0, double r = 1.0, double phi_fail = 1000.0);
        /// Zero drift with the given constant matrices (state dim = rows of G).
        static SdeModel linear (Mat G, Mat B, Mat R, double q, TerminalCost phi = {});

        [[nodiscard]] SystemKind kind () const noexcept { return kind_; }
        [[nodiscard]] int state_dim () const noexcept { return static_cast<int> (G_.rows ()); }
        [[nodiscard]] int control_dim () const noexcept { return static_cast<int> (G_.cols ()); }

        [[nodiscard]] Vec drift (const Vec &x) const;
        [[nodiscard]] const Mat &G () const noexcept { return G_; }
        [[nodiscard]] const Mat &B () const noexcept { return B_; }
        [[nodiscard]] const Mat &R () const noexcept { return R_; }
        /// Lower m x m blocks acting on the controlled part of the state.
        [[nodiscard]] Mat Gc () const;
        [[nodiscard]] Mat Bc () const;
        [[nodiscard]] double q () const noexcept { return q_; }
        [[nodiscard]] double lambda () const noexcept { return lambda_; }
        [[nodiscard]] const TerminalCost &phi () const noexcept { return phi_; }

        /// Gc^{-1} Bc: maps a Brownian increment to its control-equivalent displacement.
        [[nodiscard]] const Mat &noise_to_control () const noexcept { return noise_to_control_; }
        /// Gc' Sigma_c^{-1} Bc with Sigma_c = Gc R^{-1} Gc'; the likelihood-ratio coupling term.
        [[nodiscard]] const Mat &girsanov_coupling () const noexcept { return girsanov_; }

        /// Frobenius norm of lambda Gc R^{-1} Gc' - Bc Bc'.
        [[nodiscard]] double lambda_residual (const Vec &x) const;
        /// Top (n - m) rows of G and B vanish.
        [[nodiscard]] bool partitioned () const;

        /// Replace the derived lambda (only for checking configurations; breaks the identity otherwise).
        void override_lambda (double lambda);

        [[nodiscard]] double speed () const noexcept { return V_; }
        [[nodiscard]] double rho () const noexcept { return rho_; }
        [[nodiscard]] double noise_scale () const noexcept { return b_; }
        /// Minimum turning radius of the Dubins car under |u| <= 1.
        [[nodiscard]] double turning_radius () const noexcept { return V_ * rho_; }

        /// Exact flow under a constant control held for duration tau.
        [[nodiscard]] Vec propagate (const Vec &x, const Vec &u, double tau) const;

        /// Running cost rate q + 1/2 u'Ru.
        [[nodiscard]] double running_cost (const Vec &u) const { return u.size () == 0 ? q_ : q_ + 0.5 * u.dot (R_ * u); }

      private:
        SdeModel () = default;
        void finalize ();

        SystemKind kind_ = SystemKind::Linear;
        Mat G_, B_, R_;
        double q_ = 1.0;
        double lambda_ = 1.0;
        TerminalCost phi_;
        double V_ = 0.0, rho_ = 1.0, b_ = 0.0;
        Mat noise_to_control_, girsanov_;
    };

    /// x + f(x)dt + G u dt + B z sqrt(dt). Throws NonFiniteState on overflow/NaN.
    Vec em_step (const SdeModel &model, const Vec &x, const Vec &u, const Vec &z, double dt);

    struct ControlPiece
    {
        double duration = 0.0;
        Vec u;
    };

    /// Obstacle-free optimal connection between two states.
    struct Connection
    {
        Vec start;
        std::vector<ControlPiece> pieces;
        double duration = 0.0;
        double length = 0.0;
        double cost = 0.0;

        /// Time-sampled states with spacing at most max_step in time.
        [[nodiscard]] Trajectory trajectory (const SdeModel &model, double max_step) const;
        /// Position polyline: straight pieces as single chords, turning pieces sampled
        /// with chord length at most `resolution`.
        [[nodiscard]] std::vector<Point> polyline (const SdeModel &model, double resolution) const;
        [[nodiscard]] Vec end_state (const SdeModel &model) const;
    };

    /// Integrator: straight line at the speed minimising qT + 1/2 (d/T)'R(d/T) T.
    /// Dubins: shortest of the six Dubins words with |u| <= 1. Cost is the running-cost
    /// functional of the returned control.
    Connection tpbvp (const SdeModel &model, const Vec &x1, const Vec &x2);

    /// Resample piecewise-constant controls on a fixed grid; each step holds the mean
    /// control over its interval so the integrated control is preserved.
    ControlTape rasterize (const std::vector<ControlPiece> &pieces, std::size_t control_dim, double dt);

    /// phi(exit class of the final state) + sum_j (q + 1/2 u_j'R u_j)(t_{j+1} - t_j) with
    /// u_j = tape.at(j). A final state still in the interior is charged the failure cost.
    double rollout_cost (const SdeModel &model, const Trajectory &traj, const ControlTape &tape, const ExitClassifier &classify);
} // namespace pirrht
