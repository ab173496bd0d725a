#include <pirrht/pi_control.hpp>
#include <pirrht/planner.hpp>
#include <pirrht/scenario.hpp>
#include <pirrht/topology.hpp>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace pirrht;

namespace
{
    using RowPoints = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

    std::vector<Point> to_points (const Eigen::Ref<const RowPoints> &m)
    {
        std::vector<Point> out (static_cast<std::size_t> (m.rows ()));
        for (Eigen::Index i = 0; i < m.rows (); ++i)
            out[static_cast<std::size_t> (i)] = m.row (i).transpose ();
        return out;
    }

    // Mat is capped at 3x3, so row stacks need a fully dynamic matrix
    Eigen::MatrixXd stack (const std::vector<Vec> &rows, Eigen::Index width)
    {
        Eigen::MatrixXd m (static_cast<Eigen::Index> (rows.size ()), width);
        for (std::size_t i = 0; i < rows.size (); ++i)
            m.row (static_cast<Eigen::Index> (i)) = rows[i].transpose ();
        return m;
    }

    Eigen::MatrixXd tape_array (const ControlTape &t) { return stack (t.controls, static_cast<Eigen::Index> (t.control_dim)); }

    void grow (PlannerGraph &g, std::size_t iters, std::uint64_t seed, std::optional<std::size_t> target)
    {
        py::gil_scoped_release release;
        std::mt19937_64 rng (seed);
        if (target)
            g.expand_until (*target, iters, rng);
        else
            g.expand (iters, rng);
    }
} // namespace

PYBIND11_MODULE (_core, m)
{
    m.doc () = "Sampling-based homotopy-aware planning with path-integral control";

    auto base = py::register_exception<Error> (m, "Error", PyExc_RuntimeError);
    py::register_exception<DegenerateSegment> (m, "DegenerateSegment", base.ptr ());
    py::register_exception<LengthMismatch> (m, "LengthMismatch", base.ptr ());
    py::register_exception<ChordTooCoarse> (m, "ChordTooCoarse", base.ptr ());
    py::register_exception<NonFiniteState> (m, "NonFiniteState", base.ptr ());
    py::register_exception<DegenerateEstimate> (m, "DegenerateEstimate", base.ptr ());
    py::register_exception<Unreachable> (m, "Unreachable", base.ptr ());
    py::register_exception<ConfigError> (m, "ConfigError", base.ptr ());

    py::enum_<ExitClass> (m, "ExitClass")
        .value ("Interior", ExitClass::Interior)
        .value ("GoalBoundary", ExitClass::GoalBoundary)
        .value ("ObstacleOrOuterBoundary", ExitClass::ObstacleOrOuterBoundary);

    py::enum_<SystemKind> (m, "SystemKind").value ("Integrator", SystemKind::Integrator).value ("Dubins", SystemKind::Dubins);

    // topology
    m.def ("absmin_angle", &absmin_angle);
    m.def (
        "segment_signature",
        [] (const Point &a, const Point &b, const Eigen::Ref<const RowPoints> &reps) {
            const auto r = to_points (reps);
            return Eigen::VectorXd (segment_signature (a, b, r).values ());
        },
        py::arg ("a"), py::arg ("b"), py::arg ("reps"));
    m.def (
        "path_signature",
        [] (const Eigen::Ref<const RowPoints> &path, const Eigen::Ref<const RowPoints> &reps) {
            const auto p = to_points (path), r = to_points (reps);
            return Eigen::VectorXd (path_signature (p, r).values ());
        },
        py::arg ("path"), py::arg ("reps"), "H-signature of an (n, 2) polyline against (k, 2) representative points.");
    m.def (
        "homologous", [] (const Eigen::VectorXd &a, const Eigen::VectorXd &b, double tol) { return homologous (HSignature (a), HSignature (b), tol); }, py::arg ("a"),
        py::arg ("b"), py::arg ("tol") = kHomologyTolerance);

    // environment
    py::class_<Workspace> (m, "Workspace")
        .def ("classify_exit", [] (const Workspace &w, const Point &p) { return w.classify_exit (p); })
        .def ("contains_free", [] (const Workspace &w, const Point &p) { return w.contains_free (p); })
        .def ("segment_free", [] (const Workspace &w, const Point &a, const Point &b) { return w.segment_free (a, b); })
        .def ("validate", &Workspace::validate)
        .def_property_readonly ("representative_points",
                                [] (const Workspace &w) {
                                    const auto r = w.representative_points ();
                                    return stack (std::vector<Vec> (r.begin (), r.end ()), 2);
                                })
        .def_property_readonly ("collision_resolution", &Workspace::collision_resolution);

    // dynamics
    py::class_<SdeModel> (m, "SdeModel")
        .def_static ("single_integrator", &SdeModel::single_integrator, py::arg ("b"), py::arg ("q") = 1.0, py::arg ("r") = 2.0)
        .def_static ("dubins", &SdeModel::dubins, py::arg ("V"), py::arg ("rho"), py::arg ("b"), py::arg ("q") = 1.0, py::arg ("r") = 1.0,
                     py::arg ("phi_fail") = 1000.0)
        .def_property_readonly ("kind", &SdeModel::kind)
        .def_property_readonly ("state_dim", &SdeModel::state_dim)
        .def_property_readonly ("control_dim", &SdeModel::control_dim)
        .def_property_readonly ("lambda_", &SdeModel::lambda)
        .def ("lambda_residual", &SdeModel::lambda_residual)
        .def ("drift", &SdeModel::drift)
        .def ("running_cost", &SdeModel::running_cost)
        .def (
            "em_step", [] (const SdeModel &s, const Vec &x, const Vec &u, const Vec &z, double dt) { return em_step (s, x, u, z, dt); },
            py::arg ("x"), py::arg ("u"), py::arg ("z"), py::arg ("dt"));

    py::class_<Connection> (m, "Connection")
        .def_readonly ("cost", &Connection::cost)
        .def_readonly ("duration", &Connection::duration)
        .def ("end_state", &Connection::end_state)
        .def ("polyline", [] (const Connection &c, const SdeModel &s, double res) {
            const auto p = c.polyline (s, res);
            return stack (std::vector<Vec> (p.begin (), p.end ()), 2);
        });
    m.def ("tpbvp", &tpbvp, py::arg ("model"), py::arg ("x1"), py::arg ("x2"), "Deterministic minimum-cost connection between two states.");

    // planner
    py::class_<Reference> (m, "Reference")
        .def_readonly ("cost", &Reference::cost)
        .def_readonly ("duration", &Reference::duration)
        .def_property_readonly ("h", [] (const Reference &r) { return Eigen::VectorXd (r.h.values ()); })
        .def_property_readonly ("tape", [] (const Reference &r) { return tape_array (r.tape); })
        .def_property_readonly ("tape_dt", [] (const Reference &r) { return r.tape.dt; });

    py::class_<PlannerGraph> (m, "PlannerGraph")
        .def ("expand", [] (PlannerGraph &g, std::size_t iters, std::uint64_t seed) { grow (g, iters, seed, std::nullopt); }, py::arg ("iters"),
              py::arg ("seed"))
        .def (
            "expand_until", [] (PlannerGraph &g, std::size_t target, std::size_t max_iters, std::uint64_t seed) { grow (g, max_iters, seed, target); },
            py::arg ("target_vertices"), py::arg ("max_iters"), py::arg ("seed"))
        .def ("extract_reference", &PlannerGraph::extract_reference, py::arg ("x"),
              "References for every allowed class reachable from x. The query vertex is kept in the graph.")
        .def ("copy", [] (const PlannerGraph &g) { return PlannerGraph (g); })
        .def ("audit", &PlannerGraph::audit)
        .def_property_readonly ("num_vertices", [] (const PlannerGraph &g) { return g.vertices ().size (); })
        .def_property_readonly ("num_edges", [] (const PlannerGraph &g) { return g.edges ().size (); })
        .def_property_readonly ("iterations", &PlannerGraph::iterations)
        .def_property_readonly ("near_radius", &PlannerGraph::near_radius);

    // control
    py::class_<SamplerConfig> (m, "SamplerConfig")
        .def (py::init<> ())
        .def_readwrite ("dt", &SamplerConfig::dt)
        .def_readwrite ("samples", &SamplerConfig::samples)
        .def_readwrite ("max_steps", &SamplerConfig::max_steps)
        .def_readwrite ("horizon_factor", &SamplerConfig::horizon_factor)
        .def_readwrite ("antithetic", &SamplerConfig::antithetic)
        .def_readwrite ("tape_steps", &SamplerConfig::tape_steps);

    py::class_<PiEstimate> (m, "PiEstimate")
        .def_readonly ("psi_hat", &PiEstimate::psi_hat)
        .def_readonly ("log_psi_hat", &PiEstimate::log_psi_hat)
        .def_readonly ("psi_se", &PiEstimate::psi_se)
        .def_readonly ("u0_se", &PiEstimate::u0_se)
        .def_readonly ("dominant", &PiEstimate::dominant)
        .def_property_readonly ("u0", [] (const PiEstimate &e) { return e.control_tape.at (0); })
        .def_property_readonly ("tape", [] (const PiEstimate &e) { return tape_array (e.control_tape); })
        .def_property_readonly ("class_log_psi", [] (const PiEstimate &e) {
            std::vector<double> v;
            for (const auto &c : e.per_class)
                v.push_back (c.log_psi);
            return v;
        });

    m.def (
        "estimate_passive",
        [] (const SdeModel &model, const Workspace &ws, const Vec &x0, std::uint64_t seed, const SamplerConfig &c) {
            py::gil_scoped_release release;
            return estimate_passive (model, x0, ws.classifier (), seed, c);
        },
        py::arg ("model"), py::arg ("workspace"), py::arg ("x0"), py::arg ("seed"), py::arg ("config"));
    m.def (
        "estimate_importance",
        [] (const SdeModel &model, const Workspace &ws, const std::vector<Reference> &refs, const Vec &x0, std::uint64_t seed,
            const SamplerConfig &c) {
            std::vector<MeasureSpec> specs;
            for (const auto &r : refs)
                specs.push_back ({r.tape, r.h, r.cost});
            py::gil_scoped_release release;
            return estimate_importance (model, specs, x0, ws.classifier (), seed, c);
        },
        py::arg ("model"), py::arg ("workspace"), py::arg ("references"), py::arg ("x0"), py::arg ("seed"), py::arg ("config"));
    m.def ("derive_seed", &derive_seed, py::arg ("root"), py::arg ("a"), py::arg ("b") = 0);

    py::class_<RunResult> (m, "RunResult")
        .def_readonly ("reached_goal", &RunResult::reached_goal)
        .def_readonly ("exit", &RunResult::exit)
        .def_readonly ("realized_cost", &RunResult::realized_cost)
        .def_property_readonly ("realized_h", [] (const RunResult &r) { return Eigen::VectorXd (r.realized_h.values ()); })
        .def_property_readonly ("times", [] (const RunResult &r) { return r.trace.times; })
        .def_property_readonly ("states", [] (const RunResult &r) {
            return stack (r.trace.states, r.trace.empty () ? 0 : r.trace.states.front ().size ());
        });

    // scenarios
    py::class_<Scenario> (m, "Scenario")
        .def_readonly ("name", &Scenario::name)
        .def_readonly ("start", &Scenario::start)
        .def_readonly ("workspace", &Scenario::workspace)
        .def_property_readonly ("model", [] (const Scenario &s) { return s.model.build (); })
        .def_property_readonly ("dt", [] (const Scenario &s) { return s.model.dt; })
        .def_property_readonly ("seed", [] (const Scenario &s) { return s.planner.seed; })
        .def_property_readonly ("runs", [] (const Scenario &s) { return s.control.runs; })
        .def ("make_graph", &Scenario::make_graph)
        .def ("dump", [] (const Scenario &s) { return dump_scenario (s); })
        .def (
            "plan",
            [] (const Scenario &s, std::optional<std::size_t> iters, std::optional<std::uint64_t> seed) {
                PlannerGraph g = s.make_graph ();
                grow (g, iters.value_or (s.planner.iters), seed.value_or (s.planner.seed), s.planner.target_vertices);
                return g;
            },
            py::arg ("iters") = py::none (), py::arg ("seed") = py::none (), "Build a graph the same way `pirrht plan` does.")
        .def (
            "run",
            [] (const Scenario &s, const PlannerGraph &g, std::uint64_t seed, std::optional<Vec> x0) {
                PlannerGraph work = g;
                py::gil_scoped_release release;
                return run_receding_horizon (work, x0.value_or (s.start), seed, s.receding_config ());
            },
            py::arg ("graph"), py::arg ("seed"), py::arg ("x0") = py::none (),
            "One closed-loop run on a copy of the graph. Seeds as used by `pirrht run` are derive_seed(root, 0x72756e, r).");

    m.def ("load_scenario", &load_scenario, py::arg ("path"));
    m.def ("parse_scenario", &parse_scenario, py::arg ("text"));
    m.def ("dump_tree", &dump_tree, py::arg ("graph"), py::arg ("all_edges") = false);
    m.def ("parse_tree", &parse_tree, py::arg ("text"), py::arg ("scenario"));
    m.def (
        "realized_signature", [] (const Workspace &ws, const Eigen::Ref<const RowPoints> &path) { return Eigen::VectorXd (realized_signature (ws, to_points (path)).values ()); },
        py::arg ("workspace"), py::arg ("path"));
}
