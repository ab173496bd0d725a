#pragma once
/**
 * @file
 * @brief Experiment description (workspace, model, planner and controller
 *  parameters) and its JSON file format, plus planner tree dumps.
 */

#include <pirrht/dynamics.hpp>
#include <pirrht/environment.hpp>
#include <pirrht/pi_control.hpp>
#include <pirrht/planner.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace pirrht
{
    struct ModelSpec
    {
        SystemKind system = SystemKind::Integrator;
        double b = 0.1;
        double V = 1.0;
        double rho = 1.0;
        double q = 1.0;
        /// Control cost R = r I.
        double r = 2.0;
        double phi_fail = 1000.0;
        double dt = 0.1;
        /// Replaces the derived temperature; only useful to exercise validation.
        std::optional<double> lambda;

        [[nodiscard]] SdeModel build () const;
        bool operator== (const ModelSpec &) const = default;
    };

    struct PlanSpec
    {
        std::size_t iters = 2000;
        /// Non-positive selects the default near-radius scale.
        double gamma = 0.0;
        double h_limit = std::numeric_limits<double>::infinity ();
        std::uint64_t seed = 0;
        double goal_bias = 0.05;
        double heading_weight = 1.0;
        /// When set, expansion stops once the graph holds this many vertices.
        std::optional<std::size_t> target_vertices;
        bool operator== (const PlanSpec &) const = default;
    };

    struct ControlSpec
    {
        std::size_t samples = 200;
        std::size_t runs = 20;
        std::size_t max_steps = 0;
        double horizon_factor = 4.0;
        std::size_t max_wall_steps = 1000;
        bool antithetic = true;
        bool operator== (const ControlSpec &) const = default;
    };

    struct Scenario
    {
        std::string name;
        Workspace workspace;
        ModelSpec model;
        PlanSpec planner;
        ControlSpec control;
        Vec start;

        [[nodiscard]] PlannerConfig planner_config () const;
        [[nodiscard]] RecedingConfig receding_config () const;
        /// Builds an empty planner graph for this scenario.
        [[nodiscard]] PlannerGraph make_graph () const;
        bool operator== (const Scenario &o) const
        {
            return name == o.name && workspace == o.workspace && model == o.model && planner == o.planner && control == o.control &&
                   start.size () == o.start.size () && start == o.start;
        }
    };

    Scenario parse_scenario (const std::string &json_text);
    std::string dump_scenario (const Scenario &s);
    Scenario load_scenario (const std::filesystem::path &path);

    /// Tree file: vertices, live nodes, and the edges their parent links use (every
    /// graph edge when all_edges is set). A graph restored from a pruned dump supports
    /// reference extraction; further expansion sees only the kept edges.
    std::string dump_tree (const PlannerGraph &g, bool all_edges = false);
    PlannerGraph parse_tree (const std::string &json_text, const Scenario &s);
    PlannerGraph load_tree (const std::filesystem::path &path, const Scenario &s);

    /// Run summary as JSON text.
    std::string dump_run_summary (const RunResult &run, std::uint64_t seed);

    std::string read_text (const std::filesystem::path &path);
    void write_text (const std::filesystem::path &path, const std::string &text);
} // namespace pirrht
