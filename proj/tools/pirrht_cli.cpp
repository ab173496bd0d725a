// Command-line front end: validate, plan, run, hsig.

#include <pirrht/scenario.hpp>

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#ifndef PIRRHT_DEFAULT_SCENARIO
#define PIRRHT_DEFAULT_SCENARIO "scenarios/integrator_two_obstacles.json"
#endif

using namespace pirrht;
namespace fs = std::filesystem;

namespace
{
    std::string fmt (double v)
    {
        char buf[32];
        std::snprintf (buf, sizeof buf, "%.10g", v);
        return buf;
    }

    int cmd_validate (const std::string &path)
    {
        const Scenario s = load_scenario (path);
        bool ok = true;
        auto check = [&] (const std::string &name, bool pass, const std::string &detail = {}) {
            std::cout << (pass ? "PASS " : "FAIL ") << name;
            if (!detail.empty ())
                std::cout << ": " << detail;
            std::cout << "\n";
            ok = ok && pass;
        };

        const auto issues = s.workspace.validate ();
        std::string joined;
        for (const auto &i : issues)
            joined += (joined.empty () ? "" : "; ") + i;
        check ("workspace", issues.empty (), joined);
        check ("start state free", s.workspace.contains_free ({s.start (0), s.start (1)}));

        const SdeModel model = s.model.build ();
        std::mt19937_64 rng (12345);
        std::uniform_real_distribution<double> ux (s.workspace.bounds ().xmin, s.workspace.bounds ().xmax);
        std::uniform_real_distribution<double> uy (s.workspace.bounds ().ymin, s.workspace.bounds ().ymax);
        std::uniform_real_distribution<double> uth (-kPi, kPi);
        auto random_state = [&] {
            Vec x (model.state_dim ());
            x (0) = ux (rng);
            x (1) = uy (rng);
            if (model.state_dim () == 3)
                x (2) = uth (rng);
            return x;
        };

        double worst = 0.0;
        for (int i = 0; i < 100; ++i)
            worst = std::max (worst, model.lambda_residual (random_state ()));
        check ("lambda identity", worst < 1e-9, "max residual " + fmt (worst));
        check ("partitioned state", model.partitioned ());

        double end_err = 0.0;
        for (int i = 0; i < 20; ++i)
        {
            const Vec a = random_state (), b = random_state ();
            const Connection c = tpbvp (model, a, b);
            Vec d = c.end_state (model) - b;
            if (d.size () == 3)
                d (2) = wrap_angle (d (2));
            end_err = std::max (end_err, d.norm ());
        }
        check ("tpbvp endpoints", end_err < 1e-6, "max error " + fmt (end_err));
        return ok ? 0 : 1;
    }

    int cmd_plan (const std::string &path, std::optional<std::size_t> iters, std::optional<std::uint64_t> seed, const std::string &out,
                  bool all_edges)
    {
        const Scenario s = load_scenario (path);
        PlannerGraph g = s.make_graph ();
        std::mt19937_64 rng (seed.value_or (s.planner.seed));
        const std::size_t n = iters.value_or (s.planner.iters);
        if (s.planner.target_vertices)
            g.expand_until (*s.planner.target_vertices, n, rng);
        else
            g.expand (n, rng);
        write_text (out, dump_tree (g, all_edges));

        std::size_t live = 0;
        for (const auto &v : g.vertices ())
            live += v.nodes.size ();
        std::cout << "iterations " << g.iterations () << "\nvertices " << g.vertices ().size () << "\nedges " << g.edges ().size ()
                  << "\nnodes " << live << "\n";
        if (!g.vertices ().empty ())
        {
            PlannerGraph probe = g;
            try
            {
                const auto refs = probe.extract_reference (s.start);
                std::cout << "classes at start " << refs.size () << "\n";
                for (const auto &r : refs)
                {
                    std::cout << "  cost " << fmt (r.cost) << " h";
                    for (Eigen::Index i = 0; i < r.h.size (); ++i)
                        std::cout << " " << fmt (r.h[i]);
                    std::cout << "\n";
                }
            }
            catch (const Unreachable &)
            {
                std::cout << "classes at start 0\n";
            }
        }
        return 0;
    }

    int cmd_run (const std::string &path, const std::string &tree, std::optional<std::uint64_t> seed, std::optional<std::size_t> runs,
                 const std::string &out)
    {
        const Scenario s = load_scenario (path);
        const PlannerGraph base = load_tree (tree, s);
        const std::uint64_t root = seed.value_or (s.planner.seed);
        const std::size_t k = runs.value_or (s.control.runs);
        fs::create_directories (out);

        std::ostringstream summary;
        summary << "{\n  \"scenario\": \"" << s.name << "\",\n  \"runs\": [\n";
        std::size_t reached = 0;
        for (std::size_t r = 0; r < k; ++r)
        {
            PlannerGraph g = base;
            const RunResult run = run_receding_horizon (g, s.start, derive_seed (root, 0x72756eULL, r), s.receding_config ());
            reached += run.reached_goal ? 1 : 0;

            char name[32];
            std::snprintf (name, sizeof name, "run_%03zu.csv", r);
            std::ostringstream csv;
            const int n = static_cast<int> (s.start.size ());
            csv << "t,x,y" << (n == 3 ? ",theta" : "");
            const int m = g.model ().control_dim ();
            for (int i = 0; i < m; ++i)
                csv << ",u" << i;
            csv << ",log_psi,class\n";
            for (std::size_t i = 0; i < run.trace.size (); ++i)
            {
                csv << fmt (run.trace.times[i]);
                for (int j = 0; j < n; ++j)
                    csv << "," << fmt (run.trace.states[i] (j));
                const bool has_step = i < run.steps.size ();
                for (int j = 0; j < m; ++j)
                    csv << "," << (has_step ? fmt (run.steps[i].u (j)) : "");
                csv << "," << (has_step ? fmt (run.steps[i].log_psi) : "") << "," << (has_step ? std::to_string (run.steps[i].dominant) : "") << "\n";
            }
            write_text (fs::path (out) / name, csv.str ());
            write_text (fs::path (out) / (std::string (name, 7) + "_summary.json"), dump_run_summary (run, root));

            summary << "    {\"run\": " << r << ", \"reached_goal\": " << (run.reached_goal ? "true" : "false")
                    << ", \"realized_cost\": " << (std::isinf (run.realized_cost) ? std::string ("null") : fmt (run.realized_cost))
                    << ", \"steps\": " << run.steps.size () << "}" << (r + 1 < k ? "," : "") << "\n";
            std::cout << "run " << r << (run.reached_goal ? " goal" : " fail") << " steps " << run.steps.size () << " cost "
                      << fmt (run.realized_cost) << "\n";
        }
        summary << "  ],\n  \"reached\": " << reached << "\n}\n";
        write_text (fs::path (out) / "summary.json", summary.str ());
        std::cout << "reached " << reached << "/" << k << "\n";
        return 0;
    }

    int cmd_hsig (const std::string &csv_path, const std::string &scenario)
    {
        const Scenario s = load_scenario (scenario);
        std::ifstream in (csv_path);
        if (!in)
            throw ConfigError ("cannot open " + csv_path);
        std::vector<Point> pts;
        std::string line;
        std::size_t xc = 0, yc = 1;
        bool header_seen = false;
        while (std::getline (in, line))
        {
            if (line.empty () || line[0] == '#')
                continue;
            std::replace (line.begin (), line.end (), ',', ' ');
            std::istringstream ls (line);
            std::vector<std::string> cells;
            for (std::string c; ls >> c;)
                cells.push_back (c);
            std::vector<double> row;
            for (const auto &c : cells)
            {
                char *end = nullptr;
                const double v = std::strtod (c.c_str (), &end);
                if (end == c.c_str () || *end != '\0')
                    break;
                row.push_back (v);
            }
            if (row.size () != cells.size ())
            {
                if (!pts.empty () || header_seen)
                    throw ConfigError ("malformed row: " + line);
                // header: pick the x and y columns by name
                header_seen = true;
                const auto xi = std::find (cells.begin (), cells.end (), "x"), yi = std::find (cells.begin (), cells.end (), "y");
                if (xi != cells.end () && yi != cells.end ())
                {
                    xc = static_cast<std::size_t> (xi - cells.begin ());
                    yc = static_cast<std::size_t> (yi - cells.begin ());
                }
                continue;
            }
            if (row.size () <= std::max (xc, yc))
                throw ConfigError ("malformed row: " + line);
            pts.emplace_back (row[xc], row[yc]);
        }
        const HSignature h = path_signature (pts, s.workspace.representative_points ());
        for (Eigen::Index i = 0; i < h.size (); ++i)
        {
            char buf[40];
            std::snprintf (buf, sizeof buf, "%.9f", h[i]);
            std::cout << (i ? " " : "") << buf;
        }
        std::cout << "\n";
        return 0;
    }
} // namespace

int main (int argc, char **argv)
{
    CLI::App app{"Topology-aware sampling planner with path-integral execution"};
    app.require_subcommand (1);

    std::string scenario = PIRRHT_DEFAULT_SCENARIO, out, tree, csv;
    std::optional<std::size_t> iters, runs;
    std::optional<std::uint64_t> seed;

    auto *validate = app.add_subcommand ("validate", "Check scenario invariants");
    validate->add_option ("--scenario", scenario, "Scenario file")->required ();

    auto *plan = app.add_subcommand ("plan", "Run the expansion phase and dump the tree");
    plan->add_option ("--scenario", scenario, "Scenario file")->required ();
    plan->add_option ("--iters", iters, "Sampling iterations (default from scenario)");
    plan->add_option ("--seed", seed, "Random seed (default from scenario)");
    plan->add_option ("--out", out, "Tree output file")->required ();
    bool all_edges = false;
    plan->add_flag ("--all-edges", all_edges, "Dump every graph edge, not only tree edges");

    auto *run = app.add_subcommand ("run", "Closed-loop runs from a stored tree");
    run->add_option ("--scenario", scenario, "Scenario file")->required ();
    run->add_option ("--tree", tree, "Tree file from plan")->required ();
    run->add_option ("--seed", seed, "Random seed (default from scenario)");
    run->add_option ("--runs", runs, "Number of runs (default from scenario)");
    run->add_option ("--out", out, "Output directory")->required ();

    auto *hsig = app.add_subcommand ("hsig", "H-signature of an (x,y) CSV path");
    hsig->add_option ("path", csv, "CSV file with x,y rows")->required ();
    hsig->add_option ("--scenario", scenario, "Scenario providing the obstacles");

    CLI11_PARSE (app, argc, argv);

    try
    {
        if (*validate)
            return cmd_validate (scenario);
        if (*plan)
            return cmd_plan (scenario, iters, seed, out, all_edges);
        if (*run)
            return cmd_run (scenario, tree, seed, runs, out);
        if (*hsig)
            return cmd_hsig (csv, scenario);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what () << "\n";
        return 2;
    }
    return 0;
}
