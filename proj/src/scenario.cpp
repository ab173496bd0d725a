#include <pirrht/scenario.hpp>

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace pirrht
{
    using json = nlohmann::json;

    namespace
    {
        json point_json (const Point &p) { return json::array ({p.x (), p.y ()}); }

        Point point_of (const json &j)
        {
            if (!j.is_array () || j.size () != 2)
                throw ConfigError ("expected a point [x, y], got " + j.dump ());
            return {j[0].get<double> (), j[1].get<double> ()};
        }

        json vec_json (const Eigen::Ref<const Eigen::VectorXd> &v)
        {
            json out = json::array ();
            for (Eigen::Index i = 0; i < v.size (); ++i)
                out.push_back (v (i));
            return out;
        }

        Eigen::VectorXd vector_of (const json &j)
        {
            if (!j.is_array ())
                throw ConfigError ("expected a numeric array, got " + j.dump ());
            Eigen::VectorXd v (static_cast<Eigen::Index> (j.size ()));
            for (std::size_t i = 0; i < j.size (); ++i)
                v (static_cast<Eigen::Index> (i)) = j[i].get<double> ();
            return v;
        }

        Vec small_vec_of (const json &j)
        {
            const Eigen::VectorXd v = vector_of (j);
            if (v.size () > 3)
                throw ConfigError ("state/control vectors have at most 3 components");
            return Vec (v);
        }

        // +inf is not representable in JSON; null stands for it
        json real_or_null (double v) { return std::isinf (v) ? json (nullptr) : json (v); }
        double real_or_inf (const json &j, const char *key, double fallback)
        {
            if (!j.contains (key))
                return fallback;
            return j.at (key).is_null () ? std::numeric_limits<double>::infinity () : j.at (key).get<double> ();
        }

        json shape_json (const Shape &s)
        {
            if (const auto *d = std::get_if<Disc> (&s))
                return {{"type", "disc"}, {"center", point_json (d->center)}, {"radius", d->radius}};
            json verts = json::array ();
            for (const auto &p : std::get<ConvexPolygon> (s).vertices)
                verts.push_back (point_json (p));
            return {{"type", "polygon"}, {"vertices", verts}};
        }

        Shape shape_of (const json &j)
        {
            const auto type = j.at ("type").get<std::string> ();
            if (type == "disc")
                return Disc{point_of (j.at ("center")), j.at ("radius").get<double> ()};
            if (type == "polygon")
            {
                ConvexPolygon poly;
                for (const auto &p : j.at ("vertices"))
                    poly.vertices.push_back (point_of (p));
                return poly;
            }
            throw ConfigError ("unknown shape type '" + type + "'");
        }

        json workspace_json (const Workspace &ws)
        {
            const auto &b = ws.bounds ();
            json obstacles = json::array ();
            for (const auto &o : ws.obstacles ())
            {
                json entry;
                if (o.pieces.size () == 1)
                    entry = shape_json (o.pieces.front ());
                else
                {
                    entry["type"] = "union";
                    entry["pieces"] = json::array ();
                    for (const auto &p : o.pieces)
                        entry["pieces"].push_back (shape_json (p));
                }
                entry["rep"] = point_json (o.representative);
                obstacles.push_back (entry);
            }
            const auto &g = ws.goal ();
            json goal = {{"center", point_json (g.disc.center)}, {"radius", g.disc.radius}, {"rep", point_json (g.representative)}};
            if (g.heading)
                goal["heading"] = json::array ({g.heading->first, g.heading->second});
            return {{"bounds", json::array ({b.xmin, b.ymin, b.xmax, b.ymax})},
                    {"obstacles", obstacles},
                    {"goal", goal},
                    {"collision_resolution", ws.collision_resolution ()}};
        }

        Workspace workspace_of (const json &j)
        {
            const auto &jb = j.at ("bounds");
            if (!jb.is_array () || jb.size () != 4)
                throw ConfigError ("bounds must be [xmin, ymin, xmax, ymax]");
            Bounds b{jb[0].get<double> (), jb[1].get<double> (), jb[2].get<double> (), jb[3].get<double> ()};
            std::vector<Obstacle> obstacles;
            for (const auto &jo : j.at ("obstacles"))
            {
                Obstacle o;
                if (jo.at ("type").get<std::string> () == "union")
                    for (const auto &p : jo.at ("pieces"))
                        o.pieces.push_back (shape_of (p));
                else
                    o.pieces.push_back (shape_of (jo));
                o.representative = point_of (jo.at ("rep"));
                obstacles.push_back (std::move (o));
            }
            const auto &jg = j.at ("goal");
            GoalRegion goal;
            goal.disc = Disc{point_of (jg.at ("center")), jg.at ("radius").get<double> ()};
            goal.representative = jg.contains ("rep") ? point_of (jg.at ("rep")) : goal.disc.center;
            if (jg.contains ("heading") && !jg.at ("heading").is_null ())
                goal.heading = std::pair{jg.at ("heading")[0].get<double> (), jg.at ("heading")[1].get<double> ()};
            return Workspace (b, std::move (obstacles), goal, j.value ("collision_resolution", Workspace::kDefaultResolution));
        }

        SystemKind system_of (const std::string &s)
        {
            if (s == "integrator")
                return SystemKind::Integrator;
            if (s == "dubins")
                return SystemKind::Dubins;
            throw ConfigError ("unknown system '" + s + "' (expected integrator or dubins)");
        }
    } // namespace

    SdeModel ModelSpec::build () const
    {
        if (system == SystemKind::Linear)
            throw ConfigError ("scenario models are integrator or dubins");
        SdeModel m = system == SystemKind::Dubins ? SdeModel::dubins (V, rho, b, q, r, phi_fail)
                                                  : SdeModel::single_integrator (b, q, r);
        if (lambda)
            m.override_lambda (*lambda);
        return m;
    }

    PlannerConfig Scenario::planner_config () const
    {
        PlannerConfig c;
        c.gamma = planner.gamma;
        c.goal_bias = planner.goal_bias;
        c.h_limit = planner.h_limit;
        c.dt = model.dt;
        c.heading_weight = planner.heading_weight;
        return c;
    }

    RecedingConfig Scenario::receding_config () const
    {
        RecedingConfig c;
        c.sampler.dt = model.dt;
        c.sampler.samples = control.samples;
        c.sampler.max_steps = control.max_steps;
        c.sampler.horizon_factor = control.horizon_factor;
        c.sampler.antithetic = control.antithetic;
        c.max_wall_steps = control.max_wall_steps;
        return c;
    }

    PlannerGraph Scenario::make_graph () const { return PlannerGraph (workspace, model.build (), planner_config ()); }

    Scenario parse_scenario (const std::string &json_text)
    {
        json j;
        try
        {
            j = json::parse (json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError (std::string ("scenario is not valid JSON: ") + e.what ());
        }
        try
        {
            Scenario s;
            s.name = j.value ("name", std::string ());
            s.workspace = workspace_of (j.at ("workspace"));

            const auto &jm = j.at ("model");
            s.model.system = system_of (jm.at ("system").get<std::string> ());
            if (s.model.system == SystemKind::Dubins)
                s.model.r = 1.0;
            s.model.b = jm.at ("b").get<double> ();
            s.model.V = jm.value ("V", s.model.V);
            s.model.rho = jm.value ("rho", s.model.rho);
            s.model.q = jm.value ("q", s.model.q);
            s.model.r = jm.value ("R", s.model.r);
            s.model.phi_fail = jm.value ("phi_fail", s.model.phi_fail);
            s.model.dt = jm.value ("dt", s.model.dt);
            if (jm.contains ("lambda") && !jm.at ("lambda").is_null ())
                s.model.lambda = jm.at ("lambda").get<double> ();

            if (j.contains ("planner"))
            {
                const auto &jp = j.at ("planner");
                s.planner.iters = jp.value ("iters", s.planner.iters);
                s.planner.gamma = jp.contains ("gamma") && !jp.at ("gamma").is_null () ? jp.at ("gamma").get<double> () : 0.0;
                s.planner.h_limit = real_or_inf (jp, "h_limit", s.planner.h_limit);
                s.planner.seed = jp.value ("seed", s.planner.seed);
                s.planner.goal_bias = jp.value ("goal_bias", s.planner.goal_bias);
                s.planner.heading_weight = jp.value ("heading_weight", s.planner.heading_weight);
                if (jp.contains ("target_vertices") && !jp.at ("target_vertices").is_null ())
                    s.planner.target_vertices = jp.at ("target_vertices").get<std::size_t> ();
            }
            if (j.contains ("control"))
            {
                const auto &jc = j.at ("control");
                s.control.samples = jc.value ("N", s.control.samples);
                s.control.runs = jc.value ("runs", s.control.runs);
                s.control.max_steps = jc.value ("max_steps", s.control.max_steps);
                s.control.horizon_factor = jc.value ("horizon_factor", s.control.horizon_factor);
                s.control.max_wall_steps = jc.value ("max_wall_steps", s.control.max_wall_steps);
                s.control.antithetic = jc.value ("antithetic", s.control.antithetic);
            }
            s.start = small_vec_of (j.at ("start"));

            if (!(s.planner.h_limit > 0.0))
                throw ConfigError ("planner.h_limit must be positive");
            if (s.control.samples < 1)
                throw ConfigError ("control.N must be at least 1");
            if (!(s.model.dt > 0.0))
                throw ConfigError ("model.dt must be positive");
            const int n = s.model.system == SystemKind::Dubins ? 3 : 2;
            if (s.start.size () != n)
                throw ConfigError ("start state has the wrong dimension for the model");
            return s;
        }
        catch (const json::exception &e)
        {
            throw ConfigError (std::string ("malformed scenario: ") + e.what ());
        }
    }

    std::string dump_scenario (const Scenario &s)
    {
        json jm = {{"system", to_string (s.model.system)}, {"b", s.model.b}, {"q", s.model.q}, {"R", s.model.r}, {"dt", s.model.dt}};
        if (s.model.system == SystemKind::Dubins)
        {
            jm["V"] = s.model.V;
            jm["rho"] = s.model.rho;
            jm["phi_fail"] = s.model.phi_fail;
        }
        if (s.model.lambda)
            jm["lambda"] = *s.model.lambda;
        json jp = {{"iters", s.planner.iters},
                   {"gamma", s.planner.gamma > 0.0 ? json (s.planner.gamma) : json (nullptr)},
                   {"h_limit", real_or_null (s.planner.h_limit)},
                   {"seed", s.planner.seed},
                   {"goal_bias", s.planner.goal_bias},
                   {"heading_weight", s.planner.heading_weight}};
        if (s.planner.target_vertices)
            jp["target_vertices"] = *s.planner.target_vertices;
        json jc = {{"N", s.control.samples},
                   {"runs", s.control.runs},
                   {"max_steps", s.control.max_steps},
                   {"horizon_factor", s.control.horizon_factor},
                   {"max_wall_steps", s.control.max_wall_steps},
                   {"antithetic", s.control.antithetic}};
        json j = {{"name", s.name}, {"workspace", workspace_json (s.workspace)}, {"model", jm},
                  {"planner", jp},  {"control", jc},                            {"start", vec_json (s.start)}};
        return j.dump (2) + "\n";
    }

    std::string read_text (const std::filesystem::path &path)
    {
        std::ifstream in (path, std::ios::binary);
        if (!in)
            throw ConfigError ("cannot open " + path.string ());
        std::ostringstream os;
        os << in.rdbuf ();
        return os.str ();
    }

    void write_text (const std::filesystem::path &path, const std::string &text)
    {
        std::ofstream out (path, std::ios::binary);
        if (!out)
            throw ConfigError ("cannot write " + path.string ());
        out << text;
    }

    Scenario load_scenario (const std::filesystem::path &path) { return parse_scenario (read_text (path)); }

    std::string dump_tree (const PlannerGraph &g, bool all_edges)
    {
        // live nodes only, renumbered densely in vertex order
        std::unordered_map<NodeId, std::size_t> index;
        std::vector<NodeId> order;
        for (const auto &v : g.vertices ())
            for (NodeId id : v.nodes)
            {
                index.emplace (id, order.size ());
                order.push_back (id);
            }
        std::vector<EdgeId> kept;
        std::unordered_map<EdgeId, std::size_t> edge_index;
        if (all_edges)
            for (EdgeId e = 0; e < g.edges ().size (); ++e)
                kept.push_back (e);
        else
        {
            std::vector<bool> used (g.edges ().size (), false);
            for (NodeId id : order)
                if (g.nodes ()[id].via != kNone)
                    used[g.nodes ()[id].via] = true;
            for (EdgeId e = 0; e < used.size (); ++e)
                if (used[e])
                    kept.push_back (e);
        }
        for (std::size_t k = 0; k < kept.size (); ++k)
            edge_index.emplace (kept[k], k);

        json nodes = json::array ();
        for (NodeId id : order)
        {
            const Node &n = g.nodes ()[id];
            nodes.push_back ({{"vertex", n.vertex},
                              {"h", vec_json (n.h.values ())},
                              {"cost", n.cost},
                              {"parent", n.parent == kNone ? json (nullptr) : json (index.at (n.parent))},
                              {"via", n.via == kNone ? json (nullptr) : json (edge_index.at (n.via))}});
        }
        json vertices = json::array ();
        for (const auto &v : g.vertices ())
        {
            json ids = json::array ();
            for (NodeId id : v.nodes)
                ids.push_back (index.at (id));
            vertices.push_back ({{"x", vec_json (v.x)}, {"root", v.root}, {"nodes", ids}});
        }
        json edges = json::array ();
        for (EdgeId id : kept)
        {
            const Edge &e = g.edges ()[id];
            json pieces = json::array ();
            for (const auto &p : e.pieces)
            {
                json piece = vec_json (p.u);
                piece.insert (piece.begin (), p.duration);
                pieces.push_back (piece);
            }
            edges.push_back ({{"from", e.from}, {"to", e.to}, {"cost", e.cost}, {"duration", e.duration}, {"h", vec_json (e.h.values ())}, {"pieces", pieces}});
        }
        json j = {{"iterations", g.iterations ()},
                  {"system", to_string (g.model ().kind ())},
                  {"all_edges", all_edges},
                  {"vertices", vertices},
                  {"edges", edges},
                  {"nodes", nodes}};
        return j.dump () + "\n";
    }

    PlannerGraph parse_tree (const std::string &json_text, const Scenario &s)
    {
        try
        {
            const json j = json::parse (json_text);
            if (j.at ("system").get<std::string> () != to_string (s.model.system))
                throw ConfigError ("tree was built for a different system");
            std::vector<Vertex> vertices;
            for (const auto &jv : j.at ("vertices"))
            {
                Vertex v;
                v.x = small_vec_of (jv.at ("x"));
                v.root = jv.at ("root").get<bool> ();
                for (const auto &id : jv.at ("nodes"))
                    v.nodes.push_back (id.get<NodeId> ());
                vertices.push_back (std::move (v));
            }
            std::vector<Edge> edges;
            for (const auto &je : j.at ("edges"))
            {
                Edge e;
                e.from = je.at ("from").get<VertexId> ();
                e.to = je.at ("to").get<VertexId> ();
                e.cost = je.at ("cost").get<double> ();
                e.duration = je.at ("duration").get<double> ();
                e.h = HSignature (vector_of (je.at ("h")));
                for (const auto &jp : je.at ("pieces"))
                {
                    const Eigen::VectorXd raw = vector_of (jp);
                    if (raw.size () < 2 || raw.size () > 4)
                        throw ConfigError ("tree: malformed control piece");
                    e.pieces.push_back ({raw (0), Vec (raw.tail (raw.size () - 1))});
                }
                edges.push_back (std::move (e));
            }
            std::vector<Node> nodes;
            for (const auto &jn : j.at ("nodes"))
            {
                Node n;
                n.vertex = jn.at ("vertex").get<VertexId> ();
                n.h = HSignature (vector_of (jn.at ("h")));
                n.cost = jn.at ("cost").get<double> ();
                n.parent = jn.at ("parent").is_null () ? kNone : jn.at ("parent").get<NodeId> ();
                n.via = jn.at ("via").is_null () ? kNone : jn.at ("via").get<EdgeId> ();
                nodes.push_back (std::move (n));
            }
            return PlannerGraph::restore (s.workspace, s.model.build (), s.planner_config (), std::move (vertices), std::move (edges),
                                          std::move (nodes), j.at ("iterations").get<std::size_t> ());
        }
        catch (const json::exception &e)
        {
            throw ConfigError (std::string ("malformed tree file: ") + e.what ());
        }
    }

    PlannerGraph load_tree (const std::filesystem::path &path, const Scenario &s) { return parse_tree (read_text (path), s); }

    std::string dump_run_summary (const RunResult &run, std::uint64_t seed)
    {
        json history = json::array ();
        for (const auto &st : run.steps)
        {
            json classes = json::array ();
            for (std::size_t i = 0; i < st.class_h.size (); ++i)
                classes.push_back ({{"h", vec_json (st.class_h[i].values ())},
                                    {"log_psi", i < st.class_log_psi.size () ? real_or_null (st.class_log_psi[i]) : json (nullptr)}});
            history.push_back ({{"t", st.t}, {"log_psi", real_or_null (st.log_psi)}, {"dominant", st.dominant}, {"fallback", st.fallback}, {"classes", classes}});
        }
        json j = {{"seed", seed},
                  {"reached_goal", run.reached_goal},
                  {"exit", to_string (run.exit)},
                  {"realized_cost", real_or_null (run.realized_cost)},
                  {"steps", run.steps.size ()},
                  {"realized_h", vec_json (run.realized_h.values ())},
                  {"history", history}};
        return j.dump (2) + "\n";
    }
} // namespace pirrht
