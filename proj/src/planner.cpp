#include <pirrht/planner.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <tuple>

namespace pirrht
{
    namespace
    {
        Point pos (const Vec &x) { return {x (0), x (1)}; }
    } // namespace

    PlannerGraph::PlannerGraph (Workspace workspace, SdeModel model, PlannerConfig config)
        : workspace_ (std::move (workspace)), model_ (std::move (model)), config_ (config)
    {
        if (!(config_.dt > 0.0))
            throw ConfigError ("planner: dt must be positive");
        if (!(config_.h_limit >= 0.0))
            throw ConfigError ("planner: h_limit must be non-negative");
        if (config_.goal_bias < 0.0 || config_.goal_bias > 1.0)
            throw ConfigError ("planner: goal_bias must lie in [0, 1]");
        filter_ = ClassFilter::around_ones (static_cast<Eigen::Index> (workspace_.obstacles ().size ()), config_.h_limit);
        gamma_ = config_.gamma > 0.0 ? config_.gamma : 2.5 * workspace_.bounds ().diagonal ();
    }

    double PlannerGraph::distance (const Vec &a, const Vec &b) const
    {
        if (model_.kind () == SystemKind::Dubins)
        {
            const double dth = config_.heading_weight * wrap_angle (a (2) - b (2));
            return std::sqrt ((a (0) - b (0)) * (a (0) - b (0)) + (a (1) - b (1)) * (a (1) - b (1)) + dth * dth);
        }
        return (a - b).norm ();
    }

    double PlannerGraph::near_radius () const
    {
        const double n = static_cast<double> (vertices_.size () + 1);
        return gamma_ * std::pow (std::log (n) / n, 1.0 / model_.state_dim ());
    }

    std::vector<VertexId> PlannerGraph::near (const Vec &x, double radius) const
    {
        std::vector<VertexId> out;
        for (VertexId v = 0; v < vertices_.size (); ++v)
            if (distance (x, vertices_[v].x) <= radius)
                out.push_back (v);
        return out;
    }

    std::vector<const Node *> PlannerGraph::live_nodes (VertexId v) const
    {
        std::vector<const Node *> out;
        for (NodeId id : vertices_.at (v).nodes)
            out.push_back (&nodes_[id]);
        return out;
    }

    Vec PlannerGraph::sample (std::mt19937_64 &rng) const
    {
        std::uniform_real_distribution<double> unit (0.0, 1.0);
        const int n = model_.state_dim ();
        Vec x (n);
        const auto &b = workspace_.bounds ();
        const auto &goal = workspace_.goal ();
        if (unit (rng) < config_.goal_bias)
        {
            const double r = goal.disc.radius * std::sqrt (unit (rng));
            const double a = kTwoPi * unit (rng);
            x (0) = goal.disc.center.x () + r * std::cos (a);
            x (1) = goal.disc.center.y () + r * std::sin (a);
            if (n == 3)
            {
                const double u = unit (rng);
                x (2) = goal.heading ? goal.heading->first + u * (goal.heading->second - goal.heading->first) : -kPi + kTwoPi * u;
            }
            return x;
        }
        x (0) = b.xmin + (b.xmax - b.xmin) * unit (rng);
        x (1) = b.ymin + (b.ymax - b.ymin) * unit (rng);
        if (n == 3)
            x (2) = -kPi + kTwoPi * unit (rng);
        return x;
    }

    void PlannerGraph::expand (std::size_t n_iter, std::mt19937_64 &rng)
    {
        for (std::size_t i = 0; i < n_iter; ++i)
            insert_sample (sample (rng));
    }

    std::size_t PlannerGraph::expand_until (std::size_t target_vertices, std::size_t max_iters, std::mt19937_64 &rng)
    {
        std::size_t used = 0;
        while (vertices_.size () < target_vertices && used < max_iters)
        {
            insert_sample (sample (rng));
            ++used;
        }
        return used;
    }

    std::optional<VertexId> PlannerGraph::insert_sample (const Vec &x)
    {
        ++iterations_;
        const Point p = pos (x);
        VertexId v = kNone;
        if (workspace_.in_goal (p))
        {
            if (workspace_.goal ().heading && x.size () == 3)
            {
                const auto [lo, hi] = *workspace_.goal ().heading;
                const double th = lo + wrap_angle (x (2) - lo);
                if (th < lo || th > hi)
                    return std::nullopt;
            }
            v = add_root (x);
        }
        else if (workspace_.contains_free (p))
            v = choose_parent (x);
        if (v == kNone)
            return std::nullopt;
        rewire (v);
        return v;
    }

    VertexId PlannerGraph::add_root (const Vec &x)
    {
        const auto reps = workspace_.representative_points ();
        const Point g = workspace_.goal ().representative;
        const Point p = pos (x);
        HSignature h = HSignature::ones (static_cast<Eigen::Index> (reps.size ()));
        if (p != g)
            h += segment_signature (p, g, reps);

        const std::size_t node_mark = nodes_.size ();
        const auto v = static_cast<VertexId> (vertices_.size ());
        vertices_.push_back ({x, true, {}, {}, {}});
        Node n;
        n.h = std::move (h);
        if (!append_node (v, std::move (n)))
        {
            discard_last_vertex (edges_.size (), node_mark);
            return kNone;
        }
        return v;
    }

    std::optional<PlannerGraph::EdgeCandidate> PlannerGraph::connect (const Vec &from, const Vec &to) const
    {
        Connection conn = tpbvp (model_, from, to);
        const auto pts = conn.polyline (model_, workspace_.collision_resolution ());
        if (!workspace_.polyline_free (pts))
            return std::nullopt;
        HSignature h = path_signature (pts, workspace_.representative_points ());
        return EdgeCandidate{std::move (conn), std::move (h)};
    }

    EdgeId PlannerGraph::add_edge (VertexId from, VertexId to, EdgeCandidate cand)
    {
        const auto id = static_cast<EdgeId> (edges_.size ());
        edges_.push_back ({from, to, std::move (cand.conn.pieces), cand.conn.duration, cand.conn.cost, std::move (cand.h)});
        vertices_[from].out.push_back (id);
        vertices_[to].in.push_back (id);
        return id;
    }

    void PlannerGraph::discard_last_vertex (std::size_t edge_mark, std::size_t node_mark)
    {
        for (std::size_t e = edges_.size (); e-- > edge_mark;)
        {
            auto &in = vertices_[edges_[e].to].in;
            if (!in.empty () && in.back () == e)
                in.pop_back ();
        }
        edges_.resize (edge_mark);
        nodes_.resize (node_mark);
        vertices_.pop_back ();
    }

    VertexId PlannerGraph::choose_parent (const Vec &x, double radius_scale)
    {
        const auto nearby = near (x, near_radius () * radius_scale);
        const std::size_t edge_mark = edges_.size (), node_mark = nodes_.size ();
        const auto v = static_cast<VertexId> (vertices_.size ());
        vertices_.push_back ({x, false, {}, {}, {}});
        for (VertexId u : nearby)
        {
            if (vertices_[u].nodes.empty ())
                continue;
            auto cand = connect (x, vertices_[u].x);
            if (!cand)
                continue;
            const EdgeId e = add_edge (v, u, std::move (*cand));
            // copy: append_node may reallocate nodes_ and alter the list at u
            const std::vector<NodeId> parents = vertices_[u].nodes;
            for (NodeId pid : parents)
            {
                Node n;
                n.h = nodes_[pid].h + edges_[e].h;
                n.cost = nodes_[pid].cost + edges_[e].cost;
                n.parent = pid;
                n.via = e;
                append_node (v, std::move (n));
            }
        }
        if (vertices_[v].nodes.empty ())
        {
            discard_last_vertex (edge_mark, node_mark);
            return kNone;
        }
        return v;
    }

    bool PlannerGraph::append_node (VertexId v, Node n)
    {
        if (!is_allowed (n.h, filter_))
            return false;
        auto &list = vertices_.at (v).nodes;
        for (NodeId id : list)
            if (homologous (nodes_[id].h, n.h, config_.homology_tol) && nodes_[id].cost <= n.cost)
                return false;
        std::erase_if (list, [&] (NodeId id) {
            if (homologous (nodes_[id].h, n.h, config_.homology_tol) && n.cost < nodes_[id].cost)
            {
                nodes_[id].alive = false;
                return true;
            }
            return false;
        });
        n.vertex = v;
        n.alive = true;
        list.push_back (static_cast<NodeId> (nodes_.size ()));
        nodes_.push_back (std::move (n));
        return true;
    }

    void PlannerGraph::rewire (VertexId v)
    {
        const Vec x = vertices_.at (v).x;
        for (VertexId u : near (x, near_radius ()))
        {
            if (u == v)
                continue;
            if (auto cand = connect (vertices_[u].x, x))
                add_edge (u, v, std::move (*cand));
        }

        using Entry = std::tuple<double, std::uint64_t, NodeId>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
        for (NodeId id : vertices_[v].nodes)
            queue.emplace (nodes_[id].cost, queue_seq_++, id);
        while (!queue.empty ())
        {
            const NodeId id = std::get<2> (queue.top ());
            queue.pop ();
            if (!nodes_[id].alive)
                continue;
            const VertexId w = nodes_[id].vertex;
            for (std::size_t k = 0; k < vertices_[w].in.size (); ++k)
            {
                const Edge &e = edges_[vertices_[w].in[k]];
                Node n;
                n.h = nodes_[id].h + e.h;
                n.cost = nodes_[id].cost + e.cost;
                n.parent = id;
                n.via = vertices_[w].in[k];
                const VertexId from = e.from;
                if (append_node (from, std::move (n)))
                    queue.emplace (nodes_.back ().cost, queue_seq_++, static_cast<NodeId> (nodes_.size () - 1));
            }
        }
    }

    std::vector<NodeId> PlannerGraph::chain (NodeId n) const
    {
        std::vector<NodeId> out;
        while (n != kNone)
        {
            if (out.size () > nodes_.size ())
                throw Error ("planner: parent chain does not terminate");
            out.push_back (n);
            n = nodes_.at (n).parent;
        }
        return out;
    }

    std::vector<Reference> PlannerGraph::extract_reference (const Vec &x_cur)
    {
        VertexId v = kNone;
        // widen the neighbourhood before giving up; the last attempt covers every vertex
        for (double scale : {1.0, 2.0, 4.0, 1e9})
        {
            v = choose_parent (x_cur, scale);
            if (v != kNone)
                break;
        }
        if (v == kNone)
            throw Unreachable ("extract_reference: state cannot be connected to the graph");

        std::vector<Reference> refs;
        for (NodeId id : vertices_[v].nodes)
        {
            Reference r;
            r.node = id;
            r.h = nodes_[id].h;
            r.cost = nodes_[id].cost;
            for (NodeId c : chain (id))
            {
                const EdgeId e = nodes_[c].via;
                if (e == kNone)
                    continue;
                r.edges.push_back (e);
                r.pieces.insert (r.pieces.end (), edges_[e].pieces.begin (), edges_[e].pieces.end ());
                r.duration += edges_[e].duration;
            }
            r.tape = rasterize (r.pieces, static_cast<std::size_t> (model_.control_dim ()), config_.dt);
            refs.push_back (std::move (r));
        }
        std::stable_sort (refs.begin (), refs.end (), [] (const Reference &a, const Reference &b) { return a.cost < b.cost; });
        return refs;
    }

    std::vector<std::string> PlannerGraph::audit () const
    {
        std::vector<std::string> issues;
        auto report = [&] (auto &&...parts) {
            std::ostringstream os;
            (os << ... << parts);
            issues.push_back (os.str ());
        };
        const auto reps = workspace_.representative_points ();

        for (EdgeId e = 0; e < edges_.size (); ++e)
        {
            const Edge &edge = edges_[e];
            Connection conn{vertices_[edge.from].x, edge.pieces, edge.duration, 0.0, edge.cost};
            const auto pts = conn.polyline (model_, workspace_.collision_resolution ());
            if (!workspace_.polyline_free (pts))
                report ("edge ", e, " collides");
            if ((conn.end_state (model_) - vertices_[edge.to].x).head<2> ().norm () > 1e-6)
                report ("edge ", e, " does not reach its target");
            if (!homologous (path_signature (pts, reps), edge.h, 1e-9))
                report ("edge ", e, " signature mismatch");
        }

        for (VertexId v = 0; v < vertices_.size (); ++v)
        {
            const auto &list = vertices_[v].nodes;
            for (std::size_t i = 0; i < list.size (); ++i)
            {
                const NodeId id = list[i];
                const Node &n = nodes_[id];
                if (!n.alive || n.vertex != v)
                    report ("node ", id, " listed at vertex ", v, " is dead or misplaced");
                if (!is_allowed (n.h, filter_))
                    report ("node ", id, " has a blocked signature");
                for (std::size_t j = i + 1; j < list.size (); ++j)
                    if (homologous (n.h, nodes_[list[j]].h, config_.homology_tol))
                        report ("vertex ", v, " holds homologous nodes ", id, " and ", list[j]);
                if (n.parent == kNone)
                {
                    if (!vertices_[v].root || n.cost != 0.0)
                        report ("node ", id, " has no parent but is not a root node");
                    continue;
                }
                const Node &p = nodes_.at (n.parent);
                const Edge &e = edges_.at (n.via);
                if (!p.alive)
                    report ("node ", id, " has a dead parent ", n.parent);
                if (e.from != v || e.to != p.vertex)
                    report ("node ", id, " via-edge does not join it to its parent");
                if (std::abs (n.cost - (p.cost + e.cost)) > 1e-9 * std::max (1.0, n.cost))
                    report ("node ", id, " cost recurrence violated");
                if (!homologous (n.h, p.h + e.h, 1e-9))
                    report ("node ", id, " signature recurrence violated");
                try
                {
                    (void)chain (id);
                }
                catch (const Error &)
                {
                    report ("node ", id, " lies on a parent cycle");
                }
            }
        }
        return issues;
    }

    PlannerGraph PlannerGraph::restore (Workspace workspace, SdeModel model, PlannerConfig config, std::vector<Vertex> vertices,
                                        std::vector<Edge> edges, std::vector<Node> nodes, std::size_t iterations)
    {
        PlannerGraph g (std::move (workspace), std::move (model), config);
        for (auto &v : vertices)
        {
            v.in.clear ();
            v.out.clear ();
        }
        for (EdgeId e = 0; e < edges.size (); ++e)
        {
            if (edges[e].from >= vertices.size () || edges[e].to >= vertices.size ())
                throw ConfigError ("tree: edge endpoint out of range");
            vertices[edges[e].from].out.push_back (e);
            vertices[edges[e].to].in.push_back (e);
        }
        for (auto &n : nodes)
            n.alive = false;
        for (VertexId v = 0; v < vertices.size (); ++v)
            for (NodeId id : vertices[v].nodes)
            {
                if (id >= nodes.size ())
                    throw ConfigError ("tree: node id out of range");
                nodes[id].vertex = v;
                nodes[id].alive = true;
            }
        g.vertices_ = std::move (vertices);
        g.edges_ = std::move (edges);
        g.nodes_ = std::move (nodes);
        g.iterations_ = iterations;
        return g;
    }
} // namespace pirrht
