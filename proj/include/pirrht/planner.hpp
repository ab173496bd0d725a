#pragma once
/**
 * @file
 * @brief Expansion phase: a rapidly-exploring random graph over the state space
 *  whose goal-rooted shortest-path tree is projected into the H-signature
 *  augmented space.
 *
 * Every vertex carries a set of nodes, one per homology class of path from the
 * vertex to a root in the goal region. A node is kept only if its signature is
 * allowed and no homologous node at the same vertex is at least as cheap.
 * Insertions are followed by a uniform-cost propagation along incoming edges,
 * so after every iteration each vertex holds the cheapest allowed path of each
 * class that the current graph supports.
 */

#include <pirrht/dynamics.hpp>
#include <pirrht/environment.hpp>
#include <pirrht/topology.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pirrht
{
    using VertexId = std::uint32_t;
    using NodeId = std::uint32_t;
    using EdgeId = std::uint32_t;
    inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max ();

    struct PlannerConfig
    {
        /// Near-radius scale; non-positive selects 2.5 x workspace diagonal.
        double gamma = 0.0;
        double goal_bias = 0.05;
        /// Allowed-class filter half-width around the all-ones offset.
        double h_limit = std::numeric_limits<double>::infinity ();
        double homology_tol = kHomologyTolerance;
        /// Period of the control tapes returned by extract_reference.
        double dt = 0.1;
        /// Weight on the wrapped heading difference in the Dubins neighbour metric.
        double heading_weight = 1.0;
    };

    struct Node
    {
        VertexId vertex = kNone;
        HSignature h;
        double cost = 0.0;
        NodeId parent = kNone;
        /// Edge from this node's vertex to the parent's vertex.
        EdgeId via = kNone;
        bool alive = true;
    };

    /// Connection from `from` toward the root side `to`.
    struct Edge
    {
        VertexId from = kNone;
        VertexId to = kNone;
        std::vector<ControlPiece> pieces;
        double duration = 0.0;
        double cost = 0.0;
        HSignature h;
    };

    struct Vertex
    {
        Vec x;
        bool root = false;
        std::vector<NodeId> nodes;
        std::vector<EdgeId> in;
        std::vector<EdgeId> out;
    };

    /// Open-loop reference for one homology class.
    struct Reference
    {
        ControlTape tape;
        HSignature h;
        double cost = 0.0;
        double duration = 0.0;
        NodeId node = kNone;
        std::vector<EdgeId> edges;
        std::vector<ControlPiece> pieces;
    };

    class PlannerGraph
    {
      public:
        PlannerGraph (Workspace workspace, SdeModel model, PlannerConfig config);

        /// Run n_iter sampling iterations. Iterations whose sample cannot be connected are no-ops.
        void expand (std::size_t n_iter, std::mt19937_64 &rng);
        /// Iterate until the graph holds target_vertices vertices or max_iters iterations ran.
        /// Returns the number of iterations used.
        std::size_t expand_until (std::size_t target_vertices, std::size_t max_iters, std::mt19937_64 &rng);

        /// One sampling iteration on the given sample. Returns the new vertex, if one was added.
        std::optional<VertexId> insert_sample (const Vec &x);

        /// New root at a goal state; its node has cost 0 and signature ones + H(x -> goal rep).
        /// Returns kNone if that signature is blocked.
        VertexId add_root (const Vec &x);

        /// Connect x to its forward neighbours and propagate their nodes back to it. The new
        /// vertex stays in the graph only if it received a node; otherwise kNone is returned.
        VertexId choose_parent (const Vec &x, double radius_scale = 1.0);

        /// Insert n at v unless blocked or dominated, pruning nodes it dominates.
        bool append_node (VertexId v, Node n);

        /// Add backward edges into v and propagate v's nodes through the graph in cost order.
        void rewire (VertexId v);

        /// Connect x_cur (kept in the graph) and rebuild one control tape per surviving node,
        /// ordered by ascending cost. Throws Unreachable when no node can be connected.
        std::vector<Reference> extract_reference (const Vec &x_cur);

        /// Node chain from n to its root, n first.
        [[nodiscard]] std::vector<NodeId> chain (NodeId n) const;

        [[nodiscard]] double near_radius () const;
        [[nodiscard]] std::vector<VertexId> near (const Vec &x, double radius) const;
        [[nodiscard]] double distance (const Vec &a, const Vec &b) const;

        [[nodiscard]] const std::vector<Vertex> &vertices () const noexcept { return vertices_; }
        [[nodiscard]] const std::vector<Edge> &edges () const noexcept { return edges_; }
        [[nodiscard]] const std::vector<Node> &nodes () const noexcept { return nodes_; }
        [[nodiscard]] std::vector<const Node *> live_nodes (VertexId v) const;
        [[nodiscard]] const Workspace &workspace () const noexcept { return workspace_; }
        [[nodiscard]] const SdeModel &model () const noexcept { return model_; }
        [[nodiscard]] const PlannerConfig &config () const noexcept { return config_; }
        [[nodiscard]] const ClassFilter &filter () const noexcept { return filter_; }
        [[nodiscard]] std::size_t iterations () const noexcept { return iterations_; }

        /// Check tree consistency: recurrences, filter membership, alive acyclic parent
        /// chains, no two homologous nodes per vertex, edge signatures. Empty when sound.
        [[nodiscard]] std::vector<std::string> audit () const;

        /// Sample a state: goal region with probability goal_bias, else uniform over bounds.
        Vec sample (std::mt19937_64 &rng) const;

        /// Rebuild a graph from stored parts (tree files). Edges keep their stored pieces.
        static PlannerGraph restore (Workspace workspace, SdeModel model, PlannerConfig config, std::vector<Vertex> vertices,
                                     std::vector<Edge> edges, std::vector<Node> nodes, std::size_t iterations);

      private:
        struct EdgeCandidate
        {
            Connection conn;
            HSignature h;
        };
        std::optional<EdgeCandidate> connect (const Vec &from, const Vec &to) const;
        EdgeId add_edge (VertexId from, VertexId to, EdgeCandidate cand);
        void discard_last_vertex (std::size_t edge_mark, std::size_t node_mark);

        Workspace workspace_;
        SdeModel model_;
        PlannerConfig config_;
        ClassFilter filter_;
        double gamma_ = 1.0;
        std::size_t iterations_ = 0;
        std::vector<Vertex> vertices_;
        std::vector<Edge> edges_;
        std::vector<Node> nodes_;
        std::uint64_t queue_seq_ = 0;
    };
} // namespace pirrht
