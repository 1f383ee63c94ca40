#pragma once

#include "dsscap/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dsscap {

/// Every s-t cut of the graph crosses an edge of unlimited weight, so the
/// maximum flow is not a finite number.
struct UnboundedFlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Acyclic information-flow graph of one surviving sequence. Vertices are
/// implicit: s, an in/out relay pair per storage node, an in/out pair per
/// repaired position (that internal edge carries the node's alpha, since the
/// collector reads repaired nodes only), and the data collector t.
/// Unlimited weights are a distinguished state, never a sentinel number.
struct FlowGraph {
  struct Edge {
    int from = 0;
    int to = 0;
    bool unbounded = false;
    Rational weight;  // meaningful only when !unbounded
  };

  int node_count = 0;  // storage nodes n
  int positions = 0;   // repaired positions k
  std::vector<Edge> edges;

  int vertex_count() const { return 2 + 2 * node_count + 2 * positions; }
  int source() const { return 0; }
  int in_vertex(int node_id) const { return 2 * node_id - 1; }
  int out_vertex(int node_id) const { return 2 * node_id; }
  int repaired_in(int position) const { return 2 * node_count + 2 * position - 1; }
  int repaired_out(int position) const { return 2 * node_count + 2 * position; }
  int sink() const { return 2 * node_count + 2 * positions + 1; }
  std::string vertex_name(int v) const;
};

/// Builds the repair-and-collect graph of a sequence: the source feeds every
/// original node, each repaired position downloads beta from every helper in
/// its chosen set (from the helper's *repaired* incarnation when the helper
/// occupies an earlier position), and the collector attaches to the k
/// repaired nodes with unlimited edges.
FlowGraph build_flow_graph(const DssSpec& spec, const SurvivingSequence& seq);

/// Max-flow value together with a checkable witness: a vertex bipartition
/// whose crossing edges are all finite and sum to the flow value.
struct CutCertificate {
  Rational flow_value;
  std::vector<int> source_side;  // sorted, contains source()
  std::vector<FlowGraph::Edge> cut_edges;
};

/// Exact maximum flow (Edmonds-Karp; the augmentation count is bounded by
/// V*E independent of the weights, so exact rationals terminate). Throws
/// UnboundedFlowError when no finite cut exists.
CutCertificate max_flow(const FlowGraph& g);

/// Independent capacity computation: minimum of max_flow over every
/// surviving sequence's graph. Exponential; intended as a verification
/// oracle for small systems.
Rational capacity_via_flow(const DssSpec& spec);

/// Graphviz rendering for debugging.
std::string to_dot(const FlowGraph& g);

}  // namespace dsscap
