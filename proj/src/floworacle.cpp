#include "dsscap/floworacle.hpp"

#include <algorithm>
#include <queue>

namespace dsscap {

std::string FlowGraph::vertex_name(int v) const {
  if (v == source()) return "s";
  if (v == sink()) return "t";
  if (v >= 1 && v <= 2 * node_count) {
    const int id = (v + 1) / 2;
    return std::string(v % 2 == 1 ? "in" : "out") + std::to_string(id);
  }
  const int rel = v - 2 * node_count;
  const int pos = (rel + 1) / 2;
  return std::string(rel % 2 == 1 ? "rin" : "rout") + std::to_string(pos);
}

FlowGraph build_flow_graph(const DssSpec& spec, const SurvivingSequence& seq) {
  require_valid(spec);
  if (static_cast<int>(seq.entries.size()) != spec.k)
    throw std::invalid_argument("build_flow_graph: sequence must have exactly k entries");
  std::vector<char> seen(spec.n + 1, 0);
  for (const SequenceEntry& entry : seq.entries) {
    if (entry.node_id < 1 || entry.node_id > spec.n)
      throw std::invalid_argument("build_flow_graph: unknown node id " +
                                  std::to_string(entry.node_id));
    if (seen[entry.node_id])
      throw std::invalid_argument("build_flow_graph: node " + std::to_string(entry.node_id) +
                                  " appears twice");
    seen[entry.node_id] = 1;
    const NodeSpec& node = spec.node(entry.node_id);
    if (entry.set_index < 0 ||
        entry.set_index >= static_cast<int>(node.surviving_sets.size()))
      throw std::invalid_argument("build_flow_graph: node " + std::to_string(entry.node_id) +
                                  " has no surviving set " + std::to_string(entry.set_index + 1));
  }

  FlowGraph g;
  g.node_count = spec.n;
  g.positions = spec.k;
  // The collector reads repaired nodes only, so the storage bound binds on the
  // repaired incarnations; live originals act as relays of source data and
  // would otherwise throttle downloads below the beta per helper they owe.
  for (int id = 1; id <= spec.n; ++id) {
    g.edges.push_back({g.source(), g.in_vertex(id), true, Rational(0)});
    g.edges.push_back({g.in_vertex(id), g.out_vertex(id), true, Rational(0)});
  }

  // Repairs happen in sequence order. A helper that was itself repaired at an
  // earlier position serves from its repaired incarnation, not the original.
  std::vector<int> position_of(spec.n + 1, 0);
  for (int j = 1; j <= spec.k; ++j) {
    const SequenceEntry& entry = seq.entries[j - 1];
    const NodeSpec& node = spec.node(entry.node_id);
    g.edges.push_back({g.repaired_in(j), g.repaired_out(j), false, node.alpha});
    for (int helper : node.surviving_sets[entry.set_index]) {
      const int from = position_of[helper] > 0 ? g.repaired_out(position_of[helper])
                                               : g.out_vertex(helper);
      g.edges.push_back({from, g.repaired_in(j), false, spec.beta});
    }
    g.edges.push_back({g.repaired_out(j), g.sink(), true, Rational(0)});
    position_of[entry.node_id] = j;
  }
  return g;
}

CutCertificate max_flow(const FlowGraph& g) {
  const int vertices = g.vertex_count();
  for (const FlowGraph::Edge& e : g.edges) {
    if (e.from < 0 || e.from >= vertices || e.to < 0 || e.to >= vertices)
      throw std::invalid_argument("max_flow: edge endpoint out of range");
    if (!e.unbounded && e.weight < 0)
      throw std::invalid_argument("max_flow: negative edge weight");
  }

  struct ResidualEdge {
    int to;
    int rev;  // index of the paired edge in adj[to]
    bool unbounded;
    Rational cap;
  };
  std::vector<std::vector<ResidualEdge>> adj(vertices);
  for (const FlowGraph::Edge& e : g.edges) {
    adj[e.from].push_back({e.to, static_cast<int>(adj[e.to].size()), e.unbounded,
                           e.unbounded ? Rational(0) : e.weight});
    adj[e.to].push_back({e.from, static_cast<int>(adj[e.from].size()) - 1, false, Rational(0)});
  }
  auto residual_positive = [](const ResidualEdge& e) { return e.unbounded || e.cap > 0; };

  const int s = g.source();
  const int t = g.sink();
  Rational flow = 0;
  std::vector<int> parent_vertex(vertices);
  std::vector<int> parent_edge(vertices);

  while (true) {
    std::fill(parent_vertex.begin(), parent_vertex.end(), -1);
    parent_vertex[s] = s;
    std::queue<int> queue;
    queue.push(s);
    while (!queue.empty() && parent_vertex[t] == -1) {
      const int v = queue.front();
      queue.pop();
      for (int i = 0; i < static_cast<int>(adj[v].size()); ++i) {
        const ResidualEdge& e = adj[v][i];
        if (!residual_positive(e) || parent_vertex[e.to] != -1) continue;
        parent_vertex[e.to] = v;
        parent_edge[e.to] = i;
        queue.push(e.to);
      }
    }
    if (parent_vertex[t] == -1) break;

    bool has_finite = false;
    Rational bottleneck = 0;
    for (int v = t; v != s; v = parent_vertex[v]) {
      const ResidualEdge& e = adj[parent_vertex[v]][parent_edge[v]];
      if (e.unbounded) continue;
      if (!has_finite || e.cap < bottleneck) {
        bottleneck = e.cap;
        has_finite = true;
      }
    }
    if (!has_finite)
      throw UnboundedFlowError("unbounded flow: augmenting path of unlimited edges");
    for (int v = t; v != s; v = parent_vertex[v]) {
      ResidualEdge& e = adj[parent_vertex[v]][parent_edge[v]];
      if (!e.unbounded) e.cap -= bottleneck;
      adj[v][e.rev].cap += bottleneck;
    }
    flow += bottleneck;
  }

  // Residual reachability from s gives the minimum cut.
  std::vector<char> reachable(vertices, 0);
  reachable[s] = 1;
  std::queue<int> queue;
  queue.push(s);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (const ResidualEdge& e : adj[v]) {
      if (!residual_positive(e) || reachable[e.to]) continue;
      reachable[e.to] = 1;
      queue.push(e.to);
    }
  }

  CutCertificate cert;
  cert.flow_value = flow;
  for (int v = 0; v < vertices; ++v)
    if (reachable[v]) cert.source_side.push_back(v);
  Rational cut_sum = 0;
  for (const FlowGraph::Edge& e : g.edges) {
    if (!reachable[e.from] || reachable[e.to]) continue;
    if (e.unbounded)
      throw UnboundedFlowError("unbounded flow: unlimited edge crosses the minimum cut");
    cert.cut_edges.push_back(e);
    cut_sum += e.weight;
  }
  if (cut_sum != flow) throw std::logic_error("max_flow: cut does not certify flow value");
  return cert;
}

Rational capacity_via_flow(const DssSpec& spec) {
  bool found = false;
  Rational best = 0;
  for (SequenceStream stream(spec); !stream.done(); stream.advance()) {
    const Rational value = max_flow(build_flow_graph(spec, stream.current())).flow_value;
    if (!found || value < best) {
      best = value;
      found = true;
    }
  }
  if (!found) throw std::logic_error("capacity_via_flow: spec has no surviving sequences");
  return best;
}

std::string to_dot(const FlowGraph& g) {
  std::string out = "digraph flowgraph {\n  rankdir=LR;\n";
  for (const FlowGraph::Edge& e : g.edges)
    out += "  " + g.vertex_name(e.from) + " -> " + g.vertex_name(e.to) + " [label=\"" +
           (e.unbounded ? std::string("inf") : format_rational(e.weight)) + "\"];\n";
  out += "}\n";
  return out;
}

}  // namespace dsscap
