#pragma once

#include "dsscap/capacity.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace dsscap::detail {

/// Smallest |set \ prior| over the node's surviving sets. prior is indexed by
/// node id; *first_index receives the first set index attaining the minimum.
inline int min_multiplicity(const NodeSpec& node, const std::vector<char>& prior,
                            int* first_index = nullptr) {
  int best = -1;
  int arg = 0;
  for (int si = 0; si < static_cast<int>(node.surviving_sets.size()); ++si) {
    int m = 0;
    for (int helper : node.surviving_sets[si]) m += prior[helper] ? 0 : 1;
    if (best < 0 || m < best) {
      best = m;
      arg = si;
    }
  }
  if (first_index) *first_index = arg;
  return best;
}

template <class Value>
struct PositionTerm {
  Value term;
  int set_index;
};

template <class Value>
struct MinimizeOutcome {
  bool found = false;
  Value best{};
  std::vector<SequenceEntry> argmin;
  std::uint64_t sequences_covered = 0;
};

/// Minimizes the sum of per-position terms over all ordered k-tuples of
/// distinct nodes. eval(node, prior, position) returns the smallest term any
/// of the node's sets can contribute given the earlier nodes, plus the first
/// set index attaining it; since that choice never affects later positions,
/// minimizing over node tuples with per-position best sets is exact.
///
/// Ties keep the first minimizer in canonical order (lexicographic node
/// tuple, then first achieving set per position). Pruning drops a partial
/// tuple once its partial sum already reaches the incumbent; only strictly
/// better values replace the incumbent, so the canonical-first argmin
/// survives pruning.
///
/// Work splits into one task per first-position node with task-local
/// incumbents; the reduction walks tasks in node order, so the outcome does
/// not depend on the worker count.
template <class Value, class Eval>
MinimizeOutcome<Value> minimize_over_tuples(const DssSpec& spec, const SearchOptions& options,
                                            Eval eval) {
  const int n = spec.n;
  const int k = spec.k;
  std::vector<MinimizeOutcome<Value>> per_task(n);

  auto run_task = [&](int first_id) {
    MinimizeOutcome<Value>& out = per_task[first_id - 1];
    std::vector<char> prior(n + 1, 0);
    std::vector<SequenceEntry> path;
    path.reserve(k);

    auto dfs = [&](auto&& self, int pos, const Value& partial,
                   std::uint64_t covered) -> void {
      if (pos == k) {
        out.sequences_covered += covered;
        if (!out.found || partial < out.best) {
          out.found = true;
          out.best = partial;
          out.argmin = path;
        }
        return;
      }
      for (int id = 1; id <= n; ++id) {
        if (prior[id]) continue;
        if (pos == 0 && id != first_id) continue;
        const NodeSpec& node = spec.node(id);
        const PositionTerm<Value> pt = eval(node, prior, pos);
        const Value next = partial + pt.term;
        if (options.prune && out.found && !(next < out.best)) continue;
        prior[id] = 1;
        path.push_back({id, pt.set_index});
        self(self, pos + 1, next,
             covered * static_cast<std::uint64_t>(node.surviving_sets.size()));
        path.pop_back();
        prior[id] = 0;
      }
    };
    dfs(dfs, 0, Value{}, 1);
  };

  const int workers = std::max(1, std::min(options.threads, n));
  if (workers == 1) {
    for (int id = 1; id <= n; ++id) run_task(id);
  } else {
    std::atomic<int> next_task{1};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int id; (id = next_task.fetch_add(1)) <= n;) run_task(id);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  MinimizeOutcome<Value> global;
  for (const MinimizeOutcome<Value>& task : per_task) {
    global.sequences_covered += task.sequences_covered;
    if (task.found && (!global.found || task.best < global.best)) {
      global.found = true;
      global.best = task.best;
      global.argmin = task.argmin;
    }
  }
  return global;
}

/// Sequential visit of every ordered k-tuple with the per-position minimal
/// multiplicities. fn(entries, multiplicities) is called once per tuple.
template <class Fn>
void visit_tuples_with_multiplicities(const DssSpec& spec, Fn fn) {
  const int n = spec.n;
  const int k = spec.k;
  std::vector<char> prior(n + 1, 0);
  std::vector<SequenceEntry> path;
  std::vector<int> mults;
  path.reserve(k);
  mults.reserve(k);
  auto dfs = [&](auto&& self, int pos) -> void {
    if (pos == k) {
      fn(path, mults);
      return;
    }
    for (int id = 1; id <= n; ++id) {
      if (prior[id]) continue;
      const NodeSpec& node = spec.node(id);
      int set_index = 0;
      const int m = min_multiplicity(node, prior, &set_index);
      prior[id] = 1;
      path.push_back({id, set_index});
      mults.push_back(m);
      self(self, pos + 1);
      mults.pop_back();
      path.pop_back();
      prior[id] = 0;
    }
  };
  dfs(dfs, 0);
}

}  // namespace dsscap::detail
