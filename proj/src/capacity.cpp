#include "dsscap/capacity.hpp"

#include "dsscap/detail/tuple_search.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsscap {

CutTerms sequence_value(const DssSpec& spec, const SurvivingSequence& seq) {
  if (static_cast<int>(seq.entries.size()) != spec.k)
    throw std::invalid_argument("sequence_value: sequence must have exactly k entries");
  std::vector<char> prior(spec.n + 1, 0);
  CutTerms out;
  out.value = 0;
  for (const SequenceEntry& entry : seq.entries) {
    if (entry.node_id < 1 || entry.node_id > spec.n)
      throw std::invalid_argument("sequence_value: unknown node id " +
                                  std::to_string(entry.node_id));
    if (prior[entry.node_id])
      throw std::invalid_argument("sequence_value: node " + std::to_string(entry.node_id) +
                                  " appears twice");
    const NodeSpec& node = spec.node(entry.node_id);
    if (entry.set_index < 0 ||
        entry.set_index >= static_cast<int>(node.surviving_sets.size()))
      throw std::invalid_argument("sequence_value: node " + std::to_string(entry.node_id) +
                                  " has no surviving set " + std::to_string(entry.set_index + 1));
    int fresh = 0;
    for (int helper : node.surviving_sets[entry.set_index]) fresh += prior[helper] ? 0 : 1;
    CutTerms::Term term;
    term.storage = node.alpha;
    term.bandwidth = Rational(fresh) * spec.beta;
    out.value += std::min(term.storage, term.bandwidth);
    out.terms.push_back(std::move(term));
    prior[entry.node_id] = 1;
  }
  return out;
}

CapacityResult capacity(const DssSpec& spec, const SearchOptions& options) {
  require_valid(spec);
  auto eval = [&spec](const NodeSpec& node, const std::vector<char>& prior,
                      int) -> detail::PositionTerm<Rational> {
    int first_index = 0;
    const int m = detail::min_multiplicity(node, prior, &first_index);
    Rational bandwidth = Rational(m) * spec.beta;
    // When storage is the binding bound every set attains it, so the
    // canonical-first choice is set 1; otherwise the first set of minimal
    // fresh-helper count.
    if (node.alpha <= bandwidth) return {node.alpha, 0};
    return {std::move(bandwidth), first_index};
  };
  const auto outcome = detail::minimize_over_tuples<Rational>(spec, options, eval);

  CapacityResult result;
  result.capacity = outcome.best;
  result.argmin_sequence.entries = outcome.argmin;
  result.argmin_terms = sequence_value(spec, result.argmin_sequence);
  result.sequences_examined = outcome.sequences_covered;
  if (result.argmin_terms.value != result.capacity)
    throw std::logic_error("capacity: argmin re-evaluation mismatch");
  return result;
}

Rational homogeneous_capacity(int n, int k, int d, const Rational& alpha,
                              const Rational& gamma) {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("homogeneous_capacity: need 1 <= k <= n");
  if (d < k - 1 || d > n - 1)
    throw std::invalid_argument("homogeneous_capacity: need k-1 <= d <= n-1");
  if (alpha < 0) throw std::invalid_argument("homogeneous_capacity: alpha must be >= 0");
  if (gamma < 0) throw std::invalid_argument("homogeneous_capacity: gamma must be >= 0");
  if (d == 0) return 0;  // only k = 1 reaches this; no helpers, term min(alpha, 0)
  Rational total = 0;
  for (int i = 1; i <= k; ++i)
    total += std::min(alpha, Rational(d - i + 1) * gamma / d);
  return total;
}

FeasibilityResult feasibility(const DssSpec& spec, const Rational& file_size,
                              const SearchOptions& options) {
  if (file_size < 0) throw std::invalid_argument("feasibility: file size must be >= 0");
  const CapacityResult cap = capacity(spec, options);
  FeasibilityResult result;
  result.capacity = cap.capacity;
  result.feasible = file_size <= cap.capacity;
  if (!result.feasible) result.bottleneck = cap.argmin_sequence;
  return result;
}

}  // namespace dsscap
