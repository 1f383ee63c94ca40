#pragma once

#include "dsscap/model.hpp"

#include <cstdint>
#include <optional>

namespace dsscap {

struct SearchOptions {
  int threads = 1;    // worker count; results are bit-identical for any value
  bool prune = true;  // abandon partial sequences that cannot beat the best
};

/// Per-position cut terms of one surviving sequence: the storage bound and
/// the repair-download bound, of which the smaller one counts.
struct CutTerms {
  struct Term {
    Rational storage;    // alpha of the node at this position
    Rational bandwidth;  // |set minus prior nodes| * beta
  };
  std::vector<Term> terms;
  Rational value;  // sum over positions of min(storage, bandwidth)
};

struct CapacityResult {
  Rational capacity;
  SurvivingSequence argmin_sequence;  // first minimizer in canonical order
  CutTerms argmin_terms;
  std::uint64_t sequences_examined = 0;  // complete sequences covered by the search
};

/// Evaluates one sequence's cut value exactly.
CutTerms sequence_value(const DssSpec& spec, const SurvivingSequence& seq);

/// Exact capacity: the minimum cut value over every surviving sequence.
/// The per-position set choice only depends on the nodes placed earlier, so
/// the search ranges over ordered node tuples and picks each position's best
/// set directly; this is exact for arbitrary set families. With pruning off
/// sequences_examined equals count_sequences.
CapacityResult capacity(const DssSpec& spec, const SearchOptions& options = {});

/// Closed form for the homogeneous system (uniform alpha, degree d, repair
/// bandwidth gamma split evenly over d helpers):
/// sum_{i=1}^{k} min(alpha, (d-i+1) * gamma / d).
/// Requires 1 <= k <= n, k-1 <= d <= n-1, alpha >= 0, gamma >= 0.
Rational homogeneous_capacity(int n, int k, int d, const Rational& alpha,
                              const Rational& gamma);

struct FeasibilityResult {
  bool feasible = false;
  Rational capacity;
  /// Wanted file size is unreachable: the sequence whose cut falls short.
  std::optional<SurvivingSequence> bottleneck;
};

/// Can a file of the given size be stored? True iff file_size <= capacity.
FeasibilityResult feasibility(const DssSpec& spec, const Rational& file_size,
                              const SearchOptions& options = {});

}  // namespace dsscap
