#pragma once

#include "dsscap/rational.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dsscap {

/// Thrown for malformed spec files (bad JSON, wrong types, unknown fields).
/// Semantic problems with a well-formed file are reported by validate_spec
/// instead, as data.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One storage node: its storage capacity and the helper sets admissible for
/// rebuilding it after a failure. All sets of a node have the same
/// cardinality, the node's repair degree.
struct NodeSpec {
  int id = 0;  // 1-based
  Rational alpha;
  std::vector<std::vector<int>> surviving_sets;  // each sorted ascending

  int repair_degree() const {
    return surviving_sets.empty() ? 0 : static_cast<int>(surviving_sets.front().size());
  }
  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// A distributed storage system: n nodes, any k of which must suffice to
/// recover the stored file, and the per-helper download unit beta.
struct DssSpec {
  int n = 0;
  int k = 0;
  Rational beta;
  std::vector<NodeSpec> nodes;

  const NodeSpec& node(int id) const;  // throws std::out_of_range on unknown id
  friend bool operator==(const DssSpec&, const DssSpec&) = default;
};

struct SequenceEntry {
  int node_id = 0;
  int set_index = 0;  // 0-based into NodeSpec::surviving_sets
  friend bool operator==(const SequenceEntry&, const SequenceEntry&) = default;
};

/// An ordered choice of k distinct failed-and-repaired nodes, each paired
/// with one of its surviving sets. The capacity minimization ranges over all
/// of these.
struct SurvivingSequence {
  std::vector<SequenceEntry> entries;
  friend bool operator==(const SurvivingSequence&, const SurvivingSequence&) = default;
};

/// Canonical order: ascending lexicographic by the node-id tuple, ties broken
/// by the set-index tuple.
bool sequence_less(const SurvivingSequence& a, const SurvivingSequence& b);

/// Renders e.g. "[(U2,S1),(U1,S2)]" with 1-based set labels.
std::string format_sequence(const SurvivingSequence& seq);

struct Violation {
  std::string rule;    // stable identifier, e.g. "self-in-surviving-set"
  std::string detail;  // human-readable explanation
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Reads the JSON spec format. Rationals are taken exactly: JSON integers or
/// "p/q" strings; floating-point literals are rejected. Unknown fields are
/// rejected. Semantic violations do not throw; they are left for
/// validate_spec.
DssSpec parse_spec(std::string_view text);

/// Deterministic JSON rendering; rationals in lowest terms.
/// parse_spec(emit_spec(s)) == s.
std::string emit_spec(const DssSpec& spec);

ValidationReport validate_spec(const DssSpec& spec);

/// Precondition guard used by the analysis entry points: throws
/// std::invalid_argument unless the spec validates. beta == 0 is permitted
/// (degenerate but well defined: every bandwidth term is 0).
void require_valid(const DssSpec& spec);

/// Lazy enumeration of every surviving sequence, in canonical order: every
/// ordered k-tuple of distinct nodes crossed with every choice of one
/// surviving set per selected node, each exactly once.
class SequenceStream {
 public:
  /// The spec must outlive the stream.
  explicit SequenceStream(const DssSpec& spec);

  bool done() const { return done_; }
  const SurvivingSequence& current() const { return current_; }
  void advance();

 private:
  bool advance_node_tuple();
  int set_count(int node_id) const;

  const DssSpec* spec_;
  SurvivingSequence current_;
  std::vector<char> used_;
  bool done_ = false;
};

/// Materialized enumeration, for small systems and oracle checks.
std::vector<SurvivingSequence> enumerate_sequences(const DssSpec& spec);

/// Number of surviving sequences, in closed form (no enumeration):
/// k! * sum over k-subsets A of prod_{i in A} (number of surviving sets of
/// node i). Always equals the length of enumerate_sequences.
BigInt count_sequences(const DssSpec& spec);

/// Copy of the spec with replaced storage allocation and download unit.
DssSpec with_parameters(const DssSpec& spec, const std::vector<Rational>& alphas,
                        const Rational& beta);

/// Builds the system whose node i has repair degree degrees[i-1] and every
/// degree-sized subset of the other nodes as a surviving set. Test-fixture
/// and curve helper.
DssSpec all_subsets_spec(const std::vector<int>& degrees, int k,
                         const std::vector<Rational>& alphas, const Rational& beta);

}  // namespace dsscap
