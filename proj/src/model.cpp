#include "dsscap/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace dsscap {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int read_int(const json& j, const std::string& where) {
  if (!j.is_number_integer())
    throw ParseError("field '" + where + "' must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ParseError("field '" + where + "' is out of range");
  return static_cast<int>(v);
}

Rational read_rational(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError("field '" + where + "': " + std::string(e.what()));
    }
  }
  if (j.is_number_float())
    throw ParseError("field '" + where +
                     "' must be an integer or a \"p/q\" string; floating point is not exact");
  throw ParseError("field '" + where + "' must be an integer or a \"p/q\" string");
}

void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) throw ParseError("unknown field '" + it.key() + "' in " + where);
  }
}

void require_fields(const json& j, std::initializer_list<const char*> required,
                    const std::string& where) {
  for (const char* r : required)
    if (!j.contains(r)) throw ParseError("missing field '" + std::string(r) + "' in " + where);
}

ordered_json rational_to_json(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) == 1 &&
      num >= std::numeric_limits<std::int64_t>::min() &&
      num <= std::numeric_limits<std::int64_t>::max())
    return ordered_json(num.convert_to<std::int64_t>());
  return ordered_json(format_rational(r));
}

}  // namespace

const NodeSpec& DssSpec::node(int id) const {
  // Valid specs keep node i at index i-1; fall back to a scan otherwise.
  if (id >= 1 && id <= static_cast<int>(nodes.size()) && nodes[id - 1].id == id)
    return nodes[id - 1];
  for (const NodeSpec& n : nodes)
    if (n.id == id) return n;
  throw std::out_of_range("no node with id " + std::to_string(id));
}

bool sequence_less(const SurvivingSequence& a, const SurvivingSequence& b) {
  const std::size_t common = std::min(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < common; ++i)
    if (a.entries[i].node_id != b.entries[i].node_id)
      return a.entries[i].node_id < b.entries[i].node_id;
  if (a.entries.size() != b.entries.size()) return a.entries.size() < b.entries.size();
  for (std::size_t i = 0; i < common; ++i)
    if (a.entries[i].set_index != b.entries[i].set_index)
      return a.entries[i].set_index < b.entries[i].set_index;
  return false;
}

std::string format_sequence(const SurvivingSequence& seq) {
  std::string out = "[";
  for (std::size_t i = 0; i < seq.entries.size(); ++i) {
    if (i) out += ",";
    out += "(U" + std::to_string(seq.entries[i].node_id) + ",S" +
           std::to_string(seq.entries[i].set_index + 1) + ")";
  }
  return out + "]";
}

DssSpec parse_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann's message names the line and column of the syntax error.
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level must be an object");
  reject_unknown_fields(j, {"n", "k", "beta", "nodes"}, "the top-level object");
  require_fields(j, {"n", "k", "beta", "nodes"}, "the top-level object");

  DssSpec spec;
  spec.n = read_int(j["n"], "n");
  spec.k = read_int(j["k"], "k");
  spec.beta = read_rational(j["beta"], "beta");
  if (!j["nodes"].is_array()) throw ParseError("field 'nodes' must be an array");

  int index = 0;
  for (const json& nj : j["nodes"]) {
    const std::string where = "nodes[" + std::to_string(index) + "]";
    if (!nj.is_object()) throw ParseError(where + " must be an object");
    reject_unknown_fields(nj, {"id", "alpha", "surviving_sets"}, where);
    require_fields(nj, {"id", "alpha", "surviving_sets"}, where);

    NodeSpec node;
    node.id = read_int(nj["id"], where + ".id");
    node.alpha = read_rational(nj["alpha"], where + ".alpha");
    const json& sets = nj["surviving_sets"];
    if (!sets.is_array()) throw ParseError("field '" + where + ".surviving_sets' must be an array");
    int set_index = 0;
    for (const json& sj : sets) {
      const std::string swhere =
          where + ".surviving_sets[" + std::to_string(set_index) + "]";
      if (!sj.is_array()) throw ParseError(swhere + " must be an array of node ids");
      std::vector<int> set;
      int member = 0;
      for (const json& mj : sj) {
        set.push_back(read_int(mj, swhere + "[" + std::to_string(member) + "]"));
        ++member;
      }
      std::sort(set.begin(), set.end());
      node.surviving_sets.push_back(std::move(set));
      ++set_index;
    }
    spec.nodes.push_back(std::move(node));
    ++index;
  }
  return spec;
}

std::string emit_spec(const DssSpec& spec) {
  ordered_json j;
  j["n"] = spec.n;
  j["k"] = spec.k;
  j["beta"] = rational_to_json(spec.beta);
  ordered_json nodes = ordered_json::array();
  for (const NodeSpec& node : spec.nodes) {
    ordered_json nj;
    nj["id"] = node.id;
    nj["alpha"] = rational_to_json(node.alpha);
    ordered_json sets = ordered_json::array();
    for (const auto& set : node.surviving_sets) {
      auto sorted = set;
      std::sort(sorted.begin(), sorted.end());
      sets.push_back(sorted);
    }
    nj["surviving_sets"] = std::move(sets);
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  return j.dump(2) + "\n";
}

ValidationReport validate_spec(const DssSpec& spec) {
  ValidationReport report;
  auto flag = [&](const char* rule, std::string detail) {
    report.violations.push_back({rule, std::move(detail)});
  };

  if (spec.n < 2)
    flag("n-range", "a system needs at least 2 nodes (n = " + std::to_string(spec.n) + ")");
  if (spec.k < 1)
    flag("k-range", "reconstruction degree must be >= 1 (k = " + std::to_string(spec.k) + ")");
  else if (spec.k >= spec.n)
    flag("k-range", "reconstruction degree must be < n (k = " + std::to_string(spec.k) +
                        ", n = " + std::to_string(spec.n) + ")");
  if (spec.beta <= 0)
    flag("beta-positive", "download unit beta must be > 0 (beta = " +
                              format_rational(spec.beta) + ")");

  std::vector<int> ids;
  ids.reserve(spec.nodes.size());
  for (const NodeSpec& node : spec.nodes) ids.push_back(node.id);
  std::sort(ids.begin(), ids.end());
  bool ids_exact = static_cast<int>(ids.size()) == spec.n;
  for (int i = 0; ids_exact && i < spec.n; ++i) ids_exact = ids[i] == i + 1;
  if (!ids_exact)
    flag("node-ids", "node ids must be exactly {1..n} with no duplicates (n = " +
                         std::to_string(spec.n) + ", " + std::to_string(spec.nodes.size()) +
                         " nodes listed)");

  for (const NodeSpec& node : spec.nodes) {
    const std::string who = "node " + std::to_string(node.id);
    if (node.alpha < 0)
      flag("alpha-nonnegative",
           who + ": storage must be >= 0 (alpha = " + format_rational(node.alpha) + ")");
    if (node.surviving_sets.empty()) {
      flag("surviving-sets-empty", who + ": at least one surviving set is required");
      continue;
    }
    const int degree = node.repair_degree();
    if (degree < 1 || degree > spec.n - 1)
      flag("degree-range", who + ": repair degree must lie in [1, n-1] (d = " +
                               std::to_string(degree) + ", n = " + std::to_string(spec.n) + ")");
    for (std::size_t s = 0; s < node.surviving_sets.size(); ++s) {
      const auto& set = node.surviving_sets[s];
      const std::string swhere = who + ", surviving set " + std::to_string(s + 1);
      if (static_cast<int>(set.size()) != degree)
        flag("inconsistent-repair-degree",
             swhere + ": all surviving sets of a node must have equal cardinality (" +
                 std::to_string(set.size()) + " vs repair degree " + std::to_string(degree) + ")");
      auto sorted = set;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t m = 0; m + 1 < sorted.size(); ++m)
        if (sorted[m] == sorted[m + 1])
          flag("duplicate-helper",
               swhere + ": helper " + std::to_string(sorted[m]) + " listed more than once");
      for (int helper : set) {
        if (helper == node.id)
          flag("self-in-surviving-set", swhere + ": a node cannot help repair itself");
        else if (helper < 1 || helper > spec.n)
          flag("unknown-helper",
               swhere + ": helper id " + std::to_string(helper) + " is not a node");
      }
    }
  }

  report.ok = report.violations.empty();
  return report;
}

void require_valid(const DssSpec& spec) {
  const ValidationReport report = validate_spec(spec);
  if (report.ok) return;
  for (const Violation& v : report.violations) {
    if (v.rule == "beta-positive" && spec.beta == 0) continue;
    throw std::invalid_argument("invalid spec: " + v.rule + ": " + v.detail);
  }
}

SequenceStream::SequenceStream(const DssSpec& spec) : spec_(&spec) {
  require_valid(spec);
  used_.assign(spec.n + 1, 0);
  current_.entries.resize(spec.k);
  for (int j = 0; j < spec.k; ++j) {
    current_.entries[j] = {j + 1, 0};
    used_[j + 1] = 1;
  }
}

int SequenceStream::set_count(int node_id) const {
  return static_cast<int>(spec_->node(node_id).surviving_sets.size());
}

void SequenceStream::advance() {
  if (done_) return;
  auto& entries = current_.entries;
  const int k = static_cast<int>(entries.size());
  // Set indices form an odometer that turns over before the node tuple moves.
  for (int j = k - 1; j >= 0; --j) {
    if (entries[j].set_index + 1 < set_count(entries[j].node_id)) {
      ++entries[j].set_index;
      for (int l = j + 1; l < k; ++l) entries[l].set_index = 0;
      return;
    }
  }
  if (!advance_node_tuple()) done_ = true;
}

bool SequenceStream::advance_node_tuple() {
  auto& entries = current_.entries;
  const int k = static_cast<int>(entries.size());
  const int n = spec_->n;
  for (int pos = k - 1; pos >= 0; --pos) {
    used_[entries[pos].node_id] = 0;
    for (int id = entries[pos].node_id + 1; id <= n; ++id) {
      if (used_[id]) continue;
      used_[id] = 1;
      entries[pos].node_id = id;
      // Fill the tail with the smallest unused ids, ascending.
      int fill = 1;
      for (int p = pos + 1; p < k; ++p) {
        while (used_[fill]) ++fill;
        used_[fill] = 1;
        entries[p].node_id = fill;
      }
      for (auto& e : entries) e.set_index = 0;
      return true;
    }
  }
  return false;
}

std::vector<SurvivingSequence> enumerate_sequences(const DssSpec& spec) {
  std::vector<SurvivingSequence> out;
  for (SequenceStream stream(spec); !stream.done(); stream.advance())
    out.push_back(stream.current());
  return out;
}

BigInt count_sequences(const DssSpec& spec) {
  require_valid(spec);
  // Elementary symmetric polynomial of degree k in the per-node set counts,
  // times k! for the orderings.
  std::vector<BigInt> esp(spec.k + 1);
  esp[0] = 1;
  for (const NodeSpec& node : spec.nodes) {
    const long long sigma = static_cast<long long>(node.surviving_sets.size());
    for (int j = spec.k; j >= 1; --j) esp[j] += esp[j - 1] * sigma;
  }
  BigInt factorial = 1;
  for (int j = 2; j <= spec.k; ++j) factorial *= j;
  return factorial * esp[spec.k];
}

DssSpec with_parameters(const DssSpec& spec, const std::vector<Rational>& alphas,
                        const Rational& beta) {
  if (alphas.size() != spec.nodes.size())
    throw std::invalid_argument("with_parameters: expected " +
                                std::to_string(spec.nodes.size()) + " storage values, got " +
                                std::to_string(alphas.size()));
  DssSpec out = spec;
  out.beta = beta;
  for (std::size_t i = 0; i < alphas.size(); ++i) out.nodes[i].alpha = alphas[i];
  return out;
}

DssSpec all_subsets_spec(const std::vector<int>& degrees, int k,
                         const std::vector<Rational>& alphas, const Rational& beta) {
  const int n = static_cast<int>(degrees.size());
  if (n < 2) throw std::invalid_argument("all_subsets_spec: need at least 2 nodes");
  if (alphas.size() != degrees.size())
    throw std::invalid_argument("all_subsets_spec: one storage value per node required");
  DssSpec spec;
  spec.n = n;
  spec.k = k;
  spec.beta = beta;
  for (int id = 1; id <= n; ++id) {
    const int d = degrees[id - 1];
    if (d < 1 || d > n - 1)
      throw std::invalid_argument("all_subsets_spec: degree of node " + std::to_string(id) +
                                  " must lie in [1, n-1]");
    NodeSpec node;
    node.id = id;
    node.alpha = alphas[id - 1];

    std::vector<int> others;
    for (int j = 1; j <= n; ++j)
      if (j != id) others.push_back(j);

    // All d-subsets of the other nodes, in lexicographic order.
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<int> set(d);
      for (int j = 0; j < d; ++j) set[j] = others[idx[j]];
      node.surviving_sets.push_back(std::move(set));
      int j = d - 1;
      while (j >= 0 && idx[j] == static_cast<int>(others.size()) - d + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (int l = j + 1; l < d; ++l) idx[l] = idx[l - 1] + 1;
    }
    spec.nodes.push_back(std::move(node));
  }
  return spec;
}

}  // namespace dsscap
