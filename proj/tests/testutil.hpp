#pragma once

#include "dsscap/capacity.hpp"
#include "dsscap/model.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string fixture_path(const std::string& name) {
  return std::string(DSSCAP_FIXTURES_DIR) + "/" + name;
}

inline dsscap::DssSpec load_fixture(const std::string& name) {
  return dsscap::parse_spec(read_file(fixture_path(name)));
}

/// Random valid spec: every node gets a random degree and a few random
/// distinct surviving sets, storage and download unit drawn from small exact
/// rationals.
inline dsscap::DssSpec random_spec(std::mt19937& rng, int max_n = 5, int max_k = 3) {
  using dsscap::Rational;
  const int n = std::uniform_int_distribution<int>(2, max_n)(rng);
  const int k = std::uniform_int_distribution<int>(1, std::min(max_k, n - 1))(rng);
  const std::vector<Rational> alpha_pool = {Rational(0),    Rational(1),    Rational(2),
                                            Rational(3),    Rational(1, 2), Rational(3, 2),
                                            Rational(5, 3), Rational(7, 4)};
  const std::vector<Rational> beta_pool = {Rational(1, 3), Rational(1, 2), Rational(1),
                                           Rational(3, 2), Rational(2)};

  dsscap::DssSpec spec;
  spec.n = n;
  spec.k = k;
  spec.beta = beta_pool[rng() % beta_pool.size()];
  for (int id = 1; id <= n; ++id) {
    dsscap::NodeSpec node;
    node.id = id;
    node.alpha = alpha_pool[rng() % alpha_pool.size()];
    const int d = std::uniform_int_distribution<int>(1, n - 1)(rng);

    std::vector<int> others;
    for (int j = 1; j <= n; ++j)
      if (j != id) others.push_back(j);
    std::vector<std::vector<int>> combos;
    std::vector<int> idx(d);
    for (int j = 0; j < d; ++j) idx[j] = j;
    while (true) {
      std::vector<int> set(d);
      for (int j = 0; j < d; ++j) set[j] = others[idx[j]];
      combos.push_back(std::move(set));
      int j = d - 1;
      while (j >= 0 && idx[j] == static_cast<int>(others.size()) - d + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (int l = j + 1; l < d; ++l) idx[l] = idx[l - 1] + 1;
    }
    std::shuffle(combos.begin(), combos.end(), rng);
    const int sigma = std::uniform_int_distribution<int>(
        1, std::min<int>(3, static_cast<int>(combos.size())))(rng);
    node.surviving_sets.assign(combos.begin(), combos.begin() + sigma);
    spec.nodes.push_back(std::move(node));
  }
  return spec;
}

struct BruteMin {
  dsscap::Rational value;
  dsscap::SurvivingSequence argmin;
  std::uint64_t count = 0;
};

/// Reference minimizer: full enumeration in canonical order with per-sequence
/// evaluation; strict improvement keeps the first minimizer.
inline BruteMin brute_force_capacity(const dsscap::DssSpec& spec) {
  BruteMin best;
  bool found = false;
  for (dsscap::SequenceStream stream(spec); !stream.done(); stream.advance()) {
    const dsscap::Rational value = dsscap::sequence_value(spec, stream.current()).value;
    ++best.count;
    if (!found || value < best.value) {
      best.value = value;
      best.argmin = stream.current();
      found = true;
    }
  }
  return best;
}

struct BruteStar {
  long long size_sum = 0;
  dsscap::SurvivingSequence argmin;
};

inline BruteStar brute_force_star(const dsscap::DssSpec& spec) {
  BruteStar best;
  bool found = false;
  for (dsscap::SequenceStream stream(spec); !stream.done(); stream.advance()) {
    std::vector<char> prior(spec.n + 1, 0);
    long long sum = 0;
    for (const dsscap::SequenceEntry& entry : stream.current().entries) {
      const dsscap::NodeSpec& node = spec.node(entry.node_id);
      for (int helper : node.surviving_sets[entry.set_index]) sum += prior[helper] ? 0 : 1;
      prior[entry.node_id] = 1;
    }
    if (!found || sum < best.size_sum) {
      best.size_sum = sum;
      best.argmin = stream.current();
      found = true;
    }
  }
  return best;
}

}  // namespace testutil
