#include "dsscap/tradeoff.hpp"

#include "dsscap/detail/tuple_search.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace dsscap {

namespace {

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

BigInt random_below(const BigInt& bound, std::mt19937_64& rng) {
  if (bound <= 1) return 0;
  const unsigned bits = boost::multiprecision::msb(BigInt(bound - 1)) + 1;
  const BigInt mask = (BigInt(1) << bits) - 1;
  while (true) {
    BigInt value = 0;
    for (unsigned got = 0; got < bits; got += 64) value = (value << 64) | rng();
    value &= mask;
    if (value < bound) return value;
  }
}

// k-subset of {1..n} with the given lexicographic rank.
std::vector<int> unrank_subset(BigInt rank, int n, int k) {
  std::vector<int> subset;
  subset.reserve(k);
  int next = 1;
  for (int need = k; need > 0; --need) {
    while (true) {
      const BigInt with_next = binomial(n - next, need - 1);
      if (rank < with_next) {
        subset.push_back(next);
        ++next;
        break;
      }
      rank -= with_next;
      ++next;
    }
  }
  return subset;
}

/// Minimal s >= 0 with sum_j min(s * p_j, e_j) >= target, for p_j > 0 and
/// e_j >= 0; nullopt when even the plateau sum(e_j) falls short. The sum is
/// piecewise linear and nondecreasing in s with breakpoints at e_j / p_j, so
/// walking the pieces in breakpoint order finds the exact crossing.
std::optional<Rational> solve_min_scale(const std::vector<Rational>& p,
                                        const std::vector<Rational>& e,
                                        const Rational& target) {
  const std::size_t count = p.size();
  Rational plateau = 0;
  for (const Rational& ej : e) plateau += ej;
  if (plateau < target) return std::nullopt;
  if (target <= 0) return Rational(0);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return e[a] * p[b] < e[b] * p[a];  // e_a/p_a < e_b/p_b without division
  });

  Rational crossed_e = 0;
  Rational open_p = 0;
  for (const Rational& pj : p) open_p += pj;
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t j = order[t];
    const Rational breakpoint = e[j] / p[j];
    // On this piece the sum is crossed_e + s * open_p; its value at the
    // piece's right end decides whether the crossing lies here.
    if (crossed_e + breakpoint * open_p >= target)
      return (target - crossed_e) / open_p;
    crossed_e += e[j];
    open_p -= p[j];
  }
  // plateau >= target guarantees one of the pieces crossed.
  throw std::logic_error("solve_min_scale: no piece crossed the target");
}

int node_degree(const DssSpec& spec, int id) { return spec.node(id).repair_degree(); }

}  // namespace

StarSequence star_sequence(const DssSpec& spec, const SearchOptions& options) {
  require_valid(spec);
  auto eval = [](const NodeSpec& node, const std::vector<char>& prior,
                 int) -> detail::PositionTerm<long long> {
    int first_index = 0;
    const int m = detail::min_multiplicity(node, prior, &first_index);
    return {static_cast<long long>(m), first_index};
  };
  const auto outcome = detail::minimize_over_tuples<long long>(spec, options, eval);

  StarSequence star;
  star.sequence.entries = outcome.argmin;
  std::vector<char> prior(spec.n + 1, 0);
  for (const SequenceEntry& entry : star.sequence.entries) {
    const NodeSpec& node = spec.node(entry.node_id);
    int fresh = 0;
    for (int helper : node.surviving_sets[entry.set_index]) fresh += prior[helper] ? 0 : 1;
    star.term_sizes.push_back(fresh);
    prior[entry.node_id] = 1;
  }
  star.size_sum = std::accumulate(star.term_sizes.begin(), star.term_sizes.end(), 0LL);
  star.size_min = *std::min_element(star.term_sizes.begin(), star.term_sizes.end());
  if (star.size_sum != outcome.best)
    throw std::logic_error("star_sequence: argmin re-evaluation mismatch");
  return star;
}

MsrPoint msr_point(const DssSpec& spec, const Rational& file_size,
                   const SearchOptions& options) {
  require_valid(spec);
  if (file_size <= 0) throw std::invalid_argument("msr_point: file size must be > 0");
  const StarSequence star = star_sequence(spec, options);
  if (star.size_min == 0)
    throw std::domain_error(
        "msr_point: a download term of size zero leaves beta unconstrained");

  MsrPoint point;
  point.file_size = file_size;
  point.beta_max = (file_size / spec.k) / star.size_min;
  point.allocation_rule = "inverse-degree";

  // alpha_i = c / d_i with c pinned so the k largest shares sum to the file
  // size, i.e. the k cheapest-to-repair nodes alone hold a full file.
  std::vector<Rational> shares;
  shares.reserve(spec.nodes.size());
  for (const NodeSpec& node : spec.nodes) shares.emplace_back(1, node.repair_degree());
  std::sort(shares.begin(), shares.end(), std::greater<>());
  Rational top_k = 0;
  for (int i = 0; i < spec.k; ++i) top_k += shares[i];
  const Rational c = file_size / top_k;
  for (const NodeSpec& node : spec.nodes) point.alpha.push_back(c / node.repair_degree());
  return point;
}

MbrPoint mbr_point(const DssSpec& spec, const Rational& file_size,
                   const SearchOptions& options) {
  require_valid(spec);
  if (file_size <= 0) throw std::invalid_argument("mbr_point: file size must be > 0");
  const StarSequence star = star_sequence(spec, options);
  if (star.size_sum == 0)
    throw std::domain_error("mbr_point: capacity is zero for every beta");

  MbrPoint point;
  point.file_size = file_size;
  point.beta = file_size / star.size_sum;
  for (const NodeSpec& node : spec.nodes)
    point.alpha.push_back(Rational(node.repair_degree()) * point.beta);
  return point;
}

RepairFeasibility repair_feasible(const DssSpec& spec) {
  require_valid(spec);
  RepairFeasibility result;
  for (const NodeSpec& node : spec.nodes) {
    RepairFeasibility::NodeCheck check;
    check.id = node.id;
    check.alpha = node.alpha;
    check.bandwidth = Rational(node.repair_degree()) * spec.beta;
    check.ok = check.alpha <= check.bandwidth;
    result.ok = result.ok && check.ok;
    result.nodes.push_back(std::move(check));
  }
  return result;
}

ReconstructionReport reconstruction_bounds(const DssSpec& spec, std::size_t max_subsets,
                                           const SearchOptions& options) {
  require_valid(spec);
  if (max_subsets == 0)
    throw std::invalid_argument("reconstruction_bounds: max_subsets must be > 0");
  const StarSequence star = star_sequence(spec, options);
  const Rational lower = Rational(spec.k) * star.size_min * spec.beta;

  ReconstructionReport report;
  const BigInt total = binomial(spec.n, spec.k);
  report.sampled = total > max_subsets;

  std::vector<std::vector<int>> subsets;
  if (!report.sampled) {
    std::vector<int> idx(spec.k);
    std::iota(idx.begin(), idx.end(), 1);
    while (true) {
      subsets.push_back(idx);
      int j = spec.k - 1;
      while (j >= 0 && idx[j] == spec.n - spec.k + j + 1) --j;
      if (j < 0) break;
      ++idx[j];
      for (int l = j + 1; l < spec.k; ++l) idx[l] = idx[l - 1] + 1;
    }
  } else {
    // Fixed seed keeps the sampled family reproducible across runs and
    // platforms (mt19937_64 is pinned by the standard).
    std::mt19937_64 rng(0x5eedULL);
    std::set<BigInt> ranks;
    while (ranks.size() < max_subsets) ranks.insert(random_below(total, rng));
    for (const BigInt& rank : ranks) subsets.push_back(unrank_subset(rank, spec.n, spec.k));
  }

  for (std::vector<int>& subset : subsets) {
    ReconstructionBound bound;
    bound.lower = lower;
    bound.storage_sum = 0;
    bound.bandwidth_sum = 0;
    for (int id : subset) {
      bound.storage_sum += spec.node(id).alpha;
      bound.bandwidth_sum += Rational(node_degree(spec, id)) * spec.beta;
    }
    bound.holds = lower <= bound.storage_sum && bound.storage_sum <= bound.bandwidth_sum;
    bound.subset = std::move(subset);
    report.all_hold = report.all_hold && bound.holds;
    report.bounds.push_back(std::move(bound));
  }
  return report;
}

std::vector<TradeoffPoint> tradeoff_curve(const std::vector<int>& profile, int k,
                                          const Rational& file_size,
                                          const std::vector<Rational>& betas,
                                          const SearchOptions& options) {
  const int n = static_cast<int>(profile.size());
  if (n < 2) throw std::invalid_argument("tradeoff_curve: need at least 2 nodes");
  for (int d : profile)
    if (d < 1 || d > n - 1)
      throw std::invalid_argument("tradeoff_curve: profile entries must lie in [1, n-1]");
  if (k < 1 || k >= n) throw std::invalid_argument("tradeoff_curve: need 1 <= k < n");
  if (file_size <= 0) throw std::invalid_argument("tradeoff_curve: file size must be > 0");
  if (betas.empty()) throw std::invalid_argument("tradeoff_curve: beta grid must not be empty");
  for (const Rational& beta : betas)
    if (beta < 0) throw std::invalid_argument("tradeoff_curve: beta must be >= 0");

  // Storage proportional to degree; the per-beta solve rescales it.
  std::vector<Rational> unit_alphas(profile.begin(), profile.end());
  const DssSpec base = all_subsets_spec(profile, k, unit_alphas, Rational(1));
  const long long degree_sum = std::accumulate(profile.begin(), profile.end(), 0LL);

  std::vector<TradeoffPoint> points(betas.size());
  auto solve_point = [&](std::size_t index) {
    const Rational& beta = betas[index];
    TradeoffPoint point;
    point.beta = beta;
    point.gamma_mean = beta * degree_sum / n;
    if (beta > 0) {
      bool feasible = true;
      bool any = false;
      Rational max_scale = 0;
      detail::visit_tuples_with_multiplicities(
          base, [&](const std::vector<SequenceEntry>& entries, const std::vector<int>& mults) {
            if (!feasible) return;
            std::vector<Rational> p, e;
            p.reserve(entries.size());
            e.reserve(entries.size());
            for (std::size_t j = 0; j < entries.size(); ++j) {
              p.emplace_back(profile[entries[j].node_id - 1]);
              e.push_back(Rational(mults[j]) * beta);
            }
            const auto scale = solve_min_scale(p, e, file_size);
            if (!scale) {
              feasible = false;
              return;
            }
            if (!any || *scale > max_scale) {
              max_scale = *scale;
              any = true;
            }
          });
      if (feasible) {
        point.feasible = true;
        point.scale = max_scale;
        point.alpha_mean = max_scale * degree_sum / n;
        std::vector<Rational> scaled;
        scaled.reserve(profile.size());
        for (int d : profile) scaled.push_back(max_scale * d);
        const SearchOptions inner{1, options.prune};
        if (capacity(with_parameters(base, scaled, beta), inner).capacity < file_size)
          throw std::logic_error("tradeoff_curve: scale verification failed");
      }
    }
    points[index] = std::move(point);
  };

  const int workers =
      std::max(1, std::min<int>(options.threads, static_cast<int>(betas.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < betas.size(); ++i) solve_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i; (i = next.fetch_add(1)) < betas.size();) solve_point(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return points;
}

std::vector<TradeoffPoint> homogeneous_curve(int n, int k, int d, const Rational& file_size,
                                             const std::vector<Rational>& betas) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("homogeneous_curve: need 1 <= k <= n");
  if (d < std::max(1, k - 1) || d > n - 1)
    throw std::invalid_argument("homogeneous_curve: need k-1 <= d <= n-1");
  if (file_size <= 0) throw std::invalid_argument("homogeneous_curve: file size must be > 0");
  if (betas.empty())
    throw std::invalid_argument("homogeneous_curve: beta grid must not be empty");

  std::vector<TradeoffPoint> points;
  points.reserve(betas.size());
  for (const Rational& beta : betas) {
    if (beta < 0) throw std::invalid_argument("homogeneous_curve: beta must be >= 0");
    TradeoffPoint point;
    point.beta = beta;
    point.gamma_mean = Rational(d) * beta;
    if (beta > 0) {
      std::vector<Rational> p(k, Rational(1));
      std::vector<Rational> e;
      e.reserve(k);
      for (int i = 1; i <= k; ++i) e.push_back(Rational(d - i + 1) * beta);
      const auto scale = solve_min_scale(p, e, file_size);
      if (scale) {
        point.feasible = true;
        // scale multiplies the degree profile, here uniformly d, so the
        // column stays comparable with heterogeneous curves.
        point.scale = *scale / d;
        point.alpha_mean = *scale;
        if (homogeneous_capacity(n, k, d, *scale, Rational(d) * beta) < file_size)
          throw std::logic_error("homogeneous_curve: scale verification failed");
      }
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::string curve_to_csv(const std::vector<TradeoffPoint>& curve) {
  std::string out =
      "beta,beta_dec,gamma_mean,gamma_mean_dec,alpha_mean,alpha_mean_dec,feasible,scale,"
      "scale_dec\n";
  for (const TradeoffPoint& point : curve) {
    out += format_rational(point.beta) + "," + format_decimal(point.beta) + ",";
    out += format_rational(point.gamma_mean) + "," + format_decimal(point.gamma_mean) + ",";
    if (point.feasible) {
      out += format_rational(point.alpha_mean) + "," + format_decimal(point.alpha_mean) +
             ",1," + format_rational(point.scale) + "," + format_decimal(point.scale);
    } else {
      out += ",,0,,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace dsscap
