#pragma once

#include "dsscap/capacity.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace dsscap {

/// The sequence minimizing the download-unit-independent sum of fresh-helper
/// counts. Its term sizes drive the extremal operating points: the smallest
/// term bounds beta at minimal storage, the sum sets beta at minimal
/// bandwidth.
struct StarSequence {
  SurvivingSequence sequence;  // first minimizer in canonical order
  std::vector<int> term_sizes;
  long long size_sum = 0;
  int size_min = 0;
};
StarSequence star_sequence(const DssSpec& spec, const SearchOptions& options = {});

/// Minimum-storage operating point: the largest download unit compatible
/// with storing file_size at minimal total storage, and the inverse-degree
/// storage allocation that realizes the total.
struct MsrPoint {
  Rational file_size;
  Rational beta_max;  // (file_size / k) / size_min
  std::vector<Rational> alpha;
  std::string allocation_rule;  // "inverse-degree": alpha_i = c / d_i
};
MsrPoint msr_point(const DssSpec& spec, const Rational& file_size,
                   const SearchOptions& options = {});

/// Minimum-bandwidth operating point: beta = file_size / size_sum with
/// storage alpha_i = d_i * beta, at which the capacity equals file_size
/// exactly.
struct MbrPoint {
  Rational file_size;
  Rational beta;
  std::vector<Rational> alpha;
};
MbrPoint mbr_point(const DssSpec& spec, const Rational& file_size,
                   const SearchOptions& options = {});

/// Per-node check that storage does not exceed repair bandwidth
/// (alpha_i <= d_i * beta); storing more than a repair can deliver is
/// wasted.
struct RepairFeasibility {
  struct NodeCheck {
    int id = 0;
    Rational alpha;
    Rational bandwidth;  // d_i * beta
    bool ok = false;
  };
  bool ok = true;
  std::vector<NodeCheck> nodes;
};
RepairFeasibility repair_feasible(const DssSpec& spec);

/// Necessary reconstruction bounds per k-subset A of nodes:
/// k * size_min * beta <= sum of alpha over A <= beta * sum of degrees
/// over A. All subsets are checked when C(n,k) <= max_subsets; otherwise a
/// deterministic fixed-seed sample of max_subsets distinct subsets.
struct ReconstructionBound {
  std::vector<int> subset;
  Rational lower;
  Rational storage_sum;
  Rational bandwidth_sum;
  bool holds = false;
};
struct ReconstructionReport {
  bool all_hold = true;
  bool sampled = false;
  std::vector<ReconstructionBound> bounds;
};
ReconstructionReport reconstruction_bounds(const DssSpec& spec,
                                           std::size_t max_subsets = 5000,
                                           const SearchOptions& options = {});

/// One point of the storage-bandwidth tradeoff: at download unit beta, the
/// minimal uniform scale s such that storage s * profile_i reaches capacity
/// file_size. Means are per-node averages so curves of different systems
/// share axes.
struct TradeoffPoint {
  Rational beta;
  Rational gamma_mean;  // beta * sum(d_i) / n
  Rational alpha_mean;  // scale * sum(profile_i) / n, when feasible
  Rational scale;
  bool feasible = false;
};

/// Heterogeneous curve for a degree/storage profile (node i has repair
/// degree profile[i-1], all degree-sized helper sets, and storage
/// proportional to profile[i-1]). The minimal scale per beta is solved
/// exactly: capacity is piecewise linear and nondecreasing in the scale, so
/// the answer is the max over node tuples of a per-tuple closed form; each
/// returned scale is re-verified against the capacity engine.
std::vector<TradeoffPoint> tradeoff_curve(const std::vector<int>& profile, int k,
                                          const Rational& file_size,
                                          const std::vector<Rational>& betas,
                                          const SearchOptions& options = {});

/// Uniform-system comparator computed from the closed-form capacity, so the
/// two curves can be plotted side by side.
std::vector<TradeoffPoint> homogeneous_curve(int n, int k, int d, const Rational& file_size,
                                             const std::vector<Rational>& betas);

/// CSV with every rational as p/q next to a 12-significant-digit decimal:
/// beta,beta_dec,gamma_mean,gamma_mean_dec,alpha_mean,alpha_mean_dec,feasible,scale,scale_dec
/// Infeasible rows leave the storage and scale cells empty.
std::string curve_to_csv(const std::vector<TradeoffPoint>& curve);

}  // namespace dsscap
