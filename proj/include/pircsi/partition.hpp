#pragma once

#include <cstdint>
#include <vector>

#include "pircsi/field.hpp"
#include "pircsi/instance.hpp"
#include "pircsi/rational.hpp"
#include "pircsi/rng.hpp"

namespace pircsi {

/// How many duplicate indices to draw from the demand pool (w), the
/// side-information pool (s) and the fresh pool (t). The modified scheme for
/// Model II only uses (w, t) and keeps s at zero.
struct SelectionProfile {
  int w = 0;
  int s = 0;
  int t = 0;

  friend bool operator==(const SelectionProfile& a, const SelectionProfile& b) {
    return a.w == b.w && a.s == b.s && a.t == b.t;
  }
};

/// Exact probabilities over selection profiles, solved so that the posterior
/// over the demand index given the revealed groups is uniform. Entries are
/// kept in ascending (w, s, t) order; sampling is exact over a common
/// denominator, never through floating point.
struct SelectionDistribution {
  enum class Kind { RpModelI, MrpDisjoint, MrpOverlap };

  Kind kind;
  int n_messages;  // K
  int side_size;   // M
  std::vector<std::pair<SelectionProfile, Rational>> entries;

  const SelectionProfile& sample(ChoiceSource& src) const;
  Rational prob_of(const SelectionProfile& p) const;  // 0 if absent
  Rational total() const;
};

/// Number of ways to split a pool of `doubled` twice-occurring indices plus
/// singletons into `n_groups` labeled groups of `group_size` distinct
/// entries (copies of a doubled index must land in two distinct groups).
BigInt count_group_splits(int n_groups, int group_size, int doubled, int singles);

/// Randomized Partitioning selection probabilities for Model I. Solves the
/// posterior-uniformity linear system in exact rationals; reproduces the
/// reference table at (K, M) = (9, 3).
SelectionDistribution solve_rp_distribution(int n_messages, int side_size);

/// Modified Randomized Partitioning probabilities for Model II,
/// 3 <= M <= K-1. Disjoint template while M-1 <= K-M, overlapping otherwise.
SelectionDistribution solve_mrp_distribution(int n_messages, int side_size);

/// Output of the partitioning step. `groups`/`coeffs` (in sent order) are
/// exactly what every server receives; everything else stays with the user.
/// The recovery identity is supers[target_pos] = target_coeff * X_W + Y.
struct PartitionPlan {
  std::vector<std::vector<int>> groups;
  std::vector<std::vector<std::uint32_t>> coeffs;

  int target_pos = 0;
  std::uint32_t target_coeff = 1;

  // Pre-shuffle sequences (label 0 is the demand group) plus the applied
  // permutations, so the shuffle round-trips in tests:
  //   groups[pos][k] == pre_groups[group_order[pos]][within_perms[group_order[pos]][k]]
  std::vector<std::vector<int>> pre_groups;
  std::vector<std::vector<std::uint32_t>> pre_coeffs;
  std::vector<std::vector<int>> within_perms;
  std::vector<int> group_order;

  int group_count() const { return static_cast<int>(groups.size()); }
};

/// Model I build: r groups of M+1 distinct indices covering [K], the demand
/// group {W} u S among them, duplicates drawn per `dist`, fresh nonzero
/// coefficients, per-group and group-order shuffles.
///
/// Random choices are consumed in this order (all via ChoiceSource):
/// profile, S-duplicates, fresh duplicates, duplicate pair placement,
/// leftover index placement (ascending, by free slot), target coefficient,
/// other coefficients (group label then slot, ascending), per-group
/// Fisher-Yates (label order), group-order Fisher-Yates.
PartitionPlan rp_build(int demand, const std::vector<int>& support,
                       const std::vector<std::uint32_t>& coeffs,
                       const SelectionDistribution& dist, PrimeOrder q,
                       ChoiceSource& src);

/// Model II build (3 <= M <= K-1, q >= 3), disjoint or overlapping template
/// per `dist`. Same choice ordering as rp_build with the template's steps:
/// profile, fresh/overlap picks, (overlap only: replacement coefficient),
/// second-group coefficients, shuffles.
PartitionPlan mrp_build(int demand, const std::vector<int>& support,
                        const std::vector<std::uint32_t>& coeffs,
                        const SelectionDistribution& dist, PrimeOrder q,
                        ChoiceSource& src);

}  // namespace pircsi
