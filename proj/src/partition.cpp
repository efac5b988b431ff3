#include "pircsi/partition.hpp"

#include <algorithm>
#include <stdexcept>

#include "pircsi/combinat.hpp"
#include "pircsi/linsys.hpp"

namespace pircsi {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

BigInt lcm_big(const BigInt& a, const BigInt& b) {
  return a / boost::multiprecision::gcd(a, b) * b;
}

std::vector<int> range_1_to(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  return v;
}

std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

const SelectionProfile& SelectionDistribution::sample(ChoiceSource& src) const {
  if (entries.empty()) throw std::runtime_error("SelectionDistribution: empty");
  if (entries.size() == 1) return entries.front().first;
  BigInt den = 1;
  for (const auto& [profile, p] : entries) den = lcm_big(den, p.den());
  BigInt x = src.uniform_below_big(den);
  for (const auto& [profile, p] : entries) {
    BigInt mass = p.num() * (den / p.den());
    if (x < mass) return profile;
    x -= mass;
  }
  return entries.back().first;  // unreachable when probabilities sum to 1
}

Rational SelectionDistribution::prob_of(const SelectionProfile& p) const {
  for (const auto& [profile, prob] : entries)
    if (profile == p) return prob;
  return Rational(0);
}

Rational SelectionDistribution::total() const {
  Rational t(0);
  for (const auto& [profile, prob] : entries) t += prob;
  return t;
}

BigInt count_group_splits(int n_groups, int group_size, int doubled, int singles) {
  if (doubled < 0 || singles < 0) return 0;
  if (2 * doubled + singles != n_groups * group_size) return 0;
  if (n_groups == 0) return doubled == 0 && singles == 0 ? 1 : 0;
  if (doubled > 0 && n_groups < 2) return 0;

  // Assign each doubled index a pair of distinct groups, then count the ways
  // to spread the singletons over the remaining capacity.
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n_groups; ++a)
    for (int b = a + 1; b < n_groups; ++b) pairs.emplace_back(a, b);

  BigInt total = 0;
  std::vector<int> load(static_cast<std::size_t>(n_groups), 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == doubled) {
      std::vector<int> caps;
      caps.reserve(static_cast<std::size_t>(n_groups));
      for (int g = 0; g < n_groups; ++g) caps.push_back(group_size - load[static_cast<std::size_t>(g)]);
      total += multinomial(caps);
      return;
    }
    for (const auto& [a, b] : pairs) {
      if (load[static_cast<std::size_t>(a)] >= group_size ||
          load[static_cast<std::size_t>(b)] >= group_size)
        continue;
      ++load[static_cast<std::size_t>(a)];
      ++load[static_cast<std::size_t>(b)];
      rec(i + 1);
      --load[static_cast<std::size_t>(a)];
      --load[static_cast<std::size_t>(b)];
    }
  };
  rec(0);
  return total;
}

SelectionDistribution solve_rp_distribution(int n_messages, int side_size) {
  const int K = n_messages, M = side_size;
  if (K < 2 || M < 0 || M > K - 1)
    throw std::invalid_argument("solve_rp_distribution: need K >= 2, 0 <= M <= K-1");
  const int r = ceil_div(K, M + 1);
  const int d = r * (M + 1) - K;
  const int fresh_pool = K - M - 1;
  const int non_target = r - 1;

  SelectionDistribution dist;
  dist.kind = SelectionDistribution::Kind::RpModelI;
  dist.n_messages = K;
  dist.side_size = M;

  struct Row {
    SelectionProfile profile;
    BigInt weight;  // C(M,s) * C(K-M-1,t) * splits(t)
  };
  std::vector<Row> rows;
  for (int w = 0; w <= std::min(1, d); ++w) {
    for (int s = 0; s <= std::min(M, d - w); ++s) {
      int t = d - w - s;
      if (t < 0 || t > fresh_pool) continue;
      BigInt splits =
          count_group_splits(non_target, M + 1, t, non_target * (M + 1) - 2 * t);
      if (splits == 0) continue;
      rows.push_back({SelectionProfile{w, s, t},
                      binomial(M, s) * binomial(fresh_pool, t) * splits});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.profile.w, a.profile.s, a.profile.t) <
           std::tie(b.profile.w, b.profile.s, b.profile.t);
  });
  if (rows.empty())
    throw LinearSystemError("solve_rp_distribution: no feasible selection profile for K=" +
                            std::to_string(K) + " M=" + std::to_string(M));

  // Posterior uniformity over the revealed groups reduces to: the mass a
  // candidate demand index collects must not depend on where it sits. A
  // non-duplicated candidate collects p/weight once; a duplicated candidate
  // collects p/weight from each of its two groups, hence the halving.
  const std::size_t n = rows.size();
  std::vector<LinearEquation> eqs;
  for (std::size_t i = 0; i < n; ++i) {
    LinearEquation e;
    e.coeffs.assign(n + 1, Rational(0));
    e.coeffs[i] = Rational(1);
    Rational lambda_coeff = Rational(rows[i].weight);
    if (rows[i].profile.w == 1) lambda_coeff = lambda_coeff / Rational(2);
    e.coeffs[n] = -lambda_coeff;
    e.rhs = Rational(0);
    eqs.push_back(std::move(e));
  }
  LinearEquation norm;
  norm.coeffs.assign(n + 1, Rational(1));
  norm.coeffs[n] = Rational(0);
  norm.rhs = Rational(1);
  eqs.push_back(std::move(norm));

  std::vector<Rational> sol =
      solve_unique(eqs, n + 1, "rp selection system K=" + std::to_string(K) +
                                   " M=" + std::to_string(M));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sol[i] > Rational(0)))
      throw LinearSystemError("solve_rp_distribution: non-positive probability " +
                              sol[i].str());
    dist.entries.emplace_back(rows[i].profile, sol[i]);
  }
  return dist;
}

SelectionDistribution solve_mrp_distribution(int n_messages, int side_size) {
  const int K = n_messages, M = side_size;
  if (M < 3 || M > K - 1)
    throw std::invalid_argument("solve_mrp_distribution: need 3 <= M <= K-1");

  SelectionDistribution dist;
  dist.n_messages = K;
  dist.side_size = M;

  const bool disjoint = (M - 1) <= (K - M);
  dist.kind = disjoint ? SelectionDistribution::Kind::MrpDisjoint
                       : SelectionDistribution::Kind::MrpOverlap;

  // Two profiles (w, t): either the second group repeats the demand index
  // (w = 1) or not. A candidate outside both groups has two target
  // hypotheses in the disjoint template; a candidate in the overlap has two
  // in the overlapping template. Equalizing masses gives one equation.
  SelectionProfile p0, p1;
  BigInt a0, a1;
  bool halve_p0;
  if (disjoint) {
    p0 = SelectionProfile{0, 0, M - 1};
    p1 = SelectionProfile{1, 0, M - 2};
    a0 = binomial(K - M, M - 1);
    a1 = binomial(K - M, M - 2);
    halve_p0 = true;  // outside candidates split their mass over two targets
  } else {
    const int overlap = 2 * M - K;
    if (overlap < 1)
      throw std::invalid_argument("solve_mrp_distribution: empty overlap");
    p0 = SelectionProfile{0, 0, overlap};
    p1 = SelectionProfile{1, 0, overlap - 1};
    a0 = binomial(M - 1, overlap);
    a1 = binomial(M - 1, overlap - 1);
    halve_p0 = false;  // here the duplicated (w=1) candidates split instead
  }
  if (a0 == 0 || a1 == 0)
    throw LinearSystemError("solve_mrp_distribution: infeasible pools for K=" +
                            std::to_string(K) + " M=" + std::to_string(M));

  std::vector<LinearEquation> eqs;
  {
    LinearEquation e;  // p0 = a0 * lambda (halved when p0's hypotheses double up)
    e.coeffs = {Rational(1), Rational(0),
                -(halve_p0 ? Rational(a0) / Rational(2) : Rational(a0))};
    e.rhs = Rational(0);
    eqs.push_back(std::move(e));
  }
  {
    LinearEquation e;
    e.coeffs = {Rational(0), Rational(1),
                -(halve_p0 ? Rational(a1) : Rational(a1) / Rational(2))};
    e.rhs = Rational(0);
    eqs.push_back(std::move(e));
  }
  {
    LinearEquation e;
    e.coeffs = {Rational(1), Rational(1), Rational(0)};
    e.rhs = Rational(1);
    eqs.push_back(std::move(e));
  }
  std::vector<Rational> sol =
      solve_unique(eqs, 3, "mrp selection system K=" + std::to_string(K) +
                               " M=" + std::to_string(M));
  dist.entries.emplace_back(p0, sol[0]);
  dist.entries.emplace_back(p1, sol[1]);
  return dist;
}

namespace {

// Deals `singles` (ascending) into groups with the given free capacities by
// repeatedly picking a uniformly random free slot; exactly uniform over all
// capacity-respecting assignments.
void deal_singles(const std::vector<int>& singles, std::vector<std::vector<int>>& groups,
                  std::vector<int>& caps, ChoiceSource& src) {
  for (int id : singles) {
    std::uint64_t total = 0;
    for (int c : caps) total += static_cast<std::uint64_t>(c);
    if (total == 0) throw std::runtime_error("partition: out of free slots");
    std::uint64_t x = src.uniform_below(total);
    for (std::size_t g = 0; g < caps.size(); ++g) {
      std::uint64_t c = static_cast<std::uint64_t>(caps[g]);
      if (x < c) {
        groups[g].push_back(id);
        --caps[g];
        break;
      }
      x -= c;
    }
  }
}

std::vector<std::uint32_t> draw_coeffs(std::size_t n, PrimeOrder q, ChoiceSource& src) {
  std::vector<std::uint32_t> out(n);
  for (auto& c : out) c = 1 + static_cast<std::uint32_t>(src.uniform_below(q.q - 1));
  return out;
}

// Applies the shuffles shared by both builds: an independent Fisher-Yates on
// every labeled group, then a Fisher-Yates over the group order.
void shuffle_and_seal(PartitionPlan& plan, ChoiceSource& src) {
  const int r = static_cast<int>(plan.pre_groups.size());
  plan.within_perms.resize(static_cast<std::size_t>(r));
  for (int label = 0; label < r; ++label) {
    std::vector<int> perm(plan.pre_groups[static_cast<std::size_t>(label)].size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
    fisher_yates(perm, src);
    plan.within_perms[static_cast<std::size_t>(label)] = std::move(perm);
  }
  plan.group_order.resize(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) plan.group_order[static_cast<std::size_t>(i)] = i;
  fisher_yates(plan.group_order, src);

  plan.groups.assign(static_cast<std::size_t>(r), {});
  plan.coeffs.assign(static_cast<std::size_t>(r), {});
  for (int pos = 0; pos < r; ++pos) {
    int label = plan.group_order[static_cast<std::size_t>(pos)];
    const auto& pre_g = plan.pre_groups[static_cast<std::size_t>(label)];
    const auto& pre_c = plan.pre_coeffs[static_cast<std::size_t>(label)];
    const auto& perm = plan.within_perms[static_cast<std::size_t>(label)];
    auto& g = plan.groups[static_cast<std::size_t>(pos)];
    auto& c = plan.coeffs[static_cast<std::size_t>(pos)];
    g.resize(pre_g.size());
    c.resize(pre_c.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
      g[k] = pre_g[static_cast<std::size_t>(perm[k])];
      c[k] = pre_c[static_cast<std::size_t>(perm[k])];
    }
    if (label == 0) plan.target_pos = pos;
  }
}

void check_wsc(int demand, const std::vector<int>& support,
               const std::vector<std::uint32_t>& coeffs, int K, std::uint32_t q) {
  if (demand < 1 || demand > K) throw std::invalid_argument("build: demand out of range");
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end())
    throw std::invalid_argument("build: support must be sorted and distinct");
  for (int id : support)
    if (id < 1 || id > K) throw std::invalid_argument("build: support index out of range");
  if (support.size() != coeffs.size())
    throw std::invalid_argument("build: support/coeff length mismatch");
  for (auto c : coeffs)
    if (c == 0 || c >= q) throw std::invalid_argument("build: coefficient not in F_q^x");
}

}  // namespace

PartitionPlan rp_build(int demand, const std::vector<int>& support,
                       const std::vector<std::uint32_t>& coeffs,
                       const SelectionDistribution& dist, PrimeOrder q,
                       ChoiceSource& src) {
  const int K = dist.n_messages;
  const int M = dist.side_size;
  if (dist.kind != SelectionDistribution::Kind::RpModelI)
    throw std::invalid_argument("rp_build: distribution is not a Model I distribution");
  check_wsc(demand, support, coeffs, K, q.q);
  if (static_cast<int>(support.size()) != M)
    throw std::invalid_argument("rp_build: support size does not match distribution");
  if (std::binary_search(support.begin(), support.end(), demand))
    throw std::invalid_argument("rp_build: demand must lie outside the support");

  const int r = ceil_div(K, M + 1);
  const int group_size = M + 1;

  const SelectionProfile& profile = dist.sample(src);

  std::vector<int> all = range_1_to(K);
  std::vector<int> demand_group = {demand};
  demand_group.insert(demand_group.end(), support.begin(), support.end());
  std::vector<int> demand_group_sorted = demand_group;
  std::sort(demand_group_sorted.begin(), demand_group_sorted.end());
  std::vector<int> fresh_pool = set_minus(all, demand_group_sorted);

  std::vector<int> dup_side = pick_distinct(support, static_cast<std::size_t>(profile.s), src);
  std::vector<int> dup_fresh = pick_distinct(fresh_pool, static_cast<std::size_t>(profile.t), src);

  // Group label 0 is the demand group; labels 1..r-1 receive the remainder.
  PartitionPlan plan;
  plan.pre_groups.assign(static_cast<std::size_t>(r), {});
  plan.pre_groups[0] = demand_group;

  const int non_target = r - 1;
  std::vector<std::vector<int>> others(static_cast<std::size_t>(non_target));
  std::vector<int> caps(static_cast<std::size_t>(non_target), group_size);

  if (!dup_fresh.empty()) {
    // Each fresh duplicate occupies one slot in two distinct groups; the pair
    // assignment is weighted by the number of completions so the overall
    // split stays uniform over all valid partitions.
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < non_target; ++a)
      for (int b = a + 1; b < non_target; ++b) pairs.emplace_back(a, b);
    if (pairs.empty()) throw std::runtime_error("rp_build: no room for duplicate pair");

    const int t = static_cast<int>(dup_fresh.size());
    std::vector<std::vector<int>> assignments;  // pair index per duplicate
    std::vector<BigInt> weights;
    std::vector<int> pick(static_cast<std::size_t>(t), 0);
    std::vector<int> load(static_cast<std::size_t>(non_target), 0);
    std::function<void(int)> rec = [&](int i) {
      if (i == t) {
        std::vector<int> rem;
        for (int g = 0; g < non_target; ++g)
          rem.push_back(group_size - load[static_cast<std::size_t>(g)]);
        BigInt wgt = multinomial(rem);
        if (wgt > 0) {
          assignments.push_back(pick);
          weights.push_back(wgt);
        }
        return;
      }
      for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        auto [a, b] = pairs[pi];
        if (load[static_cast<std::size_t>(a)] >= group_size ||
            load[static_cast<std::size_t>(b)] >= group_size)
          continue;
        pick[static_cast<std::size_t>(i)] = static_cast<int>(pi);
        ++load[static_cast<std::size_t>(a)];
        ++load[static_cast<std::size_t>(b)];
        rec(i + 1);
        --load[static_cast<std::size_t>(a)];
        --load[static_cast<std::size_t>(b)];
      }
    };
    rec(0);
    if (assignments.empty())
      throw std::runtime_error("rp_build: duplicate placement infeasible");
    const auto& chosen = assignments[pick_weighted(weights, src)];
    for (int i = 0; i < t; ++i) {
      auto [a, b] = pairs[static_cast<std::size_t>(chosen[static_cast<std::size_t>(i)])];
      others[static_cast<std::size_t>(a)].push_back(dup_fresh[static_cast<std::size_t>(i)]);
      others[static_cast<std::size_t>(b)].push_back(dup_fresh[static_cast<std::size_t>(i)]);
      --caps[static_cast<std::size_t>(a)];
      --caps[static_cast<std::size_t>(b)];
    }
  }

  // Everything left appears exactly once: the rest of [K] plus the
  // duplicates drawn from {W} u S.
  std::vector<int> singles = set_minus(fresh_pool, dup_fresh);
  if (profile.w == 1) singles.push_back(demand);
  singles.insert(singles.end(), dup_side.begin(), dup_side.end());
  std::sort(singles.begin(), singles.end());
  deal_singles(singles, others, caps, src);

  for (int g = 0; g < non_target; ++g) {
    auto& grp = others[static_cast<std::size_t>(g)];
    std::sort(grp.begin(), grp.end());
    if (static_cast<int>(grp.size()) != group_size)
      throw std::runtime_error("rp_build: group size mismatch");
    plan.pre_groups[static_cast<std::size_t>(g + 1)] = std::move(grp);
  }

  std::uint32_t c = 1 + static_cast<std::uint32_t>(src.uniform_below(q.q - 1));
  plan.pre_coeffs.assign(static_cast<std::size_t>(r), {});
  plan.pre_coeffs[0].push_back(c);
  plan.pre_coeffs[0].insert(plan.pre_coeffs[0].end(), coeffs.begin(), coeffs.end());
  for (int label = 1; label < r; ++label)
    plan.pre_coeffs[static_cast<std::size_t>(label)] =
        draw_coeffs(plan.pre_groups[static_cast<std::size_t>(label)].size(), q, src);

  plan.target_coeff = c;
  shuffle_and_seal(plan, src);
  return plan;
}

PartitionPlan mrp_build(int demand, const std::vector<int>& support,
                        const std::vector<std::uint32_t>& coeffs,
                        const SelectionDistribution& dist, PrimeOrder q,
                        ChoiceSource& src) {
  const int K = dist.n_messages;
  const int M = dist.side_size;
  if (dist.kind == SelectionDistribution::Kind::RpModelI)
    throw std::invalid_argument("mrp_build: distribution is not a Model II distribution");
  if (q.q < 3) throw std::invalid_argument("mrp_build: requires q >= 3");
  check_wsc(demand, support, coeffs, K, q.q);
  if (static_cast<int>(support.size()) != M)
    throw std::invalid_argument("mrp_build: support size does not match distribution");
  if (!std::binary_search(support.begin(), support.end(), demand))
    throw std::invalid_argument("mrp_build: demand must lie inside the support");

  const SelectionProfile& profile = dist.sample(src);
  const std::uint32_t demand_coeff = [&] {
    auto it = std::lower_bound(support.begin(), support.end(), demand);
    return coeffs[static_cast<std::size_t>(it - support.begin())];
  }();

  std::vector<int> all = range_1_to(K);
  std::vector<int> side_wo_demand;
  std::vector<std::uint32_t> coeffs_wo_demand;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == demand) continue;
    side_wo_demand.push_back(support[i]);
    coeffs_wo_demand.push_back(coeffs[i]);
  }

  PartitionPlan plan;
  plan.pre_groups.assign(2, {});
  plan.pre_coeffs.assign(2, {});

  if (dist.kind == SelectionDistribution::Kind::MrpDisjoint) {
    std::vector<int> outside = set_minus(all, support);
    std::vector<int> picked = pick_distinct(outside, static_cast<std::size_t>(profile.t), src);

    plan.pre_groups[0] = side_wo_demand;
    plan.pre_coeffs[0] = coeffs_wo_demand;

    std::vector<int> second;
    if (profile.w == 1) second.push_back(demand);
    second.insert(second.end(), picked.begin(), picked.end());
    std::sort(second.begin(), second.end());
    plan.pre_groups[1] = second;
    plan.pre_coeffs[1] = draw_coeffs(second.size(), q, src);

    // supers[target] = Y - c_W X_W, so the recovery coefficient is -c_W.
    plan.target_coeff = q.q - demand_coeff;
  } else {
    std::vector<int> picked =
        pick_distinct(side_wo_demand, static_cast<std::size_t>(profile.t), src);

    // Replace the demand's coefficient with a fresh one; q >= 3 guarantees a
    // distinct nonzero value exists.
    std::vector<std::uint32_t> options;
    for (std::uint32_t v = 1; v < q.q; ++v)
      if (v != demand_coeff) options.push_back(v);
    std::uint32_t replacement =
        options[static_cast<std::size_t>(src.uniform_below(options.size()))];

    plan.pre_groups[0] = support;
    plan.pre_coeffs[0] = coeffs;
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i] == demand) plan.pre_coeffs[0][i] = replacement;

    std::vector<int> second = set_minus(all, support);
    if (profile.w == 1) second.push_back(demand);
    second.insert(second.end(), picked.begin(), picked.end());
    std::sort(second.begin(), second.end());
    plan.pre_groups[1] = second;
    plan.pre_coeffs[1] = draw_coeffs(second.size(), q, src);

    plan.target_coeff = (replacement + q.q - demand_coeff) % q.q;
  }

  shuffle_and_seal(plan, src);
  return plan;
}

}  // namespace pircsi
