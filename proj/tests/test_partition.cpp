#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "pircsi/partition.hpp"
#include "support.hpp"

using namespace pircsi;
using pircsi::testing::append;
using pircsi::testing::fy_script_for_order;
using pircsi::testing::fy_script_for_perm;

namespace {

Rational prob(const SelectionDistribution& d, int w, int s, int t) {
  return d.prob_of(SelectionProfile{w, s, t});
}

void check_plan_structure(const PartitionPlan& plan, int K, int demand,
                          const std::vector<int>& support, std::uint32_t q,
                          bool model_i) {
  const int r = plan.group_count();
  // coverage and per-group distinctness
  std::map<int, int> occurrences;
  for (const auto& g : plan.groups) {
    std::set<int> in_group;
    for (int id : g) {
      CHECK(id >= 1);
      CHECK(id <= K);
      CHECK(in_group.insert(id).second);
      ++occurrences[id];
    }
  }
  if (model_i) {
    for (int id = 1; id <= K; ++id) {
      CHECK(occurrences[id] >= 1);
      CHECK(occurrences[id] <= 2);
    }
    for (const auto& g : plan.groups)
      CHECK(g.size() == support.size() + 1);
    // the target group is {demand} u support
    std::vector<int> target = plan.groups[static_cast<std::size_t>(plan.target_pos)];
    std::sort(target.begin(), target.end());
    std::vector<int> expect = support;
    expect.push_back(demand);
    std::sort(expect.begin(), expect.end());
    CHECK(target == expect);
  }
  // nonzero coefficients
  for (const auto& cs : plan.coeffs)
    for (auto c : cs) {
      CHECK(c >= 1);
      CHECK(c < q);
    }
  // shuffle round-trip
  CHECK(static_cast<int>(plan.group_order.size()) == r);
  for (int pos = 0; pos < r; ++pos) {
    int label = plan.group_order[static_cast<std::size_t>(pos)];
    const auto& perm = plan.within_perms[static_cast<std::size_t>(label)];
    for (std::size_t k = 0; k < perm.size(); ++k) {
      CHECK(plan.groups[static_cast<std::size_t>(pos)][k] ==
            plan.pre_groups[static_cast<std::size_t>(label)]
                           [static_cast<std::size_t>(perm[k])]);
      CHECK(plan.coeffs[static_cast<std::size_t>(pos)][k] ==
            plan.pre_coeffs[static_cast<std::size_t>(label)]
                           [static_cast<std::size_t>(perm[k])]);
    }
  }
  CHECK(plan.group_order[static_cast<std::size_t>(plan.target_pos)] == 0);
}

}  // namespace

TEST_CASE("rp distribution reproduces the reference (K=9, M=3) table") {
  SelectionDistribution d = solve_rp_distribution(9, 3);
  CHECK(d.entries.size() == 7);
  CHECK(prob(d, 0, 3, 0) == Rational(14, 171));
  CHECK(prob(d, 0, 2, 1) == Rational(60, 171));
  CHECK(prob(d, 0, 1, 2) == Rational(36, 171));
  CHECK(prob(d, 0, 0, 3) == Rational(4, 171));
  CHECK(prob(d, 1, 2, 0) == Rational(21, 171));
  CHECK(prob(d, 1, 1, 1) == Rational(30, 171));
  CHECK(prob(d, 1, 0, 2) == Rational(6, 171));
  CHECK(d.total() == Rational(1));
}

TEST_CASE("rp distribution degenerates when no duplicates are needed") {
  SelectionDistribution d = solve_rp_distribution(8, 3);  // r=2, d=0
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].first == SelectionProfile{0, 0, 0});
  CHECK(d.entries[0].second == Rational(1));

  SelectionDistribution single = solve_rp_distribution(4, 3);  // K = M+1, r=1
  REQUIRE(single.entries.size() == 1);
  CHECK(single.entries[0].second == Rational(1));
}

TEST_CASE("rp distribution solver is deterministic and normalized") {
  for (int K = 2; K <= 9; ++K) {
    for (int M = 0; M <= K - 1; ++M) {
      SelectionDistribution a = solve_rp_distribution(K, M);
      SelectionDistribution b = solve_rp_distribution(K, M);
      CHECK(a.total() == Rational(1));
      REQUIRE(a.entries.size() == b.entries.size());
      for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].first == b.entries[i].first);
        CHECK(a.entries[i].second == b.entries[i].second);
        CHECK(a.entries[i].second > Rational(0));
      }
    }
  }
}

TEST_CASE("mrp distribution matches the reference tables") {
  SelectionDistribution d10 = solve_mrp_distribution(10, 4);
  CHECK(d10.kind == SelectionDistribution::Kind::MrpDisjoint);
  CHECK(prob(d10, 0, 0, 3) == Rational(2, 5));
  CHECK(prob(d10, 1, 0, 2) == Rational(3, 5));

  SelectionDistribution d5 = solve_mrp_distribution(5, 4);
  CHECK(d5.kind == SelectionDistribution::Kind::MrpOverlap);
  CHECK(prob(d5, 0, 0, 3) == Rational(2, 5));
  CHECK(prob(d5, 1, 0, 2) == Rational(3, 5));

  CHECK_THROWS_AS(solve_mrp_distribution(5, 2), std::invalid_argument);
  CHECK_THROWS_AS(solve_mrp_distribution(5, 5), std::invalid_argument);
}

TEST_CASE("mrp template boundary: ties go to the disjoint form") {
  CHECK(solve_mrp_distribution(6, 3).kind == SelectionDistribution::Kind::MrpDisjoint);
  // M-1 == K-M
  CHECK(solve_mrp_distribution(7, 4).kind == SelectionDistribution::Kind::MrpDisjoint);
  CHECK(solve_mrp_distribution(6, 4).kind == SelectionDistribution::Kind::MrpOverlap);
  // K = M+1 overlapping corner: selections come from {W} u (S \ W) only
  SelectionDistribution d = solve_mrp_distribution(5, 4);
  for (const auto& [profile, p] : d.entries) {
    CHECK(profile.w + profile.t == 2 * 4 - 5);
    CHECK(p > Rational(0));
  }
}

TEST_CASE("count_group_splits matches sizes used by the (9,3) table") {
  CHECK(count_group_splits(2, 4, 0, 8) == 70);
  CHECK(count_group_splits(2, 4, 1, 6) == 20);
  CHECK(count_group_splits(2, 4, 2, 4) == 6);
  CHECK(count_group_splits(2, 4, 3, 2) == 2);
  CHECK(count_group_splits(1, 2, 1, 0) == 0);  // a doubled index needs two groups
  CHECK(count_group_splits(0, 3, 0, 0) == 1);
}

TEST_CASE("scripted trace reproduces the worked Model I example") {
  SelectionDistribution dist = solve_rp_distribution(9, 3);
  std::vector<std::uint64_t> script;
  script.push_back(120);                      // profile (w,s,t) = (1,1,1)
  script.push_back(0);                        // side duplicate: 2
  script.push_back(0);                        // fresh duplicate: 5
  append(script, {0, 2, 2, 0, 0});            // deal 1,2,6,7,8 (9 is forced)
  script.push_back(0);                        // target coefficient c = 1
  append(script, {0, 0, 1, 0});               // coeffs of {1,5,7,8}
  append(script, {0, 0, 1, 0});               // coeffs of {2,5,6,9}
  append(script, fy_script_for_order({1, 2, 3, 4}, {2, 4, 1, 3}));
  append(script, fy_script_for_order({1, 5, 7, 8}, {7, 5, 1, 8}));
  append(script, fy_script_for_order({2, 5, 6, 9}, {2, 9, 6, 5}));
  append(script, fy_script_for_perm({0, 2, 1}));  // send order: groups 1,3,2

  ScriptedChoices src(script);
  PartitionPlan plan = rp_build(1, {2, 3, 4}, {1, 2, 1}, dist, PrimeOrder(3), src);
  CHECK(src.exhausted());

  REQUIRE(plan.group_count() == 3);
  CHECK(plan.groups[0] == std::vector<int>{2, 4, 1, 3});
  CHECK(plan.groups[1] == std::vector<int>{2, 9, 6, 5});
  CHECK(plan.groups[2] == std::vector<int>{7, 5, 1, 8});
  CHECK(plan.coeffs[0] == std::vector<std::uint32_t>{1, 1, 1, 2});
  CHECK(plan.coeffs[1] == std::vector<std::uint32_t>{1, 1, 2, 1});
  CHECK(plan.coeffs[2] == std::vector<std::uint32_t>{2, 1, 1, 1});
  CHECK(plan.target_pos == 0);
  CHECK(plan.target_coeff == 1);
}

TEST_CASE("scripted trace reproduces the worked disjoint Model II example") {
  SelectionDistribution dist = solve_mrp_distribution(10, 4);
  std::vector<std::uint64_t> script;
  script.push_back(2);             // profile (w,t) = (1,2)
  append(script, {1, 4});          // picks 6 then 10 from {5..10}
  append(script, {0, 0, 0});       // coeffs of {1,6,10}
  append(script, fy_script_for_order({2, 3, 4}, {3, 2, 4}));
  append(script, fy_script_for_order({1, 6, 10}, {1, 10, 6}));
  append(script, fy_script_for_perm({1, 0}));  // send group 2 first

  ScriptedChoices src(script);
  PartitionPlan plan = mrp_build(1, {1, 2, 3, 4}, {1, 1, 2, 1}, dist, PrimeOrder(3), src);
  CHECK(src.exhausted());

  REQUIRE(plan.group_count() == 2);
  CHECK(plan.groups[0] == std::vector<int>{1, 10, 6});
  CHECK(plan.groups[1] == std::vector<int>{3, 2, 4});
  CHECK(plan.coeffs[0] == std::vector<std::uint32_t>{1, 1, 1});
  CHECK(plan.coeffs[1] == std::vector<std::uint32_t>{2, 1, 1});
  CHECK(plan.target_pos == 1);
  CHECK(plan.target_coeff == 2);  // -c_W mod 3
}

TEST_CASE("scripted trace reproduces the worked overlapping Model II example") {
  SelectionDistribution dist = solve_mrp_distribution(5, 4);
  std::vector<std::uint64_t> script;
  script.push_back(2);        // profile (w,t) = (1,2)
  append(script, {0, 1});     // picks 2 then 4 from {2,3,4}
  // replacement coefficient is forced at q=3 (single option, no draw)
  append(script, {1, 0, 0, 0});  // coeffs of {1,2,4,5}
  append(script, fy_script_for_order({1, 2, 3, 4}, {1, 4, 2, 3}));
  append(script, fy_script_for_order({1, 2, 4, 5}, {1, 5, 2, 4}));
  append(script, fy_script_for_perm({1, 0}));

  ScriptedChoices src(script);
  PartitionPlan plan = mrp_build(1, {1, 2, 3, 4}, {1, 1, 2, 1}, dist, PrimeOrder(3), src);
  CHECK(src.exhausted());

  REQUIRE(plan.group_count() == 2);
  CHECK(plan.groups[0] == std::vector<int>{1, 5, 2, 4});
  CHECK(plan.groups[1] == std::vector<int>{1, 4, 2, 3});
  CHECK(plan.coeffs[0] == std::vector<std::uint32_t>{2, 1, 1, 1});
  CHECK(plan.coeffs[1] == std::vector<std::uint32_t>{2, 1, 1, 2});
  CHECK(plan.target_pos == 1);
  CHECK(plan.target_coeff == 1);  // c' - c_W = 2 - 1
}

TEST_CASE("rp_build structural invariants over random draws") {
  Rng rng(77);
  struct Config {
    int K, M;
    std::uint32_t q;
  };
  for (Config cfg : {Config{9, 3, 3}, Config{5, 1, 2}, Config{6, 2, 5}, Config{4, 3, 3},
                     Config{5, 0, 3}}) {
    SelectionDistribution dist = solve_rp_distribution(cfg.K, cfg.M);
    for (int iter = 0; iter < 60; ++iter) {
      std::vector<int> all(static_cast<std::size_t>(cfg.K));
      for (int i = 0; i < cfg.K; ++i) all[static_cast<std::size_t>(i)] = i + 1;
      std::vector<int> support =
          pick_distinct(all, static_cast<std::size_t>(cfg.M), rng);
      std::vector<int> outside;
      for (int id : all)
        if (!std::binary_search(support.begin(), support.end(), id))
          outside.push_back(id);
      int demand = outside[static_cast<std::size_t>(rng.uniform_below(outside.size()))];
      std::vector<std::uint32_t> coeffs(support.size());
      for (auto& c : coeffs)
        c = 1 + static_cast<std::uint32_t>(rng.uniform_below(cfg.q - 1));

      PartitionPlan plan = rp_build(demand, support, coeffs, dist, PrimeOrder(cfg.q), rng);
      check_plan_structure(plan, cfg.K, demand, support, cfg.q, true);
      // duplicated indices sit in exactly two distinct groups
      std::map<int, std::set<std::size_t>> group_of;
      for (std::size_t g = 0; g < plan.groups.size(); ++g)
        for (int id : plan.groups[g]) group_of[id].insert(g);
      int dups = 0;
      for (const auto& [id, where] : group_of) {
        CHECK(where.size() <= 2);
        if (where.size() == 2) ++dups;
      }
      CHECK(dups == plan.group_count() * (cfg.M + 1) - cfg.K);
    }
  }
}

TEST_CASE("mrp_build structural invariants and recovery identity") {
  Rng rng(78);
  struct Config {
    int K, M;
  };
  for (Config cfg : {Config{10, 4}, Config{5, 4}, Config{4, 3}, Config{6, 3}, Config{6, 5}}) {
    SelectionDistribution dist = solve_mrp_distribution(cfg.K, cfg.M);
    for (int iter = 0; iter < 60; ++iter) {
      std::vector<int> all(static_cast<std::size_t>(cfg.K));
      for (int i = 0; i < cfg.K; ++i) all[static_cast<std::size_t>(i)] = i + 1;
      std::vector<int> support =
          pick_distinct(all, static_cast<std::size_t>(cfg.M), rng);
      int demand =
          support[static_cast<std::size_t>(rng.uniform_below(support.size()))];
      std::vector<std::uint32_t> coeffs(support.size());
      for (auto& c : coeffs) c = 1 + static_cast<std::uint32_t>(rng.uniform_below(2));

      PartitionPlan plan = mrp_build(demand, support, coeffs, dist, PrimeOrder(3), rng);
      check_plan_structure(plan, cfg.K, demand, support, 3, false);
      CHECK(plan.group_count() == 2);
      CHECK(plan.target_coeff != 0);

      // The target group's combination minus the side information leaves
      // target_coeff * X_demand: verify on the coefficient vectors.
      std::vector<std::uint32_t> net(static_cast<std::size_t>(cfg.K), 0);
      const auto& tg = plan.groups[static_cast<std::size_t>(plan.target_pos)];
      const auto& tc = plan.coeffs[static_cast<std::size_t>(plan.target_pos)];
      for (std::size_t k = 0; k < tg.size(); ++k)
        net[static_cast<std::size_t>(tg[k] - 1)] =
            (net[static_cast<std::size_t>(tg[k] - 1)] + tc[k]) % 3;
      for (std::size_t i = 0; i < support.size(); ++i)
        net[static_cast<std::size_t>(support[i] - 1)] =
            (net[static_cast<std::size_t>(support[i] - 1)] + 3 - coeffs[i]) % 3;
      for (int id = 1; id <= cfg.K; ++id) {
        if (id == demand)
          CHECK(net[static_cast<std::size_t>(id - 1)] == plan.target_coeff);
        else
          CHECK(net[static_cast<std::size_t>(id - 1)] == 0);
      }
    }
  }
}

TEST_CASE("demand position within its group is uniform over builds") {
  SelectionDistribution dist = solve_rp_distribution(5, 1);
  Rng rng(99);
  const int n = 6000;
  std::vector<int> position_counts(2, 0);
  for (int i = 0; i < n; ++i) {
    PartitionPlan plan = rp_build(1, {2}, {1}, dist, PrimeOrder(2), rng);
    const auto& tg = plan.groups[static_cast<std::size_t>(plan.target_pos)];
    for (std::size_t k = 0; k < tg.size(); ++k)
      if (tg[k] == 1) ++position_counts[k];
  }
  double p = 0.5, sigma = std::sqrt(p * (1 - p) * n);
  for (int c : position_counts) CHECK(std::abs(c - n * p) <= 5 * sigma);
}

TEST_CASE("build rejects inconsistent inputs") {
  SelectionDistribution rp = solve_rp_distribution(9, 3);
  SelectionDistribution mrp = solve_mrp_distribution(10, 4);
  Rng rng(1);
  CHECK_THROWS_AS(rp_build(2, {2, 3, 4}, {1, 1, 1}, rp, PrimeOrder(3), rng),
                  std::invalid_argument);  // demand inside support
  CHECK_THROWS_AS(rp_build(1, {2, 3}, {1, 1}, rp, PrimeOrder(3), rng),
                  std::invalid_argument);  // size mismatch with distribution
  CHECK_THROWS_AS(rp_build(1, {2, 3, 4}, {1, 0, 1}, rp, PrimeOrder(3), rng),
                  std::invalid_argument);  // zero coefficient
  CHECK_THROWS_AS(mrp_build(5, {1, 2, 3, 4}, {1, 1, 1, 1}, mrp, PrimeOrder(3), rng),
                  std::invalid_argument);  // demand outside support
  CHECK_THROWS_AS(mrp_build(1, {1, 2, 3, 4}, {1, 1, 1, 1}, mrp, PrimeOrder(2), rng),
                  std::invalid_argument);  // q = 2
  CHECK_THROWS_AS(mrp_build(1, {1, 2, 3, 4}, {1, 1, 1, 1}, rp, PrimeOrder(3), rng),
                  std::invalid_argument);  // wrong distribution kind
}
