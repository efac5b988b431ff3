#include "pircsi/sunjafar.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "pircsi/combinat.hpp"

namespace pircsi {

namespace {

int pow_int(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > (1LL << 30)) throw std::invalid_argument("sunjafar: N^r overflow");
  }
  return static_cast<int>(r);
}

// Rank of the combination matrix over F_q; rows are message-indexed
// coefficient vectors.
int rank_mod_q(std::vector<std::vector<std::uint32_t>> m, std::uint32_t q) {
  if (m.empty()) return 0;
  const std::size_t cols = m[0].size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t pivot = SIZE_MAX;
    for (std::size_t r = row; r < m.size(); ++r)
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot == SIZE_MAX) continue;
    std::swap(m[row], m[pivot]);
    FieldElement inv = fe_inv(FieldElement(m[row][col], PrimeOrder(q)));
    for (auto& v : m[row])
      v = static_cast<std::uint32_t>((static_cast<std::uint64_t>(v) * inv.value) % q);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      std::uint64_t f = m[r][col];
      for (std::size_t c = 0; c < cols; ++c)
        m[r][c] = static_cast<std::uint32_t>(
            (m[r][c] + (q - ((f * m[row][c]) % q))) % q);
    }
    ++row;
  }
  return static_cast<int>(row);
}

}  // namespace

SuperMessageSet build_supers(const std::vector<std::vector<int>>& groups,
                             const std::vector<std::vector<std::uint32_t>>& coeffs,
                             const Database& db) {
  if (groups.size() != coeffs.size())
    throw std::invalid_argument("build_supers: groups/coeffs mismatch");
  const std::uint32_t q = db.q;
  const int K = static_cast<int>(db.messages.size());

  std::vector<std::vector<std::uint32_t>> rows(
      groups.size(), std::vector<std::uint32_t>(static_cast<std::size_t>(K), 0));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() != coeffs[g].size())
      throw std::invalid_argument("build_supers: ragged group");
    for (std::size_t k = 0; k < groups[g].size(); ++k) {
      int id = groups[g][k];
      if (id < 1 || id > K) throw std::invalid_argument("build_supers: bad message id");
      std::uint32_t c = coeffs[g][k];
      if (c == 0 || c >= q) throw std::invalid_argument("build_supers: bad coefficient");
      auto& cell = rows[g][static_cast<std::size_t>(id - 1)];
      if (cell != 0) throw std::invalid_argument("build_supers: repeated index in group");
      cell = c;
    }
  }
  if (rank_mod_q(rows, q) != static_cast<int>(groups.size()))
    throw std::invalid_argument("build_supers: combination specs not linearly independent");

  SuperMessageSet out;
  out.q = q;
  out.length = db.msg_len;
  PrimeOrder order(q);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    SymbolVector acc(order, static_cast<std::size_t>(db.msg_len));
    for (std::size_t k = 0; k < groups[g].size(); ++k)
      acc = vec_axpy(FieldElement(coeffs[g][k], order), db.message(groups[g][k]), acc);
    out.supers.push_back(std::move(acc));
  }
  return out;
}

std::uint64_t requests_per_server(int n_servers, int n_supers) {
  std::uint64_t total = 0;
  for (int k = 1; k <= n_supers; ++k) {
    BigInt term = binomial(n_supers, k);
    for (int i = 0; i < k - 1; ++i) term *= n_servers - 1;
    total += term.convert_to<std::uint64_t>();
  }
  return total;
}

QueryBundle plan_queries_with_perms(int n_servers, int n_supers, int target,
                                    std::vector<std::vector<int>> perms) {
  const int N = n_servers, r = n_supers;
  if (N < 1 || r < 1) throw std::invalid_argument("plan_queries: need N >= 1, r >= 1");
  if (target < 0 || target >= r) throw std::invalid_argument("plan_queries: bad target");
  const int len = pow_int(N, r);
  if (static_cast<int>(perms.size()) != r)
    throw std::invalid_argument("plan_queries: need one permutation per super");
  for (const auto& p : perms)
    if (static_cast<int>(p.size()) != len)
      throw std::invalid_argument("plan_queries: permutation length mismatch");

  std::vector<int> fresh(static_cast<std::size_t>(r), 0);
  auto next_fresh = [&](int super) {
    int& f = fresh[static_cast<std::size_t>(super)];
    if (f >= len) throw std::runtime_error("plan_queries: fresh symbols exhausted");
    return perms[static_cast<std::size_t>(super)][static_cast<std::size_t>(f++)];
  };

  // rounds[k][server][subset] = requests built in round k over that subset.
  using SubsetMap = std::map<std::vector<int>, std::vector<SymbolRequest>>;
  std::vector<std::vector<SubsetMap>> rounds(
      static_cast<std::size_t>(r + 1),
      std::vector<SubsetMap>(static_cast<std::size_t>(N)));

  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < r; ++i) {
      SymbolRequest req;
      req.terms = {{i, next_fresh(i)}};
      rounds[1][static_cast<std::size_t>(n)][{i}].push_back(std::move(req));
    }
  }

  std::vector<int> supers_all(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) supers_all[static_cast<std::size_t>(i)] = i;

  for (int k = 2; k <= r; ++k) {
    for (int n = 0; n < N; ++n) {
      for_each_subset<int>(supers_all, k, [&](const std::vector<int>& subset) {
        bool has_target =
            std::binary_search(subset.begin(), subset.end(), target);
        auto& bucket = rounds[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)][subset];
        if (has_target) {
          // Pair a fresh target symbol with every interference sum of the
          // previous round downloaded from the other servers.
          std::vector<int> interference_subset;
          for (int i : subset)
            if (i != target) interference_subset.push_back(i);
          for (int m = 0; m < N; ++m) {
            if (m == n) continue;
            auto it = rounds[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)]
                          .find(interference_subset);
            if (it == rounds[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)].end())
              continue;
            for (const auto& src_req : it->second) {
              SymbolRequest req;
              req.terms = src_req.terms;
              req.terms.emplace_back(target, next_fresh(target));
              std::sort(req.terms.begin(), req.terms.end());
              bucket.push_back(std::move(req));
            }
          }
        } else {
          // Message symmetry: fresh sums, one replica per interference sum
          // the target-bearing subsets consume.
          long long replicas = 1;
          for (int i = 0; i < k - 1; ++i) replicas *= N - 1;
          for (long long rep = 0; rep < replicas; ++rep) {
            SymbolRequest req;
            for (int i : subset) req.terms.emplace_back(i, next_fresh(i));
            bucket.push_back(std::move(req));
          }
        }
      });
    }
  }

  QueryBundle bundle;
  bundle.n_servers = N;
  bundle.n_supers = r;
  bundle.length = len;
  bundle.target = target;
  bundle.perms = std::move(perms);
  bundle.per_server.resize(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    auto& list = bundle.per_server[static_cast<std::size_t>(n)];
    for (int k = 1; k <= r; ++k)
      for (auto& [subset, reqs] : rounds[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)])
        for (auto& req : reqs) list.push_back(req);
    // Canonical emission order: (k, super subset, positions).
    std::sort(list.begin(), list.end(), [](const SymbolRequest& a, const SymbolRequest& b) {
      if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size();
      return a.terms < b.terms;
    });
  }

  if (fresh[static_cast<std::size_t>(target)] != len)
    throw std::runtime_error("plan_queries: target symbols not exhausted");
  return bundle;
}

QueryBundle plan_queries(int n_servers, int n_supers, int target, ChoiceSource& rng) {
  const int len = pow_int(n_servers, n_supers);
  std::vector<std::vector<int>> perms;
  perms.reserve(static_cast<std::size_t>(n_supers));
  for (int i = 0; i < n_supers; ++i) {
    std::vector<int> p(static_cast<std::size_t>(len));
    for (int j = 0; j < len; ++j) p[static_cast<std::size_t>(j)] = j;
    fisher_yates(p, rng);
    perms.push_back(std::move(p));
  }
  return plan_queries_with_perms(n_servers, n_supers, target, std::move(perms));
}

std::vector<std::uint32_t> answer(const std::vector<SymbolRequest>& queries,
                                  const SuperMessageSet& supers) {
  std::vector<std::uint32_t> out;
  out.reserve(queries.size());
  for (const auto& req : queries) {
    std::uint64_t acc = 0;
    int prev_super = -1;
    for (const auto& [super, pos] : req.terms) {
      if (super < 0 || super >= static_cast<int>(supers.supers.size()))
        throw std::out_of_range("answer: super index out of range");
      if (super == prev_super)
        throw std::invalid_argument("answer: repeated super in one request");
      prev_super = super;
      if (pos < 0 || pos >= supers.length)
        throw std::out_of_range("answer: symbol position out of range");
      acc += supers.supers[static_cast<std::size_t>(super)]
                 .symbols[static_cast<std::size_t>(pos)];
    }
    out.push_back(static_cast<std::uint32_t>(acc % supers.q));
  }
  return out;
}

SymbolVector reconstruct(const QueryBundle& bundle, const AnswerBundle& answers,
                         int target) {
  if (answers.per_server.size() != bundle.per_server.size())
    throw std::invalid_argument("reconstruct: answer bundle shape mismatch");
  for (std::size_t n = 0; n < bundle.per_server.size(); ++n)
    if (answers.per_server[n].size() != bundle.per_server[n].size())
      throw std::invalid_argument("reconstruct: answer list length mismatch");

  const std::uint32_t q = answers.q;
  if (q < 2) throw std::invalid_argument("reconstruct: bad field order");

  // Every downloaded sum, keyed by its exact term list.
  std::map<std::vector<std::pair<int, int>>, std::uint32_t> downloaded;
  for (std::size_t n = 0; n < bundle.per_server.size(); ++n)
    for (std::size_t i = 0; i < bundle.per_server[n].size(); ++i)
      downloaded[bundle.per_server[n][i].terms] = answers.per_server[n][i];

  // Requests carry true symbol positions (the secret permutation only decided
  // which positions play which role), so filling by position directly yields
  // the super-message.
  std::vector<int> seen(static_cast<std::size_t>(bundle.length), 0);
  SymbolVector result;
  result.q = q;
  result.symbols.assign(static_cast<std::size_t>(bundle.length), 0);

  for (std::size_t n = 0; n < bundle.per_server.size(); ++n) {
    for (std::size_t i = 0; i < bundle.per_server[n].size(); ++i) {
      const auto& req = bundle.per_server[n][i];
      auto term = std::find_if(req.terms.begin(), req.terms.end(),
                               [&](const auto& t) { return t.first == target; });
      if (term == req.terms.end()) continue;
      std::uint32_t value = answers.per_server[n][i] % q;
      if (req.terms.size() > 1) {
        std::vector<std::pair<int, int>> interference;
        for (const auto& t : req.terms)
          if (t.first != target) interference.push_back(t);
        auto it = downloaded.find(interference);
        if (it == downloaded.end())
          throw std::runtime_error(
              "reconstruct: malformed plan (interference sum never downloaded)");
        value = (value + q - it->second % q) % q;
      }
      const int pos = term->second;
      ++seen[static_cast<std::size_t>(pos)];
      result.symbols[static_cast<std::size_t>(pos)] = value;
    }
  }
  for (std::size_t p = 0; p < seen.size(); ++p)
    if (seen[p] != 1)
      throw std::runtime_error("reconstruct: malformed plan (target position coverage)");
  return result;
}

}  // namespace pircsi
