#include "pircsi/instance.hpp"

#include <algorithm>
#include <stdexcept>

#include "pircsi/combinat.hpp"

namespace pircsi {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

int pow_int(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > (1LL << 30)) throw std::invalid_argument("message length overflow");
  }
  return static_cast<int>(r);
}

}  // namespace

Params Params::make(Model model, int n_servers, int n_messages, int side_size,
                    std::uint32_t q) {
  if (n_servers < 1) throw std::invalid_argument("Params: need N >= 1");
  if (n_messages < 2) throw std::invalid_argument("Params: need K >= 2");
  PrimeOrder order(q);
  int msg_len;
  if (model == Model::I) {
    if (side_size < 0 || side_size > n_messages - 1)
      throw std::invalid_argument("Params: Model I requires 0 <= M <= K-1");
    msg_len = pow_int(n_servers, ceil_div(n_messages, side_size + 1));
  } else {
    if (side_size < 2 || side_size > n_messages)
      throw std::invalid_argument("Params: Model II requires 2 <= M <= K");
    if (q < 3)
      throw std::invalid_argument("Params: Model II requires q >= 3");
    bool mid = side_size >= 3 && side_size <= n_messages - 1;
    msg_len = mid ? n_servers * n_servers : 1;
  }
  return Params{n_servers, n_messages, side_size, model, order, msg_len};
}

int Params::group_count() const {
  if (model == Model::I) return ceil_div(n_messages, side_size + 1);
  return 2;
}

std::string Params::config_tag() const {
  return "model" + model_name(model) + "-N" + std::to_string(n_servers) + "-K" +
         std::to_string(n_messages) + "-M" + std::to_string(side_size) + "-q" +
         std::to_string(q.q);
}

Database sample_database(const Params& params, ChoiceSource& rng) {
  Database db;
  db.q = params.q.q;
  db.msg_len = params.msg_len;
  db.messages.reserve(static_cast<std::size_t>(params.n_messages));
  for (int i = 0; i < params.n_messages; ++i) {
    SymbolVector v(params.q, static_cast<std::size_t>(params.msg_len));
    for (auto& s : v.symbols)
      s = static_cast<std::uint32_t>(rng.uniform_below(params.q.q));
    db.messages.push_back(std::move(v));
  }
  return db;
}

bool SideInfo::contains(int id) const {
  return std::binary_search(support.begin(), support.end(), id);
}

std::uint32_t SideInfo::coeff_of(int id) const {
  auto it = std::lower_bound(support.begin(), support.end(), id);
  if (it == support.end() || *it != id)
    throw std::invalid_argument("SideInfo: index not in support");
  return coeffs[static_cast<std::size_t>(it - support.begin())];
}

SymbolVector combine(const Database& db, const std::vector<int>& support,
                     const std::vector<std::uint32_t>& coeffs, const Params& params) {
  SymbolVector acc(params.q, static_cast<std::size_t>(params.msg_len));
  for (std::size_t i = 0; i < support.size(); ++i) {
    FieldElement c(coeffs[i], params.q);
    acc = vec_axpy(c, db.message(support[i]), acc);
  }
  return acc;
}

SideInfo make_side_info(const Database& db, std::vector<int> support,
                        std::vector<std::uint32_t> coeffs, const Params& params) {
  if (support.size() != coeffs.size())
    throw std::invalid_argument("SideInfo: support/coeff length mismatch");
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end())
    throw std::invalid_argument("SideInfo: support must be sorted and distinct");
  for (int id : support)
    if (id < 1 || id > params.n_messages)
      throw std::invalid_argument("SideInfo: index out of range");
  for (auto c : coeffs)
    if (c == 0 || c >= params.q.q)
      throw std::invalid_argument("SideInfo: coefficients must be in F_q^x");
  SideInfo si;
  si.combo = combine(db, support, coeffs, params);
  si.support = std::move(support);
  si.coeffs = std::move(coeffs);
  return si;
}

std::pair<Demand, SideInfo> sample_instance(const Params& params, const Database& db,
                                            ChoiceSource& rng) {
  std::vector<int> all(static_cast<std::size_t>(params.n_messages));
  for (int i = 0; i < params.n_messages; ++i) all[static_cast<std::size_t>(i)] = i + 1;

  std::vector<int> support =
      pick_distinct(all, static_cast<std::size_t>(params.side_size), rng);
  std::vector<std::uint32_t> coeffs(support.size());
  for (auto& c : coeffs)
    c = 1 + static_cast<std::uint32_t>(rng.uniform_below(params.q.q - 1));

  int demand;
  if (params.model == Model::I) {
    std::vector<int> outside;
    for (int id : all)
      if (!std::binary_search(support.begin(), support.end(), id)) outside.push_back(id);
    demand = outside[static_cast<std::size_t>(rng.uniform_below(outside.size()))];
  } else {
    demand = support[static_cast<std::size_t>(rng.uniform_below(support.size()))];
  }
  return {Demand{demand}, make_side_info(db, std::move(support), std::move(coeffs), params)};
}

BigInt count_instances(const Params& params) {
  BigInt supports = binomial(params.n_messages, params.side_size);
  BigInt coeffs = 1;
  for (int i = 0; i < params.side_size; ++i) coeffs *= params.q.q - 1;
  BigInt demands = params.model == Model::I ? params.n_messages - params.side_size
                                            : params.side_size;
  return supports * coeffs * demands;
}

void for_each_instance(const Params& params, std::uint64_t cap,
                       const std::function<void(int, const std::vector<int>&,
                                                const std::vector<std::uint32_t>&)>& fn) {
  BigInt total = count_instances(params);
  if (total > BigInt(cap))
    throw CapExceeded("instance enumeration cap exceeded: " + total.str() +
                      " consistent (W,S,C) triples, cap " + std::to_string(cap));

  std::vector<int> all(static_cast<std::size_t>(params.n_messages));
  for (int i = 0; i < params.n_messages; ++i) all[static_cast<std::size_t>(i)] = i + 1;

  for_each_subset<int>(all, params.side_size, [&](const std::vector<int>& support) {
    for_each_coeff_seq(params.q.q, params.side_size,
                       [&](const std::vector<std::uint32_t>& coeffs) {
                         if (params.model == Model::I) {
                           for (int id : all)
                             if (!std::binary_search(support.begin(), support.end(), id))
                               fn(id, support, coeffs);
                         } else {
                           for (int id : support) fn(id, support, coeffs);
                         }
                       });
  });
}

}  // namespace pircsi
