#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pircsi/field.hpp"
#include "pircsi/instance.hpp"
#include "pircsi/rng.hpp"

namespace pircsi {

/// The r unit-entropy messages the inner retrieval layer works over, each an
/// F_q-linear combination of database messages given by a partition group.
struct SuperMessageSet {
  std::uint32_t q = 2;
  int length = 1;
  std::vector<SymbolVector> supers;
};

/// Evaluates the combination specs against the database and checks the specs
/// are linearly independent over F_q (so the super-messages stay independent
/// and uniform).
SuperMessageSet build_supers(const std::vector<std::vector<int>>& groups,
                             const std::vector<std::vector<std::uint32_t>>& coeffs,
                             const Database& db);

/// One downloaded value: the sum of the listed super-message symbols.
/// Terms are kept sorted by super index; |terms| is the request's order k.
struct SymbolRequest {
  std::vector<std::pair<int, int>> terms;  // (super index, symbol position)

  friend bool operator==(const SymbolRequest& a, const SymbolRequest& b) {
    return a.terms == b.terms;
  }
  friend bool operator<(const SymbolRequest& a, const SymbolRequest& b) {
    return a.terms < b.terms;
  }
};

/// Per-server request lists plus the user-secret position permutations that
/// were applied before emission. Requests are canonically ordered
/// (order k, then super subset, then positions) so emission order cannot
/// depend on the target.
struct QueryBundle {
  int n_servers = 1;
  int n_supers = 1;
  int length = 1;  // N^r, symbols per super-message
  int target = 0;
  std::vector<std::vector<SymbolRequest>> per_server;
  std::vector<std::vector<int>> perms;  // user-side only
};

struct AnswerBundle {
  std::uint32_t q = 2;
  std::vector<std::vector<std::uint32_t>> per_server;
};

/// Per-server request count: sum_k C(r,k) (N-1)^(k-1); equals
/// (N^r - 1)/(N - 1) for N >= 2, r for N = 1, and 1 when r = 1.
std::uint64_t requests_per_server(int n_servers, int n_supers);

/// The iterative symmetric construction: round k serves every k-subset of
/// supers with (N-1)^(k-1) sums per server; each fresh target symbol is
/// paired with interference already downloaded verbatim from another server.
QueryBundle plan_queries(int n_servers, int n_supers, int target, ChoiceSource& rng);

/// Deterministic planner core with caller-supplied position permutations;
/// the audit enumerates these to compare request distributions across
/// targets.
QueryBundle plan_queries_with_perms(int n_servers, int n_supers, int target,
                                    std::vector<std::vector<int>> perms);

/// What one server computes: each request evaluates to the sum of the
/// indicated symbols.
std::vector<std::uint32_t> answer(const std::vector<SymbolRequest>& queries,
                                  const SuperMessageSet& supers);

/// Recovers all N^r symbols of the target super-message from the answers
/// alone, subtracting interference values downloaded from other servers.
/// Throws "malformed plan" if an interference sum was never downloaded.
SymbolVector reconstruct(const QueryBundle& bundle, const AnswerBundle& answers,
                         int target);

}  // namespace pircsi
