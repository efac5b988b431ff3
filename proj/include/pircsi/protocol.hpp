#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pircsi/instance.hpp"
#include "pircsi/partition.hpp"
#include "pircsi/sunjafar.hpp"

namespace pircsi {

/// Single-message or full-combination request used by the two Model II
/// corner-case protocols.
struct DirectRequest {
  enum class Kind { Message, Combination };
  Kind kind = Kind::Message;
  int index = 0;                      // Message: 1-based id
  std::vector<std::uint32_t> combo;   // Combination: coefficient per message
};

/// The partition data every server receives, verbatim and in sent order.
struct PlanView {
  std::vector<std::vector<int>> groups;
  std::vector<std::vector<std::uint32_t>> coeffs;
};

/// Everything one server is sent in one retrieval. Empty query (no plan, no
/// requests, no direct part) means the server was not contacted.
struct ServerQuery {
  std::optional<PlanView> plan;
  std::vector<SymbolRequest> requests;
  std::optional<DirectRequest> direct;

  bool empty() const { return !plan && requests.empty() && !direct; }
};

/// Deterministic server role: evaluates the query against the replicated
/// database. Identical queries yield identical answers at every server.
std::vector<std::uint32_t> server_answer(const ServerQuery& query, const Database& db);

/// Record of one full retrieval, including the user-secret bookkeeping the
/// servers never see.
struct RetrievalSession {
  Params params;
  Demand demand;
  SideInfo side_info;

  std::optional<PartitionPlan> plan;    // partition-based paths
  std::optional<QueryBundle> bundle;
  std::optional<int> chosen_server;     // direct-request paths
  std::vector<ServerQuery> queries;     // per server
  std::vector<std::vector<std::uint32_t>> answers;

  SymbolVector recovered;
  int downloaded_symbols = 0;
};

/// Model I, any 0 <= M <= K-1: partition, inner retrieval of the group
/// holding the demand, then strip the side information.
RetrievalSession retrieve_model_i(const Params& params, const Demand& demand,
                                  const SideInfo& side_info, const Database& db,
                                  const Rng& rng);

/// Model II, M = 2: request one of the two support messages in full (the
/// demand itself with probability 1/K) from one uniformly chosen server.
RetrievalSession retrieve_model_ii_m2(const Params& params, const Demand& demand,
                                      const SideInfo& side_info, const Database& db,
                                      const Rng& rng);

/// Model II, 3 <= M <= K-1: two-group partition plus the inner retrieval.
RetrievalSession retrieve_model_ii_mid(const Params& params, const Demand& demand,
                                       const SideInfo& side_info, const Database& db,
                                       const Rng& rng);

/// Model II, M = K: request the side-information combination with the
/// demand's coefficient replaced, from one uniformly chosen server.
RetrievalSession retrieve_model_ii_mk(const Params& params, const Demand& demand,
                                      const SideInfo& side_info, const Database& db,
                                      const Rng& rng);

/// Dispatch on (model, M).
RetrievalSession retrieve(const Params& params, const Demand& demand,
                          const SideInfo& side_info, const Database& db,
                          const Rng& rng);

// Sub-stream tags for the hierarchical seed split.
inline constexpr std::uint64_t kRngInstance = 1;
inline constexpr std::uint64_t kRngPlan = 2;
inline constexpr std::uint64_t kRngPerms = 3;
inline constexpr std::uint64_t kRngServer = 4;

}  // namespace pircsi
