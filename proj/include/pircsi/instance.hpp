#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pircsi/field.hpp"
#include "pircsi/rational.hpp"
#include "pircsi/rng.hpp"

namespace pircsi {

/// Thrown when an exhaustive enumeration would exceed the configured cap;
/// callers fall back to the sampled audit.
struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Whether the demanded message lies outside (I) or inside (II) the
/// side-information support.
enum class Model { I, II };

inline std::string model_name(Model m) { return m == Model::I ? "I" : "II"; }

/// Validated problem configuration. Message length is fixed by the model:
/// N^ceil(K/(M+1)) symbols for Model I, N^2 for mid-range Model II, one
/// symbol for the M=2 and M=K corner cases.
struct Params {
  int n_servers = 1;   // N
  int n_messages = 2;  // K
  int side_size = 0;   // M
  Model model = Model::I;
  PrimeOrder q;
  int msg_len = 1;     // symbols per message

  static Params make(Model model, int n_servers, int n_messages, int side_size,
                     std::uint32_t q);

  /// r, the number of partition groups (Model I) or 2 (mid-range Model II).
  int group_count() const;

  std::string config_tag() const;  // e.g. "modelI-N2-K9-M3-q3"
};

/// K messages replicated identically at every server.
struct Database {
  std::uint32_t q = 2;
  int msg_len = 1;
  std::vector<SymbolVector> messages;

  /// Message ids are 1-based, as in the protocol transcripts.
  const SymbolVector& message(int id) const { return messages.at(static_cast<std::size_t>(id - 1)); }
};

/// The user's coded combination: support S (sorted), nonzero coefficients C
/// aligned with it, and the combination value Y. Empty support encodes the
/// no-side-information corner of Model I.
struct SideInfo {
  std::vector<int> support;
  std::vector<std::uint32_t> coeffs;
  SymbolVector combo;

  bool contains(int id) const;
  std::uint32_t coeff_of(int id) const;  // throws if id not in support
};

struct Demand {
  int index = 1;  // W, 1-based
};

Database sample_database(const Params& params, ChoiceSource& rng);

/// Recompute sum c_i X_i over the support; the SideInfo invariant and the
/// value the servers could never see.
SymbolVector combine(const Database& db, const std::vector<int>& support,
                     const std::vector<std::uint32_t>& coeffs, const Params& params);

SideInfo make_side_info(const Database& db, std::vector<int> support,
                        std::vector<std::uint32_t> coeffs, const Params& params);

/// Draws (W, S, C) from the model's joint distribution: S uniform over
/// M-subsets, C uniform over nonzero sequences, W uniform over [K]\S or S.
std::pair<Demand, SideInfo> sample_instance(const Params& params, const Database& db,
                                            ChoiceSource& rng);

/// Number of consistent (W, S, C) triples: C(K,M) * (q-1)^M * |W choices|.
BigInt count_instances(const Params& params);

/// Visits every consistent (W, S, C) exactly once. Throws (naming the count)
/// if the instance space exceeds `cap`.
void for_each_instance(const Params& params, std::uint64_t cap,
                       const std::function<void(int /*W*/, const std::vector<int>& /*S*/,
                                                const std::vector<std::uint32_t>& /*C*/)>& fn);

}  // namespace pircsi
