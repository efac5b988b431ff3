#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pircsi/protocol.hpp"

namespace pircsi {

using Json = nlohmann::ordered_json;

/// Persistent record of one retrieval. Server-visible material and
/// user-secret material live in disjoint subtrees; replaying (params, seed,
/// trial) regenerates the file byte-for-byte, so events carry logical step
/// counters rather than wall-clock times.
struct Transcript {
  Params params;
  std::uint64_t seed = 0;
  int trial = 0;
  Database db;
  RetrievalSession session;
};

Json params_to_json(const Params& params);
Params params_from_json(const Json& j);

Json transcript_to_json(const Transcript& t);

/// Canonical file body: two-space indented JSON plus trailing newline.
std::string transcript_to_string(const Transcript& t);

/// Re-evaluates every server-visible query in `j` against the recorded
/// database and compares with the recorded answers.
bool replay_matches(const Json& j);

/// Key names that must never appear inside the server-visible subtree.
/// Returns the offending paths (empty means clean).
std::vector<std::string> hygiene_violations(const Json& transcript);

}  // namespace pircsi
