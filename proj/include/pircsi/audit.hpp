#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pircsi/instance.hpp"
#include "pircsi/partition.hpp"
#include "pircsi/rational.hpp"
#include "pircsi/rng.hpp"

namespace pircsi {

/// Capacity formula (1 + 1/N + ... + 1/N^(ceil(K/(M+1))-1))^{-1}.
Rational capacity_model_i(int n_servers, int n_messages, int side_size);

/// Capacity formula: 1 at M = 2 and M = K, N/(N+1) for 3 <= M <= K-1.
Rational capacity_model_ii(int n_servers, int n_messages, int side_size);

Rational capacity(const Params& params);

struct AuditOptions {
  std::uint64_t cap = 10'000'000;      // weighted outcomes in exhaustive mode
  bool sampled = false;                // statistical fallback
  std::uint64_t samples = 100'000;
  double sampled_threshold = 0.01;     // total-variation pass bound
  std::uint64_t seed = 1;
  int rate_trials = 3;
  // Negative control: swap the solved selection distribution for a uniform
  // one over the same profiles; the audit must then flag a violation.
  bool break_distribution = false;
};

/// Exact conditional distribution over canonical single-server query views
/// for one (W, S, C) hypothesis. Probabilities sum to 1.
using ViewDist = std::map<std::string, Rational>;

struct ViewPosterior {
  std::string view;
  Rational mass;                      // total reaching probability (per hypothesis scale)
  std::vector<Rational> posterior;    // index 0 -> message 1
};

struct WitnessEntry {
  int demand = 0;
  std::vector<int> support;
  std::vector<std::uint32_t> coeffs;
  int alt_demand = 0;
  bool found = false;
  std::vector<int> alt_support;
  std::vector<std::uint32_t> alt_coeffs;
};

struct AuditReport {
  Params params;
  std::string mode;      // "exhaustive" | "sampled"
  std::string status;    // "ok" | "violation" | "downgraded" | "downgraded-violation"
  bool pass = false;

  // Exhaustive results.
  Rational max_deviation;              // posterior distance from uniform 1/K
  Rational inner_request_deviation;    // inner layer: TV across targets
  std::string inner_mode;              // "exhaustive" | "sampled" | "none"
  double inner_sampled_tv = 0.0;       // set when the inner factor was sampled
  std::vector<ViewPosterior> posteriors;  // identical for every server; see note
  bool per_server_identical = true;

  // Sampled results.
  double sampled_tv = 0.0;

  Rational measured_rate;
  Rational capacity_value;

  std::vector<WitnessEntry> witnesses;
  bool witnesses_complete = true;
};

/// Canonical key of a revealed plan: per-group (id, coeff) pairs sorted by
/// id, groups sorted, so the shuffles drop out. The audit maps and the
/// sampled views both use this form.
std::string canonical_plan_view(const std::vector<std::vector<int>>& groups,
                                const std::vector<std::vector<std::uint32_t>>& coeffs);

/// Exact per-hypothesis view distribution (the revealed plan or direct
/// request as one server sees it). The inner symbol-request factor is
/// target-independent and is checked separately by
/// inner_request_target_independence(); together they cover the full query.
ViewDist hypothesis_view_dist(const Params& params, const SelectionDistribution* dist,
                              int demand, const std::vector<int>& support,
                              const std::vector<std::uint32_t>& coeffs,
                              std::uint64_t cap);

/// Max total-variation distance, across targets and servers, between the
/// emitted per-server symbol-request distributions of the inner retrieval
/// layer, enumerated exactly over all position permutations.
Rational inner_request_target_independence(int n_servers, int n_supers,
                                           std::uint64_t cap);

/// Statistical stand-in for the exhaustive inner check when (N^r!)^r is out
/// of reach: bias-corrected total variation between per-target distributions
/// of the position-reuse pattern of emitted request lists.
double sampled_inner_pattern_tv(int n_servers, int n_supers, std::uint64_t samples,
                                std::uint64_t seed);

/// Exhaustive (or sampled) privacy audit: posterior over the demand index
/// given each reachable per-server view, exact when within cap.
AuditReport posterior_audit(const Params& params, const AuditOptions& options = {});

/// Searches for (S', C') making the alternative demand's per-server view
/// distribution identical to the given hypothesis's, as any private
/// server-symmetric scheme must admit.
WitnessEntry witness_search(const Params& params, int demand,
                                  const std::vector<int>& support,
                                  const std::vector<std::uint32_t>& coeffs,
                                  int alt_demand, std::uint64_t cap = 10'000'000);

/// Measured rate ell / D over `trials` runs on fresh instances; the download
/// count must be identical across trials (the protocols are fixed-length).
Rational measure_rate(const Params& params, int trials, const Rng& rng);

}  // namespace pircsi
