#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pircsi/audit.hpp"
#include "pircsi/transcript.hpp"

namespace pircsi {

// Process exit codes shared by the CLI and the harness.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRecovery = 2;
inline constexpr int kExitPrivacy = 3;
inline constexpr int kExitCapExceeded = 4;

/// Raised when a trial's recovered message differs from the demand; carries
/// the diagnostic transcript (and its path when files are being written).
struct RecoveryFailure : std::runtime_error {
  explicit RecoveryFailure(const std::string& what, std::string path)
      : std::runtime_error(what), transcript_path(std::move(path)) {}
  std::string transcript_path;
};

struct RunOptions {
  std::uint64_t seed = 1;
  int trials = 1;
  std::string out_dir;       // empty: keep transcripts in memory only
  bool parallel = false;
  int workers = 4;
};

struct RunSummary {
  Params params;
  std::uint64_t seed = 0;
  int trials = 0;
  int recovered_ok = 0;
  int downloaded_per_trial = 0;
  Rational measured_rate;
  Rational capacity_value;
  bool match = false;
  std::vector<std::string> transcript_paths;
  std::vector<std::string> transcripts;  // serialized bodies, one per trial
};

/// Runs the matching protocol `trials` times on fresh sampled instances.
/// Deterministic in (params, seed): per-trial generators are forked from the
/// seed by trial index, so --parallel execution is order-independent.
RunSummary run_trials(const Params& params, const RunOptions& options);

std::string summary_to_string(const RunSummary& summary);

struct BenchCell {
  Model model;
  int n_servers;
  int n_messages;
  int side_size;
};

/// Every valid (model, N, K, M) combination over the given axes.
std::vector<BenchCell> bench_grid(const std::vector<int>& n_values,
                                  const std::vector<int>& k_values,
                                  const std::vector<Model>& models);

/// One CSV row per cell: N,K,M,model,measured_rate,capacity,match.
std::string bench_csv(const std::vector<BenchCell>& grid, std::uint32_t q,
                      std::uint64_t seed, int trials);

Json audit_report_to_json(const AuditReport& report);

std::string write_text_file(const std::string& dir, const std::string& name,
                            const std::string& body);

}  // namespace pircsi
