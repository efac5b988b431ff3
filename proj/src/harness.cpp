#include "pircsi/harness.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace pircsi {

namespace {

struct TrialResult {
  bool recovered_ok = false;
  int downloaded = 0;
  std::string transcript;
};

TrialResult run_one_trial(const Params& params, std::uint64_t seed, int trial) {
  Rng trial_rng = Rng(seed).fork(static_cast<std::uint64_t>(trial));
  Rng inst_rng = trial_rng.fork(kRngInstance);
  Database db = sample_database(params, inst_rng);
  auto [demand, side_info] = sample_instance(params, db, inst_rng);
  RetrievalSession session = retrieve(params, demand, side_info, db, trial_rng);

  TrialResult result;
  result.recovered_ok = session.recovered == db.message(demand.index);
  result.downloaded = session.downloaded_symbols;
  Transcript t{params, seed, trial, std::move(db), std::move(session)};
  result.transcript = transcript_to_string(t);
  return result;
}

}  // namespace

std::string write_text_file(const std::string& dir, const std::string& name,
                            const std::string& body) {
  std::filesystem::create_directories(dir);
  std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  return path.string();
}

RunSummary run_trials(const Params& params, const RunOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");

  std::vector<TrialResult> results(static_cast<std::size_t>(options.trials));
  if (options.parallel && options.trials > 1) {
    const int workers = std::max(1, options.workers);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          int t = next.fetch_add(1);
          if (t >= options.trials) return;
          results[static_cast<std::size_t>(t)] = run_one_trial(params, options.seed, t);
        }
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (int t = 0; t < options.trials; ++t)
      results[static_cast<std::size_t>(t)] = run_one_trial(params, options.seed, t);
  }

  RunSummary summary;
  summary.params = params;
  summary.seed = options.seed;
  summary.trials = options.trials;
  summary.capacity_value = capacity(params);

  for (int t = 0; t < options.trials; ++t) {
    const TrialResult& r = results[static_cast<std::size_t>(t)];
    std::string path;
    if (!options.out_dir.empty()) {
      path = write_text_file(options.out_dir,
                             "transcript-" + std::to_string(options.seed) + "-" +
                                 std::to_string(t) + ".json",
                             r.transcript);
      summary.transcript_paths.push_back(path);
    }
    summary.transcripts.push_back(r.transcript);
    if (t == 0) summary.downloaded_per_trial = r.downloaded;
    if (r.downloaded != summary.downloaded_per_trial)
      throw std::runtime_error("run_trials: download count varied across trials");
    if (r.recovered_ok) {
      ++summary.recovered_ok;
    } else {
      if (path.empty() && !options.out_dir.empty()) path = "(unwritten)";
      if (options.out_dir.empty()) {
        path = write_text_file(".", "transcript-failure-" + std::to_string(options.seed) +
                                        "-" + std::to_string(t) + ".json",
                               r.transcript);
      }
      throw RecoveryFailure("recovery mismatch at trial " + std::to_string(t) +
                                "; diagnostic transcript: " + path,
                            path);
    }
  }

  summary.measured_rate = Rational(params.msg_len, summary.downloaded_per_trial);
  summary.match = summary.measured_rate == summary.capacity_value;
  return summary;
}

std::string summary_to_string(const RunSummary& summary) {
  std::ostringstream os;
  os << summary.params.config_tag() << " seed=" << summary.seed
     << " trials=" << summary.trials << " recovered=" << summary.recovered_ok << "/"
     << summary.trials << " downloaded=" << summary.downloaded_per_trial
     << " rate=" << summary.measured_rate.str()
     << " capacity=" << summary.capacity_value.str()
     << " match=" << (summary.match ? "true" : "false") << "\n";
  return os.str();
}

std::vector<BenchCell> bench_grid(const std::vector<int>& n_values,
                                  const std::vector<int>& k_values,
                                  const std::vector<Model>& models) {
  std::vector<BenchCell> grid;
  for (Model model : models) {
    for (int n : n_values) {
      for (int k : k_values) {
        if (model == Model::I) {
          for (int m = 0; m <= k - 1; ++m) grid.push_back({model, n, k, m});
        } else {
          for (int m = 2; m <= k; ++m) grid.push_back({model, n, k, m});
        }
      }
    }
  }
  return grid;
}

std::string bench_csv(const std::vector<BenchCell>& grid, std::uint32_t q,
                      std::uint64_t seed, int trials) {
  std::ostringstream os;
  os << "N,K,M,model,measured_rate,capacity,match\n";
  for (const BenchCell& cell : grid) {
    Params params = Params::make(cell.model, cell.n_servers, cell.n_messages,
                                 cell.side_size, q);
    RunOptions options;
    options.seed = seed;
    options.trials = trials;
    RunSummary summary = run_trials(params, options);
    os << cell.n_servers << ',' << cell.n_messages << ',' << cell.side_size << ','
       << model_name(cell.model) << ',' << summary.measured_rate.str() << ','
       << summary.capacity_value.str() << ','
       << (summary.match ? "true" : "false") << '\n';
  }
  return os.str();
}

Json audit_report_to_json(const AuditReport& report) {
  Json j;
  j["format"] = "pircsi-audit-v1";
  j["params"] = params_to_json(report.params);
  j["mode"] = report.mode;
  j["status"] = report.status;
  j["pass"] = report.pass;
  j["max_deviation"] = report.max_deviation.str();
  j["inner_request_deviation"] = report.inner_request_deviation.str();
  j["inner_mode"] = report.inner_mode;
  j["inner_sampled_tv"] = report.inner_sampled_tv;
  j["sampled_tv"] = report.sampled_tv;
  j["measured_rate"] = report.measured_rate.str();
  j["capacity"] = report.capacity_value.str();
  j["per_server_identical"] = report.per_server_identical;

  Json posteriors = Json::array();
  for (const auto& vp : report.posteriors) {
    Json entry;
    entry["view"] = vp.view;
    entry["mass"] = vp.mass.str();
    Json post = Json::array();
    for (const auto& p : vp.posterior) post.push_back(p.str());
    entry["posterior"] = std::move(post);
    posteriors.push_back(std::move(entry));
  }
  j["posteriors"] = std::move(posteriors);

  Json witness_arr = Json::array();
  for (const auto& e : report.witnesses) {
    Json entry;
    entry["demand"] = e.demand;
    entry["support"] = e.support;
    entry["coeffs"] = e.coeffs;
    entry["alt_demand"] = e.alt_demand;
    entry["found"] = e.found;
    if (e.found) {
      entry["alt_support"] = e.alt_support;
      entry["alt_coeffs"] = e.alt_coeffs;
    }
    witness_arr.push_back(std::move(entry));
  }
  j["witnesses"] = Json{{"complete", report.witnesses_complete}, {"entries", std::move(witness_arr)}};
  return j;
}

}  // namespace pircsi
