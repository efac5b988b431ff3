#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pircsi/harness.hpp"

namespace {

using namespace pircsi;

Model parse_model(const std::string& s) {
  if (s == "I" || s == "i" || s == "1") return Model::I;
  if (s == "II" || s == "ii" || s == "2") return Model::II;
  throw CLI::ValidationError("--model", "expected I or II");
}

std::string format_capacity(const Rational& c) {
  if (c.is_integer()) return c.str();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", c.to_double());
  return c.str() + " ≈ " + buf;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::string tok;
  std::istringstream is(csv);
  while (std::getline(is, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-server private retrieval with coded side information: "
               "simulator, privacy auditor and rate meter"};
  app.require_subcommand(1);

  std::string model_str = "I";
  int N = 2, K = 3, M = 1;
  std::uint32_t q = 3;
  std::uint64_t seed = 1;
  int trials = 1;
  std::string out_dir;

  auto* cap_cmd = app.add_subcommand("capacity", "print the exact capacity value");
  cap_cmd->add_option("--model", model_str, "I or II")->required();
  cap_cmd->add_option("-N", N, "number of servers")->required();
  cap_cmd->add_option("-K", K, "number of messages")->required();
  cap_cmd->add_option("-M", M, "side information size")->required();

  auto* run_cmd = app.add_subcommand("run", "run retrievals and write transcripts");
  run_cmd->add_option("--model", model_str, "I or II")->required();
  run_cmd->add_option("-N", N)->required();
  run_cmd->add_option("-K", K)->required();
  run_cmd->add_option("-M", M)->required();
  run_cmd->add_option("-q", q, "prime field order");
  run_cmd->add_option("--seed", seed);
  run_cmd->add_option("--trials", trials);
  run_cmd->add_option("--out", out_dir, "directory for transcript files");
  bool parallel = false;
  int workers = 4;
  run_cmd->add_flag("--parallel", parallel, "shard trials across worker threads");
  run_cmd->add_option("--workers", workers);

  auto* audit_cmd = app.add_subcommand("audit", "posterior-uniformity privacy audit");
  audit_cmd->add_option("--model", model_str, "I or II")->required();
  audit_cmd->add_option("-N", N)->required();
  audit_cmd->add_option("-K", K)->required();
  audit_cmd->add_option("-M", M)->required();
  audit_cmd->add_option("-q", q);
  audit_cmd->add_option("--seed", seed);
  bool exhaustive = false, sampled = false, break_dist = false;
  std::uint64_t cap = 10'000'000, samples = 100'000;
  audit_cmd->add_flag("--exhaustive", exhaustive, "exact enumeration (default)");
  audit_cmd->add_flag("--sampled", sampled, "statistical fallback audit");
  audit_cmd->add_option("--cap", cap, "max enumerated outcomes");
  audit_cmd->add_option("--samples", samples, "samples per demand in sampled mode");
  audit_cmd->add_flag("--break-distribution", break_dist,
                      "negative control: uniform selection profiles");
  audit_cmd->add_option("--out", out_dir, "directory for the audit report");

  auto* bench_cmd = app.add_subcommand("bench", "rate-vs-capacity sweep CSV");
  std::string n_csv = "1,2,3", k_csv = "2,3,4,5,6", models_csv = "I,II";
  std::string csv_path;
  bench_cmd->add_option("--N-values", n_csv, "comma list of server counts");
  bench_cmd->add_option("--K-values", k_csv, "comma list of message counts");
  bench_cmd->add_option("--models", models_csv, "comma list from {I,II}");
  bench_cmd->add_option("-q", q);
  bench_cmd->add_option("--seed", seed);
  bench_cmd->add_option("--trials", trials);
  bench_cmd->add_option("--out", csv_path, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cap_cmd->parsed()) {
      Model model = parse_model(model_str);
      Rational c = model == Model::I ? capacity_model_i(N, K, M)
                                     : capacity_model_ii(N, K, M);
      std::cout << format_capacity(c) << "\n";
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      if (trials < 1) {
        std::cerr << "usage error: --trials must be >= 1\n";
        return kExitUsage;
      }
      Params params = Params::make(parse_model(model_str), N, K, M, q);
      RunOptions options;
      options.seed = seed;
      options.trials = trials;
      options.out_dir = out_dir;
      options.parallel = parallel;
      options.workers = workers;
      try {
        RunSummary summary = run_trials(params, options);
        std::cout << summary_to_string(summary);
        return kExitOk;
      } catch (const RecoveryFailure& e) {
        std::cerr << "recoverability failure: " << e.what() << "\n";
        return kExitRecovery;
      }
    }

    if (audit_cmd->parsed()) {
      Params params = Params::make(parse_model(model_str), N, K, M, q);
      AuditOptions options;
      options.cap = cap;
      options.sampled = sampled && !exhaustive;
      options.samples = samples;
      options.seed = seed;
      options.break_distribution = break_dist;
      AuditReport report;
      try {
        report = posterior_audit(params, options);
      } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n"
                  << "hint: rerun with --sampled\n";
        return kExitCapExceeded;
      }
      Json j = audit_report_to_json(report);
      if (!out_dir.empty()) {
        std::string path = write_text_file(
            out_dir, "audit-" + params.config_tag() + ".json", j.dump(2) + "\n");
        std::cout << "report: " << path << "\n";
      }
      std::cout << "mode=" << report.mode << " status=" << report.status
                << " max_deviation=" << report.max_deviation.str()
                << " inner_request_deviation=" << report.inner_request_deviation.str();
      if (report.mode == "sampled") std::cout << " sampled_tv=" << report.sampled_tv;
      std::cout << " rate=" << report.measured_rate.str()
                << " capacity=" << report.capacity_value.str() << "\n";
      return report.pass ? kExitOk : kExitPrivacy;
    }

    if (bench_cmd->parsed()) {
      std::vector<Model> models;
      {
        std::istringstream is(models_csv);
        std::string tok;
        while (std::getline(is, tok, ','))
          if (!tok.empty()) models.push_back(parse_model(tok));
      }
      auto grid = bench_grid(parse_int_list(n_csv), parse_int_list(k_csv), models);
      std::string csv = bench_csv(grid, q, seed, std::max(1, trials));
      if (csv_path.empty()) {
        std::cout << csv;
      } else {
        auto dir = std::filesystem::path(csv_path).parent_path().string();
        auto name = std::filesystem::path(csv_path).filename().string();
        write_text_file(dir.empty() ? "." : dir, name, csv);
        std::cout << "wrote " << csv_path << "\n";
      }
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
