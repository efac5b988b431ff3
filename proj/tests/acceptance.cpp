// Acceptance suite: one checked criterion per function, one PASS/FAIL line
// each, nonzero exit iff any checked criterion fails. An optional argv[1]
// selects a single criterion (used by ctest to report them separately).

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pircsi/harness.hpp"

using namespace pircsi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

void require(Outcome& out, bool cond, const std::string& what) {
  if (!cond) {
    out.pass = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += what;
  }
}

Outcome criterion1_capacity_oracles() {
  Outcome out;
  require(out, capacity_model_i(2, 9, 3) == Rational(4, 7), "C_I(2,9,3) != 4/7");
  require(out, capacity_model_ii(2, 10, 4) == Rational(2, 3), "C_II(2,10,4) != 2/3");
  for (int n : {1, 2, 5}) {
    for (int k : {3, 6, 9}) {
      require(out, capacity_model_ii(n, k, 2) == Rational(1), "C_II(N,K,2) != 1");
      require(out, capacity_model_ii(n, k, k) == Rational(1), "C_II(N,K,K) != 1");
    }
  }
  return out;
}

Outcome criterion2_example1() {
  Outcome out;
  Params params = Params::make(Model::I, 2, 9, 3, 3);
  require(out, params.msg_len == 8, "message length != 8");
  RunOptions options;
  options.seed = 20250810;
  options.trials = 1000;
  RunSummary summary = run_trials(params, options);
  require(out, summary.recovered_ok == 1000, "recovery failures");
  require(out, summary.downloaded_per_trial == 14, "downloaded != 14 symbols");
  require(out, summary.measured_rate == Rational(4, 7), "rate != 4/7");

  SelectionDistribution d = solve_rp_distribution(9, 3);
  auto expect = [&](int w, int s, int t, long num) {
    require(out, d.prob_of(SelectionProfile{w, s, t}) == Rational(num, 171),
            "p(" + std::to_string(w) + "," + std::to_string(s) + "," +
                std::to_string(t) + ") != " + std::to_string(num) + "/171");
  };
  expect(0, 3, 0, 14);
  expect(0, 2, 1, 60);
  expect(0, 1, 2, 36);
  expect(0, 0, 3, 4);
  expect(1, 2, 0, 21);
  expect(1, 1, 1, 30);
  expect(1, 0, 2, 6);
  require(out, d.entries.size() == 7, "table size != 7");
  return out;
}

Outcome criterion3_examples2_3() {
  Outcome out;
  for (int k : {10, 5}) {
    Params params = Params::make(Model::II, 2, k, 4, 3);
    require(out, params.msg_len == 4, "message length != 4");
    RunOptions options;
    options.seed = 7;
    options.trials = 250;
    RunSummary summary = run_trials(params, options);
    require(out, summary.recovered_ok == 250, "recovery failures at K=" + std::to_string(k));
    require(out, summary.downloaded_per_trial == 6, "downloaded != 6 at K=" + std::to_string(k));
    require(out, summary.measured_rate == Rational(2, 3), "rate != 2/3");

    SelectionDistribution d = solve_mrp_distribution(k, 4);
    require(out, d.entries.size() == 2, "profile count != 2");
    require(out, d.entries[0].second == Rational(2, 5), "p(0,3) != 2/5");
    require(out, d.entries[1].second == Rational(3, 5), "p(1,2) != 3/5");
  }
  return out;
}

Outcome criterion4_rate_sweep() {
  Outcome out;
  for (Model model : {Model::I, Model::II}) {
    for (int n = 1; n <= 3; ++n) {
      for (int k = 2; k <= 6; ++k) {
        const int m_lo = model == Model::I ? 0 : 2;
        const int m_hi = model == Model::I ? k - 1 : k;
        for (int m = m_lo; m <= m_hi; ++m) {
          Params params = Params::make(model, n, k, m, 3);
          Rational rate = measure_rate(params, 2, Rng(1));
          if (rate != capacity(params)) {
            require(out, false,
                    "rate != capacity at " + params.config_tag() + " (" + rate.str() +
                        " vs " + capacity(params).str() + ")");
          }
        }
      }
    }
  }
  return out;
}

std::vector<Params> audited_configs() {
  return {Params::make(Model::I, 2, 3, 1, 2), Params::make(Model::II, 2, 3, 2, 3),
          Params::make(Model::II, 2, 4, 3, 3), Params::make(Model::II, 2, 3, 3, 3)};
}

Outcome criterion5_privacy_audit() {
  Outcome out;
  for (const Params& params : audited_configs()) {
    AuditReport report = posterior_audit(params);
    require(out, report.max_deviation == Rational(0),
            "posterior deviation nonzero at " + params.config_tag());
    require(out, report.inner_request_deviation == Rational(0),
            "inner request deviation nonzero at " + params.config_tag());
  }
  AuditOptions negative;
  negative.break_distribution = true;
  AuditReport broken = posterior_audit(Params::make(Model::I, 2, 3, 1, 2), negative);
  require(out, broken.max_deviation > Rational(0), "negative control not flagged");
  return out;
}

Outcome criterion6_witness_completeness() {
  Outcome out;
  for (const Params& params : audited_configs()) {
    AuditReport report = posterior_audit(params);
    int missing = 0, total = 0;
    for (const auto& entry : report.witnesses) {
      ++total;
      if (!entry.found) ++missing;
    }
    std::ostringstream os;
    os << params.config_tag() << ": " << (total - missing) << "/" << total
       << " (W,S,C,W') tuples have an exact witness";
    require(out, missing == 0, os.str());
  }
  if (!out.pass)
    out.detail +=
        "; exact per-(S,C) view-distribution matches are unattainable for these "
        "protocols: privacy holds through mixtures over (S,C), as the zero "
        "posterior deviation certifies (see notes in the audit report)";
  return out;
}

Outcome criterion7_inner_layer_counts() {
  Outcome out;
  Rng rng(99);
  for (int n_servers : {2, 3}) {
    for (int r : {1, 2, 3}) {
      long long len = 1;
      for (int i = 0; i < r; ++i) len *= n_servers;
      std::uint64_t per_server =
          (static_cast<std::uint64_t>(len) - 1) / static_cast<std::uint64_t>(n_servers - 1);
      if (r == 1) per_server = 1;
      require(out, requests_per_server(n_servers, r) == per_server,
              "request count formula mismatch");
      QueryBundle b = plan_queries(n_servers, r, 0, rng);
      for (const auto& reqs : b.per_server) {
        require(out, reqs.size() == per_server, "per-server count");
        std::map<std::vector<int>, int> replicas;
        for (const auto& req : reqs) {
          std::vector<int> subset;
          for (const auto& [s, p] : req.terms) subset.push_back(s);
          ++replicas[subset];
        }
        for (const auto& [subset, count] : replicas) {
          int want = 1;
          for (std::size_t i = 0; i + 1 < subset.size(); ++i) want *= n_servers - 1;
          require(out, count == want, "replica count per subset");
        }
      }
    }
  }
  // reconstruction vs direct evaluation on 1000 random databases
  int reconstructions = 0;
  while (reconstructions < 1000) {
    for (int n_servers : {2, 3}) {
      for (int r : {1, 2, 3}) {
        int len = 1;
        for (int i = 0; i < r; ++i) len *= n_servers;
        SuperMessageSet supers;
        supers.q = 3;
        supers.length = len;
        for (int i = 0; i < r; ++i) {
          SymbolVector v(PrimeOrder(3), static_cast<std::size_t>(len));
          for (auto& s : v.symbols) s = static_cast<std::uint32_t>(rng.uniform_below(3));
          supers.supers.push_back(std::move(v));
        }
        int target = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(r)));
        QueryBundle b = plan_queries(n_servers, r, target, rng);
        AnswerBundle a;
        a.q = 3;
        for (const auto& reqs : b.per_server) a.per_server.push_back(answer(reqs, supers));
        if (reconstruct(b, a, target) != supers.supers[static_cast<std::size_t>(target)]) {
          require(out, false, "reconstruction mismatch");
          return out;
        }
        ++reconstructions;
      }
    }
  }
  return out;
}

Outcome criterion8_determinism() {
  Outcome out;
  for (Model model : {Model::I, Model::II}) {
    for (int n = 1; n <= 3; ++n) {
      for (int k = 2; k <= 6; ++k) {
        const int m_lo = model == Model::I ? 0 : 2;
        const int m_hi = model == Model::I ? k - 1 : k;
        for (int m = m_lo; m <= m_hi; ++m) {
          Params params = Params::make(model, n, k, m, 3);
          RunOptions options;
          options.seed = 1234;
          options.trials = 2;
          RunSummary a = run_trials(params, options);
          RunSummary b = run_trials(params, options);
          bool same = summary_to_string(a) == summary_to_string(b) &&
                      a.transcripts == b.transcripts;
          require(out, same, "nondeterminism at " + params.config_tag());
        }
      }
    }
  }
  return out;
}

struct Criterion {
  int id;
  const char* label;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {1, "capacity oracle equality", 1.0, criterion1_capacity_oracles},
      {2, "Model I worked-example reproduction (N=2,K=9,M=3,q=3)", 5.0, criterion2_example1},
      {3, "Model II worked-example reproduction (K=10 and K=5)", 5.0, criterion3_examples2_3},
      {4, "rate equals capacity across the sweep grid", 120.0, criterion4_rate_sweep},
      {5, "exhaustive privacy audit, deviation exactly zero", 600.0, criterion5_privacy_audit},
      {6, "indistinguishability witness completeness", 600.0, criterion6_witness_completeness},
      {7, "inner layer structural counts and reconstruction", 30.0, criterion7_inner_layer_counts},
      {8, "byte-identical reruns across the sweep grid", 600.0, criterion8_determinism},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double elapsed =
        std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - start)
            .count();
    if (elapsed > c.budget_seconds) {
      out.pass = false;
      out.detail += (out.detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("criterion %d [%s] %s (%.2fs%s)\n", c.id, out.pass ? "PASS" : "FAIL",
                c.label, elapsed, out.detail.empty() ? "" : ("; " + out.detail).c_str());
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
