#include "pircsi/transcript.hpp"

#include <functional>
#include <set>
#include <stdexcept>

namespace pircsi {

namespace {

Json requests_to_json(const std::vector<SymbolRequest>& reqs) {
  Json arr = Json::array();
  for (const auto& req : reqs) {
    Json terms = Json::array();
    for (const auto& [super, pos] : req.terms) terms.push_back(Json::array({super, pos}));
    arr.push_back(std::move(terms));
  }
  return arr;
}

std::vector<SymbolRequest> requests_from_json(const Json& arr) {
  std::vector<SymbolRequest> reqs;
  for (const auto& terms : arr) {
    SymbolRequest req;
    for (const auto& t : terms)
      req.terms.emplace_back(t.at(0).get<int>(), t.at(1).get<int>());
    reqs.push_back(std::move(req));
  }
  return reqs;
}

Json direct_to_json(const DirectRequest& d) {
  Json j;
  if (d.kind == DirectRequest::Kind::Message) {
    j["kind"] = "message";
    j["index"] = d.index;
  } else {
    j["kind"] = "combination";
    j["coeffs"] = d.combo;
  }
  return j;
}

DirectRequest direct_from_json(const Json& j) {
  DirectRequest d;
  if (j.at("kind") == "message") {
    d.kind = DirectRequest::Kind::Message;
    d.index = j.at("index").get<int>();
  } else {
    d.kind = DirectRequest::Kind::Combination;
    d.combo = j.at("coeffs").get<std::vector<std::uint32_t>>();
  }
  return d;
}

}  // namespace

Json params_to_json(const Params& params) {
  Json j;
  j["model"] = model_name(params.model);
  j["n_servers"] = params.n_servers;
  j["n_messages"] = params.n_messages;
  j["side_size"] = params.side_size;
  j["q"] = params.q.q;
  j["msg_len"] = params.msg_len;
  return j;
}

Params params_from_json(const Json& j) {
  Model model = j.at("model") == "I" ? Model::I : Model::II;
  return Params::make(model, j.at("n_servers").get<int>(), j.at("n_messages").get<int>(),
                      j.at("side_size").get<int>(), j.at("q").get<std::uint32_t>());
}

Json transcript_to_json(const Transcript& t) {
  const RetrievalSession& s = t.session;
  Json j;
  j["format"] = "pircsi-transcript-v1";
  j["params"] = params_to_json(t.params);
  j["seed"] = t.seed;
  j["trial"] = t.trial;

  // Logical step counter; wall-clock stamps would break byte-for-byte replay.
  Json timeline = Json::array();
  int step = 0;
  for (const char* event : {"instance", "plan", "queries", "answers", "recovered"})
    timeline.push_back(Json{{"step", step++}, {"event", event}});
  j["timestamps"] = std::move(timeline);

  Json db = Json::array();
  for (const auto& msg : t.db.messages) db.push_back(msg.symbols);
  j["database"] = std::move(db);

  Json visible;
  if (s.plan) {
    Json plan;
    plan["groups"] = s.plan->groups;
    plan["coeffs"] = s.plan->coeffs;
    visible["plan"] = std::move(plan);
  }
  for (std::size_t n = 0; n < s.queries.size(); ++n) {
    if (s.queries[n].direct) {
      Json d = direct_to_json(*s.queries[n].direct);
      d["server"] = static_cast<int>(n);
      visible["direct"] = std::move(d);
    }
  }
  Json queries = Json::array();
  for (const auto& sq : s.queries) queries.push_back(requests_to_json(sq.requests));
  visible["queries"] = std::move(queries);
  visible["answers"] = s.answers;
  j["server_visible"] = std::move(visible);

  Json secret;
  secret["demand"] = s.demand.index;
  Json si;
  si["support"] = s.side_info.support;
  si["coeffs"] = s.side_info.coeffs;
  si["combo"] = s.side_info.combo.symbols;
  secret["side_info"] = std::move(si);
  if (s.plan) {
    secret["target_pos"] = s.plan->target_pos;
    secret["target_coeff"] = s.plan->target_coeff;
  }
  if (s.bundle) secret["sunjafar_perms"] = s.bundle->perms;
  if (s.chosen_server) secret["chosen_server"] = *s.chosen_server;
  j["user_secret"] = std::move(secret);

  j["recovered"] = s.recovered.symbols;
  j["downloaded_symbols"] = s.downloaded_symbols;
  return j;
}

std::string transcript_to_string(const Transcript& t) {
  return transcript_to_json(t).dump(2) + "\n";
}

bool replay_matches(const Json& j) {
  Params params = params_from_json(j.at("params"));
  Database db;
  db.q = params.q.q;
  db.msg_len = params.msg_len;
  for (const auto& msg : j.at("database"))
    db.messages.emplace_back(params.q, msg.get<std::vector<std::uint32_t>>());
  if (static_cast<int>(db.messages.size()) != params.n_messages) return false;

  const Json& visible = j.at("server_visible");
  std::vector<ServerQuery> queries(static_cast<std::size_t>(params.n_servers));
  if (visible.contains("plan")) {
    PlanView view;
    view.groups = visible["plan"].at("groups").get<std::vector<std::vector<int>>>();
    view.coeffs =
        visible["plan"].at("coeffs").get<std::vector<std::vector<std::uint32_t>>>();
    for (auto& q : queries) q.plan = view;
  }
  const Json& req_lists = visible.at("queries");
  for (int n = 0; n < params.n_servers; ++n)
    queries[static_cast<std::size_t>(n)].requests =
        requests_from_json(req_lists.at(static_cast<std::size_t>(n)));
  if (visible.contains("direct")) {
    int server = visible["direct"].at("server").get<int>();
    queries.at(static_cast<std::size_t>(server)).direct =
        direct_from_json(visible["direct"]);
  }

  const Json& recorded = visible.at("answers");
  for (int n = 0; n < params.n_servers; ++n) {
    std::vector<std::uint32_t> fresh =
        server_answer(queries[static_cast<std::size_t>(n)], db);
    if (fresh != recorded.at(static_cast<std::size_t>(n)).get<std::vector<std::uint32_t>>())
      return false;
  }
  return true;
}

std::vector<std::string> hygiene_violations(const Json& transcript) {
  static const std::set<std::string> forbidden = {
      "demand",      "side_info",     "support",       "combo",
      "target_pos",  "target_coeff",  "sunjafar_perms", "chosen_server",
      "recovered",   "user_secret"};
  std::vector<std::string> hits;
  std::function<void(const Json&, std::string)> walk = [&](const Json& node,
                                                           std::string path) {
    if (node.is_object()) {
      for (const auto& [key, value] : node.items()) {
        if (forbidden.count(key)) hits.push_back(path + "/" + key);
        walk(value, path + "/" + key);
      }
    } else if (node.is_array()) {
      for (const auto& value : node) walk(value, path + "[]");
    }
  };
  if (transcript.contains("server_visible"))
    walk(transcript.at("server_visible"), "server_visible");
  return hits;
}

}  // namespace pircsi
