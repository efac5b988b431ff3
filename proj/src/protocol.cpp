#include "pircsi/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace pircsi {

namespace {

SymbolVector direct_answer(const DirectRequest& req, const Database& db) {
  PrimeOrder order(db.q);
  if (req.kind == DirectRequest::Kind::Message) {
    if (req.index < 1 || req.index > static_cast<int>(db.messages.size()))
      throw std::invalid_argument("server_answer: message id out of range");
    return db.message(req.index);
  }
  if (req.combo.size() != db.messages.size())
    throw std::invalid_argument("server_answer: combination length mismatch");
  SymbolVector acc(order, static_cast<std::size_t>(db.msg_len));
  for (std::size_t i = 0; i < req.combo.size(); ++i) {
    if (req.combo[i] == 0 || req.combo[i] >= db.q)
      throw std::invalid_argument("server_answer: combination coefficient not in F_q^x");
    acc = vec_axpy(FieldElement(req.combo[i], order), db.messages[i], acc);
  }
  return acc;
}

PlanView view_of(const PartitionPlan& plan) {
  return PlanView{plan.groups, plan.coeffs};
}

SymbolVector recover_from_target(const PartitionPlan& plan, const SymbolVector& target_super,
                                 const SideInfo& side_info, PrimeOrder q) {
  // supers[target] = a * X_W + Y with a = target_coeff, so
  // X_W = a^{-1} (supers[target] - Y).
  FieldElement a(plan.target_coeff, q);
  return vec_scale(fe_inv(a), vec_sub(target_super, side_info.combo));
}

RetrievalSession run_partition_path(const Params& params, const Demand& demand,
                                    const SideInfo& side_info, const Database& db,
                                    const Rng& rng, PartitionPlan plan) {
  RetrievalSession s;
  s.params = params;
  s.demand = demand;
  s.side_info = side_info;

  Rng perm_rng = rng.fork(kRngPerms);
  QueryBundle bundle = plan_queries(params.n_servers, plan.group_count(),
                                    plan.target_pos, perm_rng);

  s.queries.resize(static_cast<std::size_t>(params.n_servers));
  s.answers.resize(static_cast<std::size_t>(params.n_servers));
  AnswerBundle answers;
  answers.q = params.q.q;
  for (int n = 0; n < params.n_servers; ++n) {
    ServerQuery& query = s.queries[static_cast<std::size_t>(n)];
    query.plan = view_of(plan);
    query.requests = bundle.per_server[static_cast<std::size_t>(n)];
    s.answers[static_cast<std::size_t>(n)] = server_answer(query, db);
    answers.per_server.push_back(s.answers[static_cast<std::size_t>(n)]);
    s.downloaded_symbols += static_cast<int>(s.answers[static_cast<std::size_t>(n)].size());
  }

  SymbolVector target_super = reconstruct(bundle, answers, plan.target_pos);
  s.recovered = recover_from_target(plan, target_super, side_info, params.q);
  s.plan = std::move(plan);
  s.bundle = std::move(bundle);
  return s;
}

}  // namespace

std::vector<std::uint32_t> server_answer(const ServerQuery& query, const Database& db) {
  if (query.direct) {
    if (query.plan || !query.requests.empty())
      throw std::invalid_argument("server_answer: mixed direct and plan query");
    return direct_answer(*query.direct, db).symbols;
  }
  if (query.plan) {
    SuperMessageSet supers = build_supers(query.plan->groups, query.plan->coeffs, db);
    return answer(query.requests, supers);
  }
  if (!query.requests.empty())
    throw std::invalid_argument("server_answer: symbol requests without a plan");
  return {};
}

RetrievalSession retrieve_model_i(const Params& params, const Demand& demand,
                                  const SideInfo& side_info, const Database& db,
                                  const Rng& rng) {
  if (params.model != Model::I)
    throw std::invalid_argument("retrieve_model_i: params are not Model I");
  if (side_info.contains(demand.index))
    throw std::invalid_argument("retrieve_model_i: demand inside support");

  SelectionDistribution dist =
      solve_rp_distribution(params.n_messages, params.side_size);
  Rng plan_rng = rng.fork(kRngPlan);
  PartitionPlan plan = rp_build(demand.index, side_info.support, side_info.coeffs,
                                dist, params.q, plan_rng);
  return run_partition_path(params, demand, side_info, db, rng, std::move(plan));
}

RetrievalSession retrieve_model_ii_mid(const Params& params, const Demand& demand,
                                       const SideInfo& side_info, const Database& db,
                                       const Rng& rng) {
  if (params.model != Model::II || params.side_size < 3 ||
      params.side_size > params.n_messages - 1)
    throw std::invalid_argument("retrieve_model_ii_mid: needs Model II, 3 <= M <= K-1");
  if (!side_info.contains(demand.index))
    throw std::invalid_argument("retrieve_model_ii_mid: demand outside support");

  SelectionDistribution dist =
      solve_mrp_distribution(params.n_messages, params.side_size);
  Rng plan_rng = rng.fork(kRngPlan);
  PartitionPlan plan = mrp_build(demand.index, side_info.support, side_info.coeffs,
                                 dist, params.q, plan_rng);
  return run_partition_path(params, demand, side_info, db, rng, std::move(plan));
}

RetrievalSession retrieve_model_ii_m2(const Params& params, const Demand& demand,
                                      const SideInfo& side_info, const Database& db,
                                      const Rng& rng) {
  if (params.model != Model::II || params.side_size != 2)
    throw std::invalid_argument("retrieve_model_ii_m2: needs Model II, M = 2");
  if (!side_info.contains(demand.index) || side_info.support.size() != 2)
    throw std::invalid_argument("retrieve_model_ii_m2: bad instance");

  RetrievalSession s;
  s.params = params;
  s.demand = demand;
  s.side_info = side_info;

  const int other = side_info.support[0] == demand.index ? side_info.support[1]
                                                         : side_info.support[0];
  Rng plan_rng = rng.fork(kRngPlan);
  // Request the demand itself with probability 1/K, its partner otherwise.
  const bool ask_demand =
      plan_rng.uniform_below(static_cast<std::uint64_t>(params.n_messages)) == 0;
  const int requested = ask_demand ? demand.index : other;

  Rng server_rng = rng.fork(kRngServer);
  const int chosen = static_cast<int>(
      server_rng.uniform_below(static_cast<std::uint64_t>(params.n_servers)));

  s.queries.resize(static_cast<std::size_t>(params.n_servers));
  s.answers.resize(static_cast<std::size_t>(params.n_servers));
  DirectRequest req;
  req.kind = DirectRequest::Kind::Message;
  req.index = requested;
  s.queries[static_cast<std::size_t>(chosen)].direct = req;
  for (int n = 0; n < params.n_servers; ++n) {
    s.answers[static_cast<std::size_t>(n)] =
        server_answer(s.queries[static_cast<std::size_t>(n)], db);
    s.downloaded_symbols += static_cast<int>(s.answers[static_cast<std::size_t>(n)].size());
  }

  SymbolVector fetched(params.q, {});
  fetched.symbols = s.answers[static_cast<std::size_t>(chosen)];
  if (ask_demand) {
    s.recovered = fetched;
  } else {
    // Y = c_W X_W + c_i X_i, so X_W = c_W^{-1} (Y - c_i X_i).
    FieldElement c_w(side_info.coeff_of(demand.index), params.q);
    FieldElement c_i(side_info.coeff_of(other), params.q);
    s.recovered =
        vec_scale(fe_inv(c_w), vec_sub(side_info.combo, vec_scale(c_i, fetched)));
  }
  s.chosen_server = chosen;
  return s;
}

RetrievalSession retrieve_model_ii_mk(const Params& params, const Demand& demand,
                                      const SideInfo& side_info, const Database& db,
                                      const Rng& rng) {
  if (params.model != Model::II || params.side_size != params.n_messages)
    throw std::invalid_argument("retrieve_model_ii_mk: needs Model II, M = K");
  if (params.q.q < 3)
    throw std::invalid_argument("retrieve_model_ii_mk: requires q >= 3");
  if (!side_info.contains(demand.index))
    throw std::invalid_argument("retrieve_model_ii_mk: demand outside support");

  RetrievalSession s;
  s.params = params;
  s.demand = demand;
  s.side_info = side_info;

  const std::uint32_t c_w = side_info.coeff_of(demand.index);
  std::vector<std::uint32_t> options;
  for (std::uint32_t v = 1; v < params.q.q; ++v)
    if (v != c_w) options.push_back(v);

  Rng plan_rng = rng.fork(kRngPlan);
  const std::uint32_t replacement =
      options[static_cast<std::size_t>(plan_rng.uniform_below(options.size()))];

  DirectRequest req;
  req.kind = DirectRequest::Kind::Combination;
  req.combo.resize(static_cast<std::size_t>(params.n_messages));
  for (int id = 1; id <= params.n_messages; ++id)
    req.combo[static_cast<std::size_t>(id - 1)] =
        id == demand.index ? replacement : side_info.coeff_of(id);

  Rng server_rng = rng.fork(kRngServer);
  const int chosen = static_cast<int>(
      server_rng.uniform_below(static_cast<std::uint64_t>(params.n_servers)));

  s.queries.resize(static_cast<std::size_t>(params.n_servers));
  s.answers.resize(static_cast<std::size_t>(params.n_servers));
  s.queries[static_cast<std::size_t>(chosen)].direct = req;
  for (int n = 0; n < params.n_servers; ++n) {
    s.answers[static_cast<std::size_t>(n)] =
        server_answer(s.queries[static_cast<std::size_t>(n)], db);
    s.downloaded_symbols += static_cast<int>(s.answers[static_cast<std::size_t>(n)].size());
  }

  // answer = (c' - c_W) X_W + Y.
  SymbolVector fetched(params.q, {});
  fetched.symbols = s.answers[static_cast<std::size_t>(chosen)];
  FieldElement delta((replacement + params.q.q - c_w) % params.q.q, params.q);
  s.recovered = vec_scale(fe_inv(delta), vec_sub(fetched, side_info.combo));
  s.chosen_server = chosen;
  return s;
}

RetrievalSession retrieve(const Params& params, const Demand& demand,
                          const SideInfo& side_info, const Database& db,
                          const Rng& rng) {
  if (params.model == Model::I) return retrieve_model_i(params, demand, side_info, db, rng);
  if (params.side_size == 2) return retrieve_model_ii_m2(params, demand, side_info, db, rng);
  if (params.side_size == params.n_messages)
    return retrieve_model_ii_mk(params, demand, side_info, db, rng);
  return retrieve_model_ii_mid(params, demand, side_info, db, rng);
}

}  // namespace pircsi
