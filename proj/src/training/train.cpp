#include "fcp/training/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "a2c.hpp"
#include "fcp/agents/neural.hpp"
#include "fcp/agents/rollout.hpp"

namespace fcp::training {

using agents::AgentSpec;
using agents::ArchVariant;
using agents::Method;
using agents::PolicyParams;
using detail::Learner;
using detail::Seating;

namespace {

constexpr std::uint64_t kEvalStream = 0xe7a1;
constexpr std::uint64_t kTrainStream = 0x7a1e;
constexpr std::uint64_t kInitStream = 0x1a17;

std::string method_tag(Method m) {
  std::string s(agents::to_string(m));
  for (char& c : s) {
    if (c == '+') c = 'A';
    if (c == '-') c = 'm';
  }
  return s;
}

double selfplay_reward(const PolicyParams& params, const TrainConfig& config, std::uint64_t seed) {
  auto shared = std::make_shared<const PolicyParams>(params);
  agents::NeuralController a(shared, true), b(shared, true);
  double total = 0.0;
  for (int k = 0; k < config.eval_episodes; ++k) {
    const auto layout = env::builtin_layout(config.layouts[k % config.layouts.size()]);
    total += agents::play_for_deliveries(layout, derive_seed(seed, k), config.horizon, {&a, &b});
  }
  return total / config.eval_episodes;
}

double pool_reward(const PolicyParams& params, const std::vector<AgentSpec>& pool,
                   const TrainConfig& config, std::uint64_t seed) {
  auto shared = std::make_shared<const PolicyParams>(params);
  agents::NeuralController learner(shared, true);
  Rng rng(seed);
  double total = 0.0;
  for (int k = 0; k < config.eval_episodes; ++k) {
    const auto& partner_spec = pool[rng.below(static_cast<int>(pool.size()))];
    auto partner = partner_spec.make_controller(true, derive_seed(seed, 1000 + k));
    const auto layout = env::builtin_layout(config.layouts[k % config.layouts.size()]);
    const int seat = k % 2;
    std::array<agents::Controller*, 2> seats{};
    seats[seat] = &learner;
    seats[1 - seat] = partner.get();
    total += agents::play_for_deliveries(layout, derive_seed(seed, k), config.horizon, seats);
  }
  return total / config.eval_episodes;
}

using EvalFn = std::function<double(const PolicyParams&, std::uint64_t)>;

// Drives the learners for N * total_steps environment steps, sampling the
// checkpoint schedule in per-learner steps.
void run_training(const TrainConfig& config, std::vector<Learner*> learners,
                  detail::SeatingFn seating, std::uint64_t seed, const EvalFn& eval,
                  std::vector<RunRecord*> records) {
  const std::int64_t n = static_cast<std::int64_t>(learners.size());
  auto checkpoint = [&](int index, std::int64_t step, double train_return) {
    for (std::size_t l = 0; l < learners.size(); ++l) {
      learners[l]->params.step_trained = step;
      CheckpointRecord ck;
      ck.index = index;
      ck.step = step;
      ck.params = std::make_shared<const PolicyParams>(learners[l]->params);
      ck.reward = eval(*ck.params, derive_seed(records[l]->seed, kEvalStream));
      records[l]->checkpoints.push_back(ck);
      records[l]->curve.push_back({step, ck.reward, train_return});
    }
  };
  detail::A2C a2c(config, learners, std::move(seating), derive_seed(seed, kTrainStream));
  checkpoint(0, 0, 0.0);
  std::int64_t global = 0;
  const std::int64_t per_checkpoint = n * config.checkpoint_every;
  for (int index = 1; index < config.checkpoint_count(); ++index) {
    const std::int64_t target = per_checkpoint * index;
    while (global < target) {
      if (config.lr_decay) {
        const double left = 1.0 - static_cast<double>(global) / static_cast<double>(n * config.total_steps);
        for (auto* l : learners) l->adam.set_lr(config.learning_rate * left);
      }
      global += a2c.iterate();
    }
    checkpoint(index, global / n, a2c.take_mean_return());
  }
  for (auto* r : records) r->episodes = a2c.episodes();
}

RunRecord make_record(const TrainConfig& config, Method method, std::uint64_t seed,
                      std::string run_id) {
  RunRecord r;
  r.run_id = std::move(run_id);
  r.method = method;
  r.config = config;
  r.seed = seed;
  return r;
}

std::vector<AgentSpec> pool_agents(const CheckpointPool& pool) {
  std::vector<AgentSpec> out;
  for (const auto& e : pool.entries) out.push_back(e.agent);
  return out;
}

}  // namespace

std::pair<int, int> draw_pair(int population, Rng& rng) {
  const int a = rng.below(population);
  const int b = rng.below(population);
  return {a, b};
}

std::vector<RunRecord> train_population_play(const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  const int n = config.population_size;
  const Method method = n == 1 ? Method::SP : Method::PP;
  std::vector<std::unique_ptr<Learner>> owned;
  std::vector<Learner*> learners;
  std::vector<RunRecord> records;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t member_seed = n == 1 ? seed : derive_seed(seed, i);
    owned.push_back(std::make_unique<Learner>(
        agents::init_policy(config.arch, derive_seed(member_seed, kInitStream)), config.learning_rate));
    owned.back()->params.seed = member_seed;
    learners.push_back(owned.back().get());
    std::string id = method_tag(method) + "-" + config.arch.id() + "-s" + std::to_string(seed);
    if (n > 1) id += "-m" + std::to_string(i);
    records.push_back(make_record(config, method, member_seed, id));
    records.back().draw_counts.assign(n, 0);
  }
  std::vector<RunRecord*> record_ptrs;
  for (auto& r : records) record_ptrs.push_back(&r);
  auto& counts = records.front().draw_counts;
  auto seating = [n, &counts](Rng& rng) {
    Seating s;
    const auto [a, b] = draw_pair(n, rng);
    s.learner = {a, b};
    ++counts[a];
    ++counts[b];
    return s;
  };
  auto eval = [&config](const PolicyParams& p, std::uint64_t s) { return selfplay_reward(p, config, s); };
  run_training(config, learners, seating, seed, eval, record_ptrs);
  for (std::size_t i = 1; i < records.size(); ++i) records[i].draw_counts = records[0].draw_counts;
  return records;
}

RunRecord train_self_play(const TrainConfig& config, const ArchVariant& arch, std::uint64_t seed) {
  TrainConfig c = config;
  c.arch = arch;
  c.population_size = 1;
  return std::move(train_population_play(c, seed).front());
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Init: return "init";
    case Stage::Mid: return "mid";
    case Stage::Final: return "final";
  }
  return "?";
}

FilteredCheckpoints filter_checkpoints(const RunRecord& run) {
  if (run.checkpoints.size() < 3) {
    throw ValidationError("filter_checkpoints needs at least 3 checkpoints, run " + run.run_id +
                          " has " + std::to_string(run.checkpoints.size()));
  }
  std::vector<const CheckpointRecord*> order;
  for (const auto& c : run.checkpoints) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->index < b->index; });
  const double half = 0.5 * order.back()->reward;
  const CheckpointRecord* mid = order.front();
  for (const auto* c : order) {
    if (std::abs(c->reward - half) < std::abs(mid->reward - half)) mid = c;
  }
  return {*order.front(), *mid, *order.back()};
}

ArchVariant partner_arch(const TrainConfig& config, Method variant, int i) {
  if (variant == Method::FCPPlusA || variant == Method::FCPMinusTPlusA) {
    if (config.population_size % 4 != 0) {
      throw ValidationError("architecture variation needs a population size divisible by 4");
    }
    return ArchVariant::all()[i / (config.population_size / 4)];
  }
  return config.arch;
}

std::vector<RunRecord> train_partners(const TrainConfig& config, Method variant,
                                      std::uint64_t seed) {
  config.validate();
  std::vector<RunRecord> runs;
  for (int i = 0; i < config.population_size; ++i) {
    runs.push_back(train_self_play(config, partner_arch(config, variant, i), derive_seed(seed, i)));
  }
  return runs;
}

CheckpointPool build_fcp_pool(const TrainConfig& config, Method variant,
                              const std::vector<RunRecord>& partners) {
  const bool keep_past = variant == Method::FCP || variant == Method::FCPPlusA;
  const bool arch_mix = variant == Method::FCPPlusA || variant == Method::FCPMinusTPlusA;
  if (!keep_past && variant != Method::FCPMinusT && variant != Method::FCPMinusTPlusA) {
    throw ValidationError("build_fcp_pool: " + std::string(agents::to_string(variant)) +
                          " is not an FCP variant");
  }
  if (arch_mix && config.population_size % 4 != 0) {
    throw ValidationError("architecture variation needs a population size divisible by 4");
  }
  if (static_cast<int>(partners.size()) != config.population_size) {
    throw ValidationError("build_fcp_pool: expected " + std::to_string(config.population_size) +
                          " partner runs, got " + std::to_string(partners.size()));
  }
  CheckpointPool pool;
  for (std::size_t i = 0; i < partners.size(); ++i) {
    const auto& run = partners[i];
    const auto expected = partner_arch(config, variant, static_cast<int>(i));
    if (run.final_checkpoint().params->arch != expected) {
      throw ValidationError("partner run " + run.run_id + " has architecture " +
                            run.final_checkpoint().params->arch.id() + ", expected " + expected.id());
    }
    pool.source_runs.push_back(run.run_id);
    const auto f = filter_checkpoints(run);
    std::vector<std::pair<Stage, const CheckpointRecord*>> keep;
    if (keep_past) {
      keep = {{Stage::Init, &f.init}, {Stage::Mid, &f.mid}, {Stage::Final, &f.final}};
    } else {
      keep = {{Stage::Final, &f.final}};
    }
    for (const auto& [stage, ck] : keep) {
      PoolEntry e;
      e.stage = stage;
      e.reward = ck->reward;
      e.agent.id = run.run_id + "-c" + std::to_string(ck->index);
      e.agent.method = run.method;
      e.agent.params = ck->params;
      e.agent.provenance = {run.run_id, ck->index};
      pool.entries.push_back(std::move(e));
    }
  }
  return pool;
}

BestResponse train_best_response(const CheckpointPool& pool, const TrainConfig& config,
                                 std::uint64_t seed, Method label) {
  config.validate();
  if (pool.entries.empty()) throw ValidationError("train_best_response: empty partner pool");
  const auto partners = pool_agents(pool);
  Learner learner(agents::init_policy(config.arch, derive_seed(seed, kInitStream)),
                  config.learning_rate);
  learner.params.seed = seed;
  BestResponse out;
  out.run = make_record(config, label, seed,
                        method_tag(label) + "-" + config.arch.id() + "-s" + std::to_string(seed));
  out.run.draw_counts.assign(partners.size(), 0);
  auto& counts = out.run.draw_counts;
  auto seating = [&partners, &counts](Rng& rng) {
    Seating s;
    const int seat = rng.below(2);
    const int pick = rng.below(static_cast<int>(partners.size()));
    ++counts[pick];
    s.learner[seat] = 0;
    s.partner[1 - seat] = partners[pick].make_controller(true, rng.next_u64());
    return s;
  };
  auto eval = [&](const PolicyParams& p, std::uint64_t s) { return pool_reward(p, partners, config, s); };
  std::vector<RunRecord*> records{&out.run};
  run_training(config, {&learner}, seating, seed, eval, records);
  out.agent = agents::neural_agent(out.run.run_id, label, learner.params,
                                   {out.run.run_id, out.run.final_checkpoint().index});
  return out;
}

BestResponse train_bcp(const AgentSpec& bc_partner, const TrainConfig& config, std::uint64_t seed) {
  if (bc_partner.method != Method::BC) {
    throw ValidationError("train_bcp: partner '" + bc_partner.id + "' is not a BC model");
  }
  CheckpointPool pool;
  pool.entries.push_back({bc_partner, 0.0, Stage::Final});
  pool.source_runs.push_back(bc_partner.provenance.run_id);
  return train_best_response(pool, config, seed, Method::BCP);
}

BestResponse train_fcp(const TrainConfig& config, Method variant, std::uint64_t seed) {
  const auto partners = train_partners(config, variant, seed);
  const auto pool = build_fcp_pool(config, variant, partners);
  return train_best_response(pool, config, derive_seed(seed, 0xb5), variant);
}

nlohmann::json manifest(const RunRecord& run) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : run.curve) {
    curve.push_back({{"step", p.step}, {"reward", p.reward}, {"train_return", p.train_return}});
  }
  nlohmann::json checkpoints = nlohmann::json::array();
  for (const auto& c : run.checkpoints) {
    checkpoints.push_back({{"index", c.index},
                           {"step", c.step},
                           {"reward", c.reward},
                           {"digest", agents::params_digest(*c.params)}});
  }
  return {{"run_id", run.run_id},
          {"method", std::string(agents::to_string(run.method))},
          {"seed", run.seed},
          {"config", to_json(run.config)},
          {"episodes", run.episodes},
          {"draw_counts", run.draw_counts},
          {"checkpoints", checkpoints},
          {"curve", curve}};
}

}  // namespace fcp::training
