// Desk-scale acceptance run. Prints one PASS/FAIL line per criterion.
// Trained partners and best responses are cached in an artifact store so
// repeated runs only pay for evaluation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcp/agents/bc.hpp"
#include "fcp/agents/rollout.hpp"
#include "fcp/agents/scripted.hpp"
#include "fcp/common/rng.hpp"
#include "fcp/evaluation/evaluation.hpp"
#include "fcp/harness/pipeline.hpp"
#include "fcp/training/sweep.hpp"

using namespace fcp;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

const std::vector<std::string> kLayouts{"cramped", "asymmetric", "ring", "circuit", "forced"};
constexpr int kSeeds = 3;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

training::TrainConfig desk_config() {
  training::TrainConfig c;
  c.total_steps = 2'000'000;
  c.checkpoint_every = 200'000;
  c.learning_rate = 4e-3;
  c.lr_decay = true;
  c.eval_episodes = 10;
  c.population_size = 8;
  c.layouts = {"cramped"};
  return c;
}

std::uint64_t run_seed(int k) { return derive_seed(0, static_cast<std::uint64_t>(k)); }

class Cache {
 public:
  explicit Cache(std::filesystem::path root) : store_(std::move(root)) {}

  harness::ArtifactStore& store() { return store_; }

  // Stage-1 self-play partners for one seed; partner 0 doubles as the SP agent.
  const std::vector<training::RunRecord>& partners(std::uint64_t seed) {
    if (auto it = partners_.find(seed); it != partners_.end()) return it->second;
    const auto c = desk_config();
    const std::string key = "acceptance/partners/" + std::to_string(seed) + "/" + training::to_json(c).dump();
    json doc;
    if (auto id = store_.lookup(key)) {
      doc = store_.get_json(*id);
    } else {
      std::printf("  training %d partners for seed %llu\n", c.population_size,
                  static_cast<unsigned long long>(seed));
      std::fflush(stdout);
      const auto t0 = Clock::now();
      const auto runs = training::train_partners(c, agents::Method::FCP, seed);
      json ids = json::array();
      for (const auto& r : runs) ids.push_back(harness::put_run(store_, r));
      doc = {{"type", "runs"}, {"runs", ids}, {"seconds", seconds_since(t0)}};
      store_.bind(key, store_.put_json(doc));
    }
    seconds_[seed] = doc.value("seconds", 0.0) / desk_config().population_size;
    return partners_[seed] = harness::load_runs(store_, doc);
  }

  double seconds_per_partner(std::uint64_t seed) {
    partners(seed);
    return seconds_[seed];
  }

  training::CheckpointPool pool(agents::Method variant, std::uint64_t seed) {
    return training::build_fcp_pool(desk_config(), variant, partners(seed));
  }

  agents::AgentSpec best_response(agents::Method variant, std::uint64_t seed) {
    const auto c = desk_config();
    const std::string key = "acceptance/br/" + std::string(agents::to_string(variant)) + "/" +
                            std::to_string(seed) + "/" + training::to_json(c).dump();
    if (auto id = store_.lookup(key)) return harness::get_agent(store_, *id);
    const auto p = pool(variant, seed);
    std::printf("  training %s best response for seed %llu\n", std::string(agents::to_string(variant)).c_str(),
                static_cast<unsigned long long>(seed));
    std::fflush(stdout);
    const auto br = training::train_best_response(p, c, derive_seed(seed, 0xb5), variant);
    store_.bind(key, harness::put_agent(store_, br.agent));
    return br.agent;
  }

  agents::AgentSpec sp_agent(std::uint64_t seed) {
    const auto& run = partners(seed).front();
    const auto& last = run.final_checkpoint();
    return agents::neural_agent(run.run_id, agents::Method::SP, *last.params, {run.run_id, last.index});
  }

 private:
  harness::ArtifactStore store_;
  std::map<std::uint64_t, std::vector<training::RunRecord>> partners_;
  std::map<std::uint64_t, double> seconds_;
};

Verdict determinism() {
  const auto t0 = Clock::now();
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    const auto layout = env::builtin_layout(kLayouts[i % kLayouts.size()]);
    agents::ScriptedController a(agents::ScriptStyle::sloppy(1.0), 2 * i);
    agents::ScriptedController b(agents::ScriptStyle::sloppy(1.0), 2 * i + 1);
    const auto log = agents::play_episode(layout, 1000 + i, env::kDefaultHorizon, {&a, &b}, {"rand", "rand"});
    const auto back = env::from_jsonl(env::to_jsonl(log));
    if (!env::verify_replay(back, layout).pass) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 60.0, fmt("%d/200 replay mismatches, %.1f s (limit 60 s)", failures, secs)};
}

Verdict common_payoff() {
  Rng rng(7);
  int bad_steps = 0, bad_returns = 0;
  for (int i = 0; i < 1000; ++i) {
    auto s = env::reset(env::builtin_layout(kLayouts[i % kLayouts.size()]), i);
    int ret = 0, deliveries = 0, deposits = 0;
    while (!s.done()) {
      env::JointAction a{static_cast<env::Action>(rng.below(env::kNumActions)),
                         static_cast<env::Action>(rng.below(env::kNumActions))};
      const auto out = env::step(s, a);
      if (out.rewards[0] != out.rewards[1]) ++bad_steps;
      ret += out.rewards[0];
      for (const auto& e : out.events) {
        deliveries += e.kind == env::EventKind::Delivered;
        deposits += e.kind == env::EventKind::TomatoDeposited;
      }
    }
    if (ret != 20 * deliveries + deposits) ++bad_returns;
  }
  return {bad_steps == 0 && bad_returns == 0,
          fmt("1000 episodes: %d unequal steps, %d returns off 20*deliveries+deposits", bad_steps, bad_returns)};
}

Verdict pot_timing() {
  Rng rng(11);
  int observed = 0, wrong = 0;
  for (const auto& name : kLayouts) {
    const auto layout = env::builtin_layout(name);
    for (int ep = 0; ep < 100; ++ep) {
      auto s = env::reset(layout, ep, 400);
      std::vector<int> third(s.pots.size(), -1);
      while (!s.done()) {
        env::JointAction a;
        for (auto& x : a) x = rng.uniform() < 0.4 ? env::Action::Interact : static_cast<env::Action>(rng.below(5));
        const int t = s.step;
        const auto before = s.pots;
        const auto out = env::step(s, a);
        for (const auto& e : out.events) {
          if (e.kind == env::EventKind::TomatoDeposited && s.pots[e.pot].tomato_count == env::kTomatoesPerSoup) third[e.pot] = t;
        }
        for (std::size_t p = 0; p < s.pots.size(); ++p) {
          if (before[p].phase() != env::PotPhase::Ready && s.pots[p].phase() == env::PotPhase::Ready) {
            ++observed;
            if (third[p] < 0 || t - third[p] != 20) ++wrong;
          }
        }
      }
    }
  }
  return {observed > 0 && wrong == 0, fmt("%d soups became ready, %d not exactly 20 steps after the third tomato", observed, wrong)};
}

// Hand-counted cycle on cramped: first collection at step 31, then one per
// 33 steps, each delivered 3 steps later.
int cramped_bound(int horizon) {
  int n = 0;
  for (int k = 0; 31 + 33 * k + 3 <= horizon - 1; ++k) ++n;
  return n;
}

Verdict scripted_oracle() {
  const int bound = cramped_bound(540);
  const auto layout = env::builtin_layout("cramped");
  std::string got;
  bool ok = bound == 16;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    agents::ScriptedController a(agents::ScriptStyle::efficient(), seed), b(agents::ScriptStyle::efficient(), seed + 50);
    const int n = agents::play_for_deliveries(layout, seed, 540, {&a, &b});
    ok = ok && std::abs(n - bound) <= 1;
    got += (got.empty() ? "" : " ") + std::to_string(n);
  }
  return {ok, fmt("bound %d, scripted pair delivered [%s]", bound, got.c_str())};
}

training::RunRecord with_rewards(const std::vector<double>& rewards) {
  training::RunRecord run;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    training::CheckpointRecord c;
    c.index = static_cast<int>(i);
    c.reward = rewards[i];
    run.checkpoints.push_back(c);
  }
  return run;
}

Verdict checkpoint_filter() {
  const auto a = training::filter_checkpoints(with_rewards({0, 3, 6, 9, 10}));
  const auto b = training::filter_checkpoints(with_rewards({0, 5, 10}));
  const auto c = training::filter_checkpoints(with_rewards({0, 4, 6, 10}));
  const bool ok = a.mid.reward == 6 && a.init.index == 0 && a.final.index == 4 && b.mid.reward == 5 &&
                  c.mid.index == 1 && c.mid.reward == 4;
  return {ok, fmt("mids %.0f, %.0f, index %d", a.mid.reward, b.mid.reward, c.mid.index)};
}

Verdict learning(Cache& cache) {
  bool ok = true;
  std::string detail;
  for (int k = 0; k < kSeeds; ++k) {
    const auto seed = run_seed(k);
    const auto& run = cache.partners(seed).front();
    const double first = run.checkpoints.front().reward, last = run.final_checkpoint().reward;
    const double secs = cache.seconds_per_partner(seed);
    const bool pass = last >= 5.0 * first && last >= 1.0 && secs <= 1800.0;
    ok = ok && pass;
    detail += fmt("%sseed %d: %.2f -> %.2f (%.0f s)", k ? "; " : "", k, first, last, secs);
  }
  return {ok, detail};
}

evaluation::HeldOutPopulation random_init_population(std::uint64_t seed, const std::set<std::string>& excluded) {
  training::TrainConfig h = desk_config();
  h.total_steps = 1200;
  h.checkpoint_every = 400;
  evaluation::HeldOutSources src;
  src.sp_runs = evaluation::train_heldout_runs(h, 5, derive_seed(seed, 0x4e1d));
  return evaluation::build_heldout(evaluation::PopulationKind::RandomInit, src, excluded);
}

std::set<std::string> keys_of(const std::vector<agents::AgentSpec>& agents,
                              const std::vector<training::CheckpointPool>& pools) {
  std::set<std::string> out;
  for (const auto& a : agents) out.merge(evaluation::provenance_keys(a));
  for (const auto& p : pools) out.merge(evaluation::provenance_keys(p));
  return out;
}

Verdict table1_directional(Cache& cache) {
  int wins = 0;
  std::string detail;
  for (int k = 0; k < kSeeds; ++k) {
    const auto seed = run_seed(k);
    const auto fcp = cache.best_response(agents::Method::FCP, seed);
    const auto fcpt = cache.best_response(agents::Method::FCPMinusT, seed);
    const auto pop = random_init_population(
        seed, keys_of({fcp, fcpt}, {cache.pool(agents::Method::FCP, seed), cache.pool(agents::Method::FCPMinusT, seed)}));
    evaluation::CrossPlayOptions o;
    o.seed = seed;
    const auto rep = evaluation::cross_play({fcp, fcpt}, pop, desk_config().layouts, o);
    const double a = rep.aggregate(agents::Method::FCP).mean, b = rep.aggregate(agents::Method::FCPMinusT).mean;
    wins += a > b;
    detail += fmt("%sseed %d: FCP %.2f vs FCP-T %.2f", k ? "; " : "", k, a, b);
  }
  return {wins == kSeeds, fmt("%d/%d seeds; ", wins, kSeeds) + detail};
}

Verdict figure4_directional(Cache& cache) {
  const evaluation::HeldOutPopulation proxy{evaluation::PopulationKind::HumanProxy, {training::default_proxy()}};
  std::vector<agents::AgentSpec> agents;
  for (int k = 0; k < kSeeds; ++k) {
    agents.push_back(cache.best_response(agents::Method::FCP, run_seed(k)));
    agents.push_back(cache.sp_agent(run_seed(k)));
  }
  evaluation::CrossPlayOptions o;
  o.seed = 4;
  const auto rep = evaluation::cross_play(agents, proxy, desk_config().layouts, o);
  const auto f = rep.aggregate(agents::Method::FCP), s = rep.aggregate(agents::Method::SP);
  return {f.mean > s.mean, fmt("with %s: FCP %.2f +- %.2f, SP %.2f +- %.2f", training::default_proxy().id.c_str(), f.mean,
                               f.sd, s.mean, s.sd)};
}

Verdict bc_pipeline() {
  auto demo = [](std::uint64_t seed) {
    agents::ScriptedController a(agents::ScriptStyle::efficient(), seed), b(agents::ScriptStyle::efficient(), seed + 7);
    return agents::play_episode(env::builtin_layout("cramped"), seed, 250, {&a, &b}, {"script", "script"});
  };
  std::vector<env::EpisodeLog> logs;
  for (int i = 0; i < 20; ++i) logs.push_back(demo(i));
  const auto partner = agents::split_indices(logs, agents::Split::Partner);
  const auto proxy = agents::split_indices(logs, agents::Split::Proxy);

  const agents::ArchVariant arch{64, agents::Memory::Reactive};
  std::vector<agents::BcSample> train, test;
  for (auto i : partner) {
    const auto s = agents::extract_samples(logs[i], arch);
    train.insert(train.end(), s.begin(), s.end());
  }
  for (int i = 100; i < 104; ++i) {
    const auto s = agents::extract_samples(demo(i), arch);
    test.insert(test.end(), s.begin(), s.end());
  }
  agents::BcHyper hyper;
  hyper.arch = arch;
  agents::DataAccessAudit audit;
  const auto model = agents::bc_fit(logs, agents::Split::Partner, hyper, &audit);
  const double agree = agents::action_agreement(*model.params, test);

  std::set<std::size_t> a(partner.begin(), partner.end()), b(proxy.begin(), proxy.end()), both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.begin()));
  const bool disjoint = both.empty() && a.size() + b.size() == logs.size() &&
                        std::includes(a.begin(), a.end(), audit.read.begin(), audit.read.end());
  return {train.size() == 5000 && agree >= 0.90 && disjoint,
          fmt("%zu training samples, held-out agreement %.3f (min 0.90), splits %s", train.size(), agree,
              disjoint ? "disjoint" : "OVERLAP")};
}

// Recount from replayed states, independent of the recorded events.
evaluation::BehaviorStats recount(const env::EpisodeLog& log) {
  const auto layout = env::builtin_layout(log.header.layout);
  const auto states = env::replay_states(log, layout);
  evaluation::BehaviorStats s;
  s.pot_metric_applicable = layout->pots().size() == 2;
  std::array<int, 2> moved{};
  std::array<std::array<int, 2>, 2> uses{};
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    for (int p = 0; p < 2; ++p) {
      const auto& x = states[t].players[p];
      const auto& y = states[t + 1].players[p];
      if (x.position != y.position) ++moved[p];
      const env::Pos faced = env::faced_cell(y);
      const auto& pots = layout->pots();
      const auto it = std::find(pots.begin(), pots.end(), faced);
      if (it == pots.end()) {
        if (x.held == env::Item::Soup && !y.held && layout->at(faced) == env::CellKind::Delivery) ++s.deliveries;
        continue;
      }
      const bool deposit = x.held == env::Item::Tomato && !y.held;
      const bool collect = x.held == env::Item::Dish && y.held == env::Item::Soup;
      if ((deposit || collect) && it - pots.begin() < 2) ++uses[p][it - pots.begin()];
    }
  }
  for (int p = 0; p < 2; ++p) {
    s.movement_fraction[p] = static_cast<double>(moved[p]) / log.steps.size();
    const int total = uses[p][0] + uses[p][1];
    if (s.pot_metric_applicable && total > 0) {
      s.pot_preference_diff[p] = std::abs(uses[p][0] - uses[p][1]) / static_cast<double>(total);
    }
  }
  return s;
}

Verdict bookkeeping() {
  const std::vector<agents::AgentSpec> agents{
      agents::neural_agent("a", agents::Method::FCP, agents::init_policy({16, agents::Memory::Reactive}, 1)),
      agents::scripted_agent("b", agents::ScriptStyle::sloppy(0.2))};
  evaluation::HeldOutPopulation pop{evaluation::PopulationKind::DiverseSP,
                                    {agents::scripted_agent("m1", agents::ScriptStyle::efficient()),
                                     agents::scripted_agent("m2", agents::ScriptStyle::sloppy(0.5)),
                                     agents::scripted_agent("m3", agents::ScriptStyle::sloppy(1.0))}};
  evaluation::CrossPlayOptions o;
  o.horizon = 100;
  const std::vector<std::string> layouts{"cramped", "ring"};
  const auto rep = evaluation::cross_play(agents, pop, layouts, o);
  bool cells_ok = rep.cells.size() == agents.size() * pop.members.size() * layouts.size();
  for (const auto& c : rep.cells) cells_ok = cells_ok && c.episodes.size() == 10;

  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    agents::ScriptedController a(agents::ScriptStyle::sloppy(0.05 * (i % 5)), i), b(agents::ScriptStyle::sloppy(0.1), i + 1000);
    const auto log = agents::play_episode(env::builtin_layout(kLayouts[i % 5]), i, 200, {&a, &b}, {"a", "b"});
    const auto got = evaluation::behavior_stats(log);
    const auto want = recount(log);
    bool same = got.deliveries == want.deliveries && got.pot_metric_applicable == want.pot_metric_applicable;
    for (int p = 0; p < 2; ++p) {
      same = same && got.movement_fraction[p] == want.movement_fraction[p] &&
             got.pot_preference_diff[p] == want.pot_preference_diff[p];
    }
    mismatches += !same;
  }

  Rng rng(3);
  const std::vector<std::string> methods{"FCP", "SP", "PP", "BCP"};
  std::vector<evaluation::PreferenceRecord> records;
  for (int i = 0; i < 500; ++i) {
    evaluation::PreferenceRecord r;
    const int a = rng.below(4);
    r.method_a = methods[a];
    r.method_b = methods[(a + 1 + rng.below(3)) % 4];
    r.rating = rng.below(5) - 2;
    records.push_back(r);
  }
  const auto m = evaluation::preference_aggregate(records);
  bool anti = m.methods.size() == 4;
  for (std::size_t r = 0; anti && r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) anti = anti && m.mean[r][c] == -m.mean[c][r] && m.count[r][c] == m.count[c][r];
  }
  return {cells_ok && mismatches == 0 && anti,
          fmt("%zu cells (expected %zu) x 10 episodes %s; %d/100 behavior mismatches; preference matrix %s",
              rep.cells.size(), agents.size() * pop.members.size() * layouts.size(), cells_ok ? "ok" : "WRONG",
              mismatches, anti ? "antisymmetric" : "NOT antisymmetric")};
}

Verdict sweep(Cache& cache) {
  const auto c = desk_config();
  const std::string key = "acceptance/sweep/" + training::to_json(c).dump();
  training::SweepTable table;
  json doc;
  if (auto id = cache.store().lookup(key)) {
    doc = cache.store().get_json(*id);
  } else {
    training::SweepSpec spec;
    spec.seeds = kSeeds;
    spec.seed = 0;
    spec.partners = [&cache](const training::TrainConfig&, std::uint64_t seed) { return cache.partners(seed); };
    std::printf("  running population size sweep\n");
    std::fflush(stdout);
    doc = training::to_json(training::population_size_sweep(spec, c));
    cache.store().bind(key, cache.store().put_json(doc));
  }
  for (const auto& r : doc.at("rows")) {
    training::SweepRow row;
    row.size = r.at("size");
    row.mean = r.at("mean");
    row.sd = r.at("sd");
    row.per_seed = r.at("per_seed").get<std::vector<double>>();
    table.rows.push_back(row);
  }
  std::istringstream lines(training::format(table));
  for (std::string line; std::getline(lines, line);) std::printf("  %s\n", line.c_str());
  bool ok = table.rows.size() == 3;
  for (const auto& r : table.rows) ok = ok && r.per_seed.size() == kSeeds;
  return {ok, fmt("%zu rows for sizes {2,4,8}, trend %s", table.rows.size(),
                  table.nondecreasing() ? "non-decreasing" : "not monotone")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale acceptance checks"};
  std::string store_root = "acceptance-store";
  std::vector<std::string> only;
  app.add_option("--store", store_root, "artifact store for cached training runs");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);

  Cache cache(store_root);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"determinism", determinism},
      {"common-payoff", common_payoff},
      {"pot-timing", pot_timing},
      {"scripted-oracle", scripted_oracle},
      {"checkpoint-filter", checkpoint_filter},
      {"learning", [&] { return learning(cache); }},
      {"random-init-fcp-vs-fcp-t", [&] { return table1_directional(cache); }},
      {"proxy-fcp-vs-sp", [&] { return figure4_directional(cache); }},
      {"bc-pipeline", bc_pipeline},
      {"evaluation-bookkeeping", bookkeeping},
      {"population-sweep", [&] { return sweep(cache); }},
  };
  for (const auto& name : only) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == name; })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", name.c_str());
      return 2;
    }
  }

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %-26s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
