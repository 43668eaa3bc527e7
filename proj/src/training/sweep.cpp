#include "fcp/training/sweep.hpp"

#include <cmath>
#include <cstdio>

#include "fcp/agents/rollout.hpp"

namespace fcp::training {

bool SweepTable::nondecreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mean < rows[i - 1].mean) return false;
  }
  return true;
}

agents::AgentSpec default_proxy() {
  return agents::scripted_agent("proxy-sloppy", agents::ScriptStyle::sloppy(0.3));
}

namespace {

double score_with_proxy(const agents::AgentSpec& agent, const agents::AgentSpec& proxy,
                        const std::vector<std::string>& layouts, int episodes, int horizon,
                        std::uint64_t seed) {
  double total = 0.0;
  int n = 0;
  for (std::size_t l = 0; l < layouts.size(); ++l) {
    const auto layout = env::builtin_layout(layouts[l]);
    for (int e = 0; e < episodes; ++e) {
      const std::uint64_t s = derive_seed(derive_seed(seed, l), static_cast<std::uint64_t>(e));
      auto a = agent.make_controller(true, derive_seed(s, 1));
      auto p = proxy.make_controller(true, derive_seed(s, 2));
      std::array<agents::Controller*, 2> seats{};
      seats[e % 2] = a.get();
      seats[1 - e % 2] = p.get();
      total += agents::play_for_deliveries(layout, s, horizon, seats);
      ++n;
    }
  }
  return n ? total / n : 0.0;
}

}  // namespace

SweepTable population_size_sweep(const SweepSpec& spec, const TrainConfig& config) {
  if (spec.sizes.empty()) throw ValidationError("sweep needs at least one population size");
  for (std::size_t i = 1; i < spec.sizes.size(); ++i) {
    if (spec.sizes[i] <= spec.sizes[i - 1]) throw ValidationError("sweep sizes must be ascending");
  }
  if (spec.seeds < 1) throw ValidationError("sweep needs at least one seed");
  const auto proxy = spec.proxy.value_or(default_proxy());

  TrainConfig largest = config;
  largest.population_size = spec.sizes.back();
  SweepTable table;
  for (int size : spec.sizes) table.rows.push_back({size, 0.0, 0.0, {}});

  for (int k = 0; k < spec.seeds; ++k) {
    const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(k));
    const auto partners = spec.partners ? spec.partners(largest, seed)
                                        : train_partners(largest, agents::Method::FCP, seed);
    for (auto& row : table.rows) {
      TrainConfig c = config;
      c.population_size = row.size;
      const std::vector<RunRecord> prefix(partners.begin(), partners.begin() + row.size);
      const auto pool = build_fcp_pool(c, agents::Method::FCP, prefix);
      const auto br = train_best_response(pool, c, derive_seed(seed, 0xb5), agents::Method::FCP);
      row.per_seed.push_back(score_with_proxy(br.agent, proxy, c.layouts, spec.eval_episodes,
                                              spec.eval_horizon, derive_seed(seed, 0x5e7)));
    }
  }
  for (auto& row : table.rows) {
    double sum = 0.0;
    for (double v : row.per_seed) sum += v;
    row.mean = sum / row.per_seed.size();
    double ss = 0.0;
    for (double v : row.per_seed) ss += (v - row.mean) * (v - row.mean);
    row.sd = row.per_seed.size() > 1 ? std::sqrt(ss / (row.per_seed.size() - 1)) : 0.0;
  }
  return table;
}

nlohmann::json to_json(const SweepTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"size", r.size},
                    {"mean", r.mean},
                    {"sd", r.sd},
                    {"seeds", static_cast<int>(r.per_seed.size())},
                    {"per_seed", r.per_seed}});
  }
  return {{"rows", rows}, {"nondecreasing", table.nondecreasing()}};
}

std::string format(const SweepTable& table) {
  std::string out = "   N   deliveries\n";
  char line[96];
  for (const auto& r : table.rows) {
    std::snprintf(line, sizeof line, "%4d   %.2f (%.2f)\n", r.size, r.mean, r.sd);
    out += line;
  }
  out += table.nondecreasing() ? "trend: nondecreasing\n" : "trend: not monotone\n";
  return out;
}

}  // namespace fcp::training
