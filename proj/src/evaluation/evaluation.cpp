#include "fcp/evaluation/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "fcp/agents/rollout.hpp"
#include "fcp/common/error.hpp"

namespace fcp::evaluation {

using agents::AgentSpec;
using agents::Method;
using nlohmann::json;

std::string_view to_string(PopulationKind k) {
  switch (k) {
    case PopulationKind::HumanProxy: return "HumanProxy";
    case PopulationKind::DiverseSP: return "DiverseSP";
    case PopulationKind::RandomInit: return "RandomInit";
  }
  return "?";
}

PopulationKind population_kind_from_string(std::string_view s) {
  for (auto k : {PopulationKind::HumanProxy, PopulationKind::DiverseSP, PopulationKind::RandomInit}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown population kind '" + std::string(s) + "'");
}

std::vector<training::RunRecord> train_heldout_runs(const training::TrainConfig& config, int seeds,
                                                    std::uint64_t base_seed) {
  std::vector<training::RunRecord> runs;
  const auto archs = agents::ArchVariant::all();
  for (int s = 0; s < seeds; ++s) {
    for (int a = 0; a < 4; ++a) {
      runs.push_back(training::train_self_play(config, archs[a], derive_seed(base_seed, s * 4 + a)));
    }
  }
  return runs;
}

namespace {

void add_keys(std::set<std::string>& keys, const std::string& run_id, std::uint64_t seed) {
  if (!run_id.empty()) keys.insert("run:" + run_id);
  keys.insert("seed:" + std::to_string(seed));
}

AgentSpec checkpoint_member(const training::RunRecord& run, const training::CheckpointRecord& ck,
                            Method method) {
  return agents::neural_agent(run.run_id + "-c" + std::to_string(ck.index), method, *ck.params,
                              {run.run_id, ck.index});
}

}  // namespace

std::set<std::string> provenance_keys(const AgentSpec& agent) {
  std::set<std::string> keys;
  if (agent.params) {
    add_keys(keys, agent.provenance.run_id, agent.params->seed);
  } else if (!agent.provenance.run_id.empty()) {
    keys.insert("run:" + agent.provenance.run_id);
  }
  return keys;
}

std::set<std::string> provenance_keys(const training::CheckpointPool& pool) {
  std::set<std::string> keys;
  for (const auto& e : pool.entries) {
    const auto k = provenance_keys(e.agent);
    keys.insert(k.begin(), k.end());
  }
  for (const auto& r : pool.source_runs) keys.insert("run:" + r);
  return keys;
}

HeldOutPopulation build_heldout(PopulationKind kind, const HeldOutSources& sources,
                                const std::set<std::string>& excluded) {
  HeldOutPopulation pop;
  pop.kind = kind;
  switch (kind) {
    case PopulationKind::HumanProxy:
      if (!sources.proxy) throw ValidationError("HumanProxy population needs a proxy BC model");
      pop.members.push_back(*sources.proxy);
      break;
    case PopulationKind::DiverseSP:
      if (sources.sp_runs.empty()) throw ValidationError("DiverseSP population needs self-play runs");
      for (const auto& run : sources.sp_runs) {
        const auto f = training::filter_checkpoints(run);
        for (const auto* ck : {&f.init, &f.mid, &f.final}) {
          pop.members.push_back(checkpoint_member(run, *ck, Method::SP));
        }
      }
      break;
    case PopulationKind::RandomInit:
      if (sources.sp_runs.empty()) throw ValidationError("RandomInit population needs self-play runs");
      for (std::size_t i = 0; i < sources.sp_runs.size(); i += 4) {
        const auto& run = sources.sp_runs[i];
        auto first = std::min_element(run.checkpoints.begin(), run.checkpoints.end(),
                                      [](const auto& a, const auto& b) { return a.index < b.index; });
        if (first == run.checkpoints.end() || first->params->step_trained != 0) {
          throw ValidationError("run " + run.run_id + " has no untrained checkpoint");
        }
        pop.members.push_back(checkpoint_member(run, *first, Method::Random));
      }
      break;
  }
  for (const auto& m : pop.members) {
    for (const auto& key : provenance_keys(m)) {
      if (excluded.count(key)) {
        throw ValidationError("held-out member " + m.id + " overlaps an evaluated agent (" + key + ")");
      }
    }
  }
  return pop;
}

double CrossPlayCell::mean_deliveries() const {
  if (episodes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : episodes) s += e.deliveries;
  return s / episodes.size();
}

Aggregate EvalReport::aggregate(Method method, const std::string& layout) const {
  std::map<std::string, std::pair<double, int>> per_agent;
  std::vector<std::string> order;
  for (const auto& c : cells) {
    if (c.method != method || (!layout.empty() && c.layout != layout)) continue;
    auto [it, inserted] = per_agent.try_emplace(c.agent, 0.0, 0);
    if (inserted) order.push_back(c.agent);
    it->second.first += c.mean_deliveries();
    it->second.second += 1;
  }
  Aggregate a;
  a.agents = static_cast<int>(order.size());
  if (order.empty()) return a;
  std::vector<double> means;
  for (const auto& id : order) means.push_back(per_agent[id].first / per_agent[id].second);
  double sum = 0.0;
  for (double m : means) sum += m;
  a.mean = sum / means.size();
  if (means.size() > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - a.mean) * (m - a.mean);
    a.sd = std::sqrt(ss / (means.size() - 1));
  }
  return a;
}

std::vector<std::string> EvalReport::layouts() const {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.layout) == out.end()) out.push_back(c.layout);
  }
  return out;
}

std::vector<Method> EvalReport::methods() const {
  std::vector<Method> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.method) == out.end()) out.push_back(c.method);
  }
  return out;
}

EvalReport cross_play(const std::vector<AgentSpec>& agents, const HeldOutPopulation& population,
                      const std::vector<std::string>& layouts, const CrossPlayOptions& options) {
  if (options.episodes < 1 || options.horizon < 1) {
    throw ValidationError("cross_play needs positive episodes and horizon");
  }
  std::vector<env::LayoutPtr> layout_ptrs;
  for (const auto& name : layouts) layout_ptrs.push_back(env::builtin_layout(name));

  EvalReport report;
  report.horizon = options.horizon;
  report.episodes_per_cell = options.episodes;
  report.seed = options.seed;
  const std::size_t n_members = population.members.size();
  const std::size_t n_layouts = layouts.size();
  const std::size_t total = agents.size() * n_members * n_layouts;
  report.cells.resize(total);

  auto run_cell = [&](std::size_t index) {
    const std::size_t li = index % n_layouts;
    const std::size_t mi = (index / n_layouts) % n_members;
    const std::size_t ai = index / (n_layouts * n_members);
    CrossPlayCell& cell = report.cells[index];
    cell.agent = agents[ai].id;
    cell.method = agents[ai].method;
    cell.member = population.members[mi].id;
    cell.layout = layouts[li];
    const std::uint64_t cell_seed = derive_seed(derive_seed(derive_seed(options.seed, ai), mi), li);
    for (int e = 0; e < options.episodes; ++e) {
      const std::uint64_t ep_seed = derive_seed(cell_seed, e);
      auto agent = agents[ai].make_controller(options.stochastic, derive_seed(ep_seed, 1));
      auto member = population.members[mi].make_controller(options.stochastic, derive_seed(ep_seed, 2));
      const int seat = e % 2;
      std::array<agents::Controller*, 2> seats{};
      seats[seat] = agent.get();
      seats[1 - seat] = member.get();
      std::array<std::string, 2> ids;
      ids[seat] = agents[ai].id;
      ids[1 - seat] = population.members[mi].id;
      const auto log = agents::play_episode(layout_ptrs[li], ep_seed, options.horizon, seats, ids);
      cell.episodes.push_back({log.deliveries(), log.deposits(), log.total_return(), seat});
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < total; ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) {
          try {
            run_cell(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  return report;
}

BehaviorStats behavior_stats(const env::EpisodeLog& log) {
  BehaviorStats stats;
  const auto layout = env::builtin_layout(log.header.layout);
  stats.pot_metric_applicable = layout->pots().size() == 2;
  std::array<int, 2> moved{0, 0};
  std::array<std::array<int, 2>, 2> uses{};
  for (const auto& step : log.steps) {
    for (int p = 0; p < 2; ++p) moved[p] += step.moved[p] ? 1 : 0;
    for (const auto& e : step.events) {
      if (e.kind == env::EventKind::Delivered) ++stats.deliveries;
      const bool pot_use = e.kind == env::EventKind::TomatoDeposited ||
                           e.kind == env::EventKind::SoupCollected;
      if (pot_use && e.pot >= 0 && e.pot < 2) ++uses[e.player][e.pot];
    }
  }
  const double t = log.steps.empty() ? 1.0 : static_cast<double>(log.steps.size());
  for (int p = 0; p < 2; ++p) {
    stats.movement_fraction[p] = moved[p] / t;
    const int total = uses[p][0] + uses[p][1];
    if (stats.pot_metric_applicable && total > 0) {
      stats.pot_preference_diff[p] = std::abs(uses[p][0] - uses[p][1]) / static_cast<double>(total);
    }
  }
  return stats;
}

std::string AblationTable::format() const {
  std::ostringstream out;
  out << std::left << std::setw(12) << "partner";
  for (auto m : columns) out << std::setw(16) << agents::to_string(m);
  out << "\n";
  out << std::fixed << std::setprecision(2);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << std::setw(12) << to_string(rows[r]);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << values[r][c].mean << "+-" << values[r][c].sd;
      out << std::setw(16) << cell.str();
    }
    out << "\n";
  }
  return out.str();
}

AblationTable ablation_table(const std::map<Method, std::map<PopulationKind, EvalReport>>& reports) {
  AblationTable t;
  t.rows = {PopulationKind::HumanProxy, PopulationKind::DiverseSP, PopulationKind::RandomInit};
  t.columns = {Method::FCP, Method::FCPMinusT, Method::FCPPlusA, Method::FCPMinusTPlusA};
  for (auto row : t.rows) {
    std::vector<Aggregate> line;
    for (auto col : t.columns) {
      auto it = reports.find(col);
      if (it == reports.end()) {
        throw ValidationError("ablation table: missing variant " + std::string(agents::to_string(col)));
      }
      auto jt = it->second.find(row);
      if (jt == it->second.end()) {
        throw ValidationError("ablation table: missing " + std::string(to_string(row)) + " results for " +
                              std::string(agents::to_string(col)));
      }
      line.push_back(jt->second.aggregate(col));
    }
    t.values.push_back(std::move(line));
  }
  return t;
}

json to_json(const PreferenceRecord& r) {
  return json{{"session", r.session},      {"episodes", r.episodes}, {"agent_a", r.agent_a},
              {"agent_b", r.agent_b},      {"method_a", r.method_a}, {"method_b", r.method_b},
              {"rating", r.rating},        {"timestamp_ms", r.timestamp_ms}};
}

PreferenceRecord preference_from_json(const json& j) {
  try {
    PreferenceRecord r;
    r.session = j.at("session").get<std::string>();
    r.episodes = j.at("episodes").get<std::array<int, 2>>();
    r.agent_a = j.at("agent_a").get<std::string>();
    r.agent_b = j.at("agent_b").get<std::string>();
    r.method_a = j.at("method_a").get<std::string>();
    r.method_b = j.at("method_b").get<std::string>();
    r.rating = j.at("rating").get<int>();
    r.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    if (r.rating < -2 || r.rating > 2) throw ValidationError("rating outside the five-point scale");
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed preference record: ") + e.what());
  }
}

double PreferenceMatrix::at(const std::string& row, const std::string& col) const {
  const auto r = std::find(methods.begin(), methods.end(), row);
  const auto c = std::find(methods.begin(), methods.end(), col);
  if (r == methods.end() || c == methods.end()) throw NotFound("method not in preference matrix");
  return mean[r - methods.begin()][c - methods.begin()];
}

PreferenceMatrix preference_aggregate(const std::vector<PreferenceRecord>& records) {
  PreferenceMatrix m;
  for (const auto& r : records) {
    for (const auto* name : {&r.method_a, &r.method_b}) {
      if (std::find(m.methods.begin(), m.methods.end(), *name) == m.methods.end()) {
        m.methods.push_back(*name);
      }
    }
  }
  std::sort(m.methods.begin(), m.methods.end());
  const std::size_t n = m.methods.size();
  m.mean.assign(n, std::vector<double>(n, 0.0));
  m.ci95.assign(n, std::vector<double>(n, 0.0));
  m.count.assign(n, std::vector<int>(n, 0));
  auto index = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(m.methods.begin(), m.methods.end(), s) - m.methods.begin());
  };
  // Ratings oriented from the lower to the higher method index.
  std::vector<std::vector<std::vector<double>>> samples(n, std::vector<std::vector<double>>(n));
  for (const auto& r : records) {
    std::size_t a = index(r.method_a), b = index(r.method_b);
    if (a == b) continue;
    double s = r.rating;
    if (a > b) {
      std::swap(a, b);
      s = -s;
    }
    samples[a][b].push_back(s);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& xs = samples[a][b];
      if (xs.empty()) continue;
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double mean = sum / xs.size();
      double ci = 0.0;
      if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        ci = 1.96 * std::sqrt(ss / (xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
      }
      m.mean[a][b] = mean;
      m.mean[b][a] = -mean;
      m.ci95[a][b] = m.ci95[b][a] = ci;
      m.count[a][b] = m.count[b][a] = static_cast<int>(xs.size());
    }
  }
  return m;
}

json to_json(const EvalReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json eps = json::array();
    for (const auto& e : c.episodes) {
      eps.push_back({{"deliveries", e.deliveries},
                     {"deposits", e.deposits},
                     {"return", e.total_return},
                     {"agent_seat", e.agent_seat}});
    }
    cells.push_back({{"agent", c.agent},
                     {"method", std::string(agents::to_string(c.method))},
                     {"member", c.member},
                     {"layout", c.layout},
                     {"episodes", eps}});
  }
  return {{"horizon", report.horizon},
          {"episodes_per_cell", report.episodes_per_cell},
          {"seed", report.seed},
          {"cells", cells}};
}

EvalReport eval_report_from_json(const json& j) {
  try {
    EvalReport r;
    r.horizon = j.at("horizon").get<int>();
    r.episodes_per_cell = j.at("episodes_per_cell").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("cells")) {
      CrossPlayCell cell;
      cell.agent = c.at("agent").get<std::string>();
      cell.method = agents::method_from_string(c.at("method").get<std::string>());
      cell.member = c.at("member").get<std::string>();
      cell.layout = c.at("layout").get<std::string>();
      for (const auto& e : c.at("episodes")) {
        cell.episodes.push_back({e.at("deliveries").get<int>(), e.at("deposits").get<int>(),
                                 e.at("return").get<int>(), e.at("agent_seat").get<int>()});
      }
      r.cells.push_back(std::move(cell));
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed eval report: ") + e.what());
  }
}

std::string to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "agent,method,member,layout,mean_deliveries,episodes\n";
  for (const auto& c : report.cells) {
    out << c.agent << ',' << agents::to_string(c.method) << ',' << c.member << ',' << c.layout << ','
        << c.mean_deliveries() << ',' << c.episodes.size() << '\n';
  }
  return out.str();
}

}  // namespace fcp::evaluation
