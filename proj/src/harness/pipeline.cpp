#include "fcp/harness/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fcp/agents/bc.hpp"
#include "fcp/agents/rollout.hpp"
#include "fcp/common/error.hpp"
#include "fcp/common/hash.hpp"
#include "fcp/common/io.hpp"
#include "fcp/evaluation/figures.hpp"
#include "fcp/training/sweep.hpp"

namespace fcp::harness {

using agents::AgentSpec;
using agents::Method;
using nlohmann::json;
using training::RunRecord;
using training::TrainConfig;

std::string put_run(ArtifactStore& store, const RunRecord& run) {
  json doc = training::manifest(run);
  json ids = json::array();
  for (const auto& c : run.checkpoints) {
    ids.push_back(store.put_json(agents::to_json(*c.params, {run.run_id, c.index})));
  }
  doc["type"] = "run";
  doc["checkpoint_ids"] = ids;
  return store.put_json(doc);
}

RunRecord get_run(const ArtifactStore& store, const std::string& id) {
  const json doc = store.get_json(id);
  try {
    RunRecord run;
    run.run_id = doc.at("run_id").get<std::string>();
    run.method = agents::method_from_string(doc.at("method").get<std::string>());
    run.seed = doc.at("seed").get<std::uint64_t>();
    run.config = training::train_config_from_json(doc.at("config"));
    run.episodes = doc.value("episodes", std::int64_t{0});
    run.draw_counts = doc.value("draw_counts", std::vector<std::int64_t>{});
    const auto& cks = doc.at("checkpoints");
    const auto& ids = doc.at("checkpoint_ids");
    for (std::size_t i = 0; i < cks.size(); ++i) {
      training::CheckpointRecord c;
      c.index = cks[i].at("index").get<int>();
      c.step = cks[i].at("step").get<std::int64_t>();
      c.reward = cks[i].at("reward").get<double>();
      c.params = std::make_shared<const agents::PolicyParams>(
          agents::params_from_json(store.get_json(ids[i].get<std::string>())));
      run.checkpoints.push_back(std::move(c));
    }
    for (const auto& p : doc.at("curve")) {
      run.curve.push_back({p.at("step").get<std::int64_t>(), p.at("reward").get<double>(),
                           p.at("train_return").get<double>()});
    }
    return run;
  } catch (const json::exception& e) {
    throw ValidationError("artifact " + id + " is not a run manifest: " + e.what());
  }
}

std::string put_agent(ArtifactStore& store, const AgentSpec& agent) {
  json doc{{"type", "agent"},
           {"id", agent.id},
           {"method", std::string(agents::to_string(agent.method))},
           {"provenance",
            {{"run_id", agent.provenance.run_id}, {"checkpoint_index", agent.provenance.checkpoint_index}}}};
  if (agent.params) doc["checkpoint"] = store.put_json(agents::to_json(*agent.params, agent.provenance));
  if (agent.script) doc["script"] = agent.script->id();
  return store.put_json(doc);
}

AgentSpec get_agent(const ArtifactStore& store, const std::string& id) {
  json doc = store.get_json(id);
  if (doc.contains("checkpoint")) doc["params"] = store.get_json(doc["checkpoint"].get<std::string>());
  return agents::agent_from_json(doc);
}

std::string put_log(ArtifactStore& store, const env::EpisodeLog& log) {
  return store.put(env::to_jsonl(log));
}

env::EpisodeLog get_log(const ArtifactStore& store, const std::string& id) {
  return env::from_jsonl(store.get(id));
}

namespace {

std::uint64_t mix(std::uint64_t seed, const std::string& name, int e) {
  Fnv1a h;
  h.add(name);
  h.add_value(e);
  return derive_seed(seed, h.digest());
}

void expect_type(const json& out, const std::string& type) {
  if (out.value("type", "") != type) {
    throw ValidationError("expected a '" + type + "' artifact, got '" + out.value("type", "?") + "'");
  }
}

}  // namespace

std::vector<RunRecord> load_runs(const ArtifactStore& store, const json& out) {
  expect_type(out, "runs");
  std::vector<RunRecord> runs;
  for (const auto& id : out.at("runs")) runs.push_back(get_run(store, id.get<std::string>()));
  return runs;
}

std::vector<AgentSpec> load_agents(const ArtifactStore& store, const json& out) {
  if (out.value("type", "") == "population") {
    std::vector<AgentSpec> v;
    for (const auto& id : out.at("members")) v.push_back(get_agent(store, id.get<std::string>()));
    return v;
  }
  expect_type(out, "agents");
  std::vector<AgentSpec> v;
  for (const auto& id : out.at("agents")) v.push_back(get_agent(store, id.get<std::string>()));
  return v;
}

std::vector<env::EpisodeLog> load_logs(const ArtifactStore& store, const json& out) {
  expect_type(out, "logs");
  std::vector<env::EpisodeLog> logs;
  for (const auto& id : out.at("logs")) logs.push_back(get_log(store, id.get<std::string>()));
  return logs;
}

std::string PipelineResult::artifact(const std::string& stage) const {
  for (const auto& s : stages) {
    if (s.name == stage) return s.artifact;
  }
  throw NotFound("pipeline has no stage '" + stage + "'");
}

int PipelineResult::executed_count() const {
  return static_cast<int>(std::count_if(stages.begin(), stages.end(), [](auto& s) { return s.executed; }));
}

namespace {

// Parameters that name other stages. A value of the form "@<artifact id>"
// names an artifact already in the store instead.
const std::set<std::string> kSingleRefs = {"partners", "data", "partner", "runs", "proxy",
                                           "population", "pool"};
const std::set<std::string> kListRefs = {"agents", "exclude", "reports", "run_sets"};

std::vector<std::string> references(const json& stage) {
  std::vector<std::string> refs;
  for (const auto& [key, value] : stage.items()) {
    auto add = [&refs](const json& v) {
      const auto ref = v.get<std::string>();
      if (!ref.starts_with('@')) refs.push_back(ref);
    };
    if (kSingleRefs.count(key) && value.is_string()) add(value);
    if (kListRefs.count(key) && value.is_array()) {
      for (const auto& v : value) add(v);
    }
  }
  return refs;
}

const json& stages_of(const json& pipeline) {
  if (!pipeline.is_object() || !pipeline.contains("stages") || !pipeline["stages"].is_array()) {
    throw ValidationError("pipeline must be an object with a 'stages' array");
  }
  return pipeline["stages"];
}

struct Context {
  ArtifactStore& store;
  const json& pipeline;
  std::map<std::string, std::string> outputs;  // stage name -> artifact id

  std::string id(const std::string& ref) const { return ref.starts_with('@') ? ref.substr(1) : outputs.at(ref); }
  json output(const std::string& ref) const { return store.get_json(id(ref)); }
};

TrainConfig stage_config(const json& pipeline, const json& stage) {
  json merged = pipeline.value("defaults", json::object());
  if (stage.contains("config")) {
    for (const auto& [k, v] : stage["config"].items()) merged[k] = v;
  }
  return training::train_config_from_json(merged);
}

std::uint64_t stage_seed(const json& pipeline, const json& stage) {
  if (stage.contains("seed")) return stage["seed"].get<std::uint64_t>();
  return mix(pipeline.value("seed", std::uint64_t{0}), stage.value("name", ""), 0);
}

json runs_output(ArtifactStore& store, const std::vector<RunRecord>& runs) {
  json ids = json::array();
  for (const auto& r : runs) ids.push_back(put_run(store, r));
  return {{"type", "runs"}, {"runs", ids}};
}

json agents_output(ArtifactStore& store, const std::vector<AgentSpec>& list,
                   const std::set<std::string>& exclude = {}) {
  json ids = json::array();
  for (const auto& a : list) ids.push_back(put_agent(store, a));
  return {{"type", "agents"}, {"agents", ids}, {"exclude", exclude}};
}

std::vector<std::string> layouts_param(const json& stage, const TrainConfig& config) {
  return stage.value("layouts", config.layouts);
}

json execute(Context& ctx, const json& stage) {
  auto& store = ctx.store;
  const std::string kind = stage.at("kind").get<std::string>();
  const TrainConfig config = stage_config(ctx.pipeline, stage);
  const std::uint64_t seed = stage_seed(ctx.pipeline, stage);

  if (kind == "self_play") {
    std::vector<std::uint64_t> seeds = stage.value("seeds", std::vector<std::uint64_t>{seed});
    std::vector<RunRecord> runs;
    const bool all_archs = stage.value("all_archs", false);
    for (auto s : seeds) {
      if (all_archs) {
        for (const auto& arch : agents::ArchVariant::all()) runs.push_back(training::train_self_play(config, arch, s));
      } else {
        runs.push_back(training::train_self_play(config, config.arch, s));
      }
    }
    return runs_output(store, runs);
  }
  if (kind == "heldout_runs") {
    return runs_output(store, evaluation::train_heldout_runs(config, stage.value("seeds", 5), seed));
  }
  if (kind == "population_play") {
    return runs_output(store, training::train_population_play(config, seed));
  }
  if (kind == "fcp_partners") {
    const auto variant = agents::method_from_string(stage.value("variant", "FCP"));
    return runs_output(store, training::train_partners(config, variant, seed));
  }
  if (kind == "best_response") {
    const auto variant = agents::method_from_string(stage.value("variant", "FCP"));
    const auto partners = load_runs(store, ctx.output(stage.at("partners").get<std::string>()));
    const auto pool = training::build_fcp_pool(config, variant, partners);
    const auto br = training::train_best_response(pool, config, seed, variant);
    auto exclude = evaluation::provenance_keys(pool);
    const auto own = evaluation::provenance_keys(br.agent);
    exclude.insert(own.begin(), own.end());
    json out = agents_output(store, {br.agent}, exclude);
    out["run"] = put_run(store, br.run);
    return out;
  }
  if (kind == "agents_from_runs") {
    const auto runs = load_runs(store, ctx.output(stage.at("runs").get<std::string>()));
    const auto method = agents::method_from_string(stage.value("method", "SP"));
    std::vector<AgentSpec> list;
    std::set<std::string> exclude;
    for (const auto& r : runs) {
      const auto& ck = r.final_checkpoint();
      list.push_back(agents::neural_agent(r.run_id, method, *ck.params, {r.run_id, ck.index}));
      const auto keys = evaluation::provenance_keys(list.back());
      exclude.insert(keys.begin(), keys.end());
    }
    return agents_output(store, list, exclude);
  }
  if (kind == "scripted") {
    const auto style = agents::ScriptStyle::parse(stage.value("style", "efficient"));
    return agents_output(store, {agents::scripted_agent("script-" + style.id(), style)});
  }
  if (kind == "demonstrations") {
    const auto style = agents::ScriptStyle::parse(stage.value("style", "efficient"));
    const int per_layout = stage.value("episodes_per_layout", 10);
    const int horizon = stage.value("horizon", 1200);
    json ids = json::array();
    const auto layouts = layouts_param(stage, config);
    for (int e = 0; e < per_layout; ++e) {
      for (const auto& name : layouts) {
        const std::uint64_t s = mix(seed, name, e);
        agents::ScriptedController a(style, derive_seed(s, 1)), b(style, derive_seed(s, 2));
        ids.push_back(put_log(store, agents::play_episode(env::builtin_layout(name), s, horizon,
                                                          {&a, &b}, {"script", "script"})));
      }
    }
    return {{"type", "logs"}, {"logs", ids}};
  }
  if (kind == "bc") {
    const auto logs = load_logs(store, ctx.output(stage.at("data").get<std::string>()));
    agents::BcHyper hyper;
    hyper.seed = seed;
    hyper.epochs = stage.value("epochs", hyper.epochs);
    if (stage.contains("arch")) hyper.arch = agents::ArchVariant::parse(stage["arch"].get<std::string>());
    const auto split = stage.value("split", "partner") == "proxy" ? agents::Split::Proxy : agents::Split::Partner;
    return agents_output(store, {agents::bc_fit(logs, split, hyper)});
  }
  if (kind == "bcp") {
    const auto partner = load_agents(store, ctx.output(stage.at("partner").get<std::string>()));
    if (partner.size() != 1) throw ValidationError("bcp stage needs exactly one BC partner");
    const auto br = training::train_bcp(partner.front(), config, seed);
    auto exclude = evaluation::provenance_keys(br.agent);
    const auto p = evaluation::provenance_keys(partner.front());
    exclude.insert(p.begin(), p.end());
    json out = agents_output(store, {br.agent}, exclude);
    out["run"] = put_run(store, br.run);
    return out;
  }
  if (kind == "heldout") {
    const auto pkind = evaluation::population_kind_from_string(stage.at("population_kind").get<std::string>());
    evaluation::HeldOutSources sources;
    if (stage.contains("runs")) sources.sp_runs = load_runs(store, ctx.output(stage["runs"].get<std::string>()));
    if (stage.contains("proxy")) {
      const auto proxy = load_agents(store, ctx.output(stage["proxy"].get<std::string>()));
      if (!proxy.empty()) sources.proxy = proxy.front();
    }
    std::set<std::string> excluded;
    for (const auto& name : stage.value("exclude", std::vector<std::string>{})) {
      const auto out = ctx.output(name);
      for (const auto& k : out.value("exclude", std::vector<std::string>{})) excluded.insert(k);
    }
    const auto pop = evaluation::build_heldout(pkind, sources, excluded);
    json ids = json::array();
    for (const auto& m : pop.members) ids.push_back(put_agent(store, m));
    return {{"type", "population"}, {"kind", std::string(to_string(pop.kind))}, {"members", ids}};
  }
  if (kind == "crossplay") {
    std::vector<AgentSpec> list;
    for (const auto& name : stage.at("agents")) {
      const auto more = load_agents(store, ctx.output(name.get<std::string>()));
      list.insert(list.end(), more.begin(), more.end());
    }
    const json pop_out = ctx.output(stage.at("population").get<std::string>());
    evaluation::HeldOutPopulation pop;
    pop.kind = evaluation::population_kind_from_string(pop_out.value("kind", "DiverseSP"));
    pop.members = load_agents(store, pop_out);
    evaluation::CrossPlayOptions opt;
    opt.horizon = stage.value("horizon", env::kDefaultHorizon);
    opt.episodes = stage.value("episodes", 10);
    opt.seed = seed;
    opt.threads = stage.value("threads", 1);
    opt.stochastic = stage.value("stochastic", true);
    const auto report = evaluation::cross_play(list, pop, layouts_param(stage, config), opt);
    return {{"type", "report"},
            {"label", stage.value("label", stage.value("name", "crossplay"))},
            {"population_kind", std::string(to_string(pop.kind))},
            {"report", evaluation::to_json(report)}};
  }
  if (kind == "behavior") {
    std::vector<AgentSpec> list;
    for (const auto& name : stage.at("agents")) {
      const auto more = load_agents(store, ctx.output(name.get<std::string>()));
      list.insert(list.end(), more.begin(), more.end());
    }
    const auto partner = load_agents(store, ctx.output(stage.at("partner").get<std::string>()));
    if (partner.empty()) throw ValidationError("behavior stage needs a partner");
    const int episodes = stage.value("episodes", 4);
    const int horizon = stage.value("horizon", env::kDefaultHorizon);
    json samples = json::array();
    for (std::size_t ai = 0; ai < list.size(); ++ai) {
      for (const auto& name : layouts_param(stage, config)) {
        for (int e = 0; e < episodes; ++e) {
          const std::uint64_t s = mix(derive_seed(seed, ai), name, e);
          auto a = list[ai].make_controller(true, derive_seed(s, 1));
          auto p = partner.front().make_controller(true, derive_seed(s, 2));
          const int seat = e % 2;
          std::array<agents::Controller*, 2> seats{};
          seats[seat] = a.get();
          seats[1 - seat] = p.get();
          const auto log = agents::play_episode(env::builtin_layout(name), s, horizon, seats,
                                                {list[ai].id, partner.front().id});
          const auto st = evaluation::behavior_stats(log);
          json entry{{"method", std::string(agents::to_string(list[ai].method))},
                     {"layout", name},
                     {"movement_fraction", st.movement_fraction[seat]}};
          if (st.pot_preference_diff[seat]) entry["pot_preference_diff"] = *st.pot_preference_diff[seat];
          samples.push_back(entry);
        }
      }
    }
    return {{"type", "behavior"}, {"samples", samples}};
  }
  if (kind == "figures") {
    std::vector<std::string> ids;
    for (const auto& key : {"reports", "run_sets"}) {
      for (const auto& name : stage.value(key, std::vector<std::string>{})) ids.push_back(ctx.id(name));
    }
    const auto dir = std::filesystem::path(stage.value("out_dir", "figures"));
    const auto files = export_figures(store, ids, dir);
    json stored = json::object();
    for (const auto& f : files) stored[f] = store.put(read_file(dir / f));
    return {{"type", "figures"}, {"files", stored}};
  }
  if (kind == "sweep") {
    training::SweepSpec spec;
    spec.sizes = stage.value("sizes", std::vector<int>{2, 4, 8});
    spec.seeds = stage.value("seeds", 3);
    spec.seed = seed;
    spec.eval_episodes = stage.value("episodes", 10);
    spec.eval_horizon = stage.value("horizon", env::kDefaultHorizon);
    if (stage.contains("proxy")) {
      const auto proxy = load_agents(store, ctx.output(stage["proxy"].get<std::string>()));
      if (!proxy.empty()) spec.proxy = proxy.front();
    }
    const auto table = training::population_size_sweep(spec, config);
    return {{"type", "sweep"}, {"table", training::to_json(table)}};
  }
  throw ValidationError("unknown stage kind '" + kind + "'");
}

}  // namespace

std::vector<std::string> stage_order(const json& pipeline) {
  const auto& stages = stages_of(pipeline);
  std::map<std::string, std::vector<std::string>> deps;
  std::vector<std::string> names;
  for (const auto& s : stages) {
    const auto name = s.value("name", "");
    if (name.empty()) throw ValidationError("every stage needs a name");
    if (deps.count(name)) throw ValidationError("duplicate stage name '" + name + "'");
    if (!s.contains("kind")) throw ValidationError("stage '" + name + "' has no kind");
    deps[name] = references(s);
    names.push_back(name);
  }
  for (const auto& [name, refs] : deps) {
    for (const auto& r : refs) {
      if (!deps.count(r)) {
        throw ValidationError("stage '" + name + "' depends on missing stage '" + r + "'");
      }
    }
  }
  std::vector<std::string> order;
  std::map<std::string, int> mark;  // 1 = in progress, 2 = done
  std::function<void(const std::string&, std::vector<std::string>&)> visit =
      [&](const std::string& n, std::vector<std::string>& path) {
        if (mark[n] == 2) return;
        path.push_back(n);
        if (mark[n] == 1) {
          std::string cycle;
          for (const auto& p : path) cycle += (cycle.empty() ? "" : " -> ") + p;
          throw ValidationError("dependency cycle: " + cycle);
        }
        mark[n] = 1;
        for (const auto& d : deps[n]) visit(d, path);
        mark[n] = 2;
        path.pop_back();
        order.push_back(n);
      };
  for (const auto& n : names) {
    std::vector<std::string> path;
    visit(n, path);
  }
  return order;
}

PipelineResult run_pipeline(const json& pipeline, ArtifactStore& store, const ProgressFn& progress) {
  const auto order = stage_order(pipeline);
  std::map<std::string, json> by_name;
  for (const auto& s : stages_of(pipeline)) by_name[s["name"].get<std::string>()] = s;

  Context ctx{store, pipeline, {}};
  PipelineResult result;
  for (const auto& name : order) {
    const json& stage = by_name[name];
    json key_doc = stage;
    key_doc.erase("name");
    key_doc.erase("label");
    if (stage.at("kind") != "scripted") {
      key_doc["effective_config"] = training::to_json(stage_config(pipeline, stage));
      key_doc["effective_seed"] = stage_seed(pipeline, stage);
    }
    json dep_ids = json::object();
    for (const auto& r : references(stage)) dep_ids[r] = ctx.outputs.at(r);
    key_doc["deps"] = dep_ids;
    const std::string key = key_doc.dump();

    StageResult sr{name, "", false};
    if (const auto bound = store.lookup(key); bound && store.contains(*bound)) {
      sr.artifact = *bound;
      if (progress) progress("skip " + name + " (" + sr.artifact.substr(0, 12) + ")");
    } else {
      if (progress) progress("run  " + name + " [" + stage.at("kind").get<std::string>() + "]");
      json out = execute(ctx, stage);
      sr.artifact = store.put_json(out);
      store.bind(key, sr.artifact);
      sr.executed = true;
    }
    ctx.outputs[name] = sr.artifact;
    result.stages.push_back(sr);
  }
  return result;
}

PipelineResult run_pipeline_file(const std::filesystem::path& path, ArtifactStore& store,
                                 const ProgressFn& progress) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("pipeline " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_pipeline(doc, store, progress);
}

env::ReplayVerdict replay(const ArtifactStore& store, const std::string& log_id) {
  const auto log = get_log(store, log_id);
  env::LayoutPtr layout;
  try {
    layout = env::builtin_layout(log.header.layout);
  } catch (const NotFound&) {
    throw NotFound("log " + log_id + " names unknown layout '" + log.header.layout + "'");
  }
  return env::verify_replay(log, layout);
}

std::vector<std::string> export_figures(const ArtifactStore& store, const std::vector<std::string>& ids,
                                        const std::filesystem::path& out_dir) {
  std::vector<std::string> files;
  if (ids.empty()) return files;
  std::filesystem::create_directories(out_dir);
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file_atomic(out_dir / name, text);
    files.push_back(name);
  };
  int n = 0;
  for (const auto& id : ids) {
    const json out = store.get_json(id);
    const std::string type = out.value("type", "");
    const std::string tag = std::to_string(n++) + "_" + id.substr(0, 8);
    if (type == "report") {
      const auto report = evaluation::eval_report_from_json(out.at("report"));
      std::vector<evaluation::Bar> bars;
      std::ostringstream csv;
      csv << "method,mean_deliveries,sd,agents\n";
      for (auto m : report.methods()) {
        const auto a = report.aggregate(m);
        bars.push_back({std::string(agents::to_string(m)), a.mean, a.sd});
        csv << agents::to_string(m) << ',' << evaluation::format_value(a.mean) << ','
            << evaluation::format_value(a.sd) << ',' << a.agents << '\n';
      }
      const std::string title = "Deliveries with " + out.value("population_kind", std::string("partners"));
      emit("crossplay_" + tag + ".svg", evaluation::bar_chart_svg(title, "deliveries per episode", bars));
      emit("crossplay_" + tag + ".csv", csv.str());
    } else if (type == "runs") {
      std::vector<evaluation::Series> series;
      std::ostringstream csv;
      csv << "run,step,reward,train_return\n";
      for (const auto& rid : out.at("runs")) {
        const json m = store.get_json(rid.get<std::string>());
        evaluation::Series s{m.at("run_id").get<std::string>(), {}};
        for (const auto& p : m.at("curve")) {
          s.points.emplace_back(p.at("step").get<double>(), p.at("reward").get<double>());
          csv << s.name << ',' << p.at("step").get<std::int64_t>() << ','
              << evaluation::format_value(p.at("reward").get<double>()) << ','
              << evaluation::format_value(p.at("train_return").get<double>()) << '\n';
        }
        series.push_back(std::move(s));
      }
      emit("curves_" + tag + ".svg",
           evaluation::line_chart_svg("Training curves", "environment steps", "self-play deliveries", series));
      emit("curves_" + tag + ".csv", csv.str());
    } else if (type == "preferences") {
      std::vector<evaluation::PreferenceRecord> records;
      for (const auto& r : out.at("records")) records.push_back(evaluation::preference_from_json(r));
      const auto m = evaluation::preference_aggregate(records);
      std::ostringstream csv;
      csv << "row,col,mean,ci95,count\n";
      for (std::size_t r = 0; r < m.methods.size(); ++r) {
        for (std::size_t c = 0; c < m.methods.size(); ++c) {
          csv << m.methods[r] << ',' << m.methods[c] << ',' << evaluation::format_value(m.mean[r][c]) << ','
              << evaluation::format_value(m.ci95[r][c]) << ',' << m.count[r][c] << '\n';
        }
      }
      emit("preferences_" + tag + ".svg", evaluation::heatmap_svg("Preference for row over column", m.methods, m.mean));
      emit("preferences_" + tag + ".csv", csv.str());
    } else if (type == "behavior") {
      std::vector<evaluation::TaggedBehavior> samples;
      for (const auto& s : out.at("samples")) {
        evaluation::TaggedBehavior t{s.at("method").get<std::string>(), s.at("layout").get<std::string>(),
                                     s.at("movement_fraction").get<double>(), std::nullopt};
        if (s.contains("pot_preference_diff")) t.pot_preference_diff = s["pot_preference_diff"].get<double>();
        samples.push_back(std::move(t));
      }
      const auto rows = evaluation::behavior_rows(samples);
      std::vector<evaluation::Bar> move, pot;
      for (const auto& r : rows) {
        move.push_back({r.method + "/" + r.layout, r.movement_mean, 0.0});
        if (r.pot_diff_mean) pot.push_back({r.method + "/" + r.layout, *r.pot_diff_mean, 0.0});
      }
      emit("movement_" + tag + ".svg", evaluation::bar_chart_svg("Fraction of steps moving", "fraction", move));
      emit("potdiff_" + tag + ".svg", evaluation::bar_chart_svg("Pot preference difference", "difference", pot));
      emit("behavior_" + tag + ".csv", evaluation::behavior_csv(rows));
    } else if (type == "sweep") {
      std::vector<evaluation::Bar> bars;
      std::ostringstream csv;
      csv << "population_size,mean_deliveries,sd,seeds\n";
      for (const auto& row : out.at("table").at("rows")) {
        const auto size = row.at("size").get<int>();
        bars.push_back({"N=" + std::to_string(size), row.at("mean").get<double>(), row.at("sd").get<double>()});
        csv << size << ',' << evaluation::format_value(row.at("mean").get<double>()) << ','
            << evaluation::format_value(row.at("sd").get<double>()) << ',' << row.at("seeds").get<int>() << '\n';
      }
      emit("sweep_" + tag + ".svg", evaluation::bar_chart_svg("Population size sweep", "deliveries", bars));
      emit("sweep_" + tag + ".csv", csv.str());
    } else {
      throw ValidationError("artifact " + id + " of type '" + type + "' has no figure");
    }
  }
  return files;
}

}  // namespace fcp::harness
