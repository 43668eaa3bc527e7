#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fcp/common/error.hpp"
#include "fcp/common/io.hpp"
#include "fcp/harness/pipeline.hpp"
#include "fcp/training/sweep.hpp"
#include "fcp/play/client.hpp"
#include "fcp/play/server.hpp"

using nlohmann::json;
using namespace fcp;

namespace {

json read_json(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + " is not valid JSON: " + e.what());
  }
}

std::string artifact_ref(const std::string& id) { return id.starts_with('@') ? id : "@" + id; }

json refs(const std::vector<std::string>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(artifact_ref(id));
  return out;
}

harness::PipelineResult run_stages(harness::ArtifactStore& store, const json& defaults, std::uint64_t seed,
                                   json stages) {
  const json pipeline{{"seed", seed}, {"defaults", defaults}, {"stages", std::move(stages)}};
  return harness::run_pipeline(pipeline, store, [](const std::string& line) { std::cerr << line << "\n"; });
}

void print_result(const harness::PipelineResult& r) {
  for (const auto& s : r.stages) std::cout << s.name << " " << s.artifact << "\n";
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    write_file_atomic(path, text);
  }
}

play::PlayServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fictitious co-play workbench"};
  app.require_subcommand(1);
  std::string store_root;
  app.add_option("--store", store_root, "artifact store root (default: $FCP_STORE or ./fcp-store)");
  auto store = [&] { return store_root.empty() ? harness::ArtifactStore::from_env() : harness::ArtifactStore(store_root); };

  // run
  auto* run = app.add_subcommand("run", "run a pipeline document, skipping cached stages");
  std::string pipeline_path;
  run->add_option("pipeline", pipeline_path, "pipeline JSON")->required()->check(CLI::ExistingFile);
  run->callback([&] {
    auto s = store();
    print_result(harness::run_pipeline_file(pipeline_path, s, [](const std::string& l) { std::cerr << l << "\n"; }));
  });

  // train
  auto* train = app.add_subcommand("train", "train agents of one method");
  std::string method = "SP", config_path, bc_partner;
  std::uint64_t seed = 0;
  int seeds = 1;
  train->add_option("--method", method, "SP, PP, FCP, FCP-T, FCP+A, FCP-T+A or BCP")->capture_default_str();
  train->add_option("--config", config_path, "training config JSON")->check(CLI::ExistingFile);
  train->add_option("--seed", seed)->capture_default_str();
  train->add_option("--seeds", seeds, "self-play runs (SP only)")->capture_default_str();
  train->add_option("--partner", bc_partner, "BC partner artifact (BCP only)");
  train->callback([&] {
    const auto m = agents::method_from_string(method);
    json stages = json::array();
    switch (m) {
      case agents::Method::SP: {
        json list = json::array();
        for (int k = 0; k < seeds; ++k) list.push_back(seed + k);
        stages.push_back({{"name", "runs"}, {"kind", "self_play"}, {"seeds", list}});
        stages.push_back({{"name", "agents"}, {"kind", "agents_from_runs"}, {"runs", "runs"}});
        break;
      }
      case agents::Method::PP:
        stages.push_back({{"name", "runs"}, {"kind", "population_play"}});
        stages.push_back({{"name", "agents"}, {"kind", "agents_from_runs"}, {"runs", "runs"}});
        break;
      case agents::Method::BCP:
        if (bc_partner.empty()) throw ValidationError("BCP needs --partner");
        stages.push_back({{"name", "agents"}, {"kind", "bcp"}, {"partner", artifact_ref(bc_partner)}});
        break;
      case agents::Method::FCP:
      case agents::Method::FCPMinusT:
      case agents::Method::FCPPlusA:
      case agents::Method::FCPMinusTPlusA:
        stages.push_back({{"name", "partners"}, {"kind", "fcp_partners"}, {"variant", method}});
        stages.push_back({{"name", "agents"}, {"kind", "best_response"}, {"partners", "partners"}, {"variant", method}});
        break;
      default:
        throw ValidationError("cannot train method " + method);
    }
    auto s = store();
    print_result(run_stages(s, read_json(config_path), seed, stages));
  });

  // eval
  auto* eval = app.add_subcommand("eval", "cross-play, ablation, behavior and preference analyses");
  eval->require_subcommand(1);
  std::vector<std::string> agent_ids, report_ids;
  std::vector<std::string> layouts;
  std::string population, partner, out_path, kind, runs_id, proxy_id, records_id;
  std::vector<std::string> exclude;
  int episodes = 10, horizon = env::kDefaultHorizon, threads = 1;

  auto* crossplay = eval->add_subcommand("crossplay", "agents x population x layouts");
  crossplay->add_option("--agents", agent_ids, "agent artifacts")->required();
  crossplay->add_option("--population", population, "population artifact")->required();
  crossplay->add_option("--layouts", layouts)->delimiter(',');
  crossplay->add_option("--seed", seed);
  crossplay->add_option("--episodes", episodes)->capture_default_str();
  crossplay->add_option("--horizon", horizon)->capture_default_str();
  crossplay->add_option("--threads", threads)->capture_default_str();
  crossplay->add_option("--out", out_path, "write JSON, or CSV when the name ends in .csv");
  crossplay->callback([&] {
    json stage{{"name", "crossplay"}, {"kind", "crossplay"}, {"agents", refs(agent_ids)},
               {"population", artifact_ref(population)}, {"episodes", episodes}, {"horizon", horizon},
               {"threads", threads}};
    if (!layouts.empty()) stage["layouts"] = layouts;
    auto s = store();
    const auto r = run_stages(s, json::object(), seed, json::array({stage}));
    const auto out = s.get_json(r.artifact("crossplay"));
    const auto report = evaluation::eval_report_from_json(out.at("report"));
    std::cerr << "artifact " << r.artifact("crossplay") << "\n";
    for (const auto m : report.methods()) {
      const auto a = report.aggregate(m);
      std::cerr << agents::to_string(m) << ": " << a.mean << " +- " << a.sd << " (" << a.agents << " agents)\n";
    }
    write_out(out_path, out_path.ends_with(".csv") ? evaluation::to_csv(report) : out.dump(2));
  });

  auto* heldout = eval->add_subcommand("heldout", "build a held-out population");
  heldout->add_option("--kind", kind, "DiverseSP, RandomInit or HumanProxy")->required();
  heldout->add_option("--runs", runs_id, "self-play run set artifact");
  heldout->add_option("--proxy", proxy_id, "proxy agent artifact");
  heldout->add_option("--exclude", exclude, "agent artifacts whose provenance must not overlap");
  heldout->callback([&] {
    json stage{{"name", "population"}, {"kind", "heldout"}, {"population_kind", kind}, {"exclude", refs(exclude)}};
    if (!runs_id.empty()) stage["runs"] = artifact_ref(runs_id);
    if (!proxy_id.empty()) stage["proxy"] = artifact_ref(proxy_id);
    auto s = store();
    print_result(run_stages(s, json::object(), 0, json::array({stage})));
  });

  auto* behavior = eval->add_subcommand("behavior", "movement and pot preference against one partner");
  behavior->add_option("--agents", agent_ids)->required();
  behavior->add_option("--partner", partner)->required();
  behavior->add_option("--layouts", layouts)->delimiter(',');
  behavior->add_option("--episodes", episodes)->capture_default_str();
  behavior->add_option("--horizon", horizon)->capture_default_str();
  behavior->add_option("--seed", seed);
  behavior->add_option("--out", out_path);
  behavior->callback([&] {
    json stage{{"name", "behavior"}, {"kind", "behavior"}, {"agents", refs(agent_ids)},
               {"partner", artifact_ref(partner)}, {"episodes", episodes}, {"horizon", horizon}};
    if (!layouts.empty()) stage["layouts"] = layouts;
    auto s = store();
    const auto r = run_stages(s, json::object(), seed, json::array({stage}));
    std::cerr << "artifact " << r.artifact("behavior") << "\n";
    write_out(out_path, s.get_json(r.artifact("behavior")).dump(2));
  });

  auto* prefs = eval->add_subcommand("prefs", "aggregate preference records");
  prefs->add_option("--records", records_id, "preference artifact (from the play service export)")->required();
  prefs->callback([&] {
    auto s = store();
    std::vector<evaluation::PreferenceRecord> records;
    for (const auto& r : s.get_json(records_id).at("records")) records.push_back(evaluation::preference_from_json(r));
    const auto m = evaluation::preference_aggregate(records);
    for (std::size_t i = 0; i < m.methods.size(); ++i) {
      for (std::size_t j = 0; j < m.methods.size(); ++j) {
        if (m.count[i][j] == 0) continue;
        std::cout << m.methods[i] << " over " << m.methods[j] << ": " << m.mean[i][j] << " +- " << m.ci95[i][j]
                  << " (n=" << m.count[i][j] << ")\n";
      }
    }
  });

  auto* ablation = eval->add_subcommand("ablation", "FCP variant table from cross-play reports");
  ablation->add_option("--reports", report_ids, "crossplay artifacts")->required();
  ablation->callback([&] {
    auto s = store();
    std::map<agents::Method, std::map<evaluation::PopulationKind, evaluation::EvalReport>> reports;
    for (const auto& id : report_ids) {
      const auto out = s.get_json(id);
      const auto pk = evaluation::population_kind_from_string(out.at("population_kind").get<std::string>());
      const auto report = evaluation::eval_report_from_json(out.at("report"));
      for (const auto m : report.methods()) reports[m][pk] = report;
    }
    std::cout << evaluation::ablation_table(reports).format();
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "population size sweep");
  std::vector<int> sizes{2, 4, 8};
  sweep->add_option("--config", config_path)->check(CLI::ExistingFile);
  sweep->add_option("--sizes", sizes)->delimiter(',')->capture_default_str();
  sweep->add_option("--seeds", seeds)->capture_default_str();
  sweep->add_option("--seed", seed);
  sweep->add_option("--proxy", proxy_id, "partner agent artifact (default: sloppy scripted proxy)");
  sweep->add_option("--episodes", episodes)->capture_default_str();
  sweep->add_option("--horizon", horizon)->capture_default_str();
  sweep->callback([&] {
    json stage{{"name", "sweep"}, {"kind", "sweep"}, {"sizes", sizes}, {"seeds", std::max(seeds, 1)},
               {"episodes", episodes}, {"horizon", horizon}};
    if (!proxy_id.empty()) stage["proxy"] = artifact_ref(proxy_id);
    auto s = store();
    const auto r = run_stages(s, read_json(config_path), seed, json::array({stage}));
    std::cerr << "artifact " << r.artifact("sweep") << "\n";
    training::SweepTable table;
    for (const auto& row : s.get_json(r.artifact("sweep")).at("table").at("rows")) {
      table.rows.push_back({row.at("size"), row.at("mean"), row.at("sd"), row.at("per_seed")});
    }
    std::cout << training::format(table);
  });

  // replay
  auto* replay = app.add_subcommand("replay", "re-simulate an episode log and compare");
  std::string log_id, log_file;
  replay->add_option("log", log_id, "log artifact id");
  replay->add_option("--file", log_file, "JSONL log file instead of an artifact")->check(CLI::ExistingFile);
  int replay_status = 0;
  replay->callback([&] {
    env::ReplayVerdict v;
    if (!log_file.empty()) {
      const auto log = env::from_jsonl(read_file(log_file));
      v = env::verify_replay(log, env::builtin_layout(log.header.layout));
    } else if (!log_id.empty()) {
      auto s = store();
      v = harness::replay(s, log_id);
    } else {
      throw ValidationError("replay needs a log id or --file");
    }
    if (v.pass) {
      std::cout << "pass\n";
    } else {
      std::cout << "FAIL at step " << (v.first_divergent_step ? std::to_string(*v.first_divergent_step) : "?")
                << ": " << v.reason << "\n";
      replay_status = 1;
    }
  });

  // figures
  auto* figures = app.add_subcommand("figures", "charts and CSV for stored outputs");
  std::vector<std::string> figure_ids;
  std::string out_dir = "figures";
  figures->add_option("artifacts", figure_ids)->required();
  figures->add_option("--out", out_dir)->capture_default_str();
  figures->callback([&] {
    auto s = store();
    for (const auto& f : harness::export_figures(s, figure_ids, out_dir)) std::cout << out_dir << "/" << f << "\n";
  });

  // serve
  auto* serve = app.add_subcommand("serve", "run the study play server");
  std::vector<std::string> cohort;
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  int tick_ms = 200;
  serve->add_option("--cohort", cohort, "agent or agent-set artifacts")->required();
  serve->add_option("--address", address)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--tick-ms", tick_ms)->capture_default_str();
  serve->add_option("--config", config_path, "study config JSON (layouts, episodes_per_layout, horizon)")
      ->check(CLI::ExistingFile);
  serve->callback([&] {
    auto s = store();
    auto study = std::make_shared<play::StudyConfig>();
    const json c = read_json(config_path);
    study->layouts = c.value("layouts", study->layouts);
    study->episodes_per_layout = c.value("episodes_per_layout", study->episodes_per_layout);
    study->horizon = c.value("horizon", study->horizon);
    study->tutorial_pages = c.value("tutorial_pages", study->tutorial_pages);
    for (const auto& id : cohort) {
      const auto out = s.get_json(id);
      if (out.value("type", "") == "agent") {
        study->cohort.push_back(harness::get_agent(s, id));
      } else {
        const auto list = harness::load_agents(s, out);
        study->cohort.insert(study->cohort.end(), list.begin(), list.end());
      }
    }
    play::ServerConfig sc;
    sc.address = address;
    sc.port = port;
    sc.tick_period = std::chrono::milliseconds(tick_ms);
    sc.study = study;
    sc.store_root = s.root();
    play::PlayServer server(sc);
    g_server = &server;
    std::signal(SIGINT, [](int) {
      if (g_server) g_server->stop();
    });
    std::cerr << "serving " << study->cohort.size() << " agents on " << address << ":" << port << "\n";
    server.run();
    g_server = nullptr;
  });

  // play
  auto* playc = app.add_subcommand("play", "join a study session as a scripted participant");
  std::string host = "127.0.0.1";
  double epsilon = 0.0;
  playc->add_option("--host", host)->capture_default_str();
  playc->add_option("--port", port)->capture_default_str();
  playc->add_option("--seed", seed);
  playc->add_option("--epsilon", epsilon, "participant noise")->capture_default_str();
  playc->callback([&] {
    const auto created = play::http_post(host, port, "/v1/sessions", {{"seed", seed}});
    play::HeadlessClient::Options opt;
    opt.style = agents::ScriptStyle::sloppy(epsilon);
    opt.seed = seed;
    const auto summary =
        play::HeadlessClient(host, port, created.at("session"), created.at("token"), opt).run();
    std::cout << "session " << created.at("session").get<std::string>() << " ended in phase " << summary.final_phase
              << "\n";
    for (std::size_t i = 0; i < summary.deliveries.size(); ++i) {
      std::cout << "episode " << i << ": " << summary.deliveries[i] << " deliveries\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return replay_status;
}
