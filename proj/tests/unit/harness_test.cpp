#include <gtest/gtest.h>

#include <filesystem>

#include "fcp/agents/rollout.hpp"
#include "fcp/common/error.hpp"
#include "fcp/common/io.hpp"
#include "fcp/harness/pipeline.hpp"

namespace fcp::harness {
namespace {

using nlohmann::json;

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = std::filesystem::temp_directory_path() /
            ("fcp_harness_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(root_);
  }
  void TearDown() override { std::filesystem::remove_all(root_); }

  json small_pipeline() const {
    auto j = json::parse(R"({
      "seed": 3,
      "defaults": {"total_steps": 800, "checkpoint_every": 400, "num_envs": 4, "rollout_length": 10,
                   "eval_episodes": 1, "horizon": 40, "population_size": 2, "arch": "w16"},
      "stages": [
        {"name": "partners", "kind": "fcp_partners"},
        {"name": "fcp", "kind": "best_response", "partners": "partners"},
        {"name": "sp_runs", "kind": "self_play", "seeds": [11]},
        {"name": "sp", "kind": "agents_from_runs", "runs": "sp_runs"},
        {"name": "heldout_runs", "kind": "heldout_runs", "seeds": 1},
        {"name": "diverse", "kind": "heldout", "population_kind": "DiverseSP", "runs": "heldout_runs",
         "exclude": ["fcp", "sp"]},
        {"name": "eval", "kind": "crossplay", "agents": ["fcp", "sp"], "population": "diverse",
         "episodes": 2, "horizon": 30},
        {"name": "plots", "kind": "figures", "reports": ["eval"], "run_sets": ["sp_runs"]}
      ]})");
    j["stages"][7]["out_dir"] = (root_ / "figures").string();
    return j;
  }

  std::filesystem::path root_;
};

TEST_F(HarnessTest, RerunIsANoOp) {
  ArtifactStore store(root_ / "store");
  const auto first = run_pipeline(small_pipeline(), store);
  EXPECT_EQ(first.executed_count(), 8);
  const auto second = run_pipeline(small_pipeline(), store);
  EXPECT_EQ(second.executed_count(), 0);
  for (std::size_t i = 0; i < first.stages.size(); ++i) {
    EXPECT_EQ(first.stages[i].artifact, second.stages[i].artifact);
  }

  const auto report = store.get_json(first.artifact("eval"));
  EXPECT_EQ(report.at("report").at("cells").size(), 2u * 12u) << "two agents, 4 runs x 3 checkpoints, one layout";
  EXPECT_TRUE(std::filesystem::exists(root_ / "figures"));
  EXPECT_EQ(store.get_json(first.artifact("plots")).at("files").size(), 4u);
}

TEST_F(HarnessTest, DeletingAnArtifactRerunsOnlyThatStage) {
  ArtifactStore store(root_ / "store");
  const auto first = run_pipeline(small_pipeline(), store);
  ASSERT_TRUE(store.remove(first.artifact("eval")));
  std::vector<std::string> log;
  const auto again = run_pipeline(small_pipeline(), store, [&](const std::string& l) { log.push_back(l); });
  ASSERT_EQ(again.executed_count(), 1);
  for (const auto& s : again.stages) EXPECT_EQ(s.executed, s.name == "eval") << s.name;
  EXPECT_EQ(again.artifact("eval"), first.artifact("eval")) << "recomputation is deterministic";
}

TEST_F(HarnessTest, ChangedParametersInvalidateDownstreamOnly) {
  ArtifactStore store(root_ / "store");
  run_pipeline(small_pipeline(), store);
  auto changed = small_pipeline();
  changed["stages"][6]["episodes"] = 4;
  const auto result = run_pipeline(changed, store);
  std::set<std::string> executed;
  for (const auto& s : result.stages) {
    if (s.executed) executed.insert(s.name);
  }
  EXPECT_EQ(executed, (std::set<std::string>{"eval", "plots"}));
}

TEST(PipelineTest, DependencyErrors) {
  const auto cyclic = json::parse(R"({"stages": [
      {"name": "a", "kind": "bc", "data": "b"},
      {"name": "b", "kind": "bcp", "partner": "a"}]})");
  try {
    stage_order(cyclic);
    FAIL() << "cycle accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
  }
  const auto missing = json::parse(R"({"stages": [{"name": "a", "kind": "bc", "data": "nowhere"}]})");
  EXPECT_THROW(stage_order(missing), ValidationError);
  const auto duplicate = json::parse(R"({"stages": [{"name": "a", "kind": "scripted"},
                                                     {"name": "a", "kind": "scripted"}]})");
  EXPECT_THROW(stage_order(duplicate), ValidationError);
  EXPECT_THROW(stage_order(json::parse(R"({"stages": {}})")), ValidationError);

  const auto ordered = json::parse(R"({"stages": [
      {"name": "c", "kind": "crossplay", "agents": ["b"], "population": "a"},
      {"name": "b", "kind": "scripted"},
      {"name": "a", "kind": "scripted", "style": "sloppy:0.5"}]})");
  EXPECT_EQ(stage_order(ordered), (std::vector<std::string>{"b", "a", "c"}));
}

TEST(PipelineTest, ShippedConfigsResolve) {
  for (const char* name : {"smoke.json", "desk.json"}) {
    const auto pipeline = json::parse(read_file(std::filesystem::path(FCP_CONFIG_DIR) / name));
    const auto order = stage_order(pipeline);
    EXPECT_EQ(order.size(), pipeline["stages"].size()) << name;
    EXPECT_EQ(order.back(), "plots") << name;
  }
}

TEST_F(HarnessTest, UnknownKindFails) {
  ArtifactStore store(root_ / "store");
  EXPECT_THROW(run_pipeline(json::parse(R"({"stages": [{"name": "x", "kind": "teleport"}]})"), store),
               ValidationError);
}

TEST_F(HarnessTest, DemonstrationsToBcToBcp) {
  ArtifactStore store(root_ / "store");
  const auto pipeline = json::parse(R"({
    "seed": 1,
    "defaults": {"total_steps": 800, "checkpoint_every": 400, "num_envs": 4, "rollout_length": 10,
                 "eval_episodes": 1, "horizon": 40, "arch": "w16", "layouts": ["cramped", "ring"]},
    "stages": [
      {"name": "demos", "kind": "demonstrations", "episodes_per_layout": 2, "horizon": 60},
      {"name": "bc_partner", "kind": "bc", "data": "demos", "epochs": 1, "arch": "w16"},
      {"name": "bc_proxy", "kind": "bc", "data": "demos", "split": "proxy", "epochs": 1, "arch": "w16"},
      {"name": "bcp", "kind": "bcp", "partner": "bc_partner"},
      {"name": "proxy_pop", "kind": "heldout", "population_kind": "HumanProxy", "proxy": "bc_proxy",
       "exclude": ["bcp"]},
      {"name": "eval", "kind": "crossplay", "agents": ["bcp"], "population": "proxy_pop",
       "episodes": 2, "horizon": 30},
      {"name": "moves", "kind": "behavior", "agents": ["bcp"], "partner": "bc_proxy", "episodes": 2,
       "horizon": 30}
    ]})");
  const auto result = run_pipeline(pipeline, store);
  const auto logs = load_logs(store, store.get_json(result.artifact("demos")));
  EXPECT_EQ(logs.size(), 4u);
  const auto bcp = load_agents(store, store.get_json(result.artifact("bcp")));
  ASSERT_EQ(bcp.size(), 1u);
  EXPECT_EQ(bcp[0].method, agents::Method::BCP);
  EXPECT_EQ(store.get_json(result.artifact("eval"))["report"]["cells"].size(), 2u);
  EXPECT_EQ(store.get_json(result.artifact("moves"))["samples"].size(), 4u);

  const auto files = export_figures(store, {result.artifact("moves")}, root_ / "figs");
  EXPECT_EQ(files.size(), 3u);
}

TEST_F(HarnessTest, RunArtifactsRoundTrip) {
  ArtifactStore store(root_ / "store");
  training::TrainConfig c;
  c.total_steps = 800;
  c.checkpoint_every = 400;
  c.num_envs = 4;
  c.rollout_length = 10;
  c.eval_episodes = 1;
  c.horizon = 30;
  const auto run = training::train_self_play(c, {16, agents::Memory::FrameStack}, 2);
  const auto back = get_run(store, put_run(store, run));
  EXPECT_EQ(back.run_id, run.run_id);
  ASSERT_EQ(back.checkpoints.size(), run.checkpoints.size());
  for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
    EXPECT_EQ(*back.checkpoints[i].params, *run.checkpoints[i].params);
    EXPECT_EQ(back.checkpoints[i].reward, run.checkpoints[i].reward);
  }
  EXPECT_EQ(put_run(store, back), put_run(store, run));
}

TEST_F(HarnessTest, ReplayDetectsTampering) {
  ArtifactStore store(root_ / "store");
  agents::ScriptedController a(agents::ScriptStyle::sloppy(0.2), 1), b(agents::ScriptStyle::efficient(), 2);
  const auto log = agents::play_episode(env::builtin_layout("circuit"), 4, 200, {&a, &b}, {"a", "b"});
  EXPECT_TRUE(replay(store, put_log(store, log)).pass);

  auto tampered = log;
  auto& act = tampered.steps[57].actions[0];
  act = act == env::Action::Noop ? env::Action::Interact : env::Action::Noop;
  const auto verdict = replay(store, put_log(store, tampered));
  EXPECT_FALSE(verdict.pass);
  ASSERT_TRUE(verdict.first_divergent_step.has_value());
  EXPECT_GE(*verdict.first_divergent_step, 57);
  EXPECT_THROW(replay(store, std::string(64, 'a')), NotFound);
}

TEST_F(HarnessTest, StoreIsContentAddressed) {
  ArtifactStore store(root_ / "store");
  const auto id = store.put("hello");
  EXPECT_EQ(id, "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824");
  EXPECT_EQ(store.put("hello"), id);
  EXPECT_EQ(store.get(id), "hello");
  EXPECT_EQ(store.list().size(), 1u);
  store.bind("k", id);
  EXPECT_EQ(store.lookup("k"), id);
  EXPECT_FALSE(store.lookup("other").has_value());
  EXPECT_THROW(store.get("../../etc/passwd"), ValidationError);
  EXPECT_TRUE(store.remove(id));
  EXPECT_THROW(store.get(id), NotFound);
}

}  // namespace
}  // namespace fcp::harness
