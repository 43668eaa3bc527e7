#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/agents/agent_spec.hpp"
#include "fcp/env/episode_log.hpp"
#include "fcp/evaluation/evaluation.hpp"
#include "fcp/harness/store.hpp"
#include "fcp/play/protocol.hpp"

namespace fcp::play {

struct StudyConfig {
  std::vector<agents::AgentSpec> cohort;
  std::vector<std::string> layouts{"cramped", "asymmetric", "ring", "circuit", "forced"};
  int episodes_per_layout = 4;
  int horizon = 300;
  std::string practice_layout = "tutorial";
  bool stochastic_agents = true;
  std::vector<std::string> tutorial_pages{
      "Welcome. You will cook tomato soup together with a series of partners.",
      "Move with the arrow keys. Press space to interact with the cell you are facing.",
      "Put three tomatoes in a pot. It cooks for a few seconds, then collect it with a dish.",
      "Serve the soup at the delivery window. Every soup served adds 20 points to your shared score.",
      "Next is a practice kitchen on your own. Serve one soup to continue."};

  int episodes() const { return static_cast<int>(layouts.size()) * episodes_per_layout; }
};

struct PlannedEpisode {
  std::string layout;
  int agent = 0;  // index into the cohort
  int agent_seat = 0;
  std::uint64_t seed = 0;
};

// Randomized episode sequence: a permutation of the layouts, each played for
// episodes_per_layout consecutive episodes with distinct partners drawn
// without replacement. Throws ValidationError if the cohort is too small.
std::vector<PlannedEpisode> plan_study(const StudyConfig& config, std::uint64_t seed);

// One participant's progress through the study. Time-free: the server calls
// tick() on its clock, tests can call it directly.
class StudySession {
 public:
  StudySession(std::string id, std::string token, std::shared_ptr<const StudyConfig> config,
               std::uint64_t seed);

  const std::string& id() const { return id_; }
  const std::string& token() const { return token_; }
  Phase phase() const { return phase_; }
  const std::vector<PlannedEpisode>& plan() const { return plan_; }
  int episode_index() const { return episode_; }
  bool ticking() const { return phase_ == Phase::Practice || phase_ == Phase::Playing; }

  // Payload of the phase message for the current phase.
  nlohmann::json phase_payload() const;

  // Tutorial pages and the debrief screen move on with advance(); other
  // phases reject it with ContractViolation.
  void advance();

  // Latest-wins buffer, consumed by the next tick.
  void input(env::Action action);

  struct TickResult {
    nlohmann::json frame;
    std::optional<nlohmann::json> episode_end;
    bool phase_changed = false;
  };
  // One environment step with the buffered human action (Noop when nothing
  // arrived) and the agent's action chosen from the pre-step state.
  TickResult tick();

  // Throws ContractViolation outside the preference phase and
  // ValidationError for ratings outside -2..2.
  evaluation::PreferenceRecord submit_preference(int rating, std::int64_t timestamp_ms);

  // Drops the episode in progress; it is marked abandoned and restarts from
  // scratch when the participant reconnects.
  void disconnect();

  const std::vector<env::EpisodeLog>& completed() const { return completed_; }
  const std::vector<env::EpisodeLog>& abandoned() const { return abandoned_; }
  const std::optional<env::EpisodeLog>& practice_log() const { return practice_log_; }
  const std::vector<evaluation::PreferenceRecord>& preferences() const { return preferences_; }

  // Participant-facing partner label, stable per cohort agent in a session.
  std::string partner_color(int agent) const;

 private:
  void start_episode();
  void finish_episode();

  std::string id_;
  std::string token_;
  std::shared_ptr<const StudyConfig> config_;
  std::uint64_t seed_;
  std::vector<PlannedEpisode> plan_;
  std::vector<int> color_order_;

  Phase phase_ = Phase::Tutorial;
  int page_ = 0;
  int episode_ = 0;

  std::optional<env::WorldState> state_;
  std::optional<env::EpisodeRecorder> recorder_;
  agents::ControllerPtr agent_;
  Rng act_rng_;
  int human_seat_ = 0;
  int score_ = 0;
  env::Action pending_ = env::Action::Noop;

  std::vector<env::EpisodeLog> completed_;
  std::vector<env::EpisodeLog> abandoned_;
  std::optional<env::EpisodeLog> practice_log_;
  std::vector<evaluation::PreferenceRecord> preferences_;
};

struct StudyExport {
  std::string logs;         // artifact of type "logs"
  std::string preferences;  // artifact of type "preferences"
  int sessions = 0;
  int episodes = 0;
};

// Stores the completed study episodes and preference records of every
// session that finished at least one episode. Practice and abandoned
// episodes are left out.
StudyExport export_study(harness::ArtifactStore& store,
                         const std::vector<const StudySession*>& sessions);

}  // namespace fcp::play
