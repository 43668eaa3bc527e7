#include "fcp/play/session.hpp"

#include <algorithm>
#include <numeric>

#include "fcp/common/error.hpp"
#include "fcp/harness/pipeline.hpp"

namespace fcp::play {

using nlohmann::json;

namespace {

// The practice kitchen has no time limit; an attempt that runs this long
// without a delivery silently starts over.
constexpr int kPracticeAttemptSteps = 3000;

constexpr std::array<std::string_view, 8> kColors = {"blue",  "orange", "green", "purple",
                                                     "red",   "teal",   "brown", "pink"};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
}

}  // namespace

std::vector<PlannedEpisode> plan_study(const StudyConfig& config, std::uint64_t seed) {
  if (config.layouts.empty() || config.episodes_per_layout < 1) {
    throw ValidationError("study needs at least one layout and one episode per layout");
  }
  if (static_cast<int>(config.cohort.size()) < config.episodes_per_layout) {
    throw ValidationError("cohort has " + std::to_string(config.cohort.size()) +
                          " agents; each layout needs " + std::to_string(config.episodes_per_layout) +
                          " distinct partners");
  }
  for (const auto& name : config.layouts) env::builtin_layout(name);

  Rng rng(derive_seed(seed, 0x57d7));
  std::vector<std::string> order = config.layouts;
  shuffle(order, rng);
  std::vector<PlannedEpisode> plan;
  for (const auto& layout : order) {
    std::vector<int> agents(config.cohort.size());
    std::iota(agents.begin(), agents.end(), 0);
    shuffle(agents, rng);
    for (int k = 0; k < config.episodes_per_layout; ++k) {
      PlannedEpisode e;
      e.layout = layout;
      e.agent = agents[k];
      e.agent_seat = rng.below(2);
      e.seed = derive_seed(seed, plan.size() + 1);
      plan.push_back(e);
    }
  }
  return plan;
}

StudySession::StudySession(std::string id, std::string token, std::shared_ptr<const StudyConfig> config,
                           std::uint64_t seed)
    : id_(std::move(id)),
      token_(std::move(token)),
      config_(std::move(config)),
      seed_(seed),
      plan_(plan_study(*config_, seed)) {
  color_order_.resize(config_->cohort.size());
  std::iota(color_order_.begin(), color_order_.end(), 0);
  Rng rng(derive_seed(seed, 0xc010));
  shuffle(color_order_, rng);
  if (config_->tutorial_pages.empty()) {
    phase_ = Phase::Practice;
    start_episode();
  }
}

std::string StudySession::partner_color(int agent) const {
  const int slot = color_order_.at(agent);
  std::string name(kColors[slot % kColors.size()]);
  if (slot >= static_cast<int>(kColors.size())) name += " " + std::to_string(slot / kColors.size() + 1);
  return name;
}

json StudySession::phase_payload() const {
  switch (phase_) {
    case Phase::Tutorial:
      return {{"page", page_},
              {"pages", config_->tutorial_pages.size()},
              {"text", config_->tutorial_pages[page_]}};
    case Phase::Practice:
      return {{"layout", config_->practice_layout}, {"human_seat", human_seat_}};
    case Phase::Playing: {
      const auto& e = plan_[episode_];
      return {{"episode", episode_},
              {"episodes", plan_.size()},
              {"layout", e.layout},
              {"partner", partner_color(e.agent)},
              {"human_seat", 1 - e.agent_seat},
              {"horizon", config_->horizon}};
    }
    case Phase::Preference: {
      const auto& a = plan_[episode_ - 2];
      const auto& b = plan_[episode_ - 1];
      return {{"episodes", {episode_ - 2, episode_ - 1}},
              {"partner_a", partner_color(a.agent)},
              {"partner_b", partner_color(b.agent)},
              {"scale", {-2, -1, 0, 1, 2}}};
    }
    case Phase::Debrief:
      return {{"episodes", completed_.size()}, {"score", score_}};
    case Phase::Done:
      return json::object();
  }
  return json::object();
}

void StudySession::advance() {
  if (phase_ == Phase::Tutorial) {
    if (++page_ >= static_cast<int>(config_->tutorial_pages.size())) {
      phase_ = Phase::Practice;
      start_episode();
    }
    return;
  }
  if (phase_ == Phase::Debrief) {
    phase_ = Phase::Done;
    return;
  }
  throw ContractViolation("advance is not valid in phase " + std::string(to_string(phase_)));
}

void StudySession::input(env::Action action) {
  if (!ticking()) throw ContractViolation("input outside an episode");
  pending_ = action;
}

void StudySession::start_episode() {
  pending_ = env::Action::Noop;
  if (phase_ == Phase::Practice) {
    human_seat_ = 0;
    state_ = env::reset(env::builtin_layout(config_->practice_layout), derive_seed(seed_, 0x9a), kPracticeAttemptSteps);
    agent_ = std::make_unique<agents::IdleController>();
    recorder_.emplace(*state_, std::array<std::string, 2>{"human:" + id_, "idle"});
    recorder_->tag("session", id_);
    recorder_->tag("practice", "1");
    recorder_->tag("human_seat", "0");
    agent_->begin_episode(*state_, 1);
    score_ = 0;
    return;
  }
  const auto& e = plan_[episode_];
  const auto& spec = config_->cohort[e.agent];
  human_seat_ = 1 - e.agent_seat;
  state_ = env::reset(env::builtin_layout(e.layout), e.seed, config_->horizon);
  agent_ = spec.make_controller(config_->stochastic_agents, derive_seed(e.seed, 0xa6));
  act_rng_ = Rng(derive_seed(e.seed, 0xac));
  std::array<std::string, 2> ids;
  ids[e.agent_seat] = spec.id;
  ids[human_seat_] = "human:" + id_;
  recorder_.emplace(*state_, ids);
  recorder_->tag("session", id_);
  recorder_->tag("episode", std::to_string(episode_));
  recorder_->tag("human_seat", std::to_string(human_seat_));
  recorder_->tag("partner", partner_color(e.agent));
  recorder_->tag("method", std::string(agents::to_string(spec.method)));
  agent_->begin_episode(*state_, e.agent_seat);
  score_ = 0;
}

StudySession::TickResult StudySession::tick() {
  if (!ticking()) throw ContractViolation("tick outside an episode");
  env::WorldState& s = *state_;
  const int agent_seat = 1 - human_seat_;
  env::JointAction actions;
  actions[agent_seat] = agent_->act(s, agent_seat, act_rng_);
  actions[human_seat_] = pending_;
  pending_ = env::Action::Noop;

  const auto outcome = env::step(s, actions);
  recorder_->record(actions, outcome, s);
  score_ += outcome.rewards[human_seat_];

  TickResult r;
  r.frame = frame_message(s, score_, human_seat_);
  if (phase_ == Phase::Practice) {
    const bool delivered = std::any_of(outcome.events.begin(), outcome.events.end(),
                                       [](const env::Event& e) { return e.kind == env::EventKind::Delivered; });
    if (delivered) {
      practice_log_ = std::move(*recorder_).take();
      r.episode_end = episode_end_message(-1, 1, score_);
      phase_ = Phase::Playing;
      r.phase_changed = true;
      start_episode();
    } else if (outcome.done) {
      start_episode();
    }
    return r;
  }
  if (outcome.done) {
    r.episode_end = episode_end_message(episode_, recorder_->log().deliveries(), score_);
    finish_episode();
    r.phase_changed = true;
  }
  return r;
}

void StudySession::finish_episode() {
  completed_.push_back(std::move(*recorder_).take());
  recorder_.reset();
  state_.reset();
  agent_.reset();
  ++episode_;
  if (episode_ % 2 == 0) {
    phase_ = Phase::Preference;
  } else {
    start_episode();
  }
}

evaluation::PreferenceRecord StudySession::submit_preference(int rating, std::int64_t timestamp_ms) {
  if (phase_ != Phase::Preference) {
    throw ContractViolation("no preference is due in phase " + std::string(to_string(phase_)));
  }
  if (rating < -2 || rating > 2) throw ValidationError("rating must be an integer in -2..2");
  const auto& a = plan_[episode_ - 2];
  const auto& b = plan_[episode_ - 1];
  evaluation::PreferenceRecord r;
  r.session = id_;
  r.episodes = {episode_ - 2, episode_ - 1};
  r.agent_a = config_->cohort[a.agent].id;
  r.agent_b = config_->cohort[b.agent].id;
  r.method_a = agents::to_string(config_->cohort[a.agent].method);
  r.method_b = agents::to_string(config_->cohort[b.agent].method);
  r.rating = rating;
  r.timestamp_ms = timestamp_ms;
  preferences_.push_back(r);
  if (episode_ >= static_cast<int>(plan_.size())) {
    phase_ = Phase::Debrief;
  } else {
    phase_ = Phase::Playing;
    start_episode();
  }
  return r;
}

void StudySession::disconnect() {
  if (!ticking() || !recorder_) return;
  if (!recorder_->log().steps.empty()) {
    auto log = std::move(*recorder_).take();
    log.header.tags.emplace_back("abandoned", "1");
    abandoned_.push_back(std::move(log));
  }
  start_episode();
}

StudyExport export_study(harness::ArtifactStore& store, const std::vector<const StudySession*>& sessions) {
  json logs = json::array();
  json records = json::array();
  json ids = json::array();
  StudyExport out;
  for (const auto* s : sessions) {
    if (s->completed().empty()) continue;
    ++out.sessions;
    ids.push_back(s->id());
    for (const auto& log : s->completed()) {
      logs.push_back(harness::put_log(store, log));
      ++out.episodes;
    }
    for (const auto& r : s->preferences()) records.push_back(evaluation::to_json(r));
  }
  out.logs = store.put_json({{"type", "logs"}, {"logs", logs}});
  out.preferences = store.put_json({{"type", "preferences"}, {"records", records}, {"sessions", ids}});
  return out;
}

}  // namespace fcp::play
