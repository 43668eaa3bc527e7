#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fcp/env/world.hpp"

namespace fcp::env {

// A replayable trajectory. Serialized as JSON lines: a header object, then
// one object per step.
struct EpisodeLog {
  static constexpr int kFormatVersion = 1;

  struct Header {
    std::string layout;
    std::uint64_t seed = 0;
    // Agent id per seat.
    std::array<std::string, 2> agents;
    int horizon = kDefaultHorizon;
    // Free-form annotations (e.g. human seat, session id).
    std::vector<std::pair<std::string, std::string>> tags;
  };

  struct Step {
    JointAction actions{Action::Noop, Action::Noop};
    std::array<int, 2> rewards{0, 0};
    std::vector<Event> events;
    // Positions after the step and whether each player moved.
    std::array<Pos, 2> positions;
    std::array<bool, 2> moved{false, false};
    std::uint64_t state_hash = 0;
  };

  Header header;
  std::vector<Step> steps;

  std::optional<std::string> tag(const std::string& key) const;

  int deliveries() const;
  int deposits() const;
  int total_return() const;  // player 0's return (equal to player 1's)
};

// Records steps as they happen.
class EpisodeRecorder {
 public:
  EpisodeRecorder(const WorldState& initial, std::array<std::string, 2> agents);

  void record(const JointAction& actions, const StepOutcome& outcome, const WorldState& after);
  void tag(std::string key, std::string value);

  const EpisodeLog& log() const { return log_; }
  EpisodeLog take() && { return std::move(log_); }

 private:
  EpisodeLog log_;
};

void write_jsonl(const EpisodeLog& log, std::ostream& out);
std::string to_jsonl(const EpisodeLog& log);
// Throws ParseError on malformed input.
EpisodeLog read_jsonl(std::istream& in);
EpisodeLog from_jsonl(const std::string& text);

struct ReplayVerdict {
  bool pass = false;
  // First step index whose rewards, events or state differ.
  std::optional<int> first_divergent_step;
  std::string reason;
};

// Re-simulates the log's actions from reset(layout, seed) and compares
// rewards, events, positions and state hashes exactly.
ReplayVerdict verify_replay(const EpisodeLog& log, const LayoutPtr& layout);

// Reconstructs the state before every step (size = steps + 1).
std::vector<WorldState> replay_states(const EpisodeLog& log, const LayoutPtr& layout);

}  // namespace fcp::env
