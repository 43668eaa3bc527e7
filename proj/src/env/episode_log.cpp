#include "fcp/env/episode_log.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fcp/common/error.hpp"
#include "fcp/common/hash.hpp"

namespace fcp::env {

using nlohmann::json;

std::optional<std::string> EpisodeLog::tag(const std::string& key) const {
  for (const auto& [k, v] : header.tags) {
    if (k == key) return v;
  }
  return std::nullopt;
}

int EpisodeLog::deliveries() const {
  int n = 0;
  for (const auto& s : steps) {
    for (const auto& e : s.events) n += e.kind == EventKind::Delivered;
  }
  return n;
}

int EpisodeLog::deposits() const {
  int n = 0;
  for (const auto& s : steps) {
    for (const auto& e : s.events) n += e.kind == EventKind::TomatoDeposited;
  }
  return n;
}

int EpisodeLog::total_return() const {
  int r = 0;
  for (const auto& s : steps) r += s.rewards[0];
  return r;
}

EpisodeRecorder::EpisodeRecorder(const WorldState& initial, std::array<std::string, 2> agents) {
  log_.header.layout = initial.layout->name();
  log_.header.seed = initial.seed;
  log_.header.agents = std::move(agents);
  log_.header.horizon = initial.horizon;
  log_.steps.reserve(initial.horizon);
}

void EpisodeRecorder::record(const JointAction& actions, const StepOutcome& outcome,
                             const WorldState& after) {
  EpisodeLog::Step s;
  s.actions = actions;
  s.rewards = outcome.rewards;
  s.events = outcome.events;
  s.positions = {after.players[0].position, after.players[1].position};
  s.moved = outcome.moved;
  s.state_hash = state_hash(after);
  log_.steps.push_back(std::move(s));
}

void EpisodeRecorder::tag(std::string key, std::string value) {
  log_.header.tags.emplace_back(std::move(key), std::move(value));
}

namespace {

json event_to_json(const Event& e) {
  json j = {{"kind", to_string(e.kind)}, {"player", e.player}, {"cell", {e.cell.x, e.cell.y}}};
  if (e.pot >= 0) j["pot"] = e.pot;
  if (e.item) j["item"] = to_string(*e.item);
  return j;
}

Event event_from_json(const json& j) {
  Event e{};
  const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw Error("unknown event kind");
  e.kind = *kind;
  e.player = j.at("player").get<int>();
  e.cell = {j.at("cell").at(0).get<int>(), j.at("cell").at(1).get<int>()};
  e.pot = j.value("pot", -1);
  if (j.contains("item")) {
    const auto item = item_from_string(j.at("item").get<std::string>());
    if (!item) throw Error("unknown item");
    e.item = item;
  }
  return e;
}

}  // namespace

void write_jsonl(const EpisodeLog& log, std::ostream& out) {
  json tags = json::object();
  for (const auto& [k, v] : log.header.tags) tags[k] = v;
  const json header = {{"type", "header"},
                       {"version", EpisodeLog::kFormatVersion},
                       {"layout", log.header.layout},
                       {"seed", log.header.seed},
                       {"agents", log.header.agents},
                       {"horizon", log.header.horizon},
                       {"tags", tags}};
  out << header.dump() << '\n';
  for (const auto& s : log.steps) {
    json events = json::array();
    for (const auto& e : s.events) events.push_back(event_to_json(e));
    const json line = {
        {"actions", {static_cast<int>(s.actions[0]), static_cast<int>(s.actions[1])}},
        {"rewards", s.rewards},
        {"events", events},
        {"positions", {{s.positions[0].x, s.positions[0].y}, {s.positions[1].x, s.positions[1].y}}},
        {"moved", s.moved},
        {"state", to_hex(s.state_hash)}};
    out << line.dump() << '\n';
  }
}

std::string to_jsonl(const EpisodeLog& log) {
  std::ostringstream out;
  write_jsonl(log, out);
  return out.str();
}

EpisodeLog read_jsonl(std::istream& in) {
  EpisodeLog log;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("type", "") != "header") throw Error("first line is not a header");
        if (j.value("version", 0) != EpisodeLog::kFormatVersion) {
          throw Error("unsupported log version");
        }
        log.header.layout = j.at("layout").get<std::string>();
        log.header.seed = j.at("seed").get<std::uint64_t>();
        log.header.agents = j.at("agents").get<std::array<std::string, 2>>();
        log.header.horizon = j.at("horizon").get<int>();
        if (j.contains("tags")) {
          for (const auto& [k, v] : j.at("tags").items()) {
            log.header.tags.emplace_back(k, v.get<std::string>());
          }
        }
        have_header = true;
        continue;
      }
      EpisodeLog::Step s;
      for (int i = 0; i < 2; ++i) {
        const int a = j.at("actions").at(i).get<int>();
        if (a < 0 || a >= kNumActions) throw Error("action out of range");
        s.actions[i] = static_cast<Action>(a);
        s.rewards[i] = j.at("rewards").at(i).get<int>();
        s.positions[i] = {j.at("positions").at(i).at(0).get<int>(),
                          j.at("positions").at(i).at(1).get<int>()};
        s.moved[i] = j.at("moved").at(i).get<bool>();
      }
      for (const auto& e : j.at("events")) s.events.push_back(event_from_json(e));
      s.state_hash = std::stoull(j.at("state").get<std::string>(), nullptr, 16);
      log.steps.push_back(std::move(s));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(std::string("malformed episode log: ") + e.what(), line_no, 1);
    }
  }
  if (!have_header) throw ParseError("episode log has no header", line_no + 1, 1);
  return log;
}

EpisodeLog from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_jsonl(in);
}

ReplayVerdict verify_replay(const EpisodeLog& log, const LayoutPtr& layout) {
  ReplayVerdict v;
  if (!layout || layout->name() != log.header.layout) {
    v.reason = "layout mismatch";
    v.first_divergent_step = 0;
    return v;
  }
  if (static_cast<int>(log.steps.size()) > log.header.horizon) {
    v.reason = "log longer than its horizon";
    v.first_divergent_step = log.header.horizon;
    return v;
  }
  WorldState s = reset(layout, log.header.seed, log.header.horizon);
  for (std::size_t t = 0; t < log.steps.size(); ++t) {
    const auto& rec = log.steps[t];
    const StepOutcome out = step(s, rec.actions);
    const auto diverge = [&](std::string why) {
      v.first_divergent_step = static_cast<int>(t);
      v.reason = std::move(why) + " at step " + std::to_string(t);
      return v;
    };
    if (out.rewards != rec.rewards) return diverge("reward mismatch");
    if (out.events != rec.events) return diverge("event mismatch");
    if (out.moved != rec.moved) return diverge("movement mismatch");
    if (rec.positions[0] != s.players[0].position || rec.positions[1] != s.players[1].position) {
      return diverge("position mismatch");
    }
    if (state_hash(s) != rec.state_hash) return diverge("state mismatch");
  }
  v.pass = true;
  return v;
}

std::vector<WorldState> replay_states(const EpisodeLog& log, const LayoutPtr& layout) {
  std::vector<WorldState> states;
  states.reserve(log.steps.size() + 1);
  WorldState s = reset(layout, log.header.seed, log.header.horizon);
  states.push_back(s);
  for (const auto& rec : log.steps) {
    step(s, rec.actions);
    states.push_back(s);
  }
  return states;
}

}  // namespace fcp::env
