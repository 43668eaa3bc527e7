#include "fcp/env/render.hpp"

namespace fcp::env {

RenderFrame render_topdown(const WorldState& s) {
  const Layout& layout = *s.layout;
  RenderFrame frame;
  frame.tick = s.step;
  frame.width = layout.width();
  frame.height = layout.height();
  for (int y = 0; y < layout.height(); ++y) {
    std::string row;
    for (int x = 0; x < layout.width(); ++x) {
      static constexpr char kGlyph[] = {'.', '#', 'T', 'D', 'P', 'X'};
      row.push_back(kGlyph[static_cast<int>(layout.at({x, y}))]);
    }
    frame.grid.push_back(std::move(row));
  }
  for (const auto& p : s.players) frame.players.push_back({p.position, p.orientation, p.held});
  for (std::size_t i = 0; i < s.pots.size(); ++i) {
    const PotState& pot = s.pots[i];
    frame.pots.push_back({layout.pots()[i], pot.tomato_count,
                          static_cast<double>(pot.cook_progress) / kCookSteps, pot.phase()});
  }
  for (int i = 0; i < layout.cell_count(); ++i) {
    if (s.counter_items[i]) frame.counter_items.push_back({layout.pos_of(i), *s.counter_items[i]});
  }
  return frame;
}

nlohmann::json to_json(const RenderFrame& frame) {
  nlohmann::json players = nlohmann::json::array();
  for (const auto& p : frame.players) {
    players.push_back({{"x", p.position.x},
                       {"y", p.position.y},
                       {"orientation", to_string(p.orientation)},
                       {"held", p.held ? nlohmann::json(to_string(*p.held)) : nlohmann::json()}});
  }
  nlohmann::json pots = nlohmann::json::array();
  for (const auto& p : frame.pots) {
    pots.push_back({{"x", p.position.x},
                    {"y", p.position.y},
                    {"tomatoes", p.tomatoes},
                    {"progress", p.progress},
                    {"phase", to_string(p.phase)}});
  }
  nlohmann::json items = nlohmann::json::array();
  for (const auto& c : frame.counter_items) {
    items.push_back({{"x", c.position.x}, {"y", c.position.y}, {"item", to_string(c.item)}});
  }
  return {{"tick", frame.tick},     {"width", frame.width}, {"height", frame.height},
          {"grid", frame.grid},     {"players", players},   {"pots", pots},
          {"counter_items", items}};
}

}  // namespace fcp::env
