#include "fcp/env/layout.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <queue>
#include <sstream>

#include "fcp/common/error.hpp"

namespace fcp::env {

namespace {

constexpr std::array<Pos, 4> kNeighbours = {Pos{0, -1}, Pos{0, 1}, Pos{-1, 0}, Pos{1, 0}};

char glyph(CellKind k) {
  switch (k) {
    case CellKind::Floor: return '.';
    case CellKind::Counter: return '#';
    case CellKind::TomatoStation: return 'T';
    case CellKind::DishStation: return 'D';
    case CellKind::Pot: return 'P';
    case CellKind::Delivery: return 'X';
  }
  return '?';
}

std::string_view kind_name(CellKind k) {
  switch (k) {
    case CellKind::Floor: return "Floor";
    case CellKind::Counter: return "Counter";
    case CellKind::TomatoStation: return "TomatoStation";
    case CellKind::DishStation: return "DishStation";
    case CellKind::Pot: return "Pot";
    case CellKind::Delivery: return "Delivery";
  }
  return "?";
}

}  // namespace

Layout::Layout(std::string name, int width, int height, std::vector<CellKind> cells,
               std::array<Pos, 2> spawns)
    : name_(std::move(name)),
      width_(width),
      height_(height),
      cells_(std::move(cells)),
      spawns_(spawns) {
  for (int i = 0; i < cell_count(); ++i) {
    if (cells_[i] == CellKind::Pot) pots_.push_back(pos_of(i));
  }
  for (std::size_t f = 0; f < kLayoutFamilies.size(); ++f) {
    if (kLayoutFamilies[f] == name_) family_ = static_cast<int>(f);
  }
}

std::optional<int> Layout::pot_index(Pos p) const {
  for (std::size_t i = 0; i < pots_.size(); ++i) {
    if (pots_[i] == p) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::string Layout::to_text() const {
  std::string out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const Pos p{x, y};
      if (p == spawns_[0]) {
        out.push_back('1');
      } else if (p == spawns_[1]) {
        out.push_back('2');
      } else {
        out.push_back(glyph(at(p)));
      }
    }
    out.push_back('\n');
  }
  return out;
}

void validate_layout(const Layout& layout) {
  const auto fail = [&](const std::string& what) {
    throw ValidationError("layout '" + layout.name() + "': " + what);
  };
  if (layout.width() < 3 || layout.height() < 3) fail("grid must be at least 3x3");

  for (int y = 0; y < layout.height(); ++y) {
    for (int x = 0; x < layout.width(); ++x) {
      const bool border = x == 0 || y == 0 || x == layout.width() - 1 || y == layout.height() - 1;
      if (border && layout.at({x, y}) == CellKind::Floor) {
        fail("grid is not enclosed: Floor on the border at (" + std::to_string(x) + "," +
             std::to_string(y) + ")");
      }
    }
  }

  const auto& spawns = layout.spawns();
  for (const Pos& s : spawns) {
    if (!layout.in_bounds(s) || layout.at(s) != CellKind::Floor) fail("spawn is not a Floor cell");
  }
  if (spawns[0] == spawns[1]) fail("spawn positions are not distinct");

  int tomatoes = 0, dishes = 0, deliveries = 0, pots = 0;
  for (int i = 0; i < layout.cell_count(); ++i) {
    switch (layout.at(layout.pos_of(i))) {
      case CellKind::TomatoStation: ++tomatoes; break;
      case CellKind::DishStation: ++dishes; break;
      case CellKind::Delivery: ++deliveries; break;
      case CellKind::Pot: ++pots; break;
      default: break;
    }
  }
  if (tomatoes < 1) fail("missing TomatoStation");
  if (dishes < 1) fail("missing DishStation");
  if (deliveries < 1) fail("missing Delivery");
  if (pots < 1 || pots > 2) fail("expected 1 or 2 Pots, found " + std::to_string(pots));

  // Flood fill from both spawns.
  std::vector<char> reachable(layout.cell_count(), 0);
  std::queue<Pos> frontier;
  for (const Pos& s : spawns) {
    if (!reachable[layout.index(s)]) {
      reachable[layout.index(s)] = 1;
      frontier.push(s);
    }
  }
  while (!frontier.empty()) {
    const Pos p = frontier.front();
    frontier.pop();
    for (const Pos& d : kNeighbours) {
      const Pos q = p + d;
      if (layout.in_bounds(q) && layout.at(q) == CellKind::Floor && !reachable[layout.index(q)]) {
        reachable[layout.index(q)] = 1;
        frontier.push(q);
      }
    }
  }
  for (int i = 0; i < layout.cell_count(); ++i) {
    const Pos p = layout.pos_of(i);
    const CellKind k = layout.at(p);
    if (k == CellKind::Floor || k == CellKind::Counter) continue;
    const bool ok = std::any_of(kNeighbours.begin(), kNeighbours.end(), [&](Pos d) {
      const Pos q = p + d;
      return layout.in_bounds(q) && reachable[layout.index(q)];
    });
    if (!ok) {
      fail(std::string(kind_name(k)) + " at (" + std::to_string(p.x) + "," + std::to_string(p.y) +
           ") is not adjacent to a reachable Floor cell");
    }
  }
}

LayoutPtr load_layout(std::string_view text, std::string name) {
  std::vector<std::string> rows;
  {
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      rows.push_back(line);
    }
    while (!rows.empty() && rows.back().empty()) rows.pop_back();
  }
  if (rows.empty()) throw ParseError("empty layout", 1, 1);

  const int width = static_cast<int>(rows[0].size());
  const int height = static_cast<int>(rows.size());
  std::vector<CellKind> cells(static_cast<std::size_t>(width) * height, CellKind::Floor);
  std::array<std::optional<Pos>, 2> spawns;

  for (int y = 0; y < height; ++y) {
    if (static_cast<int>(rows[y].size()) != width) {
      throw ParseError("layout is not rectangular (row width " + std::to_string(rows[y].size()) +
                           ", expected " + std::to_string(width) + ")",
                       y + 1, std::min<int>(width, static_cast<int>(rows[y].size())) + 1);
    }
    for (int x = 0; x < width; ++x) {
      CellKind kind;
      const char c = rows[y][x];
      switch (c) {
        case '#': kind = CellKind::Counter; break;
        case 'T': kind = CellKind::TomatoStation; break;
        case 'D': kind = CellKind::DishStation; break;
        case 'P': kind = CellKind::Pot; break;
        case 'X': kind = CellKind::Delivery; break;
        case '.': kind = CellKind::Floor; break;
        case '1':
        case '2': {
          kind = CellKind::Floor;
          auto& slot = spawns[c - '1'];
          if (slot) throw ParseError(std::string("duplicate spawn '") + c + "'", y + 1, x + 1);
          slot = Pos{x, y};
          break;
        }
        default:
          throw ParseError(std::string("unknown layout character '") + c + "'", y + 1, x + 1);
      }
      cells[static_cast<std::size_t>(y) * width + x] = kind;
    }
  }
  if (!spawns[0] || !spawns[1]) {
    throw ValidationError("layout '" + name + "': exactly 2 spawn positions are required");
  }
  auto layout = std::make_shared<Layout>(std::move(name), width, height, std::move(cells),
                                         std::array<Pos, 2>{*spawns[0], *spawns[1]});
  validate_layout(*layout);
  return layout;
}

LayoutPtr resolve_layout(std::string_view name, const std::string& search_dir) {
  try {
    return builtin_layout(name);
  } catch (const NotFound&) {
    if (search_dir.empty()) throw;
  }
  const auto path = std::filesystem::path(search_dir) / (std::string(name) + ".layout");
  std::ifstream in(path);
  if (!in) throw NotFound("unknown layout '" + std::string(name) + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_layout(ss.str(), std::string(name));
}

}  // namespace fcp::env
