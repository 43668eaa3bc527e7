#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fcp::env {

enum class CellKind : std::uint8_t { Floor, Counter, TomatoStation, DishStation, Pot, Delivery };

struct Pos {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pos&, const Pos&) = default;
  friend auto operator<=>(const Pos&, const Pos&) = default;
  Pos operator+(const Pos& o) const { return {x + o.x, y + o.y}; }
  Pos operator-(const Pos& o) const { return {x - o.x, y - o.y}; }
};

inline int manhattan(Pos a, Pos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

// The five kitchens used for training and evaluation. Any other layout
// (tutorial, test fixtures) has no family and a zero layout one-hot.
inline constexpr std::array<std::string_view, 5> kLayoutFamilies = {
    "cramped", "asymmetric", "ring", "circuit", "forced"};

class Layout {
 public:
  Layout(std::string name, int width, int height, std::vector<CellKind> cells,
         std::array<Pos, 2> spawns);

  const std::string& name() const { return name_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::array<Pos, 2>& spawns() const { return spawns_; }

  bool in_bounds(Pos p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
  CellKind at(Pos p) const { return cells_[index(p)]; }
  int index(Pos p) const { return p.y * width_ + p.x; }
  Pos pos_of(int index) const { return {index % width_, index / width_}; }
  int cell_count() const { return width_ * height_; }

  // Pot cells in row-major order; a pot's slot in WorldState::pots is its
  // position in this list.
  const std::vector<Pos>& pots() const { return pots_; }
  std::optional<int> pot_index(Pos p) const;

  // Index into kLayoutFamilies, when the name is one of the five kitchens.
  std::optional<int> family() const { return family_; }

  // ASCII text this layout was parsed from (regenerated, canonical).
  std::string to_text() const;

 private:
  std::string name_;
  int width_;
  int height_;
  std::vector<CellKind> cells_;
  std::array<Pos, 2> spawns_;
  std::vector<Pos> pots_;
  std::optional<int> family_;
};

using LayoutPtr = std::shared_ptr<const Layout>;

// Parses the ASCII legend (`#` Counter, `T` TomatoStation, `D` DishStation,
// `P` Pot, `X` Delivery, `.` Floor, `1`/`2` spawns on Floor) and validates the
// result. Throws ParseError (with line/column) or ValidationError.
LayoutPtr load_layout(std::string_view text, std::string name);

// Checks every structural invariant; throws ValidationError naming the first
// violated one.
void validate_layout(const Layout& layout);

// Layouts shipped with the library, by name: the five kitchens plus
// "tutorial". Throws NotFound for unknown names.
LayoutPtr builtin_layout(std::string_view name);
std::vector<std::string> builtin_layout_names();

// Resolves a name against the built-in set, then `<dir>/<name>.layout`.
LayoutPtr resolve_layout(std::string_view name, const std::string& search_dir = "");

}  // namespace fcp::env
