#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fcp/env/world.hpp"

namespace fcp::env {

// Feature vector layout, in order:
//   [0,2)   own position (x, y)
//   [2,6)   orientation one-hot (up, down, left, right)
//   [6,10)  held item one-hot (none, tomato, dish, soup)
//   [10,12) partner position relative to self (dx, dy)
//   [12,22) per-pot one-hot (empty, 1, 2, 3 tomatoes, cooked) for two pot
//           slots; a missing second pot is all zeros
//   [22,23) faced cell empty
//   [23,27) adjacent cells empty (up, down, left, right)
//   [27,35) offsets (dx, dy) to nearest tomato, dish, soup, delivery
//   [35,40) layout one-hot over kLayoutFamilies
// "Empty" means Floor not occupied by the partner. Tomato and dish sources
// include items lying on counters. The soup target is the nearest Ready pot
// or Soup on a counter, falling back to the nearest pot while none is ready.
// Absent targets give (0, 0).
namespace feature {
inline constexpr std::size_t kPosition = 0;
inline constexpr std::size_t kOrientation = 2;
inline constexpr std::size_t kHeld = 6;
inline constexpr std::size_t kPartner = 10;
inline constexpr std::size_t kPots = 12;
inline constexpr std::size_t kPotWidth = 5;
inline constexpr std::size_t kMaxPots = 2;
inline constexpr std::size_t kFacedEmpty = 22;
inline constexpr std::size_t kAdjacentEmpty = 23;
inline constexpr std::size_t kTargets = 27;
inline constexpr std::size_t kLayout = 35;
inline constexpr std::size_t kSize = 40;
}  // namespace feature

using FeatureVector = std::array<float, feature::kSize>;

FeatureVector feature_observation(const WorldState& state, int player);

// 7x7 egocentric symbolic window, rotated so the observer faces up.
namespace ego {
inline constexpr int kRadius = 3;
inline constexpr int kSide = 2 * kRadius + 1;
enum Channel : int {
  kOutOfBounds,
  kFloor,
  kCounter,
  kTomatoStation,
  kDishStation,
  kPot,
  kDelivery,
  kSelf,
  kPartner,
  kTomatoItem,
  kDishItem,
  kSoupItem,
  kPotOneTomato,
  kPotTwoTomatoes,
  kPotCooking,
  kPotReady,
  kNumChannels,
};
}  // namespace ego

struct SymbolicWindow {
  // Row-major [row][col][channel]; row 0 is ahead of the observer.
  std::vector<std::uint8_t> data =
      std::vector<std::uint8_t>(ego::kSide * ego::kSide * ego::kNumChannels, 0);

  std::uint8_t at(int row, int col, int channel) const {
    return data[(row * ego::kSide + col) * ego::kNumChannels + channel];
  }
  std::uint8_t& at(int row, int col, int channel) {
    return data[(row * ego::kSide + col) * ego::kNumChannels + channel];
  }
  friend bool operator==(const SymbolicWindow&, const SymbolicWindow&) = default;
};

SymbolicWindow egocentric_observation(const WorldState& state, int player);

}  // namespace fcp::env
