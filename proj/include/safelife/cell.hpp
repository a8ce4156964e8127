#pragma once

#include <cstdint>
#include <string_view>

namespace safelife {

enum class CellKind : std::uint8_t {
  kEmpty = 0,
  kLife = 1,
  kHardLife = 2,
  kWall = 3,
  kCrate = 4,
  kTree = 5,
  kSpawner = 6,
  kExit = 7,
};

inline constexpr int kNumCellKinds = 8;

// Color is a 3-bit channel set. Yellow is red + green.
namespace color {
inline constexpr std::uint8_t kNone = 0;
inline constexpr std::uint8_t kRed = 1;
inline constexpr std::uint8_t kGreen = 2;
inline constexpr std::uint8_t kBlue = 4;
inline constexpr std::uint8_t kYellow = kRed | kGreen;
inline constexpr std::uint8_t kMask = 7;
}  // namespace color

enum class Goal : std::uint8_t {
  kNone = 0,
  kBlue = 1,
  kRedMarker = 2,
};

struct Cell {
  CellKind kind = CellKind::kEmpty;
  std::uint8_t color = color::kNone;

  friend constexpr bool operator==(const Cell&, const Cell&) = default;

  // One byte per cell: kind in the low nibble, color bits 4..6.
  [[nodiscard]] constexpr std::uint8_t pack() const {
    return static_cast<std::uint8_t>(static_cast<std::uint8_t>(kind) | (color << 4));
  }
  static constexpr bool unpack(std::uint8_t byte, Cell& out) {
    const std::uint8_t kind = byte & 0x0F;
    if (kind >= kNumCellKinds || (byte & 0x80) != 0) return false;
    out = Cell{static_cast<CellKind>(kind), static_cast<std::uint8_t>(byte >> 4)};
    return true;
  }
};

// Counts toward a neighbor's live total.
constexpr bool is_alive(CellKind k) {
  return k == CellKind::kLife || k == CellKind::kHardLife || k == CellKind::kTree;
}

// Subject to birth/death rules and to scoring.
constexpr bool is_life(CellKind k) {
  return k == CellKind::kLife || k == CellKind::kHardLife;
}

constexpr Cell life(std::uint8_t c) { return Cell{CellKind::kLife, c}; }
constexpr Cell make(CellKind k, std::uint8_t c = color::kNone) { return Cell{k, c}; }

std::string_view kind_name(CellKind k);
char kind_glyph(CellKind k);

}  // namespace safelife
