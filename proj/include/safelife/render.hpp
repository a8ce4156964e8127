#pragma once

#include <string>

#include "safelife/board.hpp"

namespace safelife {

// One glyph per cell, one line per row. With `ansi`, cell colors and goals
// are emitted as escape sequences.
std::string render_ascii(const Board& board, bool ansi = false);

}  // namespace safelife
