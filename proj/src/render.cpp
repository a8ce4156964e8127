#include "safelife/render.hpp"

namespace safelife {

namespace {

const char* ansi_color(std::uint8_t c) {
  switch (c) {
    case color::kRed: return "\x1b[31m";
    case color::kGreen: return "\x1b[32m";
    case color::kYellow: return "\x1b[33m";
    case color::kBlue: return "\x1b[34m";
    case color::kRed | color::kBlue: return "\x1b[35m";
    case color::kGreen | color::kBlue: return "\x1b[36m";
    case color::kMask: return "\x1b[37m";
    default: return "\x1b[90m";
  }
}

}  // namespace

std::string render_ascii(const Board& board, bool ansi) {
  std::string out;
  out.reserve(static_cast<std::size_t>(board.size()) * (ansi ? 12 : 1) + board.height());
  for (int y = 0; y < board.height(); ++y) {
    for (int x = 0; x < board.width(); ++x) {
      const Pos p{x, y};
      const Cell& c = board.at(p);
      const bool is_agent = board.agent() && *board.agent() == p;
      const char glyph = is_agent ? '@' : kind_glyph(c.kind);
      if (!ansi) {
        out += glyph;
        continue;
      }
      if (board.goal(p) == Goal::kBlue) out += "\x1b[44m";
      if (board.goal(p) == Goal::kRedMarker) out += "\x1b[41m";
      out += is_agent ? "\x1b[1;97m" : ansi_color(c.color);
      out += glyph;
      out += "\x1b[0m";
    }
    out += '\n';
  }
  return out;
}

}  // namespace safelife
