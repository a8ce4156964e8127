#include "safelife/cell.hpp"

namespace safelife {

std::string_view kind_name(CellKind k) {
  switch (k) {
    case CellKind::kEmpty: return "empty";
    case CellKind::kLife: return "life";
    case CellKind::kHardLife: return "hard-life";
    case CellKind::kWall: return "wall";
    case CellKind::kCrate: return "crate";
    case CellKind::kTree: return "tree";
    case CellKind::kSpawner: return "spawner";
    case CellKind::kExit: return "exit";
  }
  return "unknown";
}

char kind_glyph(CellKind k) {
  switch (k) {
    case CellKind::kEmpty: return '.';
    case CellKind::kLife: return 'z';
    case CellKind::kHardLife: return 'Z';
    case CellKind::kWall: return '#';
    case CellKind::kCrate: return '%';
    case CellKind::kTree: return 'T';
    case CellKind::kSpawner: return 'S';
    case CellKind::kExit: return 'X';
  }
  return '?';
}

}  // namespace safelife
